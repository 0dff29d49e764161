#pragma once

// Suite configuration, per-check records and reports, the model registry and
// suite dispatch used by the command-line tool and the acceptance binary.

#include "sfindex/cocycle.hpp"
#include "sfindex/models.hpp"
#include "sfindex/torus.hpp"

#include <chrono>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace sfindex {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CheckRecord {
  std::string check_id;
  std::string anchor;  // the identity being checked
  double lhs = 0.0;
  double rhs = 0.0;
  double abs_err = 0.0;
  double tol = 0.0;
  bool pass = false;
  double seconds = 0.0;
  std::string note;
};

// Collects records. `seconds` of a record is the time since the previous
// record (or since construction / the last mark()).
class Recorder {
 public:
  explicit Recorder(std::optional<double> tol_override = std::nullopt);

  // |lhs - rhs| <= tol.
  void close(const std::string& id, const std::string& anchor, double lhs, double rhs, double tol,
             const std::string& note = "");
  // lhs <= rhs + tol; abs_err = max(0, lhs - rhs).
  void at_most(const std::string& id, const std::string& anchor, double lhs, double rhs, double tol,
               const std::string& note = "");
  // Boolean check recorded as lhs = 1/0 against rhs = 1.
  void holds(const std::string& id, const std::string& anchor, bool ok, const std::string& note = "");
  // Runs body; an exception becomes a failed record with the message as note.
  void guard(const std::string& id, const std::string& anchor, const std::function<void()>& body);

  void mark();
  const std::vector<CheckRecord>& records() const { return records_; }
  std::vector<CheckRecord> take();

 private:
  void push(CheckRecord r);
  double tol(double t) const { return tol_override_ ? *tol_override_ : t; }

  std::optional<double> tol_override_;
  std::vector<CheckRecord> records_;
  std::chrono::steady_clock::time_point last_;
};

struct ReportCounts {
  int total = 0;
  int passed = 0;
  int failed = 0;
};

struct Report {
  std::string suite;
  std::string model;
  std::uint64_t seed = 0;
  std::vector<CheckRecord> records;
  double seconds = 0.0;

  ReportCounts counts() const;
  bool all_pass() const { return counts().failed == 0 && !records.empty(); }
};

// One JSON object per line, one line per record.
void write_records(std::ostream& os, const std::vector<CheckRecord>& records);
void write_summary(std::ostream& os, const Report& r);
std::vector<CheckRecord> read_records(std::istream& is);

const std::vector<std::string>& suite_ids();
const std::vector<std::string>& model_kinds();

struct SuiteConfig {
  std::string suite;
  std::string model;  // "" picks the suite default
  std::map<std::string, std::string> params;
  std::uint64_t seed = 1;
  std::optional<double> tol;  // replaces every check tolerance
  int threads = 1;
  std::string out_dir;  // empty: no files written
  // Absolute tolerance of the s-quadrature in a(w) and the key identity.
  double quad_abs_tol = 1e-10;

  // Throws ConfigError.
  void validate() const;
};

// INI text: [suite] name, seed, tol, threads, out, quad_abs_tol;
// [model] id; [params] key = value.
SuiteConfig load_config(const std::string& path);
SuiteConfig parse_config(std::istream& is);

// Model ids: random-even[:seed], weighted-even, circle, torus.
// Parameters: random-even max_dim (6), blocks (2), q (1);
// weighted-even k1 (1), k2 (1); circle cutoff (8); torus lambda (24), mass (1).
struct ModelInstance {
  std::string id;
  std::string kind;
  std::optional<EvenModel> matrix;
  std::optional<CircleModel> circle;
  std::optional<TorusModel> torus;
};

ModelInstance build_model(const std::string& id, const std::map<std::string, std::string>& params,
                          std::uint64_t seed);

// Pairing records for one model: residue pairing against the kernel-count
// index (matrix tau_j for matrix models, Mellin tau_j for circle and torus).
void pair_model(Recorder& rec, const ModelInstance& m);

// b-words are factors joined by '*': 1, gamma, p, q (= 2p-1), dp (= [D,p]),
// g<i> (generator i, matrix and circle models); a trailing ' takes the
// adjoint. Torus words may use 1, gamma, p, q, dp only.
LaurentData model_laurent(const ModelInstance& m, const std::string& b_word, double offset, int depth,
                          const MellinSpec& spec = {});

// Residue table rows with 2N = 2; the torus uses its dense realization, so
// keep lambda small there.
std::vector<ResidueRow> model_residue_table(const ModelInstance& m, const std::vector<double>& r_grid);

// Executes the suite, writes <out_dir>/<suite>.jsonl and <suite>.txt when
// out_dir is set, and returns the report. Build failures inside checks are
// failed records; an invalid config throws ConfigError.
Report run_suite(const SuiteConfig& config);

// Parses "a,b,c" or "lo:hi:n" (n points, endpoints included).
std::vector<double> parse_grid(const std::string& spec);

}  // namespace sfindex
