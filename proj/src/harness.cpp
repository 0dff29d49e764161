#include "sfindex/harness.hpp"

#include "sfindex/quadrature.hpp"
#include "sfindex/suites.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace sfindex {

namespace {

using Clock = std::chrono::steady_clock;

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const double x = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ConfigError("parameter '" + key + "' is not a number: '" + v + "'");
  }
}

int to_int(const std::string& key, const std::string& v) {
  const double x = to_double(key, v);
  if (x != std::floor(x) || std::abs(x) > 1e9) throw ConfigError("parameter '" + key + "' is not an integer: '" + v + "'");
  return static_cast<int>(x);
}

double param(const std::map<std::string, std::string>& p, const std::string& key, double fallback) {
  auto it = p.find(key);
  return it == p.end() ? fallback : to_double(key, it->second);
}

int iparam(const std::map<std::string, std::string>& p, const std::string& key, int fallback) {
  auto it = p.find(key);
  return it == p.end() ? fallback : to_int(key, it->second);
}

std::string model_kind(const std::string& id) { return id.substr(0, id.find(':')); }

const std::map<std::string, std::vector<std::string>>& model_params() {
  static const std::map<std::string, std::vector<std::string>> m = {
      {"random-even", {"max_dim", "blocks", "q"}},
      {"weighted-even", {"k1", "k2"}},
      {"circle", {"cutoff"}},
      {"torus", {"lambda", "mass"}}};
  return m;
}

// Suite-level parameters accepted in [params] besides the model ones.
const std::vector<std::string>& suite_params() {
  static const std::vector<std::string> v = {"instances", "stability", "hard", "torus"};
  return v;
}

std::string default_model(const std::string& suite) {
  if (suite == "index-theorem") return "torus";
  return "random-even";
}

}  // namespace

Recorder::Recorder(std::optional<double> tol_override) : tol_override_(tol_override), last_(Clock::now()) {}

void Recorder::push(CheckRecord r) {
  const auto now = Clock::now();
  r.seconds = std::chrono::duration<double>(now - last_).count();
  last_ = now;
  records_.push_back(std::move(r));
}

void Recorder::close(const std::string& id, const std::string& anchor, double lhs, double rhs, double t,
                     const std::string& note) {
  CheckRecord r{id, anchor, lhs, rhs, std::abs(lhs - rhs), tol(t), false, 0.0, note};
  r.pass = std::isfinite(r.abs_err) && r.abs_err <= r.tol;
  push(std::move(r));
}

void Recorder::at_most(const std::string& id, const std::string& anchor, double lhs, double rhs, double t,
                       const std::string& note) {
  CheckRecord r{id, anchor, lhs, rhs, std::max(0.0, lhs - rhs), tol(t), false, 0.0, note};
  r.pass = std::isfinite(lhs) && r.abs_err <= r.tol;
  push(std::move(r));
}

void Recorder::holds(const std::string& id, const std::string& anchor, bool ok, const std::string& note) {
  CheckRecord r{id, anchor, ok ? 1.0 : 0.0, 1.0, ok ? 0.0 : 1.0, 0.0, ok, 0.0, note};
  push(std::move(r));
}

void Recorder::guard(const std::string& id, const std::string& anchor, const std::function<void()>& body) {
  try {
    body();
  } catch (const std::exception& e) {
    CheckRecord r{id, anchor, NAN, NAN, INFINITY, 0.0, false, 0.0, std::string("error: ") + e.what()};
    push(std::move(r));
  }
}

void Recorder::mark() { last_ = Clock::now(); }

std::vector<CheckRecord> Recorder::take() {
  std::vector<CheckRecord> out;
  out.swap(records_);
  return out;
}

ReportCounts Report::counts() const {
  ReportCounts c;
  c.total = static_cast<int>(records.size());
  c.passed = static_cast<int>(std::count_if(records.begin(), records.end(), [](const auto& r) { return r.pass; }));
  c.failed = c.total - c.passed;
  return c;
}

namespace {

// JSON has no NaN or infinity; those become null.
nlohmann::json num(double x) { return std::isfinite(x) ? nlohmann::json(x) : nlohmann::json(nullptr); }
double from_num(const nlohmann::json& j, double missing) { return j.is_null() ? missing : j.get<double>(); }

}  // namespace

void write_records(std::ostream& os, const std::vector<CheckRecord>& records) {
  for (const auto& r : records) {
    nlohmann::ordered_json j;
    j["check_id"] = r.check_id;
    j["anchor"] = r.anchor;
    j["lhs"] = num(r.lhs);
    j["rhs"] = num(r.rhs);
    j["abs_err"] = num(r.abs_err);
    j["tol"] = r.tol;
    j["pass"] = r.pass;
    j["seconds"] = r.seconds;
    if (!r.note.empty()) j["note"] = r.note;
    os << j.dump() << '\n';
  }
}

std::vector<CheckRecord> read_records(std::istream& is) {
  std::vector<CheckRecord> out;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto j = nlohmann::json::parse(line);
    CheckRecord r;
    r.check_id = j.at("check_id").get<std::string>();
    r.anchor = j.at("anchor").get<std::string>();
    r.lhs = from_num(j.at("lhs"), NAN);
    r.rhs = from_num(j.at("rhs"), NAN);
    r.abs_err = from_num(j.at("abs_err"), INFINITY);
    r.tol = j.at("tol").get<double>();
    r.pass = j.at("pass").get<bool>();
    r.seconds = j.at("seconds").get<double>();
    r.note = j.value("note", "");
    out.push_back(std::move(r));
  }
  return out;
}

void write_summary(std::ostream& os, const Report& r) {
  const ReportCounts c = r.counts();
  os << "suite " << r.suite << "  model " << r.model << "  seed " << r.seed << '\n';
  os << c.passed << "/" << c.total << " checks passed in " << std::fixed << std::setprecision(2) << r.seconds
     << " s\n";
  os.unsetf(std::ios::floatfield);
  for (const auto& rec : r.records)
    if (!rec.pass)
      os << "FAIL " << rec.check_id << "  [" << rec.anchor << "]  |" << rec.lhs << " - " << rec.rhs
         << "| = " << rec.abs_err << " > " << rec.tol << (rec.note.empty() ? "" : "  (" + rec.note + ")") << '\n';
}

const std::vector<std::string>& suite_ids() {
  static const std::vector<std::string> ids = {"fredholm", "mckean-singer", "doubling", "psido",
                                               "cocycle",  "zeta",          "index-theorem"};
  return ids;
}

const std::vector<std::string>& model_kinds() {
  static const std::vector<std::string> k = {"random-even", "weighted-even", "circle", "torus"};
  return k;
}

void SuiteConfig::validate() const {
  if (std::find(suite_ids().begin(), suite_ids().end(), suite) == suite_ids().end())
    throw ConfigError("unknown suite '" + suite + "'");
  const std::string kind = model_kind(model.empty() ? default_model(suite) : model);
  if (std::find(model_kinds().begin(), model_kinds().end(), kind) == model_kinds().end())
    throw ConfigError("unknown model '" + model + "'");
  if (kind != "random-even" && model.find(':') != std::string::npos)
    throw ConfigError("model '" + kind + "' takes no ':' suffix");
  if (tol && !(*tol > 0.0)) throw ConfigError("tolerance must be positive");
  if (!(quad_abs_tol > 0.0)) throw ConfigError("quad_abs_tol must be positive");
  if (threads < 1) throw ConfigError("threads must be >= 1");
  const auto& allowed = model_params().at(kind);
  for (const auto& [k, v] : params) {
    const bool known = std::find(allowed.begin(), allowed.end(), k) != allowed.end() ||
                       std::find(suite_params().begin(), suite_params().end(), k) != suite_params().end();
    if (!known) throw ConfigError("parameter '" + k + "' does not apply to model '" + kind + "'");
    to_double(k, v);
  }
}

SuiteConfig parse_config(std::istream& is) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    pt::read_ini(is, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
  SuiteConfig c;
  for (const auto& [section, body] : tree) {
    if (body.empty() && !body.data().empty()) throw ConfigError("key '" + section + "' outside a section");
    if (section == "suite") {
      for (const auto& [k, v] : body) {
        const std::string s = v.data();
        if (k == "name") c.suite = s;
        else if (k == "seed") c.seed = static_cast<std::uint64_t>(to_int(k, s));
        else if (k == "tol") c.tol = to_double(k, s);
        else if (k == "threads") c.threads = to_int(k, s);
        else if (k == "out") c.out_dir = s;
        else if (k == "quad_abs_tol") c.quad_abs_tol = to_double(k, s);
        else throw ConfigError("unknown key '" + k + "' in [suite]");
      }
    } else if (section == "model") {
      for (const auto& [k, v] : body) {
        if (k == "id") c.model = v.data();
        else throw ConfigError("unknown key '" + k + "' in [model]");
      }
    } else if (section == "params") {
      for (const auto& [k, v] : body) c.params[k] = v.data();
    } else {
      throw ConfigError("unknown section [" + section + "]");
    }
  }
  if (c.suite.empty()) throw ConfigError("config needs [suite] name");
  c.validate();
  return c;
}

SuiteConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config '" + path + "'");
  return parse_config(in);
}

ModelInstance build_model(const std::string& id, const std::map<std::string, std::string>& params,
                          std::uint64_t seed) {
  ModelInstance m;
  m.kind = model_kind(id);
  if (m.kind == "random-even") {
    if (const auto colon = id.find(':'); colon != std::string::npos)
      seed = static_cast<std::uint64_t>(to_int("seed", id.substr(colon + 1)));
    std::mt19937_64 rng(seed);
    RandomEvenOptions opt = random_even_options(rng, iparam(params, "max_dim", 6), iparam(params, "blocks", 2));
    opt.q = param(params, "q", 1.0);
    m.matrix = build_random_even(seed, opt);
    m.id = "random-even:" + std::to_string(seed);
  } else if (m.kind == "weighted-even") {
    const int k1 = iparam(params, "k1", 1), k2 = iparam(params, "k2", 1);
    m.matrix = build_weighted_even(seed, k1, k2);
    m.id = "weighted-even:" + std::to_string(k1) + "," + std::to_string(k2);
  } else if (m.kind == "circle") {
    m.circle = build_circle_even(iparam(params, "cutoff", 8));
    m.id = "circle:" + std::to_string(m.circle->cutoff);
  } else if (m.kind == "torus") {
    m.torus = build_torus(iparam(params, "lambda", 24), param(params, "mass", 1.0));
    m.id = m.torus->id;
  } else {
    throw ConfigError("unknown model '" + id + "'");
  }
  return m;
}

std::vector<double> parse_grid(const std::string& spec) {
  std::vector<double> out;
  if (const auto c1 = spec.find(':'); c1 != std::string::npos) {
    const auto c2 = spec.find(':', c1 + 1);
    if (c2 == std::string::npos) throw ConfigError("grid 'lo:hi:n' needs three fields");
    const double lo = to_double("grid", spec.substr(0, c1)), hi = to_double("grid", spec.substr(c1 + 1, c2 - c1 - 1));
    const int n = to_int("grid", spec.substr(c2 + 1));
    if (n < 1) throw ConfigError("grid needs n >= 1");
    for (int i = 0; i < n; ++i) out.push_back(n == 1 ? lo : lo + (hi - lo) * i / (n - 1));
  } else {
    std::stringstream ss(spec);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(to_double("grid", item));
  }
  if (out.empty()) throw ConfigError("empty grid");
  return out;
}

namespace {

std::vector<std::string> split_word(const std::string& w) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : w) {
    if (c == '*') {
      out.push_back(cur);
      cur.clear();
    } else if (!std::isspace(static_cast<unsigned char>(c))) {
      cur += c;
    }
  }
  out.push_back(cur);
  for (const auto& t : out)
    if (t.empty()) throw ConfigError("empty factor in b-word '" + w + "'");
  return out;
}

BlockOperator word_operator(const EvenTriple& t, const BlockOperator& p, const std::string& w) {
  BlockOperator b = t.one();
  for (std::string tok : split_word(w)) {
    bool adj = false;
    if (tok.back() == '\'') {
      adj = true;
      tok.pop_back();
    }
    BlockOperator f;
    if (tok == "1") f = t.one();
    else if (tok == "gamma") f = t.gamma;
    else if (tok == "p") f = p;
    else if (tok == "q") f = 2.0 * p - t.one();
    else if (tok == "dp") f = commutator(t, p);
    else if (tok.size() > 1 && tok[0] == 'g') {
      const int i = to_int("b-word", tok.substr(1));
      if (i < 0 || i >= static_cast<int>(t.generators.size()))
        throw ConfigError("generator index out of range in '" + tok + "'");
      f = t.generators[i];
    } else {
      throw ConfigError("unknown b-word factor '" + tok + "'");
    }
    b = b * (adj ? f.adjoint() : f);
  }
  return b;
}

Mat torus_word_mean(const TorusModel& t, const std::string& w) {
  const TorusSymbol p = torus_projection(t);
  TorusSymbol ones(t.grid, 2);
  for (auto& v : ones.values) v = Mat::Identity(2, 2);
  TorusSymbol b(t.grid, 4);
  for (auto& v : b.values) v = Mat::Identity(4, 4);
  for (std::string tok : split_word(w)) {
    bool adj = false;
    if (tok.back() == '\'') {
      adj = true;
      tok.pop_back();
    }
    TorusSymbol f;
    if (tok == "1") f = spin_lift(ones);
    else if (tok == "gamma") f = spin_lift(ones, pauli(3));
    else if (tok == "p") f = spin_lift(p);
    else if (tok == "q") f = spin_lift(p.scaled(2.0) + ones.scaled(-1.0));
    else if (tok == "dp") f = dirac_commutator(p);
    else throw ConfigError("unknown torus b-word factor '" + tok + "'");
    if (adj)
      for (auto& v : f.values) v = v.adjoint().eval();
    b = b * f;
  }
  return b.mean();
}

HeatTrace matrix_heat_trace(const EvenModel& m, const BlockOperator& b, const std::string& word) {
  const EigenDecomp e = herm_eig(hermitian_part(m.triple.D));
  return {m.id, word, [b, e](double t) { return trace_with_function(b, e, [t](double x) { return cplx(std::exp(-t * x * x)); }); },
          {0, 1, 2, 3, 4, 5, 6, 7, 8}};
}

}  // namespace

void pair_model(Recorder& rec, const ModelInstance& m) {
  if (m.torus) {
    checks::torus_index(rec, m.torus->cutoff, m.torus->mass, false, false);
  } else if (m.circle) {
    checks::circle(rec, m.circle->cutoff);
  } else {
    const EvenModel& e = *m.matrix;
    rec.guard("pair." + m.id, "Ind(pD+p) = sum_m phi_m(Ch_m(p))", [&] {
      const auto [res, ind] = zeta_sum_residue_check(e.triple, e.p, 2, matrix_tau_provider(e.triple));
      rec.close("pair." + m.id, "Ind(pD+p) = sum_m phi_m(Ch_m(p))", res, ind, 1e-10);
      rec.close("pair.constructed." + m.id, "Ind(pD+p) by kernel count", ind, e.index, 1e-10);
    });
  }
}

LaurentData model_laurent(const ModelInstance& m, const std::string& b_word, double offset, int depth,
                          const MellinSpec& spec) {
  if (m.torus) {
    HeatTrace h = torus_heat_trace(*m.torus, torus_word_mean(*m.torus, b_word), b_word);
    return mellin_continuation(h, offset, 2.0, depth, spec);
  }
  if (m.circle) {
    const BlockOperator b = word_operator(m.circle->triple, m.circle->p, b_word);
    return mellin_continuation(circle_heat_trace(*m.circle, b, b_word), offset, m.circle->triple.q, depth, spec);
  }
  const EvenModel& e = *m.matrix;
  HeatTrace h = matrix_heat_trace(e, word_operator(e.triple, e.p, b_word), b_word);
  h.model_id = m.id;
  return mellin_continuation(h, offset, e.triple.q, depth, spec);
}

std::vector<ResidueRow> model_residue_table(const ModelInstance& m, const std::vector<double>& r_grid) {
  if (m.torus) return residue_table(torus_dense_triple(*m.torus), torus_dense_projection(*m.torus), r_grid, 2);
  if (m.circle) return residue_table(m.circle->triple, m.circle->p, r_grid, 2);
  return residue_table(m.matrix->triple, m.matrix->p, r_grid, 2);
}

Report run_suite(const SuiteConfig& config) {
  config.validate();
  set_num_threads(config.threads);
  const auto start = Clock::now();
  Recorder rec(config.tol);
  const auto& p = config.params;
  const std::uint64_t seed = config.seed;
  const int n = iparam(p, "instances", -1);
  auto count = [&](int fallback) { return n > 0 ? n : fallback; };
  const std::string model = config.model.empty() ? default_model(config.suite) : config.model;
  const std::string kind = model_kind(model);
  const std::string& s = config.suite;

  if (s == "fredholm") {
    checks::additivity(rec, seed, count(200));
    checks::transform(rec, seed + 1, count(100), count(50));
  } else if (s == "mckean-singer") {
    checks::mckean_singer(rec, seed, count(100));
    checks::compressed_ms(rec, seed + 1, count(50));
  } else if (s == "doubling") {
    checks::doubling(rec, seed, count(20), config.quad_abs_tol);
  } else if (s == "psido") {
    checks::expansions(rec, seed);
    checks::integrals(rec, seed + 1, count(20));
    checks::constants(rec);
  } else if (s == "cocycle") {
    checks::cocycle_bB(rec, seed, count(3), iparam(p, "torus", 1) != 0);
    checks::residue_table(rec, seed + 1, count(10));
  } else if (s == "zeta") {
    checks::zeta(rec, seed);
  } else if (s == "index-theorem") {
    if (kind == "torus") {
      checks::torus_index(rec, iparam(p, "lambda", 24), param(p, "mass", 1.0), iparam(p, "stability", 1) != 0,
                          iparam(p, "hard", 1) != 0);
    } else if (kind == "circle") {
      checks::circle(rec, iparam(p, "cutoff", 8));
    } else {
      checks::matrix_residue(rec, seed, count(10));
    }
  }

  Report r;
  r.suite = s;
  r.model = model;
  r.seed = seed;
  r.records = rec.take();
  r.seconds = std::chrono::duration<double>(Clock::now() - start).count();
  if (!config.out_dir.empty()) {
    std::filesystem::create_directories(config.out_dir);
    std::ofstream jl(std::filesystem::path(config.out_dir) / (s + ".jsonl"));
    write_records(jl, r.records);
    std::ofstream txt(std::filesystem::path(config.out_dir) / (s + ".txt"));
    write_summary(txt, r);
  }
  return r;
}

}  // namespace sfindex
