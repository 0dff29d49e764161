// sfindex: run verification suites and evaluate pairings, zeta data and
// residue tables of the built-in models.
//
// Exit status: 0 all checks pass, 1 some check failed, 2 configuration or
// build error.

#include "sfindex/harness.hpp"
#include "sfindex/quadrature.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

using namespace sfindex;

namespace {

std::map<std::string, std::string> parse_params(const std::vector<std::string>& kv) {
  std::map<std::string, std::string> out;
  for (const auto& s : kv) {
    const auto eq = s.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError("parameter '" + s + "' is not key=value");
    out[s.substr(0, eq)] = s.substr(eq + 1);
  }
  return out;
}

// Writes to <out>/<name> when out is set, else to stdout.
template <class F>
void emit(const std::string& out, const std::string& name, F&& body) {
  if (out.empty()) {
    body(std::cout);
    return;
  }
  std::filesystem::create_directories(out);
  std::ofstream f(std::filesystem::path(out) / name);
  if (!f) throw ConfigError("cannot write to '" + out + "'");
  body(f);
}

std::string file_safe(std::string s) {
  for (char& c : s)
    if (c == ':' || c == '=' || c == ',' || c == '/') c = '_';
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical checks of the even semifinite local index formula"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path, out_dir;
  std::uint64_t seed = 1;
  double tol = 0.0;
  int threads = 0;
  app.add_option("--config", config_path, "INI file with [suite], [model] and [params] sections")
      ->check(CLI::ExistingFile);
  app.add_option("--seed", seed, "Random seed (default 1)");
  app.add_option("--tol", tol, "Replace every check tolerance by this value");
  app.add_option("--threads", threads, "Worker threads (default SFINDEX_THREADS, else 1)");
  app.add_option("--out", out_dir, "Directory for reports and tables (default: stdout only)");

  std::string suite;
  auto* verify = app.add_subcommand("verify", "Run a suite: fredholm, mckean-singer, doubling, psido, cocycle, zeta, "
                                              "index-theorem");
  verify->add_option("suite", suite, "Suite id");
  std::string model;
  std::vector<std::string> params;
  verify->add_option("--model", model, "Model id (index-theorem default torus; others random-even)");
  verify->add_option("--param", params, "Model or suite parameter key=value, repeatable");

  auto* pair = app.add_subcommand("pair", "Residue pairing against the kernel-count index for one model");
  pair->add_option("--model", model, "random-even[:seed], weighted-even, circle or torus")->required();
  pair->add_option("--param", params, "Model parameter key=value: max_dim, blocks, q, k1, k2, cutoff, lambda, mass");

  std::string b_word;
  double offset = 0.0;
  int depth = 1;
  auto* zeta = app.add_subcommand("zeta", "Laurent data of tau(b (1+D^2)^{-z-offset}) at z = 0 as one JSON record");
  zeta->add_option("--model", model, "Model id")->required();
  zeta->add_option("--b-word", b_word, "Factors joined by '*': 1 gamma p q dp g<i>, trailing ' for adjoints")
      ->required();
  zeta->add_option("--offset", offset, "Power offset (default 0)");
  zeta->add_option("--depth", depth, "Pole order J of the Laurent window (default 1)");
  zeta->add_option("--param", params, "Model parameter key=value");

  std::string r_grid = "0.75,1,1.5";
  auto* table = app.add_subcommand("table", "Residue table r, pairing_sum, remainder, c_norm, ratio as CSV");
  table->add_option("--model", model, "Model id")->required();
  table->add_option("--r-grid", r_grid, "Comma list or lo:hi:n (default 0.75,1,1.5)");
  table->add_option("--param", params, "Model parameter key=value");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (threads > 0) set_num_threads(threads);
    const auto kv = parse_params(params);

    if (*verify) {
      SuiteConfig c;
      if (!config_path.empty()) c = load_config(config_path);
      if (!suite.empty()) c.suite = suite;
      if (!model.empty()) c.model = model;
      for (const auto& [k, v] : kv) c.params[k] = v;
      if (app.count("--seed")) c.seed = seed;
      if (app.count("--tol")) c.tol = tol;
      if (threads > 0) c.threads = threads;
      else if (config_path.empty()) c.threads = num_threads();
      if (!out_dir.empty()) c.out_dir = out_dir;
      if (c.suite.empty()) throw ConfigError("verify needs a suite id");
      const Report r = run_suite(c);
      write_summary(std::cout, r);
      return r.all_pass() ? 0 : 1;
    }

    const ModelInstance m = build_model(model, kv, seed);

    if (*pair) {
      Recorder rec(app.count("--tol") ? std::optional<double>(tol) : std::nullopt);
      pair_model(rec, m);
      Report r;
      r.suite = "pair";
      r.model = m.id;
      r.seed = seed;
      r.records = rec.take();
      emit(out_dir, "pair_" + file_safe(m.id) + ".jsonl", [&](std::ostream& os) { write_records(os, r.records); });
      write_summary(out_dir.empty() ? std::cerr : std::cout, r);
      return r.all_pass() ? 0 : 1;
    }

    if (*zeta) {
      const LaurentData d = model_laurent(m, b_word, offset, depth);
      emit(out_dir, "zeta_" + file_safe(m.id) + ".json", [&](std::ostream& os) { write_laurent(os, d); });
      return 0;
    }

    if (*table) {
      const auto rows = model_residue_table(m, parse_grid(r_grid));
      emit(out_dir, "table_" + file_safe(m.id) + ".csv", [&](std::ostream& os) { write_residue_table(os, rows); });
      return 0;
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 2;
}
