#include <doctest.h>

#include "sfindex/harness.hpp"
#include "sfindex/suites.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

using namespace sfindex;

namespace {

SuiteConfig parse(const std::string& text) {
  std::istringstream is(text);
  return parse_config(is);
}

// Exit status of the command-line tool.
int run_cli(const std::string& args) {
  const std::string cmd = std::string(SFINDEX_CLI) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::filesystem::path temp_dir(const std::string& name) {
  const auto d = std::filesystem::temp_directory_path() / ("sfindex_test_" + name);
  std::filesystem::remove_all(d);
  std::filesystem::create_directories(d);
  return d;
}

}  // namespace

TEST_CASE("config parsing and validation") {
  const SuiteConfig c = parse(
      "[suite]\nname = cocycle\nseed = 7\ntol = 1e-6\nthreads = 1\n[model]\nid = random-even:3\n"
      "[params]\nmax_dim = 4\ninstances = 2\n");
  CHECK(c.suite == "cocycle");
  CHECK(c.seed == 7);
  REQUIRE(c.tol.has_value());
  CHECK(*c.tol == 1e-6);
  CHECK(c.model == "random-even:3");
  CHECK(c.params.at("max_dim") == "4");

  CHECK_THROWS_AS(parse("[suite]\nname = nope\n"), ConfigError);
  CHECK_THROWS_AS(parse("[suite]\nname = zeta\ntol = -1\n"), ConfigError);
  CHECK_THROWS_AS(parse("[suite]\nname = zeta\ntol = 0\n"), ConfigError);
  CHECK_THROWS_AS(parse("[suite]\nname = zeta\nseed = abc\n"), ConfigError);
  CHECK_THROWS_AS(parse("[suite]\nname = zeta\ncolour = red\n"), ConfigError);
  CHECK_THROWS_AS(parse("[suite]\nname = zeta\n[extra]\nx = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse("name = zeta\n"), ConfigError);
  CHECK_THROWS_AS(parse("[suite\nname = zeta\n"), ConfigError);
  CHECK_THROWS_AS(parse("[suite]\nseed = 3\n"), ConfigError);
  CHECK_THROWS_AS(parse("[suite]\nname = index-theorem\n[model]\nid = sphere\n"), ConfigError);
  CHECK_THROWS_AS(parse("[suite]\nname = index-theorem\n[model]\nid = torus\n[params]\ncutoff = 3\n"), ConfigError);
  CHECK_THROWS_AS(parse("[suite]\nname = index-theorem\n[model]\nid = torus\n[params]\nlambda = x\n"), ConfigError);
  CHECK_THROWS_AS(load_config("/nonexistent/sfindex.ini"), ConfigError);
}

TEST_CASE("grid specs") {
  CHECK(parse_grid("0.75,1,1.5") == std::vector<double>{0.75, 1.0, 1.5});
  CHECK(parse_grid("1:2:3") == std::vector<double>{1.0, 1.5, 2.0});
  CHECK(parse_grid("2:9:1") == std::vector<double>{2.0});
  CHECK_THROWS_AS(parse_grid("1:2"), ConfigError);
  CHECK_THROWS_AS(parse_grid("1,a"), ConfigError);
  CHECK_THROWS_AS(parse_grid("1:2:0"), ConfigError);
}

TEST_CASE("recorder: record fields, inequalities, exceptions, overrides") {
  Recorder rec;
  rec.close("a", "x = y", 1.0, 1.0 + 1e-10, 1e-9, "note");
  rec.close("b", "x = y", 1.0, 2.0, 1e-9);
  rec.at_most("c", "x <= y", -3.0, 0.0, 1e-12);
  rec.at_most("d", "x <= y", 1e-11, 0.0, 1e-12);
  rec.guard("e", "throws", [] { throw std::runtime_error("boom"); });
  rec.close("f", "nan", NAN, 0.0, 1.0);
  const auto& r = rec.records();
  REQUIRE(r.size() == 6);
  CHECK(r[0].pass);
  CHECK(r[0].check_id == "a");
  CHECK(r[0].anchor == "x = y");
  CHECK(r[0].note == "note");
  CHECK(r[0].abs_err == doctest::Approx(1e-10));
  CHECK(r[0].seconds >= 0.0);
  CHECK_FALSE(r[1].pass);
  CHECK(r[2].pass);
  CHECK(r[2].abs_err == 0.0);
  CHECK_FALSE(r[3].pass);
  CHECK(r[3].abs_err == doctest::Approx(1e-11));
  CHECK_FALSE(r[4].pass);
  CHECK(r[4].note.find("boom") != std::string::npos);
  CHECK_FALSE(r[5].pass);

  Recorder loose(1.5);
  loose.close("b", "x = y", 1.0, 2.0, 1e-9);
  CHECK(loose.records()[0].pass);
  CHECK(loose.records()[0].tol == 1.5);

  std::stringstream ss;
  write_records(ss, r);
  const auto back = read_records(ss);
  REQUIRE(back.size() == r.size());
  for (std::size_t i = 0; i < r.size(); ++i) {
    CHECK(back[i].check_id == r[i].check_id);
    CHECK(back[i].pass == r[i].pass);
    CHECK(back[i].tol == r[i].tol);
    if (std::isfinite(r[i].lhs)) CHECK(back[i].lhs == r[i].lhs);
  }
  CHECK(std::isnan(back[4].lhs));
}

TEST_CASE("fredholm suite passes and is deterministic") {
  SuiteConfig c;
  c.suite = "fredholm";
  c.seed = 5;
  const Report a = run_suite(c);
  CHECK(a.all_pass());
  CHECK(a.counts().total > 300);
  for (const auto& r : a.records) CHECK_FALSE(r.anchor.empty());
  const Report b = run_suite(c);
  REQUIRE(a.records.size() == b.records.size());
  bool same = true;
  for (std::size_t i = 0; i < a.records.size(); ++i) {
    const auto &x = a.records[i], &y = b.records[i];
    same = same && x.check_id == y.check_id && x.lhs == y.lhs && x.rhs == y.rhs && x.abs_err == y.abs_err &&
           x.pass == y.pass;
  }
  CHECK(same);
}

TEST_CASE("tolerance override can fail a suite") {
  SuiteConfig c;
  c.suite = "psido";
  CHECK(run_suite(c).all_pass());
  c.tol = 1e-300;
  CHECK_FALSE(run_suite(c).all_pass());
}

TEST_CASE("report files") {
  const auto dir = temp_dir("report");
  SuiteConfig c;
  c.suite = "zeta";
  c.out_dir = dir.string();
  const Report r = run_suite(c);
  CHECK(r.all_pass());
  std::ifstream jl(dir / "zeta.jsonl");
  const auto back = read_records(jl);
  CHECK(back.size() == r.records.size());
  CHECK(std::filesystem::exists(dir / "zeta.txt"));
}

TEST_CASE("model registry") {
  const ModelInstance a = build_model("random-even:4", {}, 1);
  REQUIRE(a.matrix.has_value());
  CHECK(a.id == "random-even:4");
  const ModelInstance b = build_model("random-even", {{"max_dim", "3"}}, 4);
  CHECK(b.id == "random-even:4");
  const ModelInstance w = build_model("weighted-even", {{"k1", "0"}, {"k2", "1"}}, 1);
  CHECK(w.matrix->index == doctest::Approx(std::sqrt(2.0)));
  const ModelInstance c = build_model("circle", {{"cutoff", "5"}}, 1);
  CHECK(c.circle->cutoff == 5);
  const ModelInstance t = build_model("torus", {{"lambda", "4"}, {"mass", "-1"}}, 1);
  CHECK(t.torus->cutoff == 4);
  CHECK(t.torus->mass == -1.0);
  CHECK_THROWS_AS(build_model("sphere", {}, 1), ConfigError);

  Recorder rec;
  pair_model(rec, w);
  for (const auto& r : rec.records()) CHECK(r.pass);
}

TEST_CASE("model Laurent data") {
  const LaurentData c = model_laurent(build_model("circle", {}, 1), "1", 0.5, 0);
  CHECK(std::abs(tau_j(c, 0) - 2.0) < 1e-9);
  const LaurentData t = model_laurent(build_model("torus", {{"lambda", "8"}}, 1), "1", 1.0, 0);
  CHECK(std::abs(tau_j(t, 0) - 4.0 * std::numbers::pi) < 1e-9);  // trace 4 on spinor (x) fiber
  // tau_0(gamma (2p-1) [D,p]^2) = -2 Chern number.
  const LaurentData w = model_laurent(build_model("torus", {{"lambda", "16"}}, 1), "gamma*q*dp*dp", 1.0, 0);
  CHECK(std::abs(tau_j(w, 0) + 2.0) < 1e-6);
  const ModelInstance m = build_model("random-even:2", {}, 1);
  const LaurentData g = model_laurent(m, "gamma", 0.0, 1);
  CHECK(g.pole_free());
  CHECK_THROWS_AS(model_laurent(m, "gamma**p", 0.0, 1), ConfigError);
  CHECK_THROWS_AS(model_laurent(m, "g9", 0.0, 1), ConfigError);
  CHECK_THROWS_AS(model_laurent(build_model("torus", {{"lambda", "4"}}, 1), "g1", 1.0, 0), ConfigError);
}

TEST_CASE("residue table for a named model") {
  const ModelInstance w = build_model("weighted-even", {{"k1", "1"}, {"k2", "0"}}, 3);
  for (const auto& row : model_residue_table(w, {1.0})) CHECK(std::abs(row.ratio - 1.0) < 1e-5);
}

TEST_CASE("command-line exit codes") {
  const auto dir = temp_dir("cli");
  CHECK(run_cli("verify psido") == 0);
  CHECK(run_cli("verify psido --tol 1e-300") == 1);
  CHECK(run_cli("verify nope") == 2);
  CHECK(run_cli("frobnicate") == 2);
  std::ofstream(dir / "bad.ini") << "[suite]\nname = zeta\ntol = -2\n";
  CHECK(run_cli("--config " + (dir / "bad.ini").string() + " verify") == 2);
  std::ofstream(dir / "good.ini") << "[suite]\nname = zeta\nseed = 3\n";
  CHECK(run_cli("--config " + (dir / "good.ini").string() + " --out " + (dir / "out").string() + " verify") == 0);
  CHECK(std::filesystem::exists(dir / "out" / "zeta.jsonl"));
  CHECK(run_cli("pair --model weighted-even --param k1=1 --param k2=1") == 0);
  CHECK(run_cli("pair --model torus --param lambda=x") == 2);
  CHECK(run_cli("zeta --model circle --b-word 1 --offset 0.5") == 0);
  CHECK(run_cli("zeta --model circle --b-word bogus") == 2);
  CHECK(run_cli("table --model random-even:3 --r-grid 1:1.5:2 --out " + (dir / "tab").string()) == 0);
  CHECK(std::filesystem::exists(dir / "tab" / "table_random-even_3.csv"));
}
