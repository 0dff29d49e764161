#include <doctest.h>

#include "sfindex/fredholm.hpp"
#include "sfindex/models.hpp"
#include "sfindex/zeta.hpp"
#include "test_util.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

using namespace sfindex;
using namespace testutil;

namespace {

const double kPi = std::numbers::pi;

HeatTrace scalar_circle() { return {"scalar-circle", "1", [](double t) { return cplx(theta(t)); }, {-0.5}}; }

HeatTrace torus_unit() {
  return {"torus", "1", [](double t) { return cplx(2.0 * theta(t) * theta(t)); }, {-1.0, 0.0}};
}

// Constant term of sum_n (1+n^2)^{-1/2-z} at z = 0, through
// 2 zeta_R(1+2z) = 1/z + 2 gamma_E + O(z).
double scalar_circle_constant_term() {
  const int n_max = 2000000;
  double s = 0.0;
  for (int n = n_max; n >= 1; --n) s += 1.0 / std::sqrt(1.0 + double(n) * n) - 1.0 / n;
  s -= 1.0 / (4.0 * double(n_max) * n_max);
  return 1.0 + 2.0 * s + 2.0 * std::numbers::egamma;
}

}  // namespace

TEST_CASE("matrix zeta: trivial values and direct sums") {
  TracedAlgebra alg({{3, 0.7}, {2, 1.0}});
  ZetaSpec spec{BlockOperator::identity(alg), BlockOperator::zero(alg), 0.0};
  for (cplx z : {cplx(0.0), cplx(1.5, 0.3), cplx(-2.0)})
    CHECK(std::abs(zeta_eval_matrix(spec, z) - (0.7 * 3 + 2.0)) < 1e-12);

  // Balanced grading: tr(gamma) = 0 blockwise.
  TracedAlgebra a2({{4, 1.0}});
  Mat g = Mat::Zero(4, 4);
  g.diagonal() << 1, 1, -1, -1;
  ZetaSpec sg{BlockOperator(a2, {g}), BlockOperator::zero(a2), 1.0};
  CHECK(std::abs(zeta_eval_matrix(sg, cplx(0.4, 0.2))) < 1e-14);

  Mat d = Mat::Zero(4, 4);
  d.diagonal() << 0.5, -1.0, 2.0, 3.0;
  ZetaSpec sd{BlockOperator::identity(a2), BlockOperator(a2, {d}), 0.5};
  const cplx z(0.3, -0.7);
  cplx direct = 0.0;
  for (double x : {0.5, -1.0, 2.0, 3.0}) direct += std::exp(-(z + 0.5) * std::log(1.0 + x * x));
  CHECK(std::abs(zeta_eval_matrix(sd, z) - direct) < 1e-13);
}

TEST_CASE("theta: Poisson form agrees with the direct sum") {
  for (double t : {0.003, 0.05, 0.7, 2.0, 3.2, 10.0}) {
    double direct = 1.0;
    for (int n = 1; n < 200000; ++n) {
      const double term = 2.0 * std::exp(-t * double(n) * n);
      direct += term;
      if (term < 1e-20) break;
    }
    CHECK(std::abs(theta(t) - direct) < 1e-12 * direct);
  }
  CHECK(theta_truncated(1e-9, 5) == doctest::Approx(11.0));
  CHECK(theta(50.0) == doctest::Approx(1.0));
}

TEST_CASE("Mellin continuation: circle-type spectrum") {
  const LaurentData d = mellin_continuation(scalar_circle(), 0.5, 1.0, 1);
  CHECK(std::abs(tau_j(d, 0) - 1.0) < 1e-9);
  CHECK(std::abs(tau_j(d, 1)) < 1e-9);
  CHECK(std::abs(tau_j(d, -1) - scalar_circle_constant_term()) < 1e-8);
  CHECK(d.critical_point == 0.0);
  CHECK(d.residual < 1e-10);
}

TEST_CASE("Mellin continuation: torus unit word has residue 2 pi") {
  const LaurentData d = mellin_continuation(torus_unit(), 1.0, 2.0, 0);
  CHECK(std::abs(tau_j(d, 0) - 2.0 * kPi) < 1e-9);
  CHECK(d.critical_point == doctest::Approx(-0.5));
}

TEST_CASE("Mellin continuation: split independence") {
  MellinSpec s1, s2;
  s2.split = 2.0;
  for (const auto& [h, off] : {std::pair{scalar_circle(), 0.5}, std::pair{torus_unit(), 1.0},
                               std::pair{torus_unit(), 0.0}}) {
    const LaurentData a = mellin_continuation(h, off, 2.0, 2, s1);
    const LaurentData b = mellin_continuation(h, off, 2.0, 2, s2);
    for (std::size_t i = 0; i < a.coeffs.size(); ++i) CHECK(std::abs(a.coeffs[i] - b.coeffs[i]) < 1e-7);
  }
}

TEST_CASE("Mellin continuation agrees with direct summation for large Re z") {
  MellinSpec spec;
  const HeatTrace h = scalar_circle();
  const MellinFit fit = fit_small_t(h, spec);
  for (double z : {1.5, 2.0, 3.0}) {
    double direct = 1.0;
    for (int n = 200000; n >= 1; --n) direct += 2.0 * std::pow(1.0 + double(n) * n, -0.5 - z);
    CHECK(std::abs(mellin_value(h, fit, 0.5, z, spec) - direct) < 1e-8);
  }
  const HeatTrace ht = torus_unit();
  const MellinFit ft = fit_small_t(ht, spec);
  const int r = 400;
  double direct = 0.0;
  for (int a = -r; a <= r; ++a)
    for (int b = -r; b <= r; ++b) direct += 2.0 * std::pow(1.0 + double(a) * a + double(b) * b, -3.0);
  // Lattice tail beyond the box is below 2 pi r^{-4} / 4 ~ 6e-11.
  CHECK(std::abs(mellin_value(ht, ft, 1.0, 2.0, spec) - direct) < 1e-8);
}

TEST_CASE("Mellin continuation: entire matrix zeta is pole-free") {
  std::mt19937_64 rng(11);
  TracedAlgebra alg({{6, 1.0}, {4, std::sqrt(2.0)}});
  BlockOperator d = random_hermitian(rng, alg);
  d = (1.0 / d.norm()) * d;
  const BlockOperator b = random_op(rng, alg);
  const EigenDecomp e = herm_eig(d);
  HeatTrace h{"matrix", "random",
              [&](double t) { return trace_with_function(b, e, [t](double x) { return cplx(std::exp(-t * x * x)); }); },
              {0, 1, 2, 3, 4, 5, 6, 7, 8}};
  for (double off : {0.0, 1.0, 1.5}) {
    const LaurentData ld = mellin_continuation(h, off, 2.0, 2);
    CHECK(ld.pole_free());
    CHECK(std::abs(tau_j(ld, -1) - zeta_eval_matrix({b, d, off}, 0.0)) < 1e-8);
  }
}

TEST_CASE("tau_j is linear in the heat trace") {
  const HeatTrace a = scalar_circle();
  const HeatTrace b{"c", "b", [](double t) { return cplx(0.0, 3.0) * theta(t) + 0.5 * theta(1.5 * t); }, {-0.5}};
  const HeatTrace s{"c", "a+b", [&](double t) { return a.k(t) + b.k(t); }, {-0.5}};
  const LaurentData la = mellin_continuation(a, 0.5, 1.0, 1), lb = mellin_continuation(b, 0.5, 1.0, 1),
                    ls = mellin_continuation(s, 0.5, 1.0, 1);
  for (int j = -1; j <= 1; ++j) CHECK(std::abs(tau_j(ls, j) - tau_j(la, j) - tau_j(lb, j)) < 1e-9);
  // theta(1.5 t) has leading term sqrt(pi/(1.5 t)): residue 1/sqrt(1.5) in z.
  CHECK(std::abs(tau_j(lb, 0) - cplx(0.5 / std::sqrt(1.5), 3.0)) < 1e-9);
}

TEST_CASE("tau_j: Laurent algebra") {
  LaurentData d;
  d.depth = 2;
  // 5 z^{-1} + 2: simple pole.
  d.coeffs = {0.0, 0.0, 5.0, 2.0};
  CHECK(tau_j(d, 0) == cplx(5.0));
  CHECK(tau_j(d, 1) == cplx(0.0));
  CHECK(tau_j(d, -1) == cplx(2.0));
  // regular function
  d.coeffs = {0.0, 0.0, 0.0, 7.0};
  CHECK(d.pole_free());
  CHECK(tau_j(d, -1) == cplx(7.0));
  // 3 z^{-2} + z^{-1}: tau_1 is the leading coefficient.
  d.coeffs = {0.0, 3.0, 1.0, 0.0};
  CHECK(tau_j(d, 1) == cplx(3.0));
  CHECK(tau_j(d, 0) == cplx(1.0));
  CHECK_THROWS_AS(tau_j(d, 3), PreconditionError);
  CHECK_THROWS_AS(tau_j(d, -2), PreconditionError);
}

TEST_CASE("Mellin continuation: double pole from a logarithmic heat coefficient") {
  // k(t) = -log(t) t^{-1/2} sqrt(pi) on the fit window is not in any power
  // menu; the continuation must refuse it.
  HeatTrace bad{"x", "log", [](double t) { return cplx(-std::log(t) / std::sqrt(t)); }, {-0.5, 0.0}};
  CHECK_THROWS_AS(mellin_continuation(bad, 0.5, 1.0, 1), FitError);
  HeatTrace missing{"x", "1", [](double t) { return cplx(theta(t)); }, {}};
  CHECK_THROWS_AS(mellin_continuation(missing, 0.5, 1.0, 0), FitError);
}

TEST_CASE("Laurent record round trip") {
  const LaurentData d = mellin_continuation(scalar_circle(), 0.5, 1.0, 1);
  std::stringstream ss;
  write_laurent(ss, d);
  const LaurentData e = read_laurent(ss);
  CHECK(e.model_id == d.model_id);
  CHECK(e.menu == d.menu);
  CHECK(e.depth == d.depth);
  for (std::size_t i = 0; i < d.coeffs.size(); ++i) CHECK(e.coeffs[i] == d.coeffs[i]);
  CHECK(e.residual == d.residual);
}

TEST_CASE("zeta sum residue equals the index on matrix triples") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 5; ++trial) {
    const EvenModel m = build_random_even(100 + trial, random_even_options(rng, 3));
    const auto [res, ind] = zeta_sum_residue_check(m.triple, m.p, 2, matrix_tau_provider(m.triple));
    CHECK(std::abs(res - ind) < 1e-10);
    CHECK(std::abs(ind - m.index) < 1e-10);
  }
  const EvenModel m = build_random_even(7, random_even_options(rng, 3));
  const auto zero = zeta_sum_residue_check(m.triple, BlockOperator::zero(m.triple.algebra), 2,
                                           matrix_tau_provider(m.triple));
  CHECK(zero.first == 0.0);
  CHECK(zero.second == 0.0);
}
