#include <doctest.h>

#include "sfindex/models.hpp"
#include "sfindex/psido.hpp"
#include "test_util.hpp"

#include <numbers>

using namespace sfindex;
using namespace testutil;

namespace {

EvenModel model(std::uint64_t seed) {
  RandomEvenOptions opt;
  opt.blocks = {{3, 3, 1.0, 2, 1, 1}, {2, 1, std::sqrt(2.0), 1, 1, 1}};
  return build_random_even(seed, opt);
}

std::vector<BlockOperator> word(const EvenModel& m, int degree) {
  std::vector<BlockOperator> f{m.triple.generators[1]};
  for (int i = 0; i < degree; ++i) f.push_back(commutator(m.triple, m.triple.generators[i % 3]));
  return f;
}

double rel(const BlockOperator& a, const BlockOperator& b) { return (a - b).norm() / std::max(b.norm(), 1e-300); }

}  // namespace

TEST_CASE("single commutation step") {
  const MoveRightSymbolic s = move_right_symbolic(1, 0);
  REQUIRE(s.collected.size() == 1);
  CHECK(s.collected[0].count == 1);
  CHECK(s.collected[0].powers == std::vector<int>{0, 2});
  REQUIRE(s.remainder.size() == 1);
  CHECK(s.remainder[0].k == MultiIndex{1});
  CHECK(s.remainder[0].powers == std::vector<int>{1, 2});
  const MoveRightSymbolic z = move_right_symbolic(0, 3);
  CHECK(z.collected.size() == 1);
  CHECK(z.remainder.empty());
}

TEST_CASE("symbolic counts are C(k) and remainders have order 2N - m + 1") {
  for (int m = 1; m <= 4; ++m)
    for (int maxo = 0; maxo + m <= 8; ++maxo) {
      const MoveRightSymbolic s = move_right_symbolic(m, maxo);
      CHECK(s.collected.size() == multi_indices(m, maxo).size());
      for (const auto& w : s.collected) {
        CHECK(w.collected());
        CHECK(Rational(w.count) == expansion_coefficient(w.k));
        CHECK(w.powers.back() == total(w.k) + m + 1);
      }
      for (const auto& w : s.remainder) CHECK(total(w.k) == maxo + 1);
    }
}

TEST_CASE("move-right reconstruction") {
  EvenModel m = model(3);
  for (int deg = 1; deg <= 3; ++deg)
    for (int extra : {0, 1, 2}) {
      const int order = deg + extra;
      for (cplx lam : {cplx(0.25, -3.0), cplx(0.25, 0.4), cplx(0.25, 40.0)}) {
        const MoveRightExpansion e = move_right_expand(m.triple, word(m, deg), 0.7, lam, order);
        CHECK(rel(e.collected_sum + e.remainder, e.original) < 1e-9);
        for (const auto& t : e.terms) CHECK(t.resolvent_power == total(t.k) + deg + 1);
      }
    }
}

TEST_CASE("commuting factors leave only the k = 0 term") {
  EvenModel m = model(4);
  const EvenTriple& t = m.triple;
  const BlockOperator d2 = hermitian_part(t.D * t.D);
  const BlockOperator f1 = func_calc(d2, [](double x) { return cplx(std::exp(-x)); });
  const BlockOperator f2 = func_calc(d2, [](double x) { return cplx(1.0 / (1.0 + x)); });
  const MoveRightExpansion e = move_right_expand(t, {t.one(), f1, f2}, 0.3, cplx(0.25, -1.0), 4);
  CHECK(e.remainder.norm() < 1e-12);
  CHECK(rel(e.collected_sum, e.original) < 1e-12);
  const BlockOperator r = resolvent(shift(d2, 1.09), cplx(0.25, -1.0));
  CHECK(rel(f1 * f2 * r * r * r, e.original) < 1e-12);
}

TEST_CASE("resolvent expansion reconstruction and trivial cases") {
  EvenModel m = model(5);
  DoubledTriple dt(m.triple, m.p);
  for (int order : {0, 2, 4})
    for (double s : {-1.3, 0.4, 2.0}) {
      const ResolventExpansion e = resolvent_expand(dt, s, cplx(0.25, -0.8), order);
      BlockOperator sum = e.remainder;
      for (const auto& t : e.terms) sum += t;
      CHECK(rel(sum, e.target) < 1e-10);
    }
  const ResolventExpansion e0 = resolvent_expand(dt, 0.0, cplx(0.25, 2.0), 2);
  CHECK(e0.terms[1].norm() == 0.0);
  CHECK(e0.remainder.norm() == 0.0);
  DoubledTriple one(m.triple, m.triple.one());
  const ResolventExpansion e1 = resolvent_expand(one, 1.1, cplx(0.25, 2.0), 2);
  CHECK(e1.terms[1].norm() == 0.0);
  CHECK(e1.remainder.norm() == 0.0);
}

TEST_CASE("odd terms vanish under the supertrace; even terms are even in s") {
  EvenModel m = model(6);
  DoubledTriple dt(m.triple, m.p);
  const BlockOperator q2 = kron2(pauli(0), 2.0 * m.p - m.triple.one());
  for (double s : {0.3, 1.7}) {
    const ResolventExpansion ep = resolvent_expand(dt, s, cplx(0.25, -0.5), 4);
    const ResolventExpansion em = resolvent_expand(dt, -s, cplx(0.25, -0.5), 4);
    for (int k = 0; k <= 4; ++k) {
      const cplx vp = dt.supertrace(q2 * ep.terms[k]);
      const cplx vm = dt.supertrace(q2 * em.terms[k]);
      if (k % 2) {
        CHECK(std::abs(vp) < 1e-12);
      } else {
        CHECK(std::abs(vp - vm) < 1e-12);
      }
    }
  }
}

TEST_CASE("Cauchy power integral") {
  TracedAlgebra one({{1, 1.0}});
  const BlockOperator zero = BlockOperator::zero(one);
  auto [n1, c1] = cauchy_power_integral(zero, 2.0, 1.5, 1);
  CHECK(c1.block(0)(0, 0).real() == doctest::Approx(-1.5 * std::pow(2.0, -2.5)).epsilon(1e-14));
  CHECK(std::abs(n1.block(0)(0, 0) - c1.block(0)(0, 0)) < 1e-9);
  auto [n0, c0] = cauchy_power_integral(zero, 3.0, 0.8, 0);
  CHECK(std::abs(n0.block(0)(0, 0) - std::pow(3.0, -0.8)) < 1e-9);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> zd(0.6, 3.0), sh(0.8, 2.0);
  TracedAlgebra alg({{4, 1.0}, {2, 0.5}});
  for (int i = 0; i < 20; ++i) {
    const BlockOperator h = random_hermitian(rng, alg);
    const double z = zd(rng), c = sh(rng);
    const int k = static_cast<int>(rng() % 4);
    auto [num, closed] = cauchy_power_integral(h, c, z, k);
    CHECK(rel(num, closed) < 1e-6);
  }
  CHECK_THROWS_AS(cauchy_power_integral(zero, 0.1, 1.0, 0), PreconditionError);
}

TEST_CASE("s-integral closed form") {
  auto [a0, b0] = s_integral_gamma(1.0, 0, 1.5);
  CHECK(a0 == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(b0 == doctest::Approx(1.0).epsilon(1e-14));
  auto [a2, b2] = s_integral_gamma(1.0, 2, 3.0);
  CHECK(b2 == doctest::Approx(std::numbers::pi / 4).epsilon(1e-14));
  CHECK(a2 == doctest::Approx(std::numbers::pi / 4).epsilon(1e-10));
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> cd(0.5, 5.0), ad(0.3, 3.0);
  for (int i = 0; i < 20; ++i) {
    const int m = 2 * static_cast<int>(rng() % 3);
    const double c = cd(rng), big_a = 0.5 * (m + 1) + ad(rng);
    auto [num, closed] = s_integral_gamma(c, m, big_a);
    CHECK(std::abs(num - closed) <= 1e-9 * std::abs(closed));
  }
  CHECK_THROWS_AS(s_integral_gamma(1.0, 2, 1.5), PreconditionError);
}
