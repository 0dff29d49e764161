#include <doctest.h>

#include "sfindex/fredholm.hpp"
#include "sfindex/models.hpp"
#include "sfindex/triple.hpp"
#include "test_util.hpp"

using namespace sfindex;
using namespace testutil;

namespace {

EvenModel small_model(std::uint64_t seed) {
  RandomEvenOptions opt;
  opt.blocks = {{3, 2, 1.0, 2, 1, 1}, {2, 2, std::sqrt(2.0), 1, 1, 0}};
  return build_random_even(seed, opt);
}

}  // namespace

TEST_CASE("commutators and iterated commutators") {
  EvenModel m = small_model(1);
  const EvenTriple& t = m.triple;
  CHECK(commutator(t, t.one()).norm() == 0.0);
  BlockOperator f = func_calc(t.D * t.D, [](double x) { return cplx(std::exp(-x)); });
  CHECK(commutator(t, f).norm() < 1e-12);
  BlockOperator x = t.generators[1];
  CHECK((iterated_commutator(t, x, 0) - x).norm() == 0.0);
  CHECK((iterated_commutator(t, x, 2) - iterated_commutator(t, iterated_commutator(t, x, 1), 1)).norm() < 1e-12);
  CHECK(iterated_commutator(t, f, 3).norm() < 1e-10);
  for (const auto& a : t.generators) CHECK(commutator(t, a).norm() < std::sqrt(2.0));
}

TEST_CASE("rescaling keeps the index") {
  RandomEvenOptions opt;
  opt.blocks = {{4, 3, 1.0, 3, 1, 1}};
  opt.sigma_lo = 3.0;
  opt.sigma_hi = 6.0;
  opt.rescale = false;
  EvenModel m = build_random_even(9, opt);
  const double before = corner_index(m.triple.D, m.triple.gamma, m.p);
  EvenTriple t = m.triple;
  const double eps = auto_rescale(t, {m.p});
  CHECK(eps < 1.0);
  CHECK(commutator(t, m.p).norm() == doctest::Approx(1.3));
  t.validate();
  CHECK(corner_index(t.D, t.gamma, m.p) == doctest::Approx(before));
}

TEST_CASE("grading of the doubled triple and the supertrace") {
  EvenModel m = small_model(2);
  DoubledTriple dt(m.triple, m.p);
  const BlockOperator g2 = dt.gamma_tilde();
  const BlockOperator one2 = BlockOperator::identity(dt.algebra2());
  CHECK((g2 * g2 - one2).norm() < 1e-14);
  CHECK(anticommutator(kron2(pauli(2), m.triple.one()), g2).norm() < 1e-14);
  CHECK(std::abs(dt.supertrace(kron2(pauli(0), m.triple.gamma)) - m.triple.one().trace()) < 1e-12);
  CHECK(std::abs(dt.supertrace(kron2(pauli(1), m.triple.one()))) < 1e-14);
  std::mt19937_64 rng(3);
  for (int i = 0; i < 10; ++i) {
    BlockOperator s = random_op(rng, m.triple.algebra);
    CHECK(std::abs(dt.supertrace(kron2(pauli(0), s)) - (m.triple.gamma * s).trace()) < 1e-12);
  }
  for (double w : {0.0, 0.3, 1.0})
    for (double s : {-2.0, 0.0, 0.7}) CHECK(dt.square_identity_error(w, s) < 1e-10);
}

TEST_CASE("one-form trivial values") {
  EvenModel m = small_model(4);
  DoubledTriple dt(m.triple, m.p);
  const BlockOperator dtil = dt.Dtilde(0.0, 0.0);
  CHECK(std::abs(dt.one_form(dtil, BlockOperator::zero(dt.algebra2()), 3.0)) == 0.0);
  // Off-Phi perturbations are rejected.
  CHECK_THROWS_AS(dt.one_form(dtil + kron2(pauli(1), m.triple.one()), dtil, 3.0), PreconditionError);
}

TEST_CASE("rectangle loop integrals vanish") {
  EvenModel m = small_model(5);
  DoubledTriple dt(m.triple, m.p);
  CHECK(std::abs(dt.rectangle_loop(3.0, 3.0, false)) < 1e-6);
  CHECK(std::abs(dt.rectangle_loop(3.0, 3.0, true)) < 1e-6);
}

TEST_CASE("a(w) is constant and the key identity holds") {
  QuadratureSpec quad;
  quad.abs_tol = 1e-10;
  for (std::uint64_t seed : {11u, 12u, 13u}) {
    EvenModel m = small_model(seed);
    DoubledTriple dt(m.triple, m.p);
    const double n = m.triple.q + 2.0;
    double lo = INFINITY, hi = -INFINITY;
    for (double w : {0.0, 0.25, 0.5, 0.75, 1.0}) {
      const double a = dt.a_of_w(w, n, quad);
      lo = std::min(lo, a);
      hi = std::max(hi, a);
    }
    CHECK(hi - lo < 1e-6);
    auto [lhs, rhs] = dt.key_identity_check(n, quad);
    CHECK(lhs == doctest::Approx(m.index * 2.0));
    CHECK(std::abs(lhs - rhs) < 1e-6);
    // a(1) = Ind C - 1/2 int tau(gamma (1 + D_p^2 + s^2)^{-n/2}).
    const double a1 = dt.a_of_w(1.0, n, quad);
    CHECK(std::abs(a1 - (lhs - 0.5 * dt.graded_s_integral(dt.D_p(), n, quad))) < 1e-6);
  }
}

TEST_CASE("key identity with p = 0 and D = 0 closed form") {
  EvenModel m = small_model(21);
  DoubledTriple dt0(m.triple, BlockOperator::zero(m.triple.algebra));
  auto [l0, r0] = dt0.key_identity_check(3.0);
  CHECK(l0 == 0.0);
  CHECK(std::abs(r0) < 1e-7);
  EvenTriple flat = m.triple;
  flat.D = BlockOperator::zero(flat.algebra);
  DoubledTriple dtf(flat, m.p);
  const BlockOperator g = m.triple.gamma * (2.0 * m.p - m.triple.one());
  const double expect = 0.25 * c_half(3.0) * 2.0 * g.trace().real();
  CHECK(std::abs(dtf.a_of_w(0.0, 3.0) - expect) < 1e-7);
}
