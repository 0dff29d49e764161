#include <doctest.h>

#include "test_util.hpp"

using namespace sfindex;
using namespace testutil;

TEST_CASE("trace of identity sums weighted dimensions") {
  TracedAlgebra alg({{2, 1.0}, {3, 0.5}});
  CHECK(BlockOperator::identity(alg).trace().real() == doctest::Approx(3.5).epsilon(1e-15));
}

TEST_CASE("algebra rejects bad blocks") {
  CHECK_THROWS_AS(TracedAlgebra({{0, 1.0}}), PreconditionError);
  CHECK_THROWS_AS(TracedAlgebra({{2, 0.0}}), PreconditionError);
  CHECK_THROWS_AS(TracedAlgebra({{2, -1.0}}), PreconditionError);
}

TEST_CASE("eigenvalues come back ascending") {
  TracedAlgebra alg({{2, 1.0}});
  Mat m = Mat::Zero(2, 2);
  m(0, 0) = 3.0;
  m(1, 1) = 1.0;
  auto e = herm_eig(BlockOperator(alg, {m}));
  CHECK(e.values[0](0) == doctest::Approx(1.0));
  CHECK(e.values[0](1) == doctest::Approx(3.0));
}

TEST_CASE("non-self-adjoint input is rejected") {
  TracedAlgebra alg({{2, 1.0}});
  Mat m = Mat::Identity(2, 2);
  m(0, 1) = 1e-3;
  CHECK_THROWS_AS(herm_eig(BlockOperator(alg, {m})), NotSelfAdjoint);
}

TEST_CASE("functional calculus and powers") {
  std::mt19937_64 rng(7);
  TracedAlgebra alg({{3, 1.0}, {4, std::sqrt(2.0)}});
  for (int trial = 0; trial < 20; ++trial) {
    BlockOperator a = random_hermitian(rng, alg);
    BlockOperator sq = func_calc(a, [](double x) { return cplx(x * x); });
    CHECK(dist(sq, a * a) <= 1e-12 * (1 + (a * a).norm()));
    BlockOperator u = random_unitary(rng, alg);
    auto f = [](double x) { return cplx(std::exp(-x * x), std::sin(x)); };
    BlockOperator lhs = func_calc(u * a * u.adjoint(), f);
    BlockOperator rhs = u * func_calc(a, f) * u.adjoint();
    CHECK(dist(lhs, rhs) <= 1e-12);
  }
  TracedAlgebra one({{2, 1.0}});
  Mat x = Mat::Zero(2, 2);
  x(0, 0) = 4.0;
  x(1, 1) = 9.0;
  BlockOperator p = complex_power(BlockOperator(one, {x}), -0.5);
  CHECK(std::abs(p.block(0)(0, 0) - 0.5) < 1e-15);
  CHECK(std::abs(p.block(0)(1, 1) - 1.0 / 3.0) < 1e-15);
  Mat y = x;
  y(1, 1) = 0.0;
  CHECK_THROWS_AS(complex_power(BlockOperator(one, {y}), -0.5), SingularOperator);
}

TEST_CASE("trace is cyclic and resolvent identity holds") {
  std::mt19937_64 rng(11);
  TracedAlgebra alg({{4, 0.7}, {2, 1.3}});
  for (int trial = 0; trial < 20; ++trial) {
    BlockOperator a = random_op(rng, alg), b = random_op(rng, alg);
    CHECK(std::abs((a * b).trace() - (b * a).trace()) <= 1e-12 * (1 + std::abs((a * b).trace())));
    BlockOperator h = random_hermitian(rng, alg);
    const cplx l1(0.3, 1.1), l2(-0.5, -0.7);
    BlockOperator r1 = resolvent(h, l1), r2 = resolvent(h, l2);
    CHECK(dist(r1 - r2, (l2 - l1) * (r1 * r2)) <= 1e-12 * (1 + r1.norm() * r2.norm()));
  }
  TracedAlgebra one({{2, 1.0}});
  Mat x = Mat::Identity(2, 2);
  CHECK_THROWS_AS(resolvent(BlockOperator(one, {x}), cplx(1.0, 0.0)), SingularOperator);
}

TEST_CASE("pauli algebra and doubling") {
  const Eigen::Matrix2cd s1 = pauli(1), s2 = pauli(2), s3 = pauli(3);
  CHECK((s1 * s2 - cplx(0, 1) * s3).norm() < 1e-15);
  std::mt19937_64 rng(3);
  TracedAlgebra alg({{3, 2.0}});
  BlockOperator a = random_op(rng, alg), b = random_op(rng, alg);
  BlockOperator lhs = kron2(s1, a) * kron2(s2, b);
  BlockOperator rhs = kron2(s1 * s2, a * b);
  CHECK(dist(lhs, rhs) < 1e-12);
  CHECK(std::abs(kron2(pauli(0), a).trace() - 2.0 * a.trace()) < 1e-12);
}
