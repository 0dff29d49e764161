#include <doctest.h>

#include "sfindex/cocycle.hpp"
#include "sfindex/fredholm.hpp"
#include "sfindex/models.hpp"
#include "test_util.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <sstream>

using namespace sfindex;
using namespace testutil;

namespace {

EvenModel small_model(std::uint64_t seed) {
  RandomEvenOptions opt;
  opt.blocks = {{2, 2, 1.0, 1, 1, 1}, {1, 2, std::sqrt(2.0), 1, 1, 0}};
  return build_random_even(seed, opt);
}

Cochain random_normalized_cochain(std::mt19937_64& rng, const TracedAlgebra& alg, int m) {
  const BlockOperator x = random_op(rng, alg);
  const BlockOperator y = random_op(rng, alg);
  Cochain c;
  c.degree = m;
  c.eval = [x, y](const Tuple& a) {
    BlockOperator acc = y * a[0];
    for (std::size_t i = 1; i < a.size(); ++i) acc = acc * commutator(x, a[i]);
    CVec v(1);
    v(0) = acc.trace();
    return v;
  };
  return c;
}

// f[y_0, ..., y_m] for f(lambda) = lambda^{-z}, through the bidiagonal matrix
// function (J^{-z})_{0m}; handles repeated nodes.
double divided_difference(const std::vector<double>& y, double z) {
  const int n = static_cast<int>(y.size());
  Eigen::MatrixXd j = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) j(i, i) = y[i];
  for (int i = 0; i + 1 < n; ++i) j(i, i + 1) = 1.0;
  const Eigen::MatrixXd l = j.log();
  const Eigen::MatrixXd f = (-z * l).exp();
  return f(0, n - 1);
}

// phi^r_2 from exact contour values and adaptive s-quadrature.
cplx phi2_oracle(const EvenTriple& t, const Tuple& a, double r) {
  const EigenDecomp d2 = herm_eig(hermitian_part(t.D * t.D));
  const double z = 0.5 * t.q + r;
  std::vector<std::vector<Mat>> ops;
  for (std::size_t b = 0; b < t.algebra.num_blocks(); ++b) {
    const Mat& u = d2.vectors[b];
    ops.push_back({u.adjoint() * (t.gamma * a[0]).block(b) * u, u.adjoint() * commutator(t, a[1]).block(b) * u,
                   u.adjoint() * commutator(t, a[2]).block(b) * u});
  }
  const QuadResult q = integrate_half_line([&](double s) {
    cplx tot = 0.0;
    for (std::size_t b = 0; b < ops.size(); ++b) {
      const RVec& x = d2.values[b];
      const int d = static_cast<int>(x.size());
      for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
          for (int l = 0; l < d; ++l) {
            const cplx c = ops[b][0](l, i) * ops[b][1](i, j) * ops[b][2](j, l);
            if (std::abs(c) < 1e-300) continue;
            tot += t.algebra.block(b).weight * c *
                   divided_difference({1 + s * s + x(i), 1 + s * s + x(j), 1 + s * s + x(l)}, z);
          }
    }
    CVec v(1);
    v(0) = s * s * tot;
    return v;
  }, 1e-12, 1e-12);
  return boost::rational_cast<double>(eta(2)) * q.value(0);
}

}  // namespace

TEST_CASE("b and B square to zero") {
  std::mt19937_64 rng(1);
  TracedAlgebra alg({{3, 1.0}, {2, 0.5}});
  for (int m = 0; m <= 3; ++m) {
    const Cochain phi = random_normalized_cochain(rng, alg, m);
    Tuple a;
    for (int i = 0; i < m + 3; ++i) a.push_back(random_op(rng, alg));
    CHECK(std::abs(b_operator(b_operator(phi))(a)(0)) < 1e-9);
  }
  for (int m = 2; m <= 5; ++m) {
    const Cochain phi = random_normalized_cochain(rng, alg, m);
    Tuple a;
    for (int i = 0; i < m - 1; ++i) a.push_back(random_op(rng, alg));
    CHECK(std::abs(B_operator(B_operator(phi))(a)(0)) < 1e-9);
  }
}

TEST_CASE("b and B trivial values") {
  std::mt19937_64 rng(2);
  TracedAlgebra alg({{3, 1.0}});
  const BlockOperator x = random_op(rng, alg);
  Cochain phi0;
  phi0.degree = 0;
  phi0.eval = [x](const Tuple& a) {
    CVec v(1);
    v(0) = (x * a[0]).trace();
    return v;
  };
  const BlockOperator d1 = BlockOperator(alg, {Mat(Eigen::Vector3cd(1.0, 2.0, 3.0).asDiagonal())});
  const BlockOperator d2 = BlockOperator(alg, {Mat(Eigen::Vector3cd(-1.0, 0.5, 4.0).asDiagonal())});
  CHECK(std::abs(b_operator(phi0)({d1, d2})(0)) < 1e-14);
  Cochain zero;
  zero.degree = 2;
  zero.eval = [](const Tuple&) { return CVec::Zero(1).eval(); };
  CHECK(B_operator(zero)({d1, d2})(0) == cplx(0.0));
  // Degree two, one argument pair: phi(1, a0, a1) - phi(1, a1, a0).
  const Cochain phi2 = random_normalized_cochain(rng, alg, 2);
  const BlockOperator one = BlockOperator::identity(alg);
  const cplx direct = phi2({one, d1, x})(0) - phi2({one, x, d1})(0);
  CHECK(std::abs(B_operator(phi2)({d1, x})(0) - direct) < 1e-12);
}

TEST_CASE("phi_0 closed form and vanishing on central arguments") {
  TracedAlgebra alg({{2, 1.0}});
  EvenTriple t;
  t.algebra = alg;
  t.D = BlockOperator::zero(alg);
  t.gamma = BlockOperator(alg, {Mat(Eigen::Vector2cd(1.0, -1.0).asDiagonal())});
  t.q = 1.0;
  const BlockOperator a0(alg, {Mat(Eigen::Vector2cd(1.0, 0.0).asDiagonal())});
  t.generators = {a0};
  t.validate();
  CHECK(std::abs(resolvent_cocycle(t, {a0}, {1.0})(0) - 2.0) < 1e-14);

  EvenModel m = small_model(3);
  const CVec v = resolvent_cocycle(m.triple, {m.p, m.triple.one(), m.p}, {1.0});
  CHECK(std::abs(v(0)) == 0.0);
  CHECK_THROWS_AS(resolvent_cocycle(m.triple, {m.p, m.p}, {1.0}), PreconditionError);
}

TEST_CASE("phi^r_2 against exact divided differences") {
  EvenModel m = small_model(4);
  const EvenTriple& t = m.triple;
  const Tuple a{t.generators[1], t.generators[2], m.p};
  const CVec v = resolvent_cocycle(t, a, {0.75, 1.5});
  CHECK(std::abs(v(0) - phi2_oracle(t, a, 0.75)) < 1e-8);
  CHECK(std::abs(v(1) - phi2_oracle(t, a, 1.5)) < 1e-8);
}

TEST_CASE("phi^r_2 against the expansion pipeline") {
  EvenModel m = small_model(5);
  const EvenTriple& t = m.triple;
  const Tuple a{t.generators[2], m.p, t.generators[1]};
  const std::vector<double> r{0.75, 1.0, 1.5};
  const CVec direct = resolvent_cocycle(t, a, r);
  for (int order : {2, 4}) {
    const CVec pipe = resolvent_cocycle_pipeline(t, a, r, order);
    CHECK(max_abs(direct - pipe) < 1e-6);
  }
}

TEST_CASE("multilinearity") {
  EvenModel m = small_model(6);
  const EvenTriple& t = m.triple;
  const BlockOperator x = t.generators[1], y = t.generators[2];
  const CVec lhs = resolvent_cocycle(t, {m.p, x + 2.0 * y, m.p}, {1.0});
  const CVec rhs = resolvent_cocycle(t, {m.p, x, m.p}, {1.0}) + 2.0 * resolvent_cocycle(t, {m.p, y, m.p}, {1.0});
  CHECK(max_abs(lhs - rhs) < 1e-9);
}

TEST_CASE("(b,B) identity at matrix scale") {
  EvenModel m = small_model(7);
  const EvenTriple& t = m.triple;
  const std::vector<double> r{0.75, 1.0, 1.5};
  const BlockOperator one = t.one();
  CHECK(max_abs(bB_cocycle_check(t, 0, r, {one, one})) < 1e-12);
  CHECK(max_abs(bB_cocycle_check(t, 0, r, {t.generators[1], m.p})) < 1e-6);
  CHECK(max_abs(bB_cocycle_check(t, 2, r, {t.generators[1], m.p, t.generators[2], m.p})) < 1e-5);
}

TEST_CASE("Chern components") {
  EvenModel m = small_model(8);
  const ChernComponent c0 = chern(m.p, 0);
  CHECK(c0.coefficient == Rational(1));
  CHECK(c0.word.size() == 1);
  CHECK(chern(m.p, 2).coefficient == Rational(-1));
  CHECK(chern(m.p, 4).coefficient == Rational(6));
  CHECK(chern(m.p, 4).word.size() == 5);
  CHECK_THROWS_AS(chern(2.0 * m.p, 2), PreconditionError);
}

TEST_CASE("remainder supertrace is even in s") {
  EvenModel m = small_model(9);
  DoubledTriple dt(m.triple, m.p);
  const BlockOperator q2 = kron2(pauli(0), 2.0 * m.p - m.triple.one());
  for (double s : {0.4, 1.9}) {
    const cplx a = dt.supertrace(q2 * resolvent_expand(dt, s, cplx(0.25, -0.7), 2).remainder);
    const cplx b = dt.supertrace(q2 * resolvent_expand(dt, -s, cplx(0.25, -0.7), 2).remainder);
    CHECK(std::abs(a - b) < 1e-12);
  }
}

TEST_CASE("pairing plus remainder reproduces Ind C_{q/2+r}") {
  EvenModel m = small_model(10);
  const std::vector<double> r{0.75, 1.0, 1.5};
  const auto rows = residue_table(m.triple, m.p, r, 2);
  for (const auto& row : rows) CHECK(std::abs(row.ratio - m.index) < 1e-5);
  std::ostringstream os;
  write_residue_table(os, rows);
  CHECK(os.str().rfind("r,pairing_sum,remainder,c_norm,ratio\n", 0) == 0);
  // p = 0: every column but c_norm vanishes.
  const auto zero = residue_table(m.triple, BlockOperator::zero(m.triple.algebra), {1.0}, 2);
  CHECK(zero[0].pairing_sum == 0.0);
  CHECK(zero[0].ratio == 0.0);
}

TEST_CASE("residue cocycle structure") {
  EvenModel m = small_model(11);
  const EvenTriple& t = m.triple;
  const EigenDecomp d2 = herm_eig(hermitian_part(t.D * t.D));
  // Entire zeta functions: only the constant term survives.
  TauProvider entire = [&](int j, const BlockOperator& b, double offset) -> cplx {
    if (j >= 0) return 0.0;
    return trace_with_function(b, d2, [offset](double x) { return cplx(std::pow(1.0 + x, -offset)); });
  };
  CHECK(std::abs(residue_cocycle(t, {m.p}, 2, entire) - (t.gamma * m.p).trace()) < 1e-12);
  CHECK(residue_cocycle(t, {2.0 * m.p - t.one(), m.p, m.p}, 2, entire) == cplx(0.0));
  std::vector<std::pair<int, double>> calls;
  TauProvider record = [&](int j, const BlockOperator&, double offset) -> cplx {
    calls.emplace_back(j, offset);
    return 1.0;
  };
  // 2N = 2, m = 2: only k = (0,0), h = 1, j = 1 -> tau_0 with alpha = 1/2.
  CHECK(residue_cocycle(t, {t.one(), m.p, m.p}, 2, record) == cplx(0.5));
  REQUIRE(calls.size() == 1);
  CHECK(calls[0] == std::pair<int, double>{0, 1.0});
  calls.clear();
  // 2N = 4, m = 2: k in {(0,0),(0,1),(1,0),(0,2),(1,1),(2,0)}.
  residue_cocycle(t, {t.one(), m.p, m.p}, 4, record);
  CHECK(calls.size() == 1 + 2 * 2 + 3 * 3);
  CHECK(residue_pairing(t, BlockOperator::zero(t.algebra), 2, entire) == cplx(0.0));
}
