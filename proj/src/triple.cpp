#include "sfindex/triple.hpp"

#include "sfindex/fredholm.hpp"

#include <algorithm>
#include <cmath>

namespace sfindex {

void EvenTriple::validate() const {
  const BlockOperator id = one();
  if (D.algebra() != algebra || gamma.algebra() != algebra)
    throw PreconditionError("triple operators live in a different algebra");
  if (!D.is_self_adjoint(1e-10)) throw PreconditionError("D must be self-adjoint");
  if ((gamma - gamma.adjoint()).norm() > 1e-10 || (gamma * gamma - id).norm() > 1e-10)
    throw PreconditionError("gamma must be a self-adjoint unitary");
  if (anticommutator(D, gamma).norm() > 1e-10 * std::max(1.0, D.norm()))
    throw PreconditionError("D must anticommute with gamma");
  for (const auto& a : generators)
    if (commutator(a, gamma).norm() > 1e-10 * std::max(1.0, a.norm()))
      throw PreconditionError("generators must commute with gamma");
  if (q < 1.0) throw PreconditionError("q must be >= 1");
}

BlockOperator EvenTriple::chiral_projection() const { return 0.5 * (one() + gamma); }

BlockOperator commutator(const EvenTriple& t, const BlockOperator& a) { return t.D * a - a * t.D; }

BlockOperator iterated_commutator(const EvenTriple& t, const BlockOperator& x, int n) {
  if (n < 0) throw PreconditionError("iterated commutator order must be >= 0");
  const BlockOperator d2 = t.D * t.D;
  BlockOperator out = x;
  for (int i = 0; i < n; ++i) out = d2 * out - out * d2;
  return out;
}

double auto_rescale(EvenTriple& t, const std::vector<BlockOperator>& ops) {
  double worst = 0.0;
  for (const auto& a : ops) worst = std::max(worst, commutator(t, a).norm());
  if (worst < std::sqrt(2.0)) return 1.0;
  const double eps = 1.3 / worst;
  t.D *= eps;
  return eps;
}

double c_half(double n) {
  if (n <= 1.0) throw PreconditionError("C_{n/2} needs n > 1");
  return std::sqrt(M_PI) * std::exp(std::lgamma(0.5 * n - 0.5) - std::lgamma(0.5 * n));
}

cplx trace_with_function(const BlockOperator& g, const EigenDecomp& x, const std::function<cplx(double)>& f) {
  cplx total = 0.0;
  for (std::size_t i = 0; i < x.values.size(); ++i) {
    const Mat& u = x.vectors[i];
    const Mat gu = g.block(i) * u;
    cplx s = 0.0;
    for (Eigen::Index k = 0; k < u.cols(); ++k) s += f(x.values[i](k)) * u.col(k).dot(gu.col(k));
    total += x.alg.block(i).weight * s;
  }
  return total;
}

DoubledTriple::DoubledTriple(EvenTriple base, BlockOperator p) : base_(std::move(base)), p_(std::move(p)) {
  base_.validate();
  if (!is_projection(p_)) throw PreconditionError("p must be a projection");
  if (commutator(p_, base_.gamma).norm() > 1e-10) throw PreconditionError("p must commute with gamma");
  alg2_ = base_.algebra.doubled();
  const BlockOperator one = base_.one();
  dp_ = commutator(base_, p_);
  dp_twist_ = dp_ * (one - 2.0 * p_);
  sigma2_gamma_ = kron2(pauli(2), base_.gamma);
  one_gamma_q_ = kron2(pauli(0), base_.gamma * (2.0 * p_ - one));
}

BlockOperator DoubledTriple::D_w(double w) const { return base_.D + w * dp_twist_; }

BlockOperator DoubledTriple::D_p() const {
  const BlockOperator q = base_.one() - p_;
  return p_ * base_.D * p_ + q * base_.D * q;
}

BlockOperator DoubledTriple::Dtilde(double w, double s) const {
  return kron2(pauli(3), D_w(w)) + s * kron2(pauli(2), 2.0 * p_ - base_.one());
}

BlockOperator DoubledTriple::gamma_tilde() const { return kron2(pauli(3), base_.gamma); }

cplx DoubledTriple::supertrace(const BlockOperator& t2) const {
  return 0.5 * (kron2(pauli(3), BlockOperator::identity(base_.algebra)) * gamma_tilde() * t2).trace();
}

cplx DoubledTriple::one_form(const BlockOperator& dhat, const BlockOperator& y, double n) const {
  const BlockOperator x = dhat - Dtilde(0.0, 0.0);
  if (!x.is_self_adjoint(1e-10) && x.norm() > 1e-14) throw PreconditionError("Dhat - D~ must be self-adjoint");
  if (commutator(x, sigma2_gamma_).norm() > 1e-10 * std::max(1.0, x.norm()))
    throw PreconditionError("Dhat - D~ must commute with sigma2 (x) gamma");
  const EigenDecomp e = herm_eig(dhat);
  return trace_with_function(sigma2_gamma_ * y, e, [n](double l) { return cplx(std::pow(1.0 + l * l, -0.5 * n)); });
}

double DoubledTriple::a_of_w(double w, double n, const QuadratureSpec& quad) const {
  if (n < 2.0) throw PreconditionError("a(w) needs n >= 2");
  auto f = [&](double s) -> CVec {
    const EigenDecomp e = herm_eig(Dtilde(w, s));
    CVec v(1);
    v(0) = 0.25 * trace_with_function(one_gamma_q_, e, [n](double l) { return cplx(std::pow(1.0 + l * l, -0.5 * n)); });
    return v;
  };
  const QuadResult r = integrate_real_line(f, quad.abs_tol, quad.rel_tol, quad.max_intervals);
  if (!r.converged) throw std::runtime_error("a(w) quadrature did not converge");
  return r.value(0).real();
}

double DoubledTriple::graded_s_integral(const BlockOperator& x, double n, const QuadratureSpec& quad) const {
  const EigenDecomp e = herm_eig(x);
  auto f = [&](double s) -> CVec {
    CVec v(1);
    v(0) = trace_with_function(base_.gamma, e, [n, s](double l) { return cplx(std::pow(1.0 + l * l + s * s, -0.5 * n)); });
    return v;
  };
  const QuadResult r = integrate_real_line(f, quad.abs_tol, quad.rel_tol, quad.max_intervals);
  if (!r.converged) throw std::runtime_error("s-integral did not converge");
  return r.value(0).real();
}

std::pair<double, double> DoubledTriple::key_identity_check(double n, const QuadratureSpec& quad) const {
  if (n < 2.0) throw PreconditionError("key identity needs n >= 2");
  const double ind = corner_index(base_.D, base_.gamma, p_);
  const double lhs = ind * c_half(n);
  const double rhs = a_of_w(0.0, n, quad) + 0.5 * graded_s_integral(base_.D, n, quad);
  return {lhs, rhs};
}

double DoubledTriple::square_identity_error(double w, double s) const {
  const BlockOperator dt = Dtilde(w, s);
  const BlockOperator dw = D_w(w);
  const BlockOperator one2 = BlockOperator::identity(alg2_);
  const Eigen::Matrix2cd s32 = pauli(3) * pauli(2);
  const BlockOperator rhs = kron2(pauli(0), dw * dw) + (2.0 * s * (1.0 - w)) * kron2(s32, dp_) + (s * s) * one2;
  return (dt * dt - rhs).norm();
}

cplx DoubledTriple::rectangle_loop(double s_bound, double n, bool second, int nodes) const {
  const BlockOperator s_dir = second ? kron2(pauli(2), base_.one()) : kron2(pauli(2), 2.0 * p_ - base_.one());
  const BlockOperator w_dir = kron2(pauli(3), dp_twist_);
  auto point = [&](double w, double s) {
    return kron2(pauli(3), D_w(w)) + s * s_dir;
  };
  auto scalar = [](cplx v) {
    CVec out(1);
    out(0) = v;
    return out;
  };
  const double N = s_bound;
  // Counter-clockwise in the (w, s) plane: s up at w=1, w back at s=N,
  // s down at w=0, w forward at s=-N.
  auto leg_s = [&](double w) {
    return romberg([&](double s) { return scalar(one_form(point(w, s), s_dir, n)); }, -N, N, nodes, 1e-12, 1e-12)
        .value(0);
  };
  auto leg_w = [&](double s) {
    return romberg([&](double w) { return scalar(one_form(point(w, s), w_dir, n)); }, 0.0, 1.0, nodes, 1e-12, 1e-12)
        .value(0);
  };
  return leg_w(-N) + leg_s(1.0) - leg_w(N) - leg_s(0.0);
}

}  // namespace sfindex
