#include "sfindex/fredholm.hpp"

#include <algorithm>
#include <cmath>

namespace sfindex {

bool is_projection(const BlockOperator& p, double tol) {
  return (p * p - p).norm() <= tol && (p - p.adjoint()).norm() <= tol;
}

SkewCorner::SkewCorner(BlockOperator p, BlockOperator q) : P(std::move(p)), Q(std::move(q)) {
  if (!is_projection(P) || !is_projection(Q))
    throw PreconditionError("skew corner needs orthogonal projections");
}

std::vector<Mat> range_basis(const BlockOperator& p) {
  std::vector<Mat> out;
  const EigenDecomp e = herm_eig(p);
  for (std::size_t i = 0; i < e.values.size(); ++i) {
    std::vector<int> cols;
    for (Eigen::Index k = 0; k < e.values[i].size(); ++k)
      if (e.values[i](k) > 0.5) cols.push_back(static_cast<int>(k));
    Mat w(e.vectors[i].rows(), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t c = 0; c < cols.size(); ++c) w.col(c) = e.vectors[i].col(cols[c]);
    out.push_back(std::move(w));
  }
  return out;
}

constexpr double kZeroFloor = 1e-12;

KernelProjection kernel_projection(const BlockOperator& t, const BlockOperator& q, double tol) {
  const std::vector<Mat> w = range_basis(q);
  std::vector<Eigen::JacobiSVD<Mat>> svds;
  double smax = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (w[i].cols() == 0) {
      svds.emplace_back();
      continue;
    }
    Mat m = t.block(i) * w[i];
    svds.emplace_back(m, Eigen::ComputeFullV);
    if (svds.back().singularValues().size()) smax = std::max(smax, svds.back().singularValues()(0));
  }
  // Singular values below kZeroFloor are rounding residue of an exact zero;
  // without the floor a numerically vanishing T would have no kernel.
  const double thr = std::max(tol * smax, kZeroFloor);
  KernelProjection out;
  out.sigma_max = smax;
  std::vector<Mat> blocks;
  for (std::size_t i = 0; i < w.size(); ++i) {
    const int d = t.algebra().block(i).dim;
    if (w[i].cols() == 0) {
      blocks.push_back(Mat::Zero(d, d));
      continue;
    }
    const auto& svd = svds[i];
    const RVec& sv = svd.singularValues();
    const Mat& v = svd.matrixV();
    Mat ker(d, 0);
    for (Eigen::Index k = 0; k < v.cols(); ++k) {
      const bool has_sv = k < sv.size();
      const double s = has_sv ? sv(k) : 0.0;
      if (has_sv && thr > kZeroFloor && s > thr / 10.0 && s < thr * 10.0) out.ambiguous = true;
      if (!has_sv || s <= thr) {
        ker.conservativeResize(d, ker.cols() + 1);
        ker.col(ker.cols() - 1) = w[i] * v.col(k);
      }
    }
    blocks.push_back(ker * ker.adjoint());
    out.trace += t.algebra().block(i).weight * static_cast<double>(ker.cols());
  }
  out.projection = BlockOperator(t.algebra(), std::move(blocks));
  return out;
}

static void require_in_corner(const BlockOperator& t, const BlockOperator& p, const BlockOperator& q) {
  const double scale = std::max(t.norm(), 1.0);
  if ((t - p * t * q).norm() > 1e-10 * scale)
    throw PreconditionError("operator is not supported in the corner P N Q");
}

FredholmReport fredholm_index(const BlockOperator& t, const SkewCorner& c, double tol) {
  require_in_corner(t, c.P, c.Q);
  const KernelProjection k = kernel_projection(t, c.Q, tol);
  const KernelProjection ck = kernel_projection(t.adjoint(), c.P, tol);
  FredholmReport r;
  r.kerQ_trace = k.trace;
  r.cokerP_trace = ck.trace;
  r.index = k.trace - ck.trace;
  r.ambiguous = k.ambiguous || ck.ambiguous;
  return r;
}

std::pair<double, double> product_index_check(const BlockOperator& s, const BlockOperator& t,
                                              const BlockOperator& g, const BlockOperator& p,
                                              const BlockOperator& q, double tol) {
  const double it = fredholm_index(t, SkewCorner(p, q), tol).index;
  const double is = fredholm_index(s, SkewCorner(g, p), tol).index;
  const double ist = fredholm_index(s * t, SkewCorner(g, q), tol).index;
  return {ist, is + it};
}

BlockOperator bounded_transform(const BlockOperator& t, const SkewCorner& c) {
  require_in_corner(t, c.P, c.Q);
  const BlockOperator tt = t.adjoint() * t;
  return t * func_calc(tt, [](double x) { return cplx(1.0 / std::sqrt(1.0 + std::max(x, 0.0))); });
}

double transform_continuity_check(const BlockOperator& t, const BlockOperator& a, const SkewCorner& c) {
  const BlockOperator f0 = bounded_transform(t, c);
  const BlockOperator f1 = bounded_transform(t + a, c);
  return (f0 - f1).norm() - a.norm();
}

ParametrixReport parametrix_check(const BlockOperator& t, const BlockOperator& s, const SkewCorner& c) {
  ParametrixReport r;
  r.k_left = s * t - c.Q;
  r.k_right = t * s - c.P;
  r.left_residual = r.k_left.norm();
  r.right_residual = r.k_right.norm();
  const double tol = 1e-10 * std::max({1.0, r.left_residual, r.right_residual});
  r.in_corner = (r.k_left - c.Q * r.k_left * c.Q).norm() <= tol &&
                (r.k_right - c.P * r.k_right * c.P).norm() <= tol;
  return r;
}

std::pair<BlockOperator, BlockOperator> polar_decomposition(const BlockOperator& t, double tol) {
  std::vector<Mat> vs, abs;
  double smax = 0.0;
  std::vector<Eigen::JacobiSVD<Mat>> svds;
  for (std::size_t i = 0; i < t.num_blocks(); ++i) {
    svds.emplace_back(t.block(i), Eigen::ComputeFullU | Eigen::ComputeFullV);
    if (svds.back().singularValues().size()) smax = std::max(smax, svds.back().singularValues()(0));
  }
  for (std::size_t i = 0; i < t.num_blocks(); ++i) {
    const auto& svd = svds[i];
    const RVec& sv = svd.singularValues();
    const Eigen::Index d = t.block(i).rows();
    Mat v = Mat::Zero(d, d);
    for (Eigen::Index k = 0; k < sv.size(); ++k)
      if (sv(k) > tol * smax) v += svd.matrixU().col(k) * svd.matrixV().col(k).adjoint();
    vs.push_back(v);
    abs.push_back(svd.matrixV() * sv.cast<cplx>().asDiagonal() * svd.matrixV().adjoint());
  }
  return {BlockOperator(t.algebra(), vs), BlockOperator(t.algebra(), abs)};
}

static void require_grading(const BlockOperator& d, const BlockOperator& gamma) {
  if ((gamma * gamma - BlockOperator::identity(gamma.algebra())).norm() > 1e-10 ||
      (gamma - gamma.adjoint()).norm() > 1e-10)
    throw PreconditionError("grading must be a self-adjoint unitary");
  if (anticommutator(d, gamma).norm() > 1e-10 * std::max(1.0, d.norm()))
    throw PreconditionError("grading does not anticommute with D");
}

McKeanSingerResult mckean_singer(const BlockOperator& d, const BlockOperator& gamma,
                                 const std::function<double(double)>& f, double tol) {
  require_grading(d, gamma);
  const double f0 = f(0.0);
  if (f0 == 0.0) throw PreconditionError("f(0) must be nonzero");
  const BlockOperator one = BlockOperator::identity(d.algebra());
  const BlockOperator P = 0.5 * (one + gamma);
  const BlockOperator Pp = one - P;
  const BlockOperator dplus = Pp * d * P;
  const FredholmReport rep = fredholm_index(dplus, SkewCorner(Pp, P), tol);
  McKeanSingerResult r;
  r.kernel_index = rep.index;
  r.ambiguous = rep.ambiguous;
  r.trace_formula = (gamma * func_calc(d, [&](double x) { return cplx(f(x)); })).trace().real() / f0;
  return r;
}

double corner_index(const BlockOperator& d, const BlockOperator& gamma, const BlockOperator& p, double tol) {
  const BlockOperator one = BlockOperator::identity(d.algebra());
  const BlockOperator P = 0.5 * (one + gamma);
  const BlockOperator pplus = P * p, pminus = (one - P) * p;
  return fredholm_index(pminus * d * pplus, SkewCorner(pminus, pplus), tol).index;
}

McKeanSingerResult mckean_singer_compressed(const BlockOperator& d, const BlockOperator& gamma,
                                            const BlockOperator& p, double n, double a, double tol) {
  require_grading(d, gamma);
  if (!is_projection(p)) throw PreconditionError("p must be a projection");
  if (commutator(p, gamma).norm() > 1e-10) throw PreconditionError("p must commute with the grading");
  if (a < 0.0) throw PreconditionError("a must be nonnegative");
  const BlockOperator one = BlockOperator::identity(d.algebra());
  const BlockOperator P = 0.5 * (one + gamma);
  const BlockOperator pplus = P * p, pminus = (one - P) * p;
  const FredholmReport rep = fredholm_index(pminus * d * pplus, SkewCorner(pminus, pplus), tol);
  // pDp commutes with p, so (p + a + (pDp)^2)^{-n/2} restricted to p(H) is
  // g(pDp) p with g(x) = (1 + a + x^2)^{-n/2}.
  const BlockOperator pdp = hermitian_part(p * d * p);
  const BlockOperator g = func_calc(pdp, [&](double x) { return cplx(std::pow(1.0 + a + x * x, -0.5 * n)); });
  McKeanSingerResult r;
  r.kernel_index = rep.index;
  r.ambiguous = rep.ambiguous;
  r.trace_formula = std::pow(1.0 + a, 0.5 * n) * (gamma * p * g).trace().real();
  return r;
}

}  // namespace sfindex
