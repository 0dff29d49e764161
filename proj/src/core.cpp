#include "sfindex/core.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace sfindex {

TracedAlgebra::TracedAlgebra(std::vector<Block> blocks) : blocks_(std::move(blocks)) {
  if (blocks_.empty()) throw PreconditionError("traced algebra needs at least one block");
  for (const auto& b : blocks_) {
    if (b.dim < 1) throw PreconditionError("block dimension must be >= 1");
    if (!(b.weight > 0.0) || !std::isfinite(b.weight))
      throw PreconditionError("block weight must be positive and finite");
  }
}

int TracedAlgebra::total_dim() const {
  int n = 0;
  for (const auto& b : blocks_) n += b.dim;
  return n;
}

TracedAlgebra TracedAlgebra::doubled() const {
  std::vector<Block> out = blocks_;
  for (auto& b : out) b.dim *= 2;
  return TracedAlgebra(out);
}

bool TracedAlgebra::operator==(const TracedAlgebra& other) const {
  if (blocks_.size() != other.blocks_.size()) return false;
  for (std::size_t i = 0; i < blocks_.size(); ++i) {
    if (blocks_[i].dim != other.blocks_[i].dim) return false;
    if (blocks_[i].weight != other.blocks_[i].weight) return false;
  }
  return true;
}

std::string describe(const TracedAlgebra& alg) {
  std::ostringstream os;
  os << "[";
  for (std::size_t i = 0; i < alg.num_blocks(); ++i) {
    if (i) os << ", ";
    os << "(" << alg.block(i).dim << ", " << alg.block(i).weight << ")";
  }
  os << "]";
  return os.str();
}

BlockOperator::BlockOperator(TracedAlgebra alg, std::vector<Mat> blocks)
    : alg_(std::move(alg)), blocks_(std::move(blocks)) {
  if (blocks_.size() != alg_.num_blocks())
    throw PreconditionError("block count does not match algebra");
  for (std::size_t i = 0; i < blocks_.size(); ++i) {
    const int d = alg_.block(i).dim;
    if (blocks_[i].rows() != d || blocks_[i].cols() != d)
      throw PreconditionError("block shape does not match algebra");
  }
}

BlockOperator BlockOperator::zero(const TracedAlgebra& alg) {
  std::vector<Mat> b;
  for (const auto& blk : alg.blocks()) b.push_back(Mat::Zero(blk.dim, blk.dim));
  return BlockOperator(alg, std::move(b));
}

BlockOperator BlockOperator::identity(const TracedAlgebra& alg) {
  std::vector<Mat> b;
  for (const auto& blk : alg.blocks()) b.push_back(Mat::Identity(blk.dim, blk.dim));
  return BlockOperator(alg, std::move(b));
}

BlockOperator BlockOperator::adjoint() const {
  std::vector<Mat> b;
  b.reserve(blocks_.size());
  for (const auto& m : blocks_) b.push_back(m.adjoint());
  return BlockOperator(alg_, std::move(b));
}

cplx BlockOperator::trace() const {
  cplx t = 0.0;
  for (std::size_t i = 0; i < blocks_.size(); ++i) t += alg_.block(i).weight * blocks_[i].trace();
  return t;
}

double BlockOperator::norm() const {
  double n = 0.0;
  for (const auto& m : blocks_) {
    if (m.size() == 0) continue;
    Eigen::JacobiSVD<Mat> svd(m);
    n = std::max(n, svd.singularValues()(0));
  }
  return n;
}

double BlockOperator::frobenius() const {
  double s = 0.0;
  for (const auto& m : blocks_) s += m.squaredNorm();
  return std::sqrt(s);
}

bool BlockOperator::is_self_adjoint(double rel_tol) const {
  double diff = 0.0;
  for (const auto& m : blocks_) diff += (m - m.adjoint()).squaredNorm();
  return std::sqrt(diff) <= rel_tol * std::max(frobenius(), 1e-300);
}

static void check_same(const TracedAlgebra& a, const TracedAlgebra& b) {
  if (a != b) throw PreconditionError("operators live in different algebras");
}

BlockOperator& BlockOperator::operator+=(const BlockOperator& o) {
  check_same(alg_, o.alg_);
  for (std::size_t i = 0; i < blocks_.size(); ++i) blocks_[i] += o.blocks_[i];
  return *this;
}

BlockOperator& BlockOperator::operator-=(const BlockOperator& o) {
  check_same(alg_, o.alg_);
  for (std::size_t i = 0; i < blocks_.size(); ++i) blocks_[i] -= o.blocks_[i];
  return *this;
}

BlockOperator& BlockOperator::operator*=(cplx s) {
  for (auto& m : blocks_) m *= s;
  return *this;
}

BlockOperator operator+(BlockOperator a, const BlockOperator& b) { return a += b; }
BlockOperator operator-(BlockOperator a, const BlockOperator& b) { return a -= b; }
BlockOperator operator-(BlockOperator a) { return a *= -1.0; }
BlockOperator operator*(cplx s, BlockOperator a) { return a *= s; }
BlockOperator operator*(BlockOperator a, cplx s) { return a *= s; }

BlockOperator operator*(const BlockOperator& a, const BlockOperator& b) {
  check_same(a.algebra(), b.algebra());
  std::vector<Mat> out;
  out.reserve(a.num_blocks());
  for (std::size_t i = 0; i < a.num_blocks(); ++i) out.push_back(a.block(i) * b.block(i));
  return BlockOperator(a.algebra(), std::move(out));
}

BlockOperator shift(BlockOperator a, cplx s) {
  for (std::size_t i = 0; i < a.num_blocks(); ++i)
    a.block(i).diagonal().array() += s;
  return a;
}

BlockOperator commutator(const BlockOperator& a, const BlockOperator& b) { return a * b - b * a; }
BlockOperator hermitian_part(const BlockOperator& a) { return 0.5 * (a + a.adjoint()); }

BlockOperator anticommutator(const BlockOperator& a, const BlockOperator& b) { return a * b + b * a; }

double EigenDecomp::min_value() const {
  double m = INFINITY;
  for (const auto& v : values) if (v.size()) m = std::min(m, v.minCoeff());
  return m;
}

double EigenDecomp::max_abs_value() const {
  double m = 0.0;
  for (const auto& v : values) if (v.size()) m = std::max(m, v.cwiseAbs().maxCoeff());
  return m;
}

EigenDecomp herm_eig(const BlockOperator& a) {
  if (!a.is_self_adjoint(1e-12))
    throw NotSelfAdjoint("operator is not self-adjoint within 1e-12 relative tolerance");
  EigenDecomp e;
  e.alg = a.algebra();
  for (std::size_t i = 0; i < a.num_blocks(); ++i) {
    Mat h = 0.5 * (a.block(i) + a.block(i).adjoint());
    Eigen::SelfAdjointEigenSolver<Mat> es(h);
    if (es.info() != Eigen::Success) throw std::runtime_error("eigensolver failed");
    e.values.push_back(es.eigenvalues());
    e.vectors.push_back(es.eigenvectors());
  }
  return e;
}

BlockOperator func_calc(const EigenDecomp& e, const std::function<cplx(double)>& f) {
  std::vector<Mat> out;
  out.reserve(e.values.size());
  for (std::size_t i = 0; i < e.values.size(); ++i) {
    const Mat& u = e.vectors[i];
    CVec fv(e.values[i].size());
    for (Eigen::Index k = 0; k < fv.size(); ++k) fv(k) = f(e.values[i](k));
    out.push_back(u * fv.asDiagonal() * u.adjoint());
  }
  return BlockOperator(e.alg, std::move(out));
}

BlockOperator func_calc(const BlockOperator& a, const std::function<cplx(double)>& f) {
  return func_calc(herm_eig(a), f);
}

BlockOperator complex_power(const EigenDecomp& e, cplx minus_z) {
  const double scale = std::max(e.max_abs_value(), 1e-300);
  for (const auto& v : e.values)
    for (Eigen::Index k = 0; k < v.size(); ++k)
      if (v(k) <= 1e-14 * scale) throw SingularOperator("complex_power needs a positive operator");
  return func_calc(e, [minus_z](double x) { return std::exp(minus_z * std::log(x)); });
}

BlockOperator complex_power(const BlockOperator& x, cplx minus_z) {
  return complex_power(herm_eig(x), minus_z);
}

BlockOperator resolvent(const EigenDecomp& x, cplx lambda) {
  const double scale = std::max({x.max_abs_value(), std::abs(lambda), 1.0});
  for (const auto& v : x.values)
    for (Eigen::Index k = 0; k < v.size(); ++k)
      if (std::abs(lambda - v(k)) <= 1e-14 * scale)
        throw SingularOperator("resolvent evaluated on the spectrum");
  return func_calc(x, [lambda](double t) { return 1.0 / (lambda - t); });
}

BlockOperator resolvent(const BlockOperator& x, cplx lambda) { return resolvent(herm_eig(x), lambda); }

Eigen::Matrix2cd pauli(int k) {
  const cplx i(0.0, 1.0);
  Eigen::Matrix2cd s;
  switch (k) {
    case 0: s << 1, 0, 0, 1; break;
    case 1: s << 0, 1, 1, 0; break;
    case 2: s << 0, -i, i, 0; break;
    case 3: s << 1, 0, 0, -1; break;
    default: throw PreconditionError("pauli index must be 0..3");
  }
  return s;
}

BlockOperator kron2(const Eigen::Matrix2cd& s, const BlockOperator& x) {
  const TracedAlgebra alg2 = x.algebra().doubled();
  std::vector<Mat> out;
  for (std::size_t i = 0; i < x.num_blocks(); ++i) {
    const Mat& m = x.block(i);
    const Eigen::Index d = m.rows();
    Mat k(2 * d, 2 * d);
    for (int r = 0; r < 2; ++r)
      for (int c = 0; c < 2; ++c) k.block(r * d, c * d, d, d) = s(r, c) * m;
    out.push_back(std::move(k));
  }
  return BlockOperator(alg2, std::move(out));
}

}  // namespace sfindex
