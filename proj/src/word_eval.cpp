#include "sfindex/word_eval.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

namespace sfindex {

void ContourSpec::validate() const {
  if (!(a > 0.0 && a < 0.5)) throw PreconditionError("contour abscissa must lie in (0, 1/2)");
  if (!(abs_tol > 0.0) || !(h0 > 0.0) || max_levels < 1) throw PreconditionError("bad contour quadrature spec");
}

double contour_t_max(const std::vector<double>& z, double bound, double decay, const ContourSpec& spec) {
  if (z.empty()) throw PreconditionError("no exponents");
  const double p = *std::min_element(z.begin(), z.end()) + decay;
  if (!(p > 1.0)) throw PreconditionError("contour integrand does not decay fast enough");
  // Both tails together: bound v^{1-p} / (pi (p-1)) <= abs_tol / 10.
  const double target = spec.abs_tol / 10.0;
  const double vmax = std::max(std::pow(std::max(bound, 1e-300) / (std::numbers::pi * (p - 1.0) * target),
                                        1.0 / (p - 1.0)),
                               10.0);
  return std::asinh(vmax / spec.a);
}

QuadResult contour_integral(const std::function<cplx(cplx)>& f, const std::vector<double>& z, double bound,
                            double decay, const ContourSpec& spec) {
  spec.validate();
  const double tmax = contour_t_max(z, bound, decay, spec);
  const double a = spec.a;
  // dlambda = -i dv; (1/2 pi i)(-i) = -1/(2 pi).
  VecFn g = [&](double v) {
    const cplx lam(a, -v);
    const cplx fv = f(lam);
    const cplx logl = std::log(lam);
    CVec out(z.size());
    for (std::size_t j = 0; j < z.size(); ++j) out(j) = -std::exp(-z[j] * logl) * fv / (2.0 * std::numbers::pi);
    return out;
  };
  return trapezoid_sinh(g, a, tmax, spec.abs_tol, spec.rel_tol, spec.h0, spec.max_levels);
}

SpectralClasses::SpectralClasses(const EigenDecomp& x) {
  std::vector<double> all;
  for (const auto& v : x.values)
    for (Eigen::Index k = 0; k < v.size(); ++k) all.push_back(v(k));
  std::sort(all.begin(), all.end());
  const double scale = std::max(1.0, x.max_abs_value());
  for (double v : all)
    if (values.empty() || v - values.back() > 1e-9 * scale) values.push_back(v);
  for (const auto& v : x.values) {
    std::vector<int> c(v.size());
    for (Eigen::Index k = 0; k < v.size(); ++k) {
      auto it = std::lower_bound(values.begin(), values.end(), v(k) - 1e-9 * scale);
      c[k] = static_cast<int>(it - values.begin());
    }
    class_of.push_back(std::move(c));
  }
}

namespace {

// Sum over class tuples of tr(M_0[e, a_0] M_1[a_0, a_1] ... M_m[a_{m-1}, e]),
// stored at index a_0 + c a_1 + ... + c^m a_m with a_m = e.
void accumulate_tensor(const std::vector<Mat>& ops, const std::vector<std::vector<int>>& members, double w,
                       std::vector<cplx>& t) {
  const int c = static_cast<int>(members.size());
  const int m = static_cast<int>(ops.size()) - 1;
  auto sub = [&](const Mat& mat, int r, int col) {
    Mat s(members[r].size(), members[col].size());
    for (std::size_t i = 0; i < members[r].size(); ++i)
      for (std::size_t j = 0; j < members[col].size(); ++j) s(i, j) = mat(members[r][i], members[col][j]);
    return s;
  };
  // Pre-slice every op into class blocks.
  std::vector<std::vector<Mat>> sl(ops.size(), std::vector<Mat>(c * c));
  for (std::size_t k = 0; k < ops.size(); ++k)
    for (int r = 0; r < c; ++r)
      for (int col = 0; col < c; ++col) sl[k][r * c + col] = sub(ops[k], r, col);
  std::vector<long long> stride(m + 1, 1);
  for (int k = 1; k <= m; ++k) stride[k] = stride[k - 1] * c;
  for (int e = 0; e < c; ++e) {
    if (members[e].empty()) continue;
    if (m == 0) {
      t[e] += w * sl[0][e * c + e].trace();
      continue;
    }
    // Depth-first over a_0..a_{m-1}.
    std::vector<Mat> left(m);
    std::vector<int> idx(m, 0);
    int depth = 0;
    idx[0] = -1;
    while (depth >= 0) {
      if (++idx[depth] >= c) {
        --depth;
        continue;
      }
      const int a = idx[depth];
      if (members[a].empty()) continue;
      if (depth == 0) left[0] = sl[0][e * c + a];
      else left[depth] = left[depth - 1] * sl[depth][idx[depth - 1] * c + a];
      if (depth == m - 1) {
        const cplx v = (left[depth] * sl[m][a * c + e]).trace();
        long long pos = stride[m] * e;
        for (int k = 0; k < m; ++k) pos += stride[k] * idx[k];
        t[pos] += w * v;
      } else {
        ++depth;
        idx[depth] = -1;
      }
    }
  }
}

}  // namespace

ResolventWord::ResolventWord(const EigenDecomp& x, const SpectralClasses& classes,
                             const std::vector<BlockOperator>& ops, std::vector<int> powers)
    : powers_(std::move(powers)) {
  if (ops.empty() || ops.size() != powers_.size()) throw PreconditionError("word needs one power per operator");
  const int m = static_cast<int>(ops.size()) - 1;
  const int c = classes.size();
  double direct_cost = 0.0, tensor_cost = std::pow(static_cast<double>(c), m + 1);
  for (std::size_t b = 0; b < x.vectors.size(); ++b) direct_cost += (m + 1) * std::pow(x.vectors[b].rows(), 3.0);
  tensor_ = tensor_cost <= direct_cost && tensor_cost <= 4e6;
  nclass_ = c;
  bound_ = 0.0;
  for (std::size_t b = 0; b < x.vectors.size(); ++b) {
    const Mat& u = x.vectors[b];
    const double w = x.alg.block(b).weight;
    std::vector<Mat> rot;
    double bnd = w * static_cast<double>(u.rows());
    for (const auto& op : ops) {
      rot.push_back(u.adjoint() * op.block(b) * u);
      bnd *= std::max(rot.back().norm(), 0.0);
    }
    bound_ += bnd;
    if (tensor_) {
      if (weights_.empty()) weights_.assign(static_cast<std::size_t>(tensor_cost), cplx(0.0));
      std::vector<std::vector<int>> members(c);
      for (int k = 0; k < static_cast<int>(classes.class_of[b].size()); ++k) members[classes.class_of[b][k]].push_back(k);
      accumulate_tensor(rot, members, w, weights_);
    } else {
      rotated_.push_back(std::move(rot));
      block_values_.push_back(x.values[b]);
      block_weights_.push_back(w);
    }
  }
  values_ = classes.values;
  for (int p : powers_) max_power_ = std::max(max_power_, p);
  if (tensor_) {
    std::map<std::vector<std::pair<int, int>>, cplx> merged;
    std::vector<std::pair<int, int>> key(m + 1);
    for (std::size_t pos = 0; pos < weights_.size(); ++pos) {
      if (weights_[pos] == cplx(0.0)) continue;
      std::size_t rem = pos;
      for (int k = 0; k <= m; ++k) {
        key[k] = {static_cast<int>(rem % c), powers_[k]};
        rem /= c;
      }
      std::vector<std::pair<int, int>> sorted = key;
      std::sort(sorted.begin(), sorted.end());
      merged[sorted] += weights_[pos];
    }
    if (merged.size() * (m + 1) < weights_.size()) {
      for (auto& [k, v] : merged) {
        keys_.push_back(k);
        merged_.push_back(v);
      }
      weights_.clear();
      weights_.shrink_to_fit();
    }
  }
}

int ResolventWord::total_power() const {
  int s = 0;
  for (int p : powers_) s += p;
  return s;
}

cplx ResolventWord::operator()(cplx mu) const {
  const int m = static_cast<int>(powers_.size()) - 1;
  if (tensor_ && !merged_.empty()) {
    std::vector<CVec> rp(max_power_ + 1, CVec::Ones(nclass_));
    for (int a = 0; a < nclass_; ++a) {
      const cplx base = 1.0 / (mu - values_[a]);
      for (int p = 1; p <= max_power_; ++p) rp[p](a) = rp[p - 1](a) * base;
    }
    cplx sum = 0.0;
    for (std::size_t e = 0; e < merged_.size(); ++e) {
      cplx v = merged_[e];
      for (const auto& [a, p] : keys_[e]) v *= rp[p](a);
      sum += v;
    }
    return sum;
  }
  if (tensor_) {
    if (weights_.empty()) return 0.0;
    const int c = nclass_;
    std::vector<CVec> r(m + 1, CVec(c));
    for (int a = 0; a < c; ++a) {
      const cplx base = 1.0 / (mu - values_[a]);
      for (int k = 0; k <= m; ++k) {
        cplx v = 1.0;
        for (int p = 0; p < powers_[k]; ++p) v *= base;
        r[k](a) = v;
      }
    }
    // Contract the slowest index first.
    std::vector<cplx> cur = weights_;
    long long len = static_cast<long long>(cur.size());
    for (int k = m; k >= 0; --k) {
      const long long inner = len / c;
      std::vector<cplx> next(inner, cplx(0.0));
      for (int a = 0; a < c; ++a) {
        const cplx ra = r[k](a);
        if (ra == cplx(0.0)) continue;
        const cplx* src = cur.data() + a * inner;
        for (long long j = 0; j < inner; ++j) next[j] += src[j] * ra;
      }
      cur = std::move(next);
      len = inner;
    }
    return cur[0];
  }
  cplx total = 0.0;
  for (std::size_t b = 0; b < rotated_.size(); ++b) {
    const RVec& ev = block_values_[b];
    std::vector<CVec> r(m + 1, CVec(ev.size()));
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
      const cplx base = 1.0 / (mu - ev(i));
      for (int k = 0; k <= m; ++k) {
        cplx v = 1.0;
        for (int p = 0; p < powers_[k]; ++p) v *= base;
        r[k](i) = v;
      }
    }
    Mat acc = rotated_[b][0] * r[0].asDiagonal();
    for (int k = 1; k <= m; ++k) acc = (acc * rotated_[b][k]) * r[k].asDiagonal();
    total += block_weights_[b] * acc.trace();
  }
  return total;
}

}  // namespace sfindex
