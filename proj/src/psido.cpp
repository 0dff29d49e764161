#include "sfindex/psido.hpp"

#include <cmath>
#include <map>
#include <numbers>

namespace sfindex {

bool SymbolicWord::collected() const {
  for (std::size_t j = 0; j + 1 < powers.size(); ++j)
    if (powers[j] != 0) return false;
  return true;
}

MoveRightSymbolic move_right_symbolic(int m, int max_order) {
  if (m < 0 || max_order < 0) throw PreconditionError("move-right expansion needs m >= 0 and order >= 0");
  using Key = std::pair<MultiIndex, std::vector<int>>;
  std::map<Key, long long> open, done, rest;
  open[{MultiIndex(m, 0), std::vector<int>(m + 1, 1)}] = 1;
  while (!open.empty()) {
    auto node = open.begin();
    const auto [k, powers] = node->first;
    const long long count = node->second;
    open.erase(node);
    int j = 0;
    while (j < m && powers[j] == 0) ++j;
    if (j == m) {
      done[{k, powers}] += count;
      continue;
    }
    const int c = powers[j];
    {
      std::vector<int> p = powers;
      p[j] = 0;
      p[j + 1] += c;
      open[{k, p}] += count;
    }
    MultiIndex k2 = k;
    ++k2[j];
    const bool overflow = total(k2) > max_order;
    for (int i = 1; i <= c; ++i) {
      std::vector<int> p = powers;
      p[j] = i;
      p[j + 1] = c + 1 - i + powers[j + 1];
      (overflow ? rest : open)[{k2, p}] += count;
    }
  }
  MoveRightSymbolic out;
  for (const auto& [key, count] : done) out.collected.push_back({count, key.first, key.second});
  for (const auto& [key, count] : rest) out.remainder.push_back({count, key.first, key.second});
  return out;
}

static BlockOperator resolvent_power(const EigenDecomp& d2, double s, cplx lambda, int p) {
  const double shift = 1.0 + s * s;
  return func_calc(d2, [&](double x) { return std::pow(1.0 / (lambda - shift - x), p); });
}

BlockOperator materialize(const SymbolicWord& w, const std::vector<std::vector<BlockOperator>>& derived,
                          const EigenDecomp& d2, double s, cplx lambda) {
  BlockOperator acc = derived[0][0];
  for (std::size_t j = 0; j < w.powers.size(); ++j) {
    if (j > 0) acc = acc * derived[j][w.k[j - 1]];
    if (w.powers[j] > 0) acc = acc * resolvent_power(d2, s, lambda, w.powers[j]);
  }
  return static_cast<double>(w.count) * acc;
}

MoveRightExpansion move_right_expand(const EvenTriple& t, const std::vector<BlockOperator>& factors, double s,
                                     cplx lambda, int order_2n) {
  if (factors.empty()) throw PreconditionError("word needs at least a_0");
  const int m = static_cast<int>(factors.size()) - 1;
  const int maxo = order_2n - m;
  if (maxo < 0) throw PreconditionError("expansion order 2N must be at least m");
  const EigenDecomp d2 = herm_eig(hermitian_part(t.D * t.D));
  std::vector<std::vector<BlockOperator>> derived(m + 1);
  derived[0] = {factors[0]};
  for (int i = 1; i <= m; ++i) {
    derived[i].push_back(factors[i]);
    for (int k = 1; k <= maxo + 1; ++k) derived[i].push_back(iterated_commutator(t, derived[i].back(), 1));
  }
  const MoveRightSymbolic sym = move_right_symbolic(m, maxo);
  MoveRightExpansion out;
  const BlockOperator r1 = resolvent_power(d2, s, lambda, 1);
  out.original = factors[0] * r1;
  for (int i = 1; i <= m; ++i) out.original = out.original * factors[i] * r1;
  out.collected_sum = BlockOperator::zero(t.algebra);
  for (const auto& w : sym.collected) {
    ExpansionTerm term;
    term.k = w.k;
    term.coefficient = expansion_coefficient(w.k);
    if (term.coefficient != Rational(w.count)) throw std::logic_error("rewriting count differs from C(k)");
    term.resolvent_power = total(w.k) + m + 1;
    term.word.push_back(factors[0]);
    for (int i = 1; i <= m; ++i) term.word.push_back(derived[i][w.k[i - 1]]);
    out.collected_sum += materialize(w, derived, d2, s, lambda);
    out.terms.push_back(std::move(term));
  }
  out.remainder = BlockOperator::zero(t.algebra);
  for (const auto& w : sym.remainder) out.remainder += materialize(w, derived, d2, s, lambda);
  return out;
}

ResolventExpansion resolvent_expand(const DoubledTriple& dt, double s, cplx lambda, int order_2n) {
  if (order_2n < 0) throw PreconditionError("expansion order must be nonnegative");
  const EvenTriple& t = dt.base();
  const BlockOperator rb = resolvent(shift(hermitian_part(t.D * t.D), 1.0 + s * s), lambda);
  const BlockOperator r = kron2(pauli(0), rb);
  const BlockOperator v = kron2(2.0 * s * pauli(3) * pauli(2), dt.commutator_dp());
  const BlockOperator dt0 = dt.Dtilde(0.0, s);
  ResolventExpansion out;
  out.target = resolvent(shift(hermitian_part(dt0 * dt0), 1.0), lambda);
  const BlockOperator rv = r * v;
  BlockOperator pw = BlockOperator::identity(r.algebra());
  for (int m = 0; m <= order_2n; ++m) {
    out.terms.push_back(pw * r);
    pw = pw * rv;
  }
  out.remainder = pw * out.target;
  return out;
}

std::pair<BlockOperator, BlockOperator> cauchy_power_integral(const BlockOperator& d, double shift_c, double z, int k,
                                                              const ContourSpec& spec) {
  if (k < 0) throw PreconditionError("k must be nonnegative");
  if (!(z + k > 0.0)) throw PreconditionError("exponent out of range");
  spec.validate();
  const EigenDecomp e = herm_eig(hermitian_part(d * d));
  std::vector<double> xs;
  for (const auto& v : e.values)
    for (Eigen::Index i = 0; i < v.size(); ++i) xs.push_back(v(i) + shift_c);
  for (double x : xs)
    if (x <= spec.a) throw PreconditionError("spectrum must lie to the right of the contour");
  const double a = spec.a;
  VecFn g = [&](double v) {
    const cplx lam(a, -v);
    const cplx pre = -std::exp(-z * std::log(lam)) / (2.0 * std::numbers::pi);
    CVec out(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) out(i) = pre * std::pow(1.0 / (lam - xs[i]), k + 1);
    return out;
  };
  const double tmax = contour_t_max({z}, 1.0, k + 1.0, spec);
  const QuadResult q = trapezoid_sinh(g, a, tmax, spec.abs_tol, spec.rel_tol, spec.h0, spec.max_levels);
  std::size_t pos = 0;
  const double coef = (k % 2 ? -1.0 : 1.0) * std::exp(std::lgamma(z + k) - std::lgamma(z) - std::lgamma(k + 1.0));
  std::vector<Mat> num, closed;
  for (std::size_t b = 0; b < e.values.size(); ++b) {
    const Mat& u = e.vectors[b];
    CVec nv(u.cols()), cv(u.cols());
    for (Eigen::Index i = 0; i < nv.size(); ++i, ++pos) {
      nv(i) = q.value(pos);
      cv(i) = coef * std::pow(xs[pos], -z - k);
    }
    num.push_back(u * nv.asDiagonal() * u.adjoint());
    closed.push_back(u * cv.asDiagonal() * u.adjoint());
  }
  return {BlockOperator(d.algebra(), num), BlockOperator(d.algebra(), closed)};
}

double s_integral_closed(double c, int m, double big_a) {
  const double h = 0.5 * (m + 1);
  return std::exp2(m - 1) * std::exp(std::lgamma(h) + std::lgamma(big_a - h) - std::lgamma(big_a)) *
         std::pow(c, h - big_a);
}

std::pair<double, double> s_integral_gamma(double c, int m, double big_a) {
  if (!(c > 0.0)) throw PreconditionError("c must be positive");
  if (m < 0 || m % 2) throw PreconditionError("m must be even and nonnegative");
  if (!(big_a > 0.5 * (m + 1))) throw PreconditionError("s-integral diverges: need A > (m+1)/2");
  const QuadResult q = integrate_half_line([&](double s) {
    CVec v(1);
    v(0) = std::pow(2.0 * s, m) * std::pow(c + s * s, -big_a);
    return v;
  }, 0.0, 1e-14, 4000);
  return {q.value(0).real(), s_integral_closed(c, m, big_a)};
}

}  // namespace sfindex
