#include "sfindex/constants.hpp"

#include "sfindex/core.hpp"

#include <cmath>
#include <numbers>

namespace sfindex {

int total(const MultiIndex& k) {
  int s = 0;
  for (int v : k) s += v;
  return s;
}

long long factorial(int n) {
  if (n < 0 || n > 20) throw PreconditionError("factorial argument out of range");
  long long f = 1;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

Rational alpha(const MultiIndex& k) {
  long long den = 1;
  int partial = 0;
  for (std::size_t j = 0; j < k.size(); ++j) {
    if (k[j] < 0) throw PreconditionError("multi-index entries must be nonnegative");
    den *= factorial(k[j]);
    partial += k[j] + 1;
    den *= partial;
  }
  return Rational(1, den);
}

Rational expansion_coefficient(const MultiIndex& k) {
  return Rational(factorial(total(k) + static_cast<int>(k.size()))) * alpha(k);
}

std::vector<long long> sigma_elementary(int n) {
  if (n < 0) throw PreconditionError("sigma_elementary needs n >= 0");
  if (n == 0) return {1};
  // poly[i] is the coefficient of z^i.
  std::vector<long long> poly{0, 1};
  for (int j = 1; j < n; ++j) {
    std::vector<long long> next(poly.size() + 1, 0);
    for (std::size_t i = 0; i < poly.size(); ++i) {
      next[i] += j * poly[i];
      next[i + 1] += poly[i];
    }
    poly = std::move(next);
  }
  return std::vector<long long>(poly.begin() + 1, poly.end());
}

static void require_even(int m) {
  if (m < 0 || m % 2) throw PreconditionError("degree must be even and nonnegative");
}

Rational eta(int m) {
  require_even(m);
  return Rational((1LL << (m + 1)) * factorial(m / 2), factorial(m));
}

Rational chern_coefficient(int m) {
  require_even(m);
  if (m == 0) return Rational(1);
  const long long sign = (m / 2) % 2 ? -1 : 1;
  return Rational(sign * factorial(m), 2 * factorial(m / 2));
}

double c_norm(double halfn) {
  if (!(halfn > 0.5)) throw PreconditionError("C_{n/2} needs n/2 > 1/2");
  return std::exp(std::lgamma(0.5) + std::lgamma(halfn - 0.5) - std::lgamma(halfn));
}

double legendre_duplication_check(int m) {
  if (m < 0) throw PreconditionError("m must be nonnegative");
  const double lhs = std::exp2(m - 1) * std::tgamma(0.5 * (m + 1));
  const double rhs = m == 0 ? 0.5 * std::sqrt(std::numbers::pi)
                            : std::sqrt(std::numbers::pi) * std::tgamma(m) / std::tgamma(0.5 * m);
  return std::abs(lhs - rhs) / std::abs(rhs);
}

std::vector<MultiIndex> multi_indices(int m, int max_total) {
  std::vector<MultiIndex> out;
  MultiIndex k(m, 0);
  if (m == 0) return {k};
  // Odometer over [0, max_total]^m, last entry fastest, pruned by |k|.
  while (true) {
    if (total(k) <= max_total) out.push_back(k);
    int i = m - 1;
    while (i >= 0 && k[i] == max_total) k[i--] = 0;
    if (i < 0) break;
    ++k[i];
  }
  return out;
}

std::pair<double, double> gamma_constant_sides(int m, const MultiIndex& k, double q, double r) {
  require_even(m);
  const int kk = total(k);
  const double sign = ((m / 2 + kk) % 2) ? -1.0 : 1.0;
  const double pref = sign * static_cast<double>(factorial(m)) / factorial(m / 2) *
                      boost::rational_cast<double>(alpha(k)) / 2.0;
  const double zr = 0.5 * q + r;
  const double lhs = pref * std::sqrt(std::numbers::pi) *
                     std::exp(std::lgamma(zr + kk + 0.5 * (m - 1)) - std::lgamma(zr));
  const std::vector<long long> sig = sigma_elementary(kk + m / 2);
  const double x = r + 0.5 * (q - 1.0);
  double poly = 0.0;
  if (kk + m / 2 == 0) {
    poly = 1.0;
  } else {
    for (std::size_t j = 0; j < sig.size(); ++j) poly += sig[j] * std::pow(x, static_cast<double>(j + 1));
  }
  return {lhs, pref * c_norm(zr) * poly};
}

}  // namespace sfindex
