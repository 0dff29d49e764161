#pragma once

// Exact combinatorial constants of the local index formula.

#include <boost/rational.hpp>

#include <vector>

namespace sfindex {

using Rational = boost::rational<long long>;
using MultiIndex = std::vector<int>;

int total(const MultiIndex& k);  // |k|
long long factorial(int n);

// alpha(k) = 1 / (k_1! ... k_m! (k_1+1)(k_1+k_2+2) ... (|k|+m)).
Rational alpha(const MultiIndex& k);
// C(k) = (|k|+m)! alpha(k), the coefficient of the right-collected word.
Rational expansion_coefficient(const MultiIndex& k);

// Coefficients of prod_{j=0}^{n-1} (z+j) = sum_{j=1}^n sigma_{n,j} z^j, returned
// as sigma[j-1]. n = 0 gives the empty product, returned as {1} (constant term).
std::vector<long long> sigma_elementary(int n);

// eta_m = 2^{m+1} (m/2)! / m! for even m.
Rational eta(int m);

// Coefficient of Ch_m(p) = c_m (2p-1) (x) p^{(x) m}; c_0 = 1 (Ch_0 = p).
Rational chern_coefficient(int m);

// C_{h} = Gamma(1/2) Gamma(h - 1/2) / Gamma(h), h = n/2 > 1/2.
double c_norm(double halfn);

// Relative error of 2^{m-1} Gamma((m+1)/2) = sqrt(pi) Gamma(m)/Gamma(m/2),
// the m = 0 right side being sqrt(pi)/2.
double legendre_duplication_check(int m);

// All k in N^m with |k| <= max_total, lexicographic.
std::vector<MultiIndex> multi_indices(int m, int max_total);

// Both sides of the Gamma simplification for the (m, k) strand at (q, r):
// lhs = s * (m!/(m/2)!) * (alpha(k)/2) * sqrt(pi) * Gamma(q/2+r+|k|+(m-1)/2) / Gamma(q/2+r),
// rhs = s * (m!/(m/2)!) * (alpha(k)/2) * C_{q/2+r} * sum_j sigma_{h,j} (r+(q-1)/2)^j,
// with s = (-1)^{m/2+|k|} and h = |k| + m/2.
std::pair<double, double> gamma_constant_sides(int m, const MultiIndex& k, double q, double r);

}  // namespace sfindex
