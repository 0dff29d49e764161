#pragma once

// Resolvent expansion in the doubled picture, the move-right expansion of
// a_0 R A_1 R ... A_m R with R = R_s(lambda) = (lambda - (1 + s^2 + D^2))^{-1},
// and the two integral identities that turn right-collected words into
// powers of 1 + s^2 + D^2.
//
// Sign convention: with R = (lambda - X)^{-1}, commuting R past A gives
// R A = A R + R A' R with A' = [D^2, A], so every right-collected word enters
// with +C(k). The alternating sign (-1)^{|k|} appears only after the contour
// integral, through (1/2 pi i) int lambda^{-z} R^{K+1} = (-1)^K Gamma(z+K)/(Gamma(z) K!) X^{-z-K}.

#include "sfindex/constants.hpp"
#include "sfindex/triple.hpp"
#include "sfindex/word_eval.hpp"

#include <vector>

namespace sfindex {

// a_0 R^{p_0} A_1^{(k_1)} R^{p_1} ... A_m^{(k_m)} R^{p_m} with integer weight.
struct SymbolicWord {
  long long count = 0;
  MultiIndex k;
  std::vector<int> powers;

  bool collected() const;
};

struct MoveRightSymbolic {
  std::vector<SymbolicWord> collected;  // one per k with |k| <= max_order, lexicographic
  std::vector<SymbolicWord> remainder;  // words of order max_order + 1, not yet collected
};

// Exact rewriting with R^c A = A R^c + sum_{i=1}^c R^i A' R^{c+1-i}.
MoveRightSymbolic move_right_symbolic(int m, int max_order);

struct ExpansionTerm {
  MultiIndex k;
  Rational coefficient;  // C(k)
  std::vector<BlockOperator> word;  // a_0, A_1^{(k_1)}, ..., A_m^{(k_m)}
  int resolvent_power = 0;          // |k| + m + 1
};

struct MoveRightExpansion {
  std::vector<ExpansionTerm> terms;
  BlockOperator remainder;
  BlockOperator original;
  BlockOperator collected_sum;
};

// factors = (a_0, A_1, ..., A_m); orders up to |k| <= order_2n - m are
// collected and the rest is materialized as the remainder.
MoveRightExpansion move_right_expand(const EvenTriple& t, const std::vector<BlockOperator>& factors, double s,
                                     cplx lambda, int order_2n);

// Evaluates a symbolic word at (s, lambda), given the iterated commutators
// derived[i][k] = A_{i}^{(k)} (derived[0][0] = a_0).
BlockOperator materialize(const SymbolicWord& w, const std::vector<std::vector<BlockOperator>>& derived,
                          const EigenDecomp& d2, double s, cplx lambda);

struct ResolventExpansion {
  std::vector<BlockOperator> terms;  // (R V)^m R, m = 0..2N
  BlockOperator remainder;           // (R V)^{2N+1} R~
  BlockOperator target;              // R~ = (lambda - 1 - D~_{0,s}^2)^{-1}
};

// V = 2 s sigma3 sigma2 (x) [D,p], R = (lambda - 1 - s^2 - D^2)^{-1} on both copies.
ResolventExpansion resolvent_expand(const DoubledTriple& dt, double s, cplx lambda, int order_2n);

// (numeric, closed form) of (1/2 pi i) int_l lambda^{-z} (lambda - X)^{-(k+1)} dlambda
// with X = shift + D^2; closed form (-1)^k Gamma(z+k)/(Gamma(z) k!) X^{-z-k}.
std::pair<BlockOperator, BlockOperator> cauchy_power_integral(const BlockOperator& d, double shift, double z, int k,
                                                              const ContourSpec& spec = {});

// (numeric, closed form) of int_0^inf (2s)^m (c + s^2)^{-A} ds.
std::pair<double, double> s_integral_gamma(double c, int m, double big_a);
double s_integral_closed(double c, int m, double big_a);

}  // namespace sfindex
