#pragma once

// The resolvent cocycle phi^r_m, the (b, B) coboundaries, Chern components of
// a projection, the residue cocycle phi_m and the index pairings built from
// them. Function-valued cochains are sampled on a list of r values that share
// quadrature nodes, so every evaluation returns one entry per r.

#include "sfindex/constants.hpp"
#include "sfindex/psido.hpp"
#include "sfindex/triple.hpp"
#include "sfindex/word_eval.hpp"

#include <functional>
#include <iosfwd>
#include <vector>

namespace sfindex {

struct CocycleQuad {
  ContourSpec contour;
  double s_abs_tol = 1e-10;
  double s_rel_tol = 1e-12;
  double s_h0 = 0.25;
  int s_max_levels = 7;
};

using Tuple = std::vector<BlockOperator>;

struct Cochain {
  int degree = 0;  // number of arguments minus one
  std::function<CVec(const Tuple&)> eval;

  CVec operator()(const Tuple& a) const;
};

Cochain b_operator(const Cochain& phi);
// phi of degree m+2 to degree m+1, unit inserted in front of each cyclic shift.
Cochain B_operator(const Cochain& phi);

// int_0^inf s^{s_power} (1/2 pi i) int_l lambda^{-z_j} w(lambda - 1 - s^2) dlambda ds.
CVec nested_word_integral(const ResolventWord& w, int s_power, const std::vector<double>& z,
                          const CocycleQuad& quad);

// phi^r_m(a_0..a_m) for every r. m = 0 uses C_{q/2+r} tau(gamma a_0 (1+D^2)^{1/2-q/2-r});
// m >= 2 runs contour (inner) and s (outer) quadrature.
CVec resolvent_cocycle(const EvenTriple& t, const Tuple& a, const std::vector<double>& r,
                       const CocycleQuad& quad = {});
Cochain resolvent_cochain(const EvenTriple& t, int m, std::vector<double> r, CocycleQuad quad = {});

// The same values assembled from the move-right expansion to order 2N: closed
// forms for the collected words, nested quadrature for the remainder words.
CVec resolvent_cocycle_pipeline(const EvenTriple& t, const Tuple& a, const std::vector<double>& r, int order_2n,
                                const CocycleQuad& quad = {});

// (B phi^r_{m+2} + b phi^r_m)(a_0..a_{m+1}).
CVec bB_cocycle_check(const EvenTriple& t, int m, const std::vector<double>& r, const Tuple& a,
                      const CocycleQuad& quad = {});

struct ChernComponent {
  int m = 0;
  Rational coefficient;
  Tuple word;  // (2p-1, p, ..., p); (p) for m = 0
};

ChernComponent chern(const BlockOperator& p, int m);

// sum_{m even <= 2N} phi^r_m(Ch_m(p)).
CVec resolvent_pairing(const EvenTriple& t, const BlockOperator& p, const std::vector<double>& r, int two_n,
                       const CocycleQuad& quad = {});

// Rem(r) = 1/2 int_R S tau((1/2 pi i) int lambda^{-q/2-r} (1 (x) (2p-1)) (R V)^{2N+1} R~ dlambda) ds,
// the part of the doubled resolvent expansion left after order 2N.
CVec pairing_remainder(const DoubledTriple& dt, const std::vector<double>& r, int two_n,
                       const CocycleQuad& quad = {});

struct ResidueRow {
  double r = 0.0;
  double pairing_sum = 0.0;
  double remainder = 0.0;
  double c_norm = 0.0;
  double ratio = 0.0;  // (pairing_sum + remainder) / c_norm
};

std::vector<ResidueRow> residue_table(const EvenTriple& t, const BlockOperator& p, const std::vector<double>& r,
                                      int two_n, const CocycleQuad& quad = {});
void write_residue_table(std::ostream& os, const std::vector<ResidueRow>& rows);

// tau_j(b) for b = gamma a_0 A_1^{(k_1)} ... A_m^{(k_m)} with power offset |k| + m/2.
using TauProvider = std::function<cplx(int j, const BlockOperator& b, double offset)>;

// phi_m(a_0..a_m) = sum_{|k| <= 2N-m} (-1)^{|k|} alpha(k) sum_{j=1}^{|k|+m/2} sigma_{h,j} tau_{j-1}(...);
// phi_0(a_0) = tau_{-1}(gamma a_0).
cplx residue_cocycle(const EvenTriple& t, const Tuple& a, int two_n, const TauProvider& tau);

// sum_m c_m phi_m(Ch_m(p)) for the residue cocycle.
cplx residue_pairing(const EvenTriple& t, const BlockOperator& p, int two_n, const TauProvider& tau);

}  // namespace sfindex
