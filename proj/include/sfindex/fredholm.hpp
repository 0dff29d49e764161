#pragma once

// Index theory for operators in a skew corner P N Q: T is (P.Q)-Fredholm and
// Ind(T) = tau(N_T^Q) - tau(N_{T*}^P), where N_T^Q projects onto the kernel
// of T restricted to Q(H).

#include "sfindex/core.hpp"

#include <functional>

namespace sfindex {

struct SkewCorner {
  BlockOperator P;
  BlockOperator Q;

  // Throws PreconditionError unless both are orthogonal projections to 1e-10.
  SkewCorner(BlockOperator p, BlockOperator q);
};

struct KernelProjection {
  BlockOperator projection;
  double trace = 0.0;
  double sigma_max = 0.0;
  // Some singular value lies within a factor 10 of the rank threshold.
  bool ambiguous = false;
};

struct FredholmReport {
  double kerQ_trace = 0.0;
  double cokerP_trace = 0.0;
  double index = 0.0;
  bool ambiguous = false;
};

bool is_projection(const BlockOperator& p, double tol = 1e-10);

// Orthonormal basis (per block) of the range of a projection.
std::vector<Mat> range_basis(const BlockOperator& p);

// Projection onto the kernel of T restricted to Q(H); singular values
// <= tol * sigma_max count as zero.
KernelProjection kernel_projection(const BlockOperator& t, const BlockOperator& q, double tol = 1e-8);

FredholmReport fredholm_index(const BlockOperator& t, const SkewCorner& corner, double tol = 1e-8);

// T in P N Q, S in G N P. Returns (Ind(ST), Ind(S) + Ind(T)).
std::pair<double, double> product_index_check(const BlockOperator& s, const BlockOperator& t,
                                              const BlockOperator& g, const BlockOperator& p,
                                              const BlockOperator& q, double tol = 1e-8);

// T (1 + T*T)^{-1/2}.
BlockOperator bounded_transform(const BlockOperator& t, const SkewCorner& corner);

// ||bt(T) - bt(T + A)|| - ||A||; the continuity bound says this is <= 0.
double transform_continuity_check(const BlockOperator& t, const BlockOperator& a,
                                  const SkewCorner& corner);

struct ParametrixReport {
  double left_residual = 0.0;   // ||ST - Q||
  double right_residual = 0.0;  // ||TS - P||
  BlockOperator k_left;         // ST - Q
  BlockOperator k_right;        // TS - P
  bool in_corner = false;       // k_left in Q N Q and k_right in P N P
};

ParametrixReport parametrix_check(const BlockOperator& t, const BlockOperator& s, const SkewCorner& corner);

// Polar decomposition T = V|T| with V truncated to the numerical support of |T|.
std::pair<BlockOperator, BlockOperator> polar_decomposition(const BlockOperator& t, double tol = 1e-8);

struct McKeanSingerResult {
  double kernel_index = 0.0;
  double trace_formula = 0.0;
  bool ambiguous = false;
};

// Ind(D+) for D+ = P^perp D P, P = (1+gamma)/2, against tau(gamma f(D)) / f(0).
McKeanSingerResult mckean_singer(const BlockOperator& d, const BlockOperator& gamma,
                                 const std::function<double(double)>& f, double tol = 1e-8);

// Ind(p D+ p) in the corner (P^perp p).(P p) against
// (1+a)^{n/2} tau(gamma p (p + a + (pDp)^2)^{-n/2}).
McKeanSingerResult mckean_singer_compressed(const BlockOperator& d, const BlockOperator& gamma,
                                            const BlockOperator& p, double n, double a,
                                            double tol = 1e-8);

double corner_index(const BlockOperator& d, const BlockOperator& gamma, const BlockOperator& p,
                    double tol = 1e-8);

}  // namespace sfindex
