#pragma once

// Even spectral triples at matrix scale and the Clifford doubling
//   D~_{w,s} = sigma3 (x) D_w + s sigma2 (x) (2p - 1),
//   D_w = D + w [D,p](1 - 2p),
// used to connect Ind(p D+ p) to the integral a(w).

#include "sfindex/core.hpp"
#include "sfindex/quadrature.hpp"

#include <vector>

namespace sfindex {

struct EvenTriple {
  TracedAlgebra algebra;
  std::vector<BlockOperator> generators;
  BlockOperator D;
  BlockOperator gamma;
  double q = 1.0;

  // Throws PreconditionError if the grading identities fail to 1e-10.
  void validate() const;
  BlockOperator one() const { return BlockOperator::identity(algebra); }
  BlockOperator chiral_projection() const;  // (1 + gamma)/2
};

BlockOperator commutator(const EvenTriple& t, const BlockOperator& a);
// n-fold [D^2, .]; n = 0 returns the argument.
BlockOperator iterated_commutator(const EvenTriple& t, const BlockOperator& x, int n);

// Rescales D by 1.3/max||[D,a]|| when some ||[D,a]|| >= sqrt(2) over the
// given operators. Returns the factor applied (1 when untouched).
double auto_rescale(EvenTriple& t, const std::vector<BlockOperator>& ops);

// Gamma-function constant C_{n/2} = int_R (1+s^2)^{-n/2} ds.
double c_half(double n);

struct QuadratureSpec {
  double abs_tol = 1e-8;
  double rel_tol = 1e-12;
  int max_intervals = 2048;
};

class DoubledTriple {
 public:
  DoubledTriple(EvenTriple base, BlockOperator p);

  const EvenTriple& base() const { return base_; }
  const BlockOperator& p() const { return p_; }
  const TracedAlgebra& algebra2() const { return alg2_; }

  BlockOperator commutator_dp() const { return dp_; }  // [D, p]
  BlockOperator D_w(double w) const;
  BlockOperator D_p() const;  // pDp + (1-p)D(1-p)
  BlockOperator Dtilde(double w, double s) const;
  BlockOperator gamma_tilde() const;  // sigma3 (x) gamma

  // S tau(T) = 1/2 tau_2((sigma3 (x) 1) gamma~ T).
  cplx supertrace(const BlockOperator& t2) const;

  // alpha_{Dhat}(Y) = tau_2((sigma2 (x) gamma) Y (1 + Dhat^2)^{-n/2}); Dhat - D~
  // must be self-adjoint and commute with sigma2 (x) gamma.
  cplx one_form(const BlockOperator& dhat, const BlockOperator& y, double n) const;

  // a(w) = 1/4 int_R tau_2((1 (x) gamma(2p-1)) (1 + D~_{w,s}^2)^{-n/2}) ds.
  double a_of_w(double w, double n, const QuadratureSpec& quad = {}) const;

  // Returns (Ind(pD+p) C_{n/2}, a(0) + 1/2 int_R tau(gamma (1+D^2+s^2)^{-n/2}) ds).
  std::pair<double, double> key_identity_check(double n, const QuadratureSpec& quad = {}) const;

  // ||D~_{w,s}^2 - (1 (x) D_w^2 + 2 s (1-w) sigma3 sigma2 (x) [D,p] + s^2)||.
  double square_identity_error(double w, double s) const;

  // Loop integral of the one-form around the boundary of [0,1] x [-N, N].
  // First rectangle: (w,s) -> D~_{w,s}. Second: (w,s) -> sigma3 (x) D_w + s sigma2 (x) 1.
  cplx rectangle_loop(double s_bound, double n, bool second_rectangle, int nodes_per_leg = 256) const;

  // int_R tau(gamma (1 + X^2 + s^2)^{-n/2}) ds for X = D or X = D_p.
  double graded_s_integral(const BlockOperator& x, double n, const QuadratureSpec& quad = {}) const;

 private:
  EvenTriple base_;
  BlockOperator p_;
  TracedAlgebra alg2_;
  BlockOperator dp_;
  BlockOperator dp_twist_;  // [D,p](1-2p)
  BlockOperator sigma2_gamma_;
  BlockOperator one_gamma_q_;  // 1 (x) gamma(2p-1)
};

// Sum over blocks of weight * sum_k f(lambda_k) (U* G U)_{kk}, i.e. tau(G f(X))
// for the decomposition of X.
cplx trace_with_function(const BlockOperator& g, const EigenDecomp& x, const std::function<cplx(double)>& f);

}  // namespace sfindex
