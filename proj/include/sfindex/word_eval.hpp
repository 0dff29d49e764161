#pragma once

// Traces of resolvent words tau(M_0 R^{c_0} M_1 R^{c_1} ... M_m R^{c_m}) with
// R = (mu - X)^{-1} for a fixed positive X, and the contour integral
// (1/2 pi i) int_l lambda^{-z} f(lambda) dlambda along l = {a + iv}.

#include "sfindex/core.hpp"
#include "sfindex/quadrature.hpp"

#include <vector>

namespace sfindex {

struct ContourSpec {
  double a = 0.25;  // 0 < a < 1/2
  double abs_tol = 1e-11;
  double rel_tol = 1e-12;
  double h0 = 0.25;
  int max_levels = 6;

  void validate() const;
};

// (1/2 pi i) int_l lambda^{-z_j} f(lambda) dlambda for every z_j, with l
// traversed downwards (spectrum of the resolvents to the right), so that
// (1/2 pi i) int_l lambda^{-z} (lambda - x)^{-1} dlambda = x^{-z} for x > a.
// The substitution lambda = a - i a sinh(t) keeps the integrand analytic in
// |Im t| < pi/2. `bound` and `decay` must satisfy
// |f(a - iv)| <= bound |v|^{-decay}; they size the truncation so the
// discarded tails stay below abs_tol / 10.
QuadResult contour_integral(const std::function<cplx(cplx)>& f, const std::vector<double>& z, double bound,
                            double decay, const ContourSpec& spec);
double contour_t_max(const std::vector<double>& z, double bound, double decay, const ContourSpec& spec);

// Groups the eigenvalues of X (over all blocks) that agree to 1e-9 relative.
struct SpectralClasses {
  std::vector<double> values;
  std::vector<std::vector<int>> class_of;  // per block, per eigenvalue

  explicit SpectralClasses(const EigenDecomp& x);
  int size() const { return static_cast<int>(values.size()); }
};

class ResolventWord {
 public:
  // ops = M_0..M_m (given in the original basis), powers = c_0..c_m.
  ResolventWord(const EigenDecomp& x, const SpectralClasses& classes, const std::vector<BlockOperator>& ops,
                std::vector<int> powers);

  // tau(M_0 R^{c_0} ... M_m R^{c_m}) at R = (mu - X)^{-1}.
  cplx operator()(cplx mu) const;
  // A constant K with |value(mu)| <= K prod_k dist(mu, spec X)^{-c_k}.
  double bound() const { return bound_; }
  int total_power() const;
  bool uses_tensor() const { return tensor_; }

 private:
  std::vector<int> powers_;
  std::vector<double> values_;  // eigenvalues (tensor mode: class values)
  bool tensor_ = false;
  int nclass_ = 0;
  std::vector<cplx> weights_;                    // tensor mode, index a_0 + c a_1 + ...
  // Tensor entries merged over tuples with the same multiset of (class, power).
  std::vector<std::vector<std::pair<int, int>>> keys_;
  std::vector<cplx> merged_;
  int max_power_ = 0;
  std::vector<std::vector<Mat>> rotated_;        // direct mode: per block, per op
  std::vector<RVec> block_values_;
  std::vector<double> block_weights_;
  double bound_ = 0.0;
};

}  // namespace sfindex
