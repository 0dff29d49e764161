#pragma once

// Spectral zeta functions zeta_b(z) = tau(b (1+D^2)^{-z-o}), their analytic
// continuation through the Mellin transform of heat traces, and the Laurent
// data at z = 0 that defines the residue functionals tau_j.
//
// The expansion variable z is r - (1-q)/2, so z = 0 is the critical point
// r = (1-q)/2 of the index formula and
//   tau_j(b) = res_{z=0} z^j zeta_b(z),   j >= -1,
// with tau_{-1} the constant term and tau_0 the plain residue.

#include "sfindex/cocycle.hpp"
#include "sfindex/core.hpp"

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace sfindex {

struct ZetaSpec {
  BlockOperator b;
  BlockOperator D;
  double power_offset = 0.0;  // |k| + m/2

  void validate() const;
};

// Exact finite eigensum tau(b (1+D^2)^{-z-offset}).
cplx zeta_eval_matrix(const ZetaSpec& spec, cplx z);

// Jacobi theta sum sum_{n in Z} exp(-t n^2): Poisson form for t < pi, direct
// sum otherwise.
double theta(double t);
// sum_{|n| <= cutoff} exp(-t n^2).
double theta_truncated(double t, int cutoff);

// k(t) = tau(b exp(-t D^2)) together with its declared small-t exponents:
// k(t) = sum_alpha c_alpha t^alpha + (exponentially small) as t -> 0.
struct HeatTrace {
  std::string model_id;
  std::string b_word;
  std::function<cplx(double)> k;
  std::vector<double> menu;
};

struct MellinSpec {
  double split = 1.0;  // T in int_0^T + int_T^inf
  double t_lo = 0.01;  // fit window [t_lo, t_fit_hi], log-spaced
  double t_fit_hi = 0.3;
  int fit_points = 48;
  double fit_tol = 1e-6;      // relative max residual of the fit
  double max_condition = 1e12;
  double abs_tol = 1e-13;
  double rel_tol = 1e-13;
  double t_far = 100.0;  // int_T^inf truncated at T + t_far

  void validate() const;
};

class FitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct MellinFit {
  std::vector<double> menu;
  std::vector<cplx> coeffs;
  double residual = 0.0;  // max |k - fit| / max |k| on the grid
  double condition = 1.0;
};

// Least-squares fit of the menu powers; throws FitError when the residual
// exceeds fit_tol or the scaled design matrix is ill-conditioned.
MellinFit fit_small_t(const HeatTrace& h, const MellinSpec& spec);

struct LaurentData {
  std::string model_id;
  std::string b_word;
  std::vector<double> menu;
  double q = 1.0;
  double critical_point = 0.0;  // (1-q)/2 in the r variable
  double offset = 0.0;
  double split = 1.0;
  int depth = 0;  // J
  // coeffs[i] multiplies z^{i-(J+1)}, i = 0..J+1.
  std::vector<cplx> coeffs;
  double residual = 0.0;
  double condition = 1.0;

  bool pole_free(double tol = 1e-10) const;
};

LaurentData mellin_continuation(const HeatTrace& h, double offset, double q, int depth,
                                const MellinSpec& spec = {});

// Continued zeta_b(z) at real z (z + offset + alpha + n != 0 for the menu).
cplx mellin_value(const HeatTrace& h, const MellinFit& fit, double offset, double z, const MellinSpec& spec = {});

// Throws PreconditionError for j < -1 or j > J.
cplx tau_j(const LaurentData& data, int j);

void write_laurent(std::ostream& os, const LaurentData& d);
LaurentData read_laurent(std::istream& is);

// tau_j for a matrix triple: every zeta function is entire, so tau_{-1}(b) =
// tau(b (1+D^2)^{-offset}) and tau_j = 0 for j >= 0.
TauProvider matrix_tau_provider(const EvenTriple& t);

// tau_j from Mellin continuation of the heat trace the callback assigns to b.
TauProvider mellin_tau_provider(std::function<HeatTrace(const BlockOperator&)> heat_of, double q,
                                MellinSpec spec = {});

// (residue of sum_m phi_m(Ch_m(p)) assembled from tau data, Ind(pD+p) by
// kernel count).
std::pair<double, double> zeta_sum_residue_check(const EvenTriple& t, const BlockOperator& p, int two_n,
                                                 const TauProvider& tau);

}  // namespace sfindex
