#pragma once

// Numerical integration of vector-valued integrands. All routines evaluate
// nodes in a fixed order and reduce sequentially, so results do not depend on
// the thread count.

#include "sfindex/core.hpp"

#include <functional>

namespace sfindex {

using VecFn = std::function<CVec(double)>;

struct QuadResult {
  CVec value;
  double error = 0.0;
  int evaluations = 0;
  bool converged = true;
};

// Worker threads used by node evaluation. Initialized from SFINDEX_THREADS,
// default 1.
int num_threads();
void set_num_threads(int n);
void parallel_for(int n, const std::function<void(int)>& body);

// Adaptive Gauss-Kronrod (7/15) on [a, b]. Stops when the summed error
// estimate is below max(abs_tol, rel_tol * |I|).
QuadResult integrate_gk(const VecFn& f, double a, double b, double abs_tol, double rel_tol,
                        int max_intervals = 2000);

// Integral over the whole real line through s = tan(u).
QuadResult integrate_real_line(const VecFn& f, double abs_tol, double rel_tol,
                               int max_intervals = 2000);

// Integral over [0, inf) through s = tan(u).
QuadResult integrate_half_line(const VecFn& f, double abs_tol, double rel_tol,
                               int max_intervals = 2000);

// Trapezoid rule for the integral of g over R after v = scale * sinh(t), on a
// uniform t-grid over [-t_max, t_max]. The step is halved (reusing nodes) until
// two successive levels agree to max(abs_tol, rel_tol * |I|).
QuadResult trapezoid_sinh(const VecFn& g, double scale, double t_max, double abs_tol,
                          double rel_tol, double h0 = 0.25, int max_levels = 8);

// Same, for an integrand known to be even: integrates over [0, inf) only and
// returns the half-line integral.
QuadResult trapezoid_sinh_half(const VecFn& g, double scale, double t_max, double abs_tol,
                               double rel_tol, double h0 = 0.25, int max_levels = 8);

// Composite trapezoid on [a, b] with Richardson extrapolation (Romberg table),
// starting from `n0` intervals.
QuadResult romberg(const VecFn& f, double a, double b, int n0, double abs_tol, double rel_tol,
                   int max_levels = 6);

double max_abs(const CVec& v);

}  // namespace sfindex
