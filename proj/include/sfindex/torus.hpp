#pragma once

// Lattice torus model, q = 2. H = l^2(Z^2) (x) C^2 (spinor) (x) C^2 (fiber),
// D = sigma1 (x) n1 + sigma2 (x) n2 on momenta n, gamma = sigma3 on the
// spinor. The projection is the Bott-type line bundle
//   p(x) = (1 + nhat(x) . sigma)/2,  n(x) = (sin x1, sin x2, m + cos x1 + cos x2),
// a multiplication operator with Chern number one for 0 < |m| < 2.
//
// Multiplication operators are stored as symbols sampled on the position
// grid x_j = 2 pi j / K, K = 2 Lambda + 1. On that grid the momentum cutoff
// |n_i| <= Lambda with wrap-around is exact: the discrete Fourier transform
// maps symbols to circulant (hence exactly multiplicative) operators.

#include "sfindex/triple.hpp"
#include "sfindex/zeta.hpp"

#include <string>
#include <vector>

namespace sfindex {

struct TorusModel {
  int cutoff = 16;  // Lambda
  int grid = 33;    // K = 2 Lambda + 1
  double mass = 1.0;
  std::string id;

  int points() const { return grid * grid; }
};

TorusModel build_torus(int cutoff, double mass = 1.0);

// Grid of d x d matrices, index j1 * K + j2.
struct TorusSymbol {
  int grid = 0;
  int dim = 0;
  std::vector<Mat> values;

  TorusSymbol() = default;
  TorusSymbol(int k, int d) : grid(k), dim(d), values(static_cast<std::size_t>(k) * k, Mat::Zero(d, d)) {}

  TorusSymbol operator*(const TorusSymbol& o) const;
  TorusSymbol operator+(const TorusSymbol& o) const;
  TorusSymbol scaled(cplx s) const;
  // Mean over the grid: the zero Fourier coefficient.
  Mat mean() const;
  double max_norm() const;
};

// 2 x 2 fiber symbol on the model grid, or on an odd grid of the given size.
TorusSymbol torus_projection(const TorusModel& t, int grid = 0);
// -i d/dx_dir of a symbol by the discrete Fourier transform on the grid
// (dir = 0 or 1).
TorusSymbol spectral_derivative(const TorusSymbol& s, int dir);
// Lifts a fiber symbol f to 1_spin (x) f, or to s (x) f for a 2 x 2 spin matrix.
TorusSymbol spin_lift(const TorusSymbol& f, const Eigen::Matrix2cd& s = Eigen::Matrix2cd::Identity());
// [D, f] = sigma1 (x) (-i d1 f) + sigma2 (x) (-i d2 f) for a fiber symbol f.
TorusSymbol dirac_commutator(const TorusSymbol& f);

// Hard momentum cutoff instead of wrap-around: the zero-momentum diagonal
// entry of P m_1 P m_2 P ... m_L P, P the projection onto |n_i| <= Lambda.
// The factors are symbols sampled on a finer odd grid (at least 4 Lambda + 1
// points) from which their Fourier coefficients are taken.
Mat hard_truncation_diagonal(const TorusModel& t, const std::vector<TorusSymbol>& factors);

// tau(b exp(-t D^2)) = tr(mean b) theta(t)^2 for a multiplication operator b
// acting on spinor (x) fiber; menu {-1, 0}.
HeatTrace torus_heat_trace(const TorusModel& t, const Mat& mean_b, const std::string& b_word);

struct TorusPairing {
  double pairing = 0.0;
  cplx strand0 = 0.0;  // tau_{-1}(gamma p)
  cplx strand2 = 0.0;  // Ch_2 coefficient times phi_2(2p-1, p, p)
  LaurentData laurent2;
  double fit_residual = 0.0;
};

// sum_m phi_m(Ch_m(p)) for 2N = 2 with tau_j from Mellin continuation. Only
// multiplication operators occur at this order. When `hard` is set the
// symbol means come from hard_truncation_diagonal instead of grid means.
TorusPairing torus_residue_pairing(const TorusModel& t, const MellinSpec& spec = {}, bool hard = false);

struct TorusIndex {
  int index = 0;
  int kernel = 0;
  int cokernel = 0;
  int small = 0;            // singular values below threshold
  double threshold = 0.0;
  double smallest = 0.0;    // smallest singular value
  double gap = 0.0;         // smallest singular value above threshold
  std::vector<double> low_weight;  // low-momentum weight of each small right/left pair
};

// Ind(p D+ p) by kernel count. The truncated corner operator is square, so
// every true kernel vector is paired with a spurious one at the momentum
// cutoff; a small singular triple counts +1 when its right vector and -1 when
// its left vector carries more than half its weight at |n|_inf <= Lambda/2.
TorusIndex torus_kernel_index(const TorusModel& t, double threshold = 0.2);

// Dense realization on spinor (x) fiber (x) momentum box, for small Lambda:
// U, V are wrap-around shifts (V carries the phase exp(2 pi i theta n1)), p
// is the circulant projection from the grid symbol (theta = 0 only).
// Generators: {p, U, V} for theta = 0, {U, V} otherwise.
EvenTriple torus_dense_triple(const TorusModel& t, double theta = 0.0);
BlockOperator torus_dense_projection(const TorusModel& t);

}  // namespace sfindex
