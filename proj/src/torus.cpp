#include "sfindex/torus.hpp"

#include "sfindex/constants.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace sfindex {

namespace {

const double kTwoPi = 2.0 * std::numbers::pi;

void require_odd_grid(int k) {
  if (k < 3 || k % 2 == 0) throw PreconditionError("torus grid size must be odd and >= 3");
}

// F_{n,j} = exp(-i n x_j) / sqrt(K), rows n = -L..L, columns j = 0..K-1.
Mat dft_matrix(int k) {
  const int l = (k - 1) / 2;
  Mat f(k, k);
  for (int a = 0; a < k; ++a)
    for (int j = 0; j < k; ++j) f(a, j) = std::polar(1.0 / std::sqrt(double(k)), -kTwoPi * (a - l) * j / k);
  return f;
}

// -i d/dx on the grid: F^* diag(n) F.
Mat derivative_matrix(int k) {
  const int l = (k - 1) / 2;
  const Mat f = dft_matrix(k);
  RVec n(k);
  for (int a = 0; a < k; ++a) n(a) = a - l;
  return f.adjoint() * n.cast<cplx>().asDiagonal() * f;
}

void require_same(const TorusSymbol& a, const TorusSymbol& b) {
  if (a.grid != b.grid || a.dim != b.dim) throw PreconditionError("torus symbols on different grids");
}

Eigen::Matrix2cd bott_symbol(double x1, double x2, double mass) {
  const double n1 = std::sin(x1), n2 = std::sin(x2), n3 = mass + std::cos(x1) + std::cos(x2);
  const double r = std::sqrt(n1 * n1 + n2 * n2 + n3 * n3);
  if (r < 1e-12) throw PreconditionError("Bott symbol degenerates: mass at a gap closing");
  return 0.5 * (pauli(0) + (n1 * pauli(1) + n2 * pauli(2) + n3 * pauli(3)) / r);
}

}  // namespace

TorusModel build_torus(int cutoff, double mass) {
  if (cutoff < 1) throw PreconditionError("torus cutoff must be >= 1");
  if (std::abs(mass) < 1e-9 || std::abs(std::abs(mass) - 2.0) < 1e-9 || std::abs(mass) > 1e6)
    throw PreconditionError("torus mass must avoid 0 and +-2");
  TorusModel t;
  t.cutoff = cutoff;
  t.grid = 2 * cutoff + 1;
  t.mass = mass;
  t.id = "torus:L=" + std::to_string(cutoff);
  return t;
}

TorusSymbol TorusSymbol::operator*(const TorusSymbol& o) const {
  require_same(*this, o);
  TorusSymbol r(grid, dim);
  for (std::size_t i = 0; i < values.size(); ++i) r.values[i] = values[i] * o.values[i];
  return r;
}

TorusSymbol TorusSymbol::operator+(const TorusSymbol& o) const {
  require_same(*this, o);
  TorusSymbol r(grid, dim);
  for (std::size_t i = 0; i < values.size(); ++i) r.values[i] = values[i] + o.values[i];
  return r;
}

TorusSymbol TorusSymbol::scaled(cplx s) const {
  TorusSymbol r = *this;
  for (auto& v : r.values) v *= s;
  return r;
}

Mat TorusSymbol::mean() const {
  Mat m = Mat::Zero(dim, dim);
  for (const auto& v : values) m += v;
  return m / static_cast<double>(values.size());
}

double TorusSymbol::max_norm() const {
  double n = 0.0;
  for (const auto& v : values) n = std::max(n, Eigen::JacobiSVD<Mat>(v).singularValues()(0));
  return n;
}

TorusSymbol torus_projection(const TorusModel& t, int grid) {
  const int k = grid ? grid : t.grid;
  require_odd_grid(k);
  TorusSymbol p(k, 2);
  for (int a = 0; a < k; ++a)
    for (int b = 0; b < k; ++b) p.values[a * k + b] = bott_symbol(kTwoPi * a / k, kTwoPi * b / k, t.mass);
  return p;
}

TorusSymbol spectral_derivative(const TorusSymbol& s, int dir) {
  if (dir != 0 && dir != 1) throw PreconditionError("derivative direction must be 0 or 1");
  const int k = s.grid;
  const Mat d1 = derivative_matrix(k);
  TorusSymbol r(k, s.dim);
  for (int a = 0; a < k; ++a)
    for (int b = 0; b < k; ++b) {
      Mat& out = r.values[a * k + b];
      for (int c = 0; c < k; ++c) {
        if (dir == 0)
          out += d1(a, c) * s.values[c * k + b];
        else
          out += d1(b, c) * s.values[a * k + c];
      }
    }
  return r;
}

TorusSymbol spin_lift(const TorusSymbol& f, const Eigen::Matrix2cd& s) {
  TorusSymbol r(f.grid, 2 * f.dim);
  const int d = f.dim;
  for (std::size_t i = 0; i < f.values.size(); ++i)
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) r.values[i].block(a * d, b * d, d, d) = s(a, b) * f.values[i];
  return r;
}

TorusSymbol dirac_commutator(const TorusSymbol& f) {
  return spin_lift(spectral_derivative(f, 0), pauli(1)) + spin_lift(spectral_derivative(f, 1), pauli(2));
}

Mat hard_truncation_diagonal(const TorusModel& t, const std::vector<TorusSymbol>& factors) {
  if (factors.empty()) throw PreconditionError("need at least one factor");
  const int lam = t.cutoff, kb = t.grid;
  const int kf = factors[0].grid, d = factors[0].dim;
  for (const auto& f : factors) require_same(f, factors[0]);
  if (kf < 4 * lam + 1) throw PreconditionError("fine grid must have at least 4 Lambda + 1 points");
  require_odd_grid(kf);
  // Fourier coefficients c_ij(k) = mean f_ij(x) exp(-i k x), |k_l| <= 2 Lambda,
  // stored per entry as a kc x kc array.
  const int kc = 4 * lam + 1;
  Mat e(kc, kf);
  for (int a = 0; a < kc; ++a)
    for (int j = 0; j < kf; ++j) e(a, j) = std::polar(1.0 / kf, -kTwoPi * (a - 2 * lam) * j / kf);
  std::vector<std::vector<Mat>> coef;  // [factor][i * d + j]
  for (const auto& f : factors) {
    std::vector<Mat> c;
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) {
        Mat g(kf, kf);
        for (int a = 0; a < kf; ++a)
          for (int b = 0; b < kf; ++b) g(a, b) = f.values[a * kf + b](i, j);
        c.push_back(e * g * e.transpose());
      }
    coef.push_back(std::move(c));
  }
  const int off = 2 * lam;
  // v_ij(m) = (m_f P ... m_L P)_{m,0} for m in the box, built from the right.
  std::vector<Mat> v(d * d, Mat(kb, kb));
  for (int ij = 0; ij < d * d; ++ij)
    for (int a = 0; a < kb; ++a)
      for (int b = 0; b < kb; ++b) v[ij](a, b) = coef.back()[ij](a - lam + off, b - lam + off);
  for (int f = static_cast<int>(factors.size()) - 2; f >= 1; --f) {
    std::vector<Mat> w(d * d, Mat::Zero(kb, kb));
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j)
        for (int l = 0; l < d; ++l) {
          const Mat& c = coef[f][i * d + j];
          const Mat& src = v[j * d + l];
          Mat& dst = w[i * d + l];
          for (int a = 0; a < kb; ++a)
            for (int b = 0; b < kb; ++b) {
              cplx acc = 0.0;
              for (int a2 = 0; a2 < kb; ++a2)
                for (int b2 = 0; b2 < kb; ++b2) acc += c(a - a2 + off, b - b2 + off) * src(a2, b2);
              dst(a, b) += acc;
            }
        }
    v = std::move(w);
  }
  Mat out = Mat::Zero(d, d);
  if (factors.size() == 1) {
    for (int ij = 0; ij < d * d; ++ij) out(ij / d, ij % d) = v[ij](lam, lam);
    return out;
  }
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      for (int l = 0; l < d; ++l) {
        const Mat& c = coef[0][i * d + j];
        for (int a2 = 0; a2 < kb; ++a2)
          for (int b2 = 0; b2 < kb; ++b2) out(i, l) += c(lam - a2 + off, lam - b2 + off) * v[j * d + l](a2, b2);
      }
  return out;
}

HeatTrace torus_heat_trace(const TorusModel& t, const Mat& mean_b, const std::string& b_word) {
  const cplx tr = mean_b.trace();
  return {t.id, b_word, [tr](double s) { const double th = theta(s); return tr * th * th; }, {-1.0, 0.0}};
}

TorusPairing torus_residue_pairing(const TorusModel& t, const MellinSpec& spec, bool hard) {
  const int k = hard ? 8 * t.cutoff + 1 : t.grid;
  const TorusSymbol p = torus_projection(t, k);
  TorusSymbol one(k, 2);
  for (auto& v : one.values) v = Mat::Identity(2, 2);
  const TorusSymbol q = p.scaled(2.0) + one.scaled(-1.0);
  const TorusSymbol dp = dirac_commutator(p);
  const TorusSymbol gp = spin_lift(p, pauli(3)), gq = spin_lift(q, pauli(3));

  const Mat mean0 = hard ? hard_truncation_diagonal(t, {gp}) : gp.mean();
  const Mat mean2 = hard ? hard_truncation_diagonal(t, {gq, dp, dp}) : (gq * dp * dp).mean();

  TorusPairing out;
  const LaurentData l0 = mellin_continuation(torus_heat_trace(t, mean0, "gamma p"), 0.0, 2.0, 0, spec);
  out.strand0 = tau_j(l0, -1);
  // phi_2 at 2N = 2: only k = (0, 0), h = |k| + m/2 = 1, sigma_{1,1} = 1.
  const int m = 2;
  const MultiIndex k0(m, 0);
  const int h = total(k0) + m / 2;
  out.laurent2 = mellin_continuation(torus_heat_trace(t, mean2, "gamma (2p-1) [D,p] [D,p]"), h, 2.0, h - 1, spec);
  const std::vector<long long> sig = sigma_elementary(h);
  cplx phi2 = 0.0;
  for (int j = 1; j <= h; ++j)
    phi2 += boost::rational_cast<double>(alpha(k0)) * static_cast<double>(sig[j - 1]) * tau_j(out.laurent2, j - 1);
  out.strand2 = boost::rational_cast<double>(chern_coefficient(m)) * phi2;
  out.pairing = (out.strand0 + out.strand2).real();
  out.fit_residual = std::max(l0.residual, out.laurent2.residual);
  return out;
}

TorusIndex torus_kernel_index(const TorusModel& t, double threshold) {
  const int k = t.grid, n = t.points(), lam = t.cutoff;
  const TorusSymbol p = torus_projection(t);
  // Unit vectors spanning the range of p(x).
  std::vector<Eigen::Vector2cd> v(n);
  for (int i = 0; i < n; ++i) {
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> es(p.values[i]);
    v[i] = es.eigenvectors().col(1);
  }
  const Mat d1 = derivative_matrix(k);
  const cplx iu(0.0, 1.0);
  // Corner operator on the line bundle: <v(y), v(x)> (D+)_{yx}, D+ = n1 + i n2.
  Mat tp = Mat::Zero(n, n);
  for (int y1 = 0; y1 < k; ++y1)
    for (int y2 = 0; y2 < k; ++y2) {
      const int y = y1 * k + y2;
      for (int c = 0; c < k; ++c) {
        const int x1 = c * k + y2, x2 = y1 * k + c;
        tp(y, x1) += d1(y1, c) * v[y].dot(v[x1]);
        tp(y, x2) += iu * d1(y2, c) * v[y].dot(v[x2]);
      }
    }
  Eigen::BDCSVD<Mat> svd(tp, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const RVec& sv = svd.singularValues();

  const Mat f = dft_matrix(k);
  auto low_weight = [&](const CVec& c) {
    double low = 0.0, all = 0.0;
    for (int comp = 0; comp < 2; ++comp) {
      Mat w(k, k);
      for (int a = 0; a < k; ++a)
        for (int b = 0; b < k; ++b) w(a, b) = c(a * k + b) * v[a * k + b](comp);
      const Mat wh = f * w * f.transpose();
      for (int a = 0; a < k; ++a)
        for (int b = 0; b < k; ++b) {
          const double m2 = std::norm(wh(a, b));
          all += m2;
          if (std::abs(a - lam) <= lam / 2 && std::abs(b - lam) <= lam / 2) low += m2;
        }
    }
    return all > 0.0 ? low / all : 0.0;
  };

  TorusIndex r;
  r.threshold = threshold;
  r.smallest = sv(n - 1);
  r.gap = INFINITY;
  for (int i = 0; i < n; ++i) {
    if (sv(i) >= threshold) {
      r.gap = std::min(r.gap, sv(i));
      continue;
    }
    ++r.small;
    const double wr = low_weight(svd.matrixV().col(i)), wl = low_weight(svd.matrixU().col(i));
    r.low_weight.push_back(wr);
    r.low_weight.push_back(wl);
    if (wr > 0.5) ++r.kernel;
    if (wl > 0.5) ++r.cokernel;
  }
  r.index = r.kernel - r.cokernel;
  return r;
}

BlockOperator torus_dense_projection(const TorusModel& t) {
  const int k = t.grid, n = t.points(), dim = 4 * n;
  const TorusSymbol p = torus_projection(t);
  const Mat f = dft_matrix(k);
  // Two-dimensional transform F (x) F on the momentum box.
  Mat f2(n, n);
  for (int a1 = 0; a1 < k; ++a1)
    for (int a2 = 0; a2 < k; ++a2)
      for (int j1 = 0; j1 < k; ++j1)
        for (int j2 = 0; j2 < k; ++j2) f2(a1 * k + a2, j1 * k + j2) = f(a1, j1) * f(a2, j2);
  Mat pf = Mat::Zero(2 * n, 2 * n);
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 2; ++c) {
      CVec diag(n);
      for (int j = 0; j < n; ++j) diag(j) = p.values[j](r, c);
      pf.block(r * n, c * n, n, n) = f2 * diag.asDiagonal() * f2.adjoint();
    }
  Mat full = Mat::Zero(dim, dim);
  full.block(0, 0, 2 * n, 2 * n) = pf;
  full.block(2 * n, 2 * n, 2 * n, 2 * n) = pf;
  return BlockOperator(TracedAlgebra({{dim, 1.0}}), {0.5 * (full + full.adjoint())});
}

EvenTriple torus_dense_triple(const TorusModel& t, double theta) {
  const int k = t.grid, n = t.points(), lam = t.cutoff, dim = 4 * n;
  if (dim > 2000) throw PreconditionError("dense torus realization is limited to small cutoffs");
  TracedAlgebra alg({{dim, 1.0}});
  Mat n1 = Mat::Zero(n, n), n2 = Mat::Zero(n, n), u = Mat::Zero(n, n), vv = Mat::Zero(n, n);
  for (int a1 = 0; a1 < k; ++a1)
    for (int a2 = 0; a2 < k; ++a2) {
      const int i = a1 * k + a2;
      n1(i, i) = a1 - lam;
      n2(i, i) = a2 - lam;
      u(((a1 + 1) % k) * k + a2, i) = 1.0;
      vv(a1 * k + (a2 + 1) % k, i) = std::polar(1.0, kTwoPi * theta * (a1 - lam));
    }
  // Basis order: spinor, fiber, momentum.
  auto lift = [&](const Eigen::Matrix2cd& s, const Mat& m) {
    Mat out = Mat::Zero(dim, dim);
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b)
        if (s(a, b) != 0.0)
          for (int f = 0; f < 2; ++f) out.block((2 * a + f) * n, (2 * b + f) * n, n, n) = s(a, b) * m;
    return out;
  };
  EvenTriple tr;
  tr.algebra = alg;
  tr.q = 2.0;
  tr.D = BlockOperator(alg, {lift(pauli(1), n1) + lift(pauli(2), n2)});
  tr.gamma = BlockOperator(alg, {lift(pauli(3), Mat::Identity(n, n))});
  const BlockOperator U(alg, {lift(pauli(0), u)}), V(alg, {lift(pauli(0), vv)});
  if (theta == 0.0) tr.generators.push_back(torus_dense_projection(t));
  tr.generators.push_back(U);
  tr.generators.push_back(V);
  tr.validate();
  return tr;
}

}  // namespace sfindex
