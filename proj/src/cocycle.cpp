#include "sfindex/cocycle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>

namespace sfindex {

CVec Cochain::operator()(const Tuple& a) const {
  if (static_cast<int>(a.size()) != degree + 1) throw PreconditionError("cochain evaluated on a tuple of wrong length");
  return eval(a);
}

Cochain b_operator(const Cochain& phi) {
  const int m = phi.degree;
  Cochain out;
  out.degree = m + 1;
  out.eval = [phi, m](const Tuple& a) {
    CVec sum;
    for (int j = 0; j <= m; ++j) {
      Tuple t;
      for (int i = 0; i < j; ++i) t.push_back(a[i]);
      t.push_back(a[j] * a[j + 1]);
      for (int i = j + 2; i <= m + 1; ++i) t.push_back(a[i]);
      const CVec v = (j % 2 ? -1.0 : 1.0) * phi(t);
      sum = j == 0 ? v : CVec(sum + v);
    }
    Tuple t{a[m + 1] * a[0]};
    for (int i = 1; i <= m; ++i) t.push_back(a[i]);
    sum += ((m + 1) % 2 ? -1.0 : 1.0) * phi(t);
    return sum;
  };
  return out;
}

Cochain B_operator(const Cochain& phi) {
  if (phi.degree < 1) throw PreconditionError("B needs a cochain of degree >= 1");
  const int n = phi.degree;  // output degree n - 1 takes n arguments
  Cochain out;
  out.degree = n - 1;
  out.eval = [phi, n](const Tuple& a) {
    const BlockOperator one = BlockOperator::identity(a[0].algebra());
    CVec sum;
    for (int j = 0; j < n; ++j) {
      Tuple t{one};
      for (int i = j; i < n; ++i) t.push_back(a[i]);
      for (int i = 0; i < j; ++i) t.push_back(a[i]);
      const double sign = ((n - 1) * j) % 2 ? -1.0 : 1.0;
      const CVec v = sign * phi(t);
      sum = j == 0 ? v : CVec(sum + v);
    }
    return sum;
  };
  return out;
}

namespace {

// Smallest S with int_S^inf K s^g s^{-2e} ds <= tol, as a sinh-grid bound.
double s_t_max(double bound, double growth, double decay, double tol) {
  const double p = 2.0 * decay - growth - 1.0;
  if (!(p > 0.0)) throw PreconditionError("s-integrand does not decay");
  const double smax = std::max(std::pow(std::max(bound, 1e-300) / (p * tol), 1.0 / p), 10.0);
  return std::asinh(smax);
}

std::vector<double> exponents(const EvenTriple& t, const std::vector<double>& r) {
  std::vector<double> z;
  for (double v : r) z.push_back(0.5 * t.q + v);
  return z;
}

double gamma_ratio_bound(double z, int p) {
  // Divided difference bound: Gamma(z+p-1)/(Gamma(z) Gamma(p)).
  return std::exp(std::lgamma(z + p - 1.0) - std::lgamma(z) - std::lgamma(static_cast<double>(p)));
}

// Contour tolerance at s, shrunk so that int_0^inf s^g eps(s) ds stays
// comparable to abs_tol.
double inner_tolerance(double abs_tol, double s, int growth) {
  return abs_tol * std::pow(1.0 + s * s, -0.5 * (growth + 2));
}

}  // namespace

CVec nested_word_integral(const ResolventWord& w, int s_power, const std::vector<double>& z,
                          const CocycleQuad& quad) {
  const int pw = w.total_power();
  const double zmin = *std::min_element(z.begin(), z.end());
  const double zmax = *std::max_element(z.begin(), z.end());
  const double k = w.bound() * gamma_ratio_bound(zmax, pw);
  const double tmax = s_t_max(k, s_power, zmin + pw - 1.0, quad.s_abs_tol / 10.0);
  VecFn g = [&](double s) -> CVec {
    const double shift = 1.0 + s * s;
    ContourSpec cs = quad.contour;
    cs.abs_tol = inner_tolerance(quad.contour.abs_tol, s, s_power);
    const QuadResult in = contour_integral([&](cplx lam) { return w(lam - shift); }, z, w.bound(), pw, cs);
    return std::pow(s, s_power) * in.value;
  };
  return trapezoid_sinh_half(g, 1.0, tmax, quad.s_abs_tol, quad.s_rel_tol, quad.s_h0, quad.s_max_levels).value;
}

CVec resolvent_cocycle(const EvenTriple& t, const Tuple& a, const std::vector<double>& r, const CocycleQuad& quad) {
  const int m = static_cast<int>(a.size()) - 1;
  if (m < 0 || m % 2) throw PreconditionError("resolvent cocycle degree must be even");
  const std::vector<double> z = exponents(t, r);
  for (double zz : z)
    if (!(zz - 0.5 + 0.5 * m > 0.0)) throw PreconditionError("r outside the convergence region");
  const EigenDecomp d2 = herm_eig(hermitian_part(t.D * t.D));
  CVec out(r.size());
  if (m == 0) {
    const BlockOperator g = t.gamma * a[0];
    for (std::size_t i = 0; i < z.size(); ++i) {
      const double zz = z[i];
      out(i) = c_norm(zz) * trace_with_function(g, d2, [zz](double x) { return cplx(std::pow(1.0 + x, 0.5 - zz)); });
    }
    return out;
  }
  const SpectralClasses classes(d2);
  Tuple ops{t.gamma * a[0]};
  for (int i = 1; i <= m; ++i) ops.push_back(commutator(t, a[i]));
  const ResolventWord w(d2, classes, ops, std::vector<int>(m + 1, 1));
  const double eta_m = boost::rational_cast<double>(eta(m));
  return eta_m * nested_word_integral(w, m, z, quad);
}

Cochain resolvent_cochain(const EvenTriple& t, int m, std::vector<double> r, CocycleQuad quad) {
  Cochain c;
  c.degree = m;
  c.eval = [t, r, quad](const Tuple& a) { return resolvent_cocycle(t, a, r, quad); };
  return c;
}

CVec resolvent_cocycle_pipeline(const EvenTriple& t, const Tuple& a, const std::vector<double>& r, int order_2n,
                                const CocycleQuad& quad) {
  const int m = static_cast<int>(a.size()) - 1;
  if (m < 2 || m % 2) throw PreconditionError("pipeline needs even m >= 2");
  const int maxo = order_2n - m;
  if (maxo < 0) throw PreconditionError("expansion order 2N must be at least m");
  const std::vector<double> z = exponents(t, r);
  const EigenDecomp d2 = herm_eig(hermitian_part(t.D * t.D));
  std::vector<std::vector<BlockOperator>> derived(m + 1);
  derived[0] = {t.gamma * a[0]};
  for (int i = 1; i <= m; ++i) {
    derived[i].push_back(commutator(t, a[i]));
    for (int k = 1; k <= maxo + 1; ++k) derived[i].push_back(iterated_commutator(t, derived[i].back(), 1));
  }
  const MoveRightSymbolic sym = move_right_symbolic(m, maxo);
  const double eta_m = boost::rational_cast<double>(eta(m));
  CVec out = CVec::Zero(r.size());
  // Collected words: (1/2 pi i) int lambda^{-z} R^{K+1} = (-1)^K Gamma(z+K)/(Gamma(z) K!) X^{-z-K},
  // then int_0^inf s^m (1 + x + s^2)^{-z-K} ds = 2^{-m} (closed s-integral).
  for (const auto& w : sym.collected) {
    const int kk = total(w.k) + m;
    BlockOperator b = derived[0][0];
    for (int i = 1; i <= m; ++i) b = b * derived[i][w.k[i - 1]];
    for (std::size_t i = 0; i < z.size(); ++i) {
      const double zz = z[i];
      const double cauchy =
          (kk % 2 ? -1.0 : 1.0) * std::exp(std::lgamma(zz + kk) - std::lgamma(zz) - std::lgamma(kk + 1.0));
      const cplx tr = trace_with_function(b, d2, [&](double x) {
        return cplx(std::ldexp(s_integral_closed(1.0 + x, m, zz + kk), -m));
      });
      out(i) += eta_m * static_cast<double>(w.count) * cauchy * tr;
    }
  }
  const SpectralClasses classes(d2);
  for (const auto& w : sym.remainder) {
    Tuple ops{derived[0][0]};
    for (int i = 1; i <= m; ++i) ops.push_back(derived[i][w.k[i - 1]]);
    const ResolventWord rw(d2, classes, ops, w.powers);
    out += eta_m * static_cast<double>(w.count) * nested_word_integral(rw, m, z, quad);
  }
  return out;
}

CVec bB_cocycle_check(const EvenTriple& t, int m, const std::vector<double>& r, const Tuple& a,
                      const CocycleQuad& quad) {
  if (static_cast<int>(a.size()) != m + 2) throw PreconditionError("(b,B) check needs m+2 arguments");
  const Cochain bphi = b_operator(resolvent_cochain(t, m, r, quad));
  const Cochain Bphi = B_operator(resolvent_cochain(t, m + 2, r, quad));
  return Bphi(a) + bphi(a);
}

ChernComponent chern(const BlockOperator& p, int m) {
  if ((p * p - p).norm() > 1e-10 || (p - p.adjoint()).norm() > 1e-10)
    throw PreconditionError("Chern character needs a projection");
  ChernComponent c;
  c.m = m;
  c.coefficient = chern_coefficient(m);
  if (m == 0) {
    c.word = {p};
    return c;
  }
  c.word.push_back(2.0 * p - BlockOperator::identity(p.algebra()));
  for (int i = 0; i < m; ++i) c.word.push_back(p);
  return c;
}

CVec resolvent_pairing(const EvenTriple& t, const BlockOperator& p, const std::vector<double>& r, int two_n,
                       const CocycleQuad& quad) {
  CVec sum = CVec::Zero(r.size());
  for (int m = 0; m <= two_n; m += 2) {
    const ChernComponent ch = chern(p, m);
    sum += boost::rational_cast<double>(ch.coefficient) * resolvent_cocycle(t, ch.word, r, quad);
  }
  return sum;
}

CVec pairing_remainder(const DoubledTriple& dt, const std::vector<double>& r, int two_n, const CocycleQuad& quad) {
  const EvenTriple& t = dt.base();
  const std::vector<double> z = exponents(t, r);
  const EigenDecomp d2 = herm_eig(hermitian_part(t.D * t.D));
  const BlockOperator one = t.one();
  const BlockOperator q1 = t.gamma * (2.0 * dt.p() - one);
  const BlockOperator v1 = kron2(2.0 * pauli(3) * pauli(2), dt.commutator_dp());  // V / s
  const int nb = static_cast<int>(t.algebra.num_blocks());
  // Work in the basis 1_2 (x) U where R is diagonal.
  std::vector<Mat> w, m0, vrot;
  std::vector<RVec> xs;
  std::vector<double> wt;
  double kbound = 0.0;
  for (int b = 0; b < nb; ++b) {
    const Mat& u = d2.vectors[b];
    const Eigen::Index d = u.rows();
    Mat ww = Mat::Zero(2 * d, 2 * d);
    ww.topLeftCorner(d, d) = u;
    ww.bottomRightCorner(d, d) = u;
    Mat q2 = Mat::Zero(2 * d, 2 * d);
    q2.topLeftCorner(d, d) = q1.block(b);
    q2.bottomRightCorner(d, d) = q1.block(b);
    w.push_back(ww);
    m0.push_back(ww.adjoint() * q2 * ww);
    vrot.push_back(ww.adjoint() * v1.block(b) * ww);
    RVec x2(2 * d);
    x2 << d2.values[b], d2.values[b];
    xs.push_back(x2);
    wt.push_back(t.algebra.block(b).weight);
    kbound += 0.5 * wt.back() * 2 * d * m0.back().norm() * std::pow(vrot.back().norm(), two_n + 1);
  }
  const int pw = two_n + 2;
  const double zmin = *std::min_element(z.begin(), z.end());
  const double zmax = *std::max_element(z.begin(), z.end());
  const double tmax = s_t_max(kbound * gamma_ratio_bound(zmax, pw), two_n + 1, zmin + pw - 1.0, quad.s_abs_tol / 10.0);
  VecFn g = [&](double s) -> CVec {
    const double shift = 1.0 + s * s;
    const BlockOperator dts = dt.Dtilde(0.0, s);
    const EigenDecomp e2 = herm_eig(hermitian_part(dts * dts));
    std::vector<Mat> left, right;
    for (int b = 0; b < nb; ++b) {
      const Mat ut = w[b].adjoint() * e2.vectors[b];  // eigenvectors of D~^2 in the rotated basis
      left.push_back(ut.adjoint() * m0[b]);
      right.push_back(std::pow(s, two_n + 1) * ut);
    }
    auto f = [&](cplx lam) {
      cplx total = 0.0;
      for (int b = 0; b < nb; ++b) {
        const RVec& x = xs[b];
        CVec rr(x.size());
        for (Eigen::Index i = 0; i < x.size(); ++i) rr(i) = 1.0 / (lam - shift - x(i));
        Mat acc = left[b] * rr.asDiagonal();
        for (int k = 0; k <= two_n; ++k) {
          acc = acc * vrot[b];
          if (k < two_n) acc = acc * rr.asDiagonal();
        }
        acc = acc * right[b];
        const RVec& y = e2.values[b];
        cplx tr = 0.0;
        for (Eigen::Index i = 0; i < y.size(); ++i) tr += acc(i, i) / (lam - 1.0 - y(i));
        total += 0.5 * wt[b] * tr;
      }
      return total;
    };
    const double bnd = kbound * std::pow(std::max(s, 1.0), two_n + 1);
    ContourSpec cs = quad.contour;
    cs.abs_tol = inner_tolerance(quad.contour.abs_tol, s, two_n + 1);
    return contour_integral(f, z, bnd, pw, cs).value;
  };
  // The integrand is even in s; integrate over [0, inf) only.
  return trapezoid_sinh_half(g, 1.0, tmax, quad.s_abs_tol, quad.s_rel_tol, quad.s_h0, quad.s_max_levels).value;
}

std::vector<ResidueRow> residue_table(const EvenTriple& t, const BlockOperator& p, const std::vector<double>& r,
                                      int two_n, const CocycleQuad& quad) {
  const CVec pair = resolvent_pairing(t, p, r, two_n, quad);
  const CVec rem = pairing_remainder(DoubledTriple(t, p), r, two_n, quad);
  std::vector<ResidueRow> rows;
  for (std::size_t i = 0; i < r.size(); ++i) {
    ResidueRow row;
    row.r = r[i];
    row.pairing_sum = pair(i).real();
    row.remainder = rem(i).real();
    row.c_norm = c_norm(0.5 * t.q + r[i]);
    row.ratio = (row.pairing_sum + row.remainder) / row.c_norm;
    rows.push_back(row);
  }
  return rows;
}

void write_residue_table(std::ostream& os, const std::vector<ResidueRow>& rows) {
  os << "r,pairing_sum,remainder,c_norm,ratio\n";
  const auto old = os.precision(17);
  for (const auto& row : rows)
    os << row.r << ',' << row.pairing_sum << ',' << row.remainder << ',' << row.c_norm << ',' << row.ratio << '\n';
  os.precision(old);
}

cplx residue_cocycle(const EvenTriple& t, const Tuple& a, int two_n, const TauProvider& tau) {
  const int m = static_cast<int>(a.size()) - 1;
  if (m < 0 || m % 2) throw PreconditionError("residue cocycle degree must be even");
  if (m > two_n) throw PreconditionError("degree exceeds 2N");
  if (m == 0) return tau(-1, t.gamma * a[0], 0.0);
  std::vector<std::vector<BlockOperator>> derived(m + 1);
  for (int i = 1; i <= m; ++i) {
    derived[i].push_back(commutator(t, a[i]));
    for (int k = 1; k <= two_n - m; ++k) derived[i].push_back(iterated_commutator(t, derived[i].back(), 1));
  }
  cplx sum = 0.0;
  for (const auto& k : multi_indices(m, two_n - m)) {
    BlockOperator b = t.gamma * a[0];
    for (int i = 1; i <= m; ++i) b = b * derived[i][k[i - 1]];
    const int h = total(k) + m / 2;
    const std::vector<long long> sig = sigma_elementary(h);
    const double pref = (total(k) % 2 ? -1.0 : 1.0) * boost::rational_cast<double>(alpha(k));
    for (int j = 1; j <= h; ++j) {
      if (sig[j - 1] == 0) continue;
      sum += pref * static_cast<double>(sig[j - 1]) * tau(j - 1, b, total(k) + 0.5 * m);
    }
  }
  return sum;
}

cplx residue_pairing(const EvenTriple& t, const BlockOperator& p, int two_n, const TauProvider& tau) {
  cplx sum = 0.0;
  for (int m = 0; m <= two_n; m += 2) {
    const ChernComponent ch = chern(p, m);
    sum += boost::rational_cast<double>(ch.coefficient) * residue_cocycle(t, ch.word, two_n, tau);
  }
  return sum;
}

}  // namespace sfindex
