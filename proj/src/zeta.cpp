#include "sfindex/zeta.hpp"

#include "sfindex/fredholm.hpp"
#include "sfindex/quadrature.hpp"

#include <boost/math/special_functions/digamma.hpp>
#include <boost/math/special_functions/polygamma.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <numbers>
#include <ostream>

namespace sfindex {

void ZetaSpec::validate() const {
  if (power_offset < 0.0) throw PreconditionError("power offset must be >= 0");
  if (b.algebra() != D.algebra()) throw PreconditionError("b and D live in different algebras");
}

cplx zeta_eval_matrix(const ZetaSpec& spec, cplx z) {
  spec.validate();
  const EigenDecomp e = herm_eig(spec.D);
  const cplx expo = -(z + spec.power_offset);
  return trace_with_function(spec.b, e, [&](double d) { return std::exp(expo * std::log1p(d * d)); });
}

double theta(double t) {
  if (!(t > 0.0)) throw PreconditionError("theta needs t > 0");
  const double pi = std::numbers::pi;
  double sum = 1.0;
  if (t < pi) {
    for (int k = 1;; ++k) {
      const double term = 2.0 * std::exp(-pi * pi * k * k / t);
      sum += term;
      if (term < 1e-18 * sum) break;
    }
    return std::sqrt(pi / t) * sum;
  }
  for (int n = 1;; ++n) {
    const double term = 2.0 * std::exp(-t * n * n);
    sum += term;
    if (term < 1e-18 * sum) break;
  }
  return sum;
}

double theta_truncated(double t, int cutoff) {
  double sum = 1.0;
  for (int n = 1; n <= cutoff; ++n) sum += 2.0 * std::exp(-t * n * n);
  return sum;
}

void MellinSpec::validate() const {
  if (!(t_lo > 0.0 && t_lo < t_fit_hi && t_fit_hi <= split))
    throw PreconditionError("need 0 < t_lo < t_fit_hi <= split");
  if (fit_points < 4) throw PreconditionError("fit needs at least 4 points");
  if (!(fit_tol > 0.0) || !(abs_tol > 0.0)) throw PreconditionError("tolerances must be positive");
}

MellinFit fit_small_t(const HeatTrace& h, const MellinSpec& spec) {
  spec.validate();
  MellinFit fit;
  fit.menu = h.menu;
  const int n = spec.fit_points, na = static_cast<int>(h.menu.size());
  if (na >= n) throw PreconditionError("exponent menu longer than the fit grid");
  std::vector<double> ts(n);
  std::vector<cplx> ks(n);
  const double l0 = std::log(spec.t_lo), l1 = std::log(spec.t_fit_hi);
  for (int i = 0; i < n; ++i) ts[i] = std::exp(l0 + (l1 - l0) * i / (n - 1));
  parallel_for(n, [&](int i) { ks[i] = h.k(ts[i]); });
  double kmax = 0.0;
  for (const auto& v : ks) kmax = std::max(kmax, std::abs(v));
  if (na == 0) {
    fit.residual = kmax;
  } else {
    Eigen::MatrixXd a(n, na);
    Eigen::VectorXd scale(na);
    for (int j = 0; j < na; ++j) {
      for (int i = 0; i < n; ++i) a(i, j) = std::pow(ts[i], h.menu[j]);
      scale(j) = a.col(j).cwiseAbs().maxCoeff();
      a.col(j) /= scale(j);
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    fit.condition = sv(0) / std::max(sv(na - 1), 1e-300);
    if (fit.condition > spec.max_condition) throw FitError("ill-conditioned exponent menu");
    CVec rhs(n);
    for (int i = 0; i < n; ++i) rhs(i) = ks[i];
    const CVec c = svd.solve(rhs.real()).cast<cplx>() + cplx(0.0, 1.0) * svd.solve(rhs.imag()).cast<cplx>();
    double rmax = 0.0;
    for (int i = 0; i < n; ++i) {
      cplx model = 0.0;
      for (int j = 0; j < na; ++j) model += c(j) * a(i, j);
      rmax = std::max(rmax, std::abs(ks[i] - model));
    }
    for (int j = 0; j < na; ++j) fit.coeffs.push_back(c(j) / scale(j));
    fit.residual = rmax;
  }
  fit.residual = kmax > 0.0 ? fit.residual / kmax : 0.0;
  if (fit.residual > spec.fit_tol)
    throw FitError("small-t fit residual " + std::to_string(fit.residual) + " exceeds tolerance");
  return fit;
}

namespace {

constexpr double kSnap = 1e-10;

// Truncated Laurent series sum_{e=lo}^{hi} c_e z^e.
struct Series {
  int lo = 0, hi = 0;
  std::vector<cplx> c;

  Series(int l, int h) : lo(l), hi(h), c(h - l + 1, 0.0) {}
  cplx& at(int e) { return c[e - lo]; }
  cplx get(int e) const { return e < lo || e > hi ? cplx(0.0) : c[e - lo]; }

  Series& operator+=(const Series& o) {
    for (int e = lo; e <= hi; ++e) at(e) += o.get(e);
    return *this;
  }
  Series& operator*=(cplx s) {
    for (auto& v : c) v *= s;
    return *this;
  }
};

Series operator*(const Series& a, const Series& b) {
  Series r(a.lo, a.hi);
  for (int e1 = a.lo; e1 <= a.hi; ++e1) {
    const cplx x = a.get(e1);
    if (x == 0.0) continue;
    for (int e = r.lo; e <= r.hi; ++e) r.at(e) += x * b.get(e - e1);
  }
  return r;
}

Series series_exp(const Series& f, int lo, int hi) {
  // f has no constant or negative terms.
  Series r(lo, hi);
  std::vector<cplx> e(hi + 1, 0.0);
  e[0] = 1.0;
  for (int n = 1; n <= hi; ++n) {
    cplx s = 0.0;
    for (int k = 1; k <= n; ++k) s += static_cast<double>(k) * f.get(k) * e[n - k];
    e[n] = s / static_cast<double>(n);
  }
  for (int n = 0; n <= hi; ++n) r.at(n) = e[n];
  return r;
}

// 1/(beta + z).
Series inverse_linear(double beta, int lo, int hi) {
  Series r(lo, hi);
  if (std::abs(beta) < kSnap) {
    r.at(-1) = 1.0;
    return r;
  }
  double p = 1.0 / beta;
  for (int e = 0; e <= hi; ++e) {
    r.at(e) = (e % 2 ? -1.0 : 1.0) * p;
    p /= beta;
  }
  return r;
}

// 1/Gamma(o + z) around z = 0.
Series rgamma_series(double o, int lo, int hi) {
  int shift = 0;
  while (o + shift < 1.0) ++shift;
  const double x = o + shift;
  Series log_gamma(lo, hi);
  for (int k = 1; k <= hi; ++k) {
    const double d = k == 1 ? boost::math::digamma(x) : boost::math::polygamma(k - 1, x);
    log_gamma.at(k) = -d / std::tgamma(k + 1.0);
  }
  Series r = series_exp(log_gamma, lo, hi);
  r *= 1.0 / std::tgamma(x);
  for (int i = 0; i < shift; ++i) {
    Series lin(lo, hi);
    lin.at(0) = o + i;
    lin.at(1) = 1.0;
    r = r * lin;
  }
  return r;
}

int incomplete_terms(double t) {
  // T^n / n! below 1e-18 for T <= ~3.
  return std::max(30, static_cast<int>(std::ceil(8.0 * t + 30.0)));
}

// int_a^b t^{o-1} (ln t)^j / j! e^{-t} f(t) dt for j = 0..hi.
CVec log_moments(const std::function<cplx(double)>& f, double o, double a, double b, int hi, const MellinSpec& spec) {
  auto integrand = [&](double t) {
    CVec v(hi + 1);
    const cplx base = std::pow(t, o - 1.0) * std::exp(-t) * f(t);
    const double lt = std::log(t);
    cplx term = base;
    for (int j = 0; j <= hi; ++j) {
      v(j) = term;
      term *= lt / (j + 1.0);
    }
    return v;
  };
  QuadResult q = integrate_gk(integrand, a, b, spec.abs_tol, spec.rel_tol, 4000);
  if (!q.converged) throw std::runtime_error("Mellin moment quadrature did not converge");
  return q.value;
}

cplx fitted_part(const MellinFit& fit, double t) {
  cplx s = 0.0;
  for (std::size_t i = 0; i < fit.menu.size(); ++i) s += fit.coeffs[i] * std::pow(t, fit.menu[i]);
  return s;
}

double rgamma(double w) {
  if (w <= 0.0 && std::abs(w - std::round(w)) < kSnap) return 0.0;
  return 1.0 / std::tgamma(w);
}

}  // namespace

bool LaurentData::pole_free(double tol) const {
  for (int i = 0; i < depth + 1; ++i)
    if (std::abs(coeffs[i]) > tol) return false;
  return true;
}

LaurentData mellin_continuation(const HeatTrace& h, double offset, double q, int depth, const MellinSpec& spec) {
  if (depth < 0) throw PreconditionError("Laurent depth must be >= 0");
  const MellinFit fit = fit_small_t(h, spec);
  const int lo = -(depth + 1), hi = depth + 2;
  const double big_t = spec.split;

  Series bracket(lo, hi);
  Series t_pow(lo, hi);  // T^z
  {
    Series lt(lo, hi);
    lt.at(1) = std::log(big_t);
    t_pow = series_exp(lt, lo, hi);
  }
  for (std::size_t i = 0; i < fit.menu.size(); ++i) {
    const double beta = offset + fit.menu[i];
    Series sum(lo, hi);
    double coef = 1.0;  // (-T)^n / n!
    for (int n = 0; n < incomplete_terms(big_t); ++n) {
      Series term = inverse_linear(beta + n, lo, hi);
      term *= coef;
      sum += term;
      coef *= -big_t / (n + 1.0);
    }
    sum = sum * t_pow;
    sum *= fit.coeffs[i] * std::pow(big_t, beta);
    bracket += sum;
  }
  auto residual = [&](double t) { return h.k(t) - fitted_part(fit, t); };
  const CVec mid = log_moments(residual, offset, spec.t_lo, big_t, hi, spec);
  const CVec far = log_moments(h.k, offset, big_t, big_t + spec.t_far, hi, spec);
  for (int j = 0; j <= hi; ++j) bracket.at(j) += mid(j) + far(j);

  const Series zeta = rgamma_series(offset, lo, hi) * bracket;
  LaurentData d;
  d.model_id = h.model_id;
  d.b_word = h.b_word;
  d.menu = h.menu;
  d.q = q;
  d.critical_point = 0.5 * (1.0 - q);
  d.offset = offset;
  d.split = big_t;
  d.depth = depth;
  for (int e = lo; e <= 0; ++e) d.coeffs.push_back(zeta.get(e));
  d.residual = fit.residual;
  d.condition = fit.condition;
  return d;
}

cplx mellin_value(const HeatTrace& h, const MellinFit& fit, double offset, double z, const MellinSpec& spec) {
  spec.validate();
  const double w = offset + z, big_t = spec.split;
  cplx bracket = 0.0;
  for (std::size_t i = 0; i < fit.menu.size(); ++i) {
    const double beta = w + fit.menu[i];
    cplx sum = 0.0;
    double coef = 1.0;
    for (int n = 0; n < incomplete_terms(big_t); ++n) {
      if (std::abs(beta + n) < kSnap) throw PreconditionError("mellin_value evaluated at a pole");
      sum += coef / (beta + n);
      coef *= -big_t / (n + 1.0);
    }
    bracket += fit.coeffs[i] * std::pow(big_t, beta) * sum;
  }
  auto residual = [&](double t) { return h.k(t) - fitted_part(fit, t); };
  bracket += log_moments(residual, w, spec.t_lo, big_t, 0, spec)(0);
  bracket += log_moments(h.k, w, big_t, big_t + spec.t_far, 0, spec)(0);
  return rgamma(w) * bracket;
}

cplx tau_j(const LaurentData& data, int j) {
  if (j < -1 || j > data.depth) throw PreconditionError("tau_j index outside the fitted Laurent depth");
  return data.coeffs[data.depth - j];
}

void write_laurent(std::ostream& os, const LaurentData& d) {
  nlohmann::json j;
  j["model_id"] = d.model_id;
  j["b_word"] = d.b_word;
  j["menu"] = d.menu;
  j["q"] = d.q;
  j["critical_point"] = d.critical_point;
  j["offset"] = d.offset;
  j["split"] = d.split;
  j["depth"] = d.depth;
  nlohmann::json cs = nlohmann::json::array();
  for (const auto& c : d.coeffs) cs.push_back({c.real(), c.imag()});
  j["coefficients"] = cs;
  j["diagnostics"] = {{"residual", d.residual}, {"condition", d.condition}};
  os << j.dump() << "\n";
}

LaurentData read_laurent(std::istream& is) {
  nlohmann::json j;
  is >> j;
  LaurentData d;
  d.model_id = j.at("model_id").get<std::string>();
  d.b_word = j.at("b_word").get<std::string>();
  d.menu = j.at("menu").get<std::vector<double>>();
  d.q = j.at("q").get<double>();
  d.critical_point = j.at("critical_point").get<double>();
  d.offset = j.at("offset").get<double>();
  d.split = j.at("split").get<double>();
  d.depth = j.at("depth").get<int>();
  for (const auto& c : j.at("coefficients")) d.coeffs.emplace_back(c.at(0).get<double>(), c.at(1).get<double>());
  d.residual = j.at("diagnostics").at("residual").get<double>();
  d.condition = j.at("diagnostics").at("condition").get<double>();
  if (static_cast<int>(d.coeffs.size()) != d.depth + 2) throw PreconditionError("Laurent record has wrong length");
  return d;
}

TauProvider matrix_tau_provider(const EvenTriple& t) {
  const EigenDecomp e = herm_eig(t.D);
  return [e](int j, const BlockOperator& b, double offset) -> cplx {
    if (j < -1) throw PreconditionError("tau_j needs j >= -1");
    if (j >= 0) return 0.0;
    return trace_with_function(b, e, [offset](double d) { return cplx(std::pow(1.0 + d * d, -offset)); });
  };
}

TauProvider mellin_tau_provider(std::function<HeatTrace(const BlockOperator&)> heat_of, double q, MellinSpec spec) {
  return [heat_of = std::move(heat_of), q, spec](int j, const BlockOperator& b, double offset) -> cplx {
    const LaurentData d = mellin_continuation(heat_of(b), offset, q, std::max(j, 0), spec);
    return tau_j(d, j);
  };
}

std::pair<double, double> zeta_sum_residue_check(const EvenTriple& t, const BlockOperator& p, int two_n,
                                                 const TauProvider& tau) {
  const cplx res = residue_pairing(t, p, two_n, tau);
  return {res.real(), corner_index(t.D, t.gamma, p)};
}

}  // namespace sfindex
