#include "sfindex/suites.hpp"

#include "sfindex/cocycle.hpp"
#include "sfindex/constants.hpp"
#include "sfindex/fredholm.hpp"
#include "sfindex/psido.hpp"
#include "sfindex/quadrature.hpp"
#include "sfindex/zeta.hpp"

#include <algorithm>
#include <cstdio>
#include <cmath>
#include <map>
#include <numbers>
#include <string>

namespace sfindex::checks {

namespace {

std::string tag(const std::string& base, int i) { return base + "#" + std::to_string(i); }

double rel_diff(const BlockOperator& a, const BlockOperator& b) {
  return (a - b).norm() / std::max(b.norm(), 1e-300);
}

BlockOperator random_hermitian_op(std::mt19937_64& rng, const TracedAlgebra& alg) {
  return hermitian_part(random_operator(rng, alg));
}

// Small triples with a nonzero index in the weighted block.
EvenModel small_model(std::uint64_t seed) {
  RandomEvenOptions opt;
  opt.blocks = {{3, 3, 1.0, 2, 1, 1}, {2, 1, std::sqrt(2.0), 1, 1, 1}};
  return build_random_even(seed, opt);
}

std::vector<BlockOperator> commutator_word(const EvenModel& m, int degree) {
  std::vector<BlockOperator> f{m.triple.generators[1]};
  for (int i = 0; i < degree; ++i)
    f.push_back(commutator(m.triple, m.triple.generators[i % m.triple.generators.size()]));
  return f;
}

// Right-collected word counts by rewriting strings "R0R0R" (digits are
// commutator orders) with R A -> A R + R A' R.
std::map<MultiIndex, long long> rewrite_counts(int m, int max_order) {
  std::map<MultiIndex, long long> out;
  std::string start = "R";
  for (int i = 0; i < m; ++i) start += "0R";
  std::vector<std::string> work{start};
  while (!work.empty()) {
    const std::string w = work.back();
    work.pop_back();
    std::size_t pos = std::string::npos;
    for (std::size_t i = 0; i + 1 < w.size(); ++i)
      if (w[i] == 'R' && w[i + 1] != 'R') {
        pos = i;
        break;
      }
    if (pos == std::string::npos) {
      MultiIndex k;
      for (char c : w)
        if (c != 'R') k.push_back(c - '0');
      if (total(k) <= max_order) ++out[k];
      continue;
    }
    std::string moved = w;
    std::swap(moved[pos], moved[pos + 1]);
    work.push_back(moved);
    const std::string raised =
        w.substr(0, pos) + "R" + std::string(1, static_cast<char>(w[pos + 1] + 1)) + "R" + w.substr(pos + 2);
    int order = 0;
    for (char c : raised)
      if (c != 'R') order += c - '0';
    if (order <= max_order) work.push_back(raised);
  }
  return out;
}

HeatTrace scalar_circle_heat() {
  return {"scalar-circle", "1", [](double t) { return cplx(theta(t)); }, {-0.5}};
}

// Constant term of sum_n (1+n^2)^{-1/2-z} at z = 0 through 2 zeta_R(1+2z) = 1/z + 2 gamma_E + O(z).
double scalar_circle_constant_term() {
  const int n_max = 2000000;
  double s = 0.0;
  for (int n = n_max; n >= 1; --n) s += 1.0 / std::sqrt(1.0 + double(n) * n) - 1.0 / n;
  s -= 1.0 / (4.0 * double(n_max) * n_max);
  return 1.0 + 2.0 * s + 2.0 * std::numbers::egamma;
}

std::string sci(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", x);
  return buf;
}

// "@name=value" suffix for check ids.
std::string at(const char* name, double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "@%s=%g", name, v);
  return buf;
}

int chern_number(double mass) {
  if (mass > 0.0 && mass < 2.0) return 1;
  if (mass < 0.0 && mass > -2.0) return -1;
  return 0;
}

}  // namespace

void mckean_singer(Recorder& rec, std::uint64_t seed, int instances, int max_dim) {
  const std::string anchor = "Ind(D+) = tau(gamma f(D)) / f(0)";
  std::mt19937_64 rng(seed);
  const std::vector<std::pair<std::string, std::function<double(double)>>> fs = {
      {"resolvent", [](double x) { return std::pow(1.0 + x * x, -1.5); }},
      {"gaussian", [](double x) { return std::exp(-x * x); }}};
  for (int i = 0; i < instances; ++i) {
    rec.guard(tag("mckean_singer.build", i), anchor, [&] {
      const EvenModel m = build_random_even(seed * 1000 + i, random_even_options(rng, max_dim));
      for (const auto& [name, f] : fs) {
        const McKeanSingerResult r = mckean_singer(m.triple.D, m.triple.gamma, f);
        rec.close(tag("mckean_singer." + name, i), anchor, r.trace_formula, r.kernel_index, 1e-9,
                  describe(m.triple.algebra));
      }
    });
  }
}

void additivity(Recorder& rec, std::uint64_t seed, int instances) {
  const std::string anchor = "Ind(ST) = Ind(S) + Ind(T)";
  const std::string count = "Ind(T) = tau(N_T^Q) - tau(N_T*^P)";
  std::mt19937_64 rng(seed);
  const double w2 = std::sqrt(2.0);
  for (int i = 0; i < instances; ++i) {
    rec.guard(tag("additivity.build", i), anchor, [&] {
      std::uniform_int_distribution<int> dim(2, 7);
      const int d1 = dim(rng), d2 = dim(rng);
      TracedAlgebra alg({{d1, 1.0}, {d2, w2}});
      auto rk = [&](int hi) { return std::uniform_int_distribution<int>(0, hi)(rng); };
      const std::vector<int> rg{rk(d1), rk(d2)}, rp{rk(d1), rk(d2)}, rq{rk(d1), rk(d2)};
      const BlockOperator g = random_projection(rng, alg, rg), p = random_projection(rng, alg, rp),
                          q = random_projection(rng, alg, rq);
      const std::vector<int> rt{rk(std::min(rp[0], rq[0])), rk(std::min(rp[1], rq[1]))};
      const std::vector<int> rs{rk(std::min(rg[0], rp[0])), rk(std::min(rg[1], rp[1]))};
      const BlockOperator t = random_corner_operator(rng, p, q, rt), s = random_corner_operator(rng, g, p, rs);
      // Constructed kernels: dim ker T|Q = rank q - rank T, dim coker = rank p - rank T.
      auto constructed = [&](const std::vector<int>& to, const std::vector<int>& from, const std::vector<int>& r) {
        return (from[0] - r[0]) - (to[0] - r[0]) + w2 * ((from[1] - r[1]) - (to[1] - r[1]));
      };
      rec.close(tag("additivity.count_T", i), count, fredholm_index(t, SkewCorner(p, q)).index,
                constructed(rp, rq, rt), 1e-8);
      rec.close(tag("additivity.count_S", i), count, fredholm_index(s, SkewCorner(g, p)).index,
                constructed(rg, rp, rs), 1e-8);
      const auto [lhs, rhs] = product_index_check(s, t, g, p, q);
      rec.close(tag("additivity.product", i), anchor, lhs, rhs, 1e-8);
    });
  }
}

void transform(Recorder& rec, std::uint64_t seed, int index_instances, int continuity_instances) {
  const std::string a_bt = "Ind(T) = Ind(T(1+|T|^2)^{-1/2})";
  const std::string a_pert = "Ind(T+k) = Ind(T)";
  const std::string a_cont = "||bt(T) - bt(T+A)|| <= ||A||";
  std::mt19937_64 rng(seed);
  for (int i = 0; i < std::max(index_instances, continuity_instances); ++i) {
    rec.guard(tag("transform.build", i), a_bt, [&] {
      std::uniform_int_distribution<int> dim(3, 7);
      const int d1 = dim(rng), d2 = dim(rng);
      TracedAlgebra alg({{d1, 1.0}, {d2, 0.5}});
      auto rk = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
      const std::vector<int> rp{rk(1, d1), rk(1, d2)}, rq{rk(1, d1), rk(1, d2)};
      const BlockOperator p = random_projection(rng, alg, rp), q = random_projection(rng, alg, rq);
      const SkewCorner c(p, q);
      const std::vector<int> rt{rk(0, std::min(rp[0], rq[0])), rk(0, std::min(rp[1], rq[1]))};
      const BlockOperator t = random_corner_operator(rng, p, q, rt);
      if (i < index_instances) {
        const double ind = fredholm_index(t, c).index;
        rec.close(tag("transform.bounded", i), a_bt, fredholm_index(bounded_transform(t, c), c).index, ind, 1e-12);
        // Perturbation below a third of the smallest nonzero singular value (>= 0.5).
        BlockOperator k = p * random_operator(rng, alg) * q;
        k *= 0.99 * 0.5 / 3.0 / std::max(k.norm(), 1e-300);
        rec.close(tag("transform.perturbation", i), a_pert, fredholm_index(t + k, c).index, ind, 1e-12);
      }
      if (i < continuity_instances) {
        BlockOperator a = p * random_operator(rng, alg) * q;
        a *= std::uniform_real_distribution<double>(0.01, 3.0)(rng) / std::max(a.norm(), 1e-300);
        const double excess = transform_continuity_check(t, a, c);
        rec.at_most(tag("transform.continuity", i), a_cont, excess, 0.0, 1e-12);
      }
    });
  }
}

void compressed_ms(Recorder& rec, std::uint64_t seed, int instances) {
  const std::string anchor = "Ind(pD+p) = (1+a)^{n/2} tau(gamma p (p+a+(pDp)^2)^{-n/2})";
  std::mt19937_64 rng(seed);
  for (int i = 0; i < instances; ++i) {
    rec.guard(tag("compressed_ms.build", i), anchor, [&] {
      const EvenModel m = build_random_even(seed * 1000 + i, random_even_options(rng, 6));
      const double kc = corner_index(m.triple.D, m.triple.gamma, m.p);
      rec.close(tag("compressed_ms.kernel_count", i), "Ind(pD+p) by kernel count", kc, m.index, 1e-8);
      for (double a : {0.0, 1.0}) {
        const McKeanSingerResult r = mckean_singer_compressed(m.triple.D, m.triple.gamma, m.p, 3.0, a);
        rec.close(tag(a == 0.0 ? "compressed_ms.a0" : "compressed_ms.a1", i), anchor, r.trace_formula, kc, 1e-8);
      }
    });
  }
}

void doubling(Recorder& rec, std::uint64_t seed, int instances, double quad_abs_tol) {
  const std::string a_const = "a(w) is constant";
  const std::string a_key = "Ind(pD+p) C_{n/2} = a(1) + 1/2 int tau(gamma (1+D_p^2+s^2)^{-n/2}) ds";
  QuadratureSpec quad;
  quad.abs_tol = quad_abs_tol;
  std::mt19937_64 rng(seed);
  for (int i = 0; i < instances; ++i) {
    rec.guard(tag("doubling.build", i), a_key, [&] {
      const EvenModel m = build_random_even(seed * 1000 + i, random_even_options(rng, 3));
      const DoubledTriple dt(m.triple, m.p);
      const double n = m.triple.q + 2.0;
      double lo = INFINITY, hi = -INFINITY;
      for (double w : {0.0, 0.25, 0.5, 0.75, 1.0}) {
        const double a = dt.a_of_w(w, n, quad);
        lo = std::min(lo, a);
        hi = std::max(hi, a);
      }
      rec.at_most(tag("doubling.spread", i), a_const, hi - lo, 0.0, 1e-6);
      const auto [lhs, rhs] = dt.key_identity_check(n, quad);
      rec.close(tag("doubling.key_identity", i), a_key, lhs, rhs, 1e-6);
      rec.close(tag("doubling.lhs_index", i), "Ind(pD+p) C_{n/2}", lhs, m.index * c_half(n), 1e-10);
    });
  }
}

void expansions(Recorder& rec, std::uint64_t seed) {
  const std::string a_mr = "a_0 R A_1 R ... A_m R = sum_k C(k) a_0 A^(k) R^{|k|+m+1} + remainder";
  const std::string a_res = "R~ = sum_m (R V)^m R + (R V)^{2N+1} R~";
  const std::string a_odd = "odd-m supertrace terms vanish";
  rec.guard("expansions.move_right", a_mr, [&] {
    const EvenModel m = small_model(seed);
    int i = 0;
    for (int deg = 1; deg <= 3; ++deg)
      for (int extra : {0, 1, 2})
        for (cplx lam : {cplx(0.25, -3.0), cplx(0.25, 0.4), cplx(0.25, 40.0)}) {
          const MoveRightExpansion e = move_right_expand(m.triple, commutator_word(m, deg), 0.7, lam, deg + extra);
          rec.close(tag("expansions.move_right", i++), a_mr, rel_diff(e.collected_sum + e.remainder, e.original),
                    0.0, 1e-9, "relative");
        }
  });
  rec.guard("expansions.resolvent", a_res, [&] {
    const EvenModel m = small_model(seed + 1);
    const DoubledTriple dt(m.triple, m.p);
    int i = 0;
    for (int order : {0, 2, 4})
      for (double s : {-1.3, 0.4, 2.0}) {
        const ResolventExpansion e = resolvent_expand(dt, s, cplx(0.25, -0.8), order);
        BlockOperator sum = e.remainder;
        for (const auto& t : e.terms) sum += t;
        rec.close(tag("expansions.resolvent", i++), a_res, rel_diff(sum, e.target), 0.0, 1e-9, "relative");
      }
  });
  rec.guard("expansions.odd_supertrace", a_odd, [&] {
    const EvenModel m = small_model(seed + 2);
    const DoubledTriple dt(m.triple, m.p);
    const BlockOperator q2 = kron2(pauli(0), 2.0 * m.p - m.triple.one());
    int i = 0;
    for (double s : {0.3, 1.7}) {
      const ResolventExpansion e = resolvent_expand(dt, s, cplx(0.25, -0.5), 4);
      for (int k = 1; k <= 4; k += 2)
        rec.close(tag("expansions.odd_supertrace", i++), a_odd, std::abs(dt.supertrace(q2 * e.terms[k])), 0.0,
                  1e-12);
    }
  });
}

void integrals(Recorder& rec, std::uint64_t seed, int draws) {
  const std::string a_c = "(1/2 pi i) int lambda^{-z} (lambda - X)^{-k-1} = (-1)^k Gamma(z+k)/(Gamma(z) k!) X^{-z-k}";
  const std::string a_s = "int_0^inf (2s)^m (c+s^2)^{-A} ds = Gamma((m+1)/2) Gamma(A-(m+1)/2) 2^{m-1} c^{(m+1)/2-A} / Gamma(A)";
  std::mt19937_64 rng(seed);
  TracedAlgebra alg({{4, 1.0}, {2, 0.5}});
  std::uniform_real_distribution<double> zd(0.6, 3.0), sh(0.8, 2.0);
  for (int i = 0; i < draws; ++i) {
    rec.guard(tag("integrals.contour", i), a_c, [&] {
      const BlockOperator h = random_hermitian_op(rng, alg);
      const double z = zd(rng), c = sh(rng);
      const int k = static_cast<int>(rng() % 4);
      const auto [num, closed] = cauchy_power_integral(h, c, z, k);
      rec.close(tag("integrals.contour", i), a_c, rel_diff(num, closed), 0.0, 1e-6, "relative");
    });
  }
  std::uniform_real_distribution<double> cd(0.5, 5.0), ad(0.3, 3.0);
  for (int i = 0; i < draws; ++i) {
    rec.guard(tag("integrals.s_integral", i), a_s, [&] {
      const int m = 2 * static_cast<int>(rng() % 3);
      const double c = cd(rng), big_a = 0.5 * (m + 1) + ad(rng);
      const auto [num, closed] = s_integral_gamma(c, m, big_a);
      rec.close(tag("integrals.s_integral", i), a_s, std::abs(num - closed) / std::abs(closed), 0.0, 1e-9,
                "relative");
    });
  }
}

void constants(Recorder& rec) {
  const std::string a_alpha = "alpha(k) = 1/(k_1!...k_m! (k_1+1)(k_1+k_2+2)...(|k|+m))";
  const std::string a_ck = "C(k) counts right-collected words";
  const std::string a_sigma = "prod_{j=0}^{n-1} (z+j) = sum_j sigma_{n,j} z^j";
  const std::string a_eta = "(m+1)/2 eta_{m+2} = eta_m";
  const std::string a_leg = "2^{m-1} Gamma((m+1)/2) = sqrt(pi) Gamma(m) / Gamma(m/2)";
  const std::string a_c = "C_{n/2} = Gamma(1/2) Gamma(n/2-1/2) / Gamma(n/2)";
  rec.guard("constants.alpha", a_alpha, [&] {
    bool ok = true;
    int n = 0;
    for (int m = 1; m <= 8; ++m)
      for (const auto& k : multi_indices(m, 8 - m)) {
        Rational direct(1);
        int partial = 0;
        for (std::size_t i = 0; i < k.size(); ++i) {
          partial += k[i] + 1;
          direct /= Rational(factorial(k[i]) * partial);
        }
        ok = ok && alpha(k) == direct;
        ++n;
      }
    rec.holds("constants.alpha", a_alpha, ok, std::to_string(n) + " multi-indices");
  });
  rec.guard("constants.expansion_coefficient", a_ck, [&] {
    bool ok = true;
    int n = 0;
    for (int m = 1; m <= 4; ++m) {
      const auto counts = rewrite_counts(m, 8 - m);
      const auto ks = multi_indices(m, 8 - m);
      ok = ok && counts.size() == ks.size();
      for (const auto& k : ks) {
        auto it = counts.find(k);
        ok = ok && it != counts.end() && expansion_coefficient(k) == Rational(it->second);
        ++n;
      }
    }
    rec.holds("constants.expansion_coefficient", a_ck, ok, std::to_string(n) + " multi-indices");
  });
  rec.guard("constants.sigma", a_sigma, [&] {
    bool ok = true;
    for (int n = 1; n <= 8; ++n) {
      const auto s = sigma_elementary(n);
      ok = ok && s.size() == static_cast<std::size_t>(n);
      for (long long z = -3; z <= 5 && ok; ++z) {
        long long prod = 1, poly = 0, zp = z;
        for (int j = 0; j < n; ++j) prod *= z + j;
        for (int j = 0; j < n; ++j, zp *= z) poly += s[j] * zp;
        ok = ok && prod == poly;
      }
    }
    rec.holds("constants.sigma", a_sigma, ok, "n <= 8");
  });
  rec.guard("constants.eta", a_eta, [&] {
    bool ok = true;
    for (int m = 0; m <= 18; m += 2) ok = ok && Rational(m + 1, 2) * eta(m + 2) == eta(m);
    rec.holds("constants.eta", a_eta, ok, "m <= 18");
  });
  for (int m = 0; m <= 20; ++m)
    rec.guard(tag("constants.legendre", m), a_leg,
              [&] { rec.close(tag("constants.legendre", m), a_leg, legendre_duplication_check(m), 0.0, 1e-12, "relative"); });
  // C_{h+1} = C_h (h - 1/2)/h and C_{3/2} = 2, C_1 = pi, and the Gamma
  // simplification of each (m, k) strand.
  for (int m = 0; m <= 20; ++m) {
    rec.guard(tag("constants.c_norm", m), a_c, [&] {
      const double h = 1.0 + 0.5 * m;
      double rec_value = m % 2 ? 2.0 : std::numbers::pi;
      for (double g = m % 2 ? 1.5 : 1.0; g < h; g += 1.0) rec_value *= (g - 0.5) / g;
      rec.close(tag("constants.c_norm", m), a_c, std::abs(c_norm(h) - rec_value) / rec_value, 0.0, 1e-12,
                "relative");
    });
  }
  const std::string a_g = "Gamma(q/2+r+|k|+(m-1)/2) = C_{q/2+r} sum_j sigma_{h,j} (r+(q-1)/2)^j Gamma(q/2+r)/sqrt(pi)";
  for (int m = 0; m <= 20; m += 2) {
    rec.guard(tag("constants.gamma_strand", m), a_g, [&] {
      double worst = 0.0;
      for (double q : {1.0, 2.0})
        for (double r : {0.75, 1.0, 1.5})
          for (const auto& k : multi_indices(m, m <= 4 ? 2 : 0)) {
            const auto [lhs, rhs] = gamma_constant_sides(m, k, q, r);
            worst = std::max(worst, std::abs(lhs - rhs) / std::abs(lhs));
          }
      rec.close(tag("constants.gamma_strand", m), a_g, worst, 0.0, 1e-12, "max relative");
    });
  }
  const std::string a_ce = "eta_m c_m = (-1)^{m/2} 2^m";
  rec.guard("constants.chern_eta", a_ce, [&] {
    bool ok = true;
    for (int m = 2; m <= 12; m += 2) {
      const long long sign = (m / 2) % 2 ? -1 : 1;
      ok = ok && eta(m) * chern_coefficient(m) == Rational(sign * (1LL << m));
    }
    rec.holds("constants.chern_eta", a_ce, ok);
  });
}

void cocycle_bB(Recorder& rec, std::uint64_t seed, int matrix_triples, bool torus) {
  const std::string anchor = "B phi^r_{m+2} + b phi^r_m = 0";
  const std::vector<double> r{0.75, 1.0, 1.5};
  for (int i = 0; i < matrix_triples; ++i) {
    rec.guard(tag("cocycle.bB.matrix", i), anchor, [&] {
      RandomEvenOptions opt;
      opt.blocks = {{2, 2, 1.0, 1, 1, 1}, {1, 2, std::sqrt(2.0), 1, 1, 0}};
      const EvenModel m = build_random_even(seed * 1000 + i, opt);
      const EvenTriple& t = m.triple;
      const BlockOperator x = t.generators[1], y = t.generators[2];
      const CVec v0 = bB_cocycle_check(t, 0, r, {x, m.p});
      const CVec v2 = bB_cocycle_check(t, 2, r, {x, m.p, y, m.p});
      for (std::size_t j = 0; j < r.size(); ++j) {
        rec.close(tag("cocycle.bB.matrix.m0", i) + at("r", r[j]), anchor, std::abs(v0(j)), 0.0, 1e-5);
        rec.close(tag("cocycle.bB.matrix.m2", i) + at("r", r[j]), anchor, std::abs(v2(j)), 0.0, 1e-5);
      }
    });
  }
  if (!torus) return;
  rec.guard("cocycle.bB.torus", anchor, [&] {
    const EvenTriple t = torus_dense_triple(build_torus(2));
    const BlockOperator &p = t.generators[0], &u = t.generators[1], &v = t.generators[2];
    const std::vector<std::pair<std::string, Tuple>> cases = {
        {"m0(U,p)", {u, p}}, {"m0(p,V)", {p, v}}, {"m2(U,p,V,p)", {u, p, v, p}}, {"m2(p,U,p,V)", {p, u, p, v}}};
    for (const auto& [name, tup] : cases) {
      const int m = static_cast<int>(tup.size()) - 2;
      const CVec val = bB_cocycle_check(t, m, r, tup);
      for (std::size_t j = 0; j < r.size(); ++j)
        rec.close("cocycle.bB.torus." + name + at("r", r[j]), anchor, std::abs(val(j)), 0.0, 1e-5,
                  "dense torus Lambda=2");
    }
  });
}

void residue_table(Recorder& rec, std::uint64_t seed, int instances, int max_dim) {
  const std::string anchor = "(sum_m phi^r_m(Ch_m(p)) + Rem(r)) / C_{q/2+r} = Ind(pD+p)";
  const std::vector<double> r{0.75, 1.0, 1.5};
  std::mt19937_64 rng(seed);
  for (int i = 0; i < instances; ++i) {
    rec.guard(tag("residue_table.build", i), anchor, [&] {
      const EvenModel m = build_random_even(seed * 1000 + i, random_even_options(rng, max_dim));
      const auto rows = sfindex::residue_table(m.triple, m.p, r, 2);
      for (const auto& row : rows)
        rec.close(tag("residue_table.ratio", i) + at("r", row.r), anchor, row.ratio, m.index, 1e-5);
    });
  }
}

void zeta(Recorder& rec, std::uint64_t seed) {
  rec.guard("zeta.circle_residue", "res sum_n (1+n^2)^{-1/2-z} = 1", [&] {
    const LaurentData d = mellin_continuation(scalar_circle_heat(), 0.5, 1.0, 1);
    rec.close("zeta.circle_residue", "res sum_n (1+n^2)^{-1/2-z} = 1", tau_j(d, 0).real(), 1.0, 1e-9);
    rec.close("zeta.circle_constant", "sum_n (1+n^2)^{-1/2-z} = 1/z + 1 + 2 sum((1+n^2)^{-1/2} - 1/n) + 2 gamma_E + O(z)",
              tau_j(d, -1).real(), scalar_circle_constant_term(), 1e-8);
    rec.close("zeta.circle_double_pole", "tau_1 = 0 for a simple pole", std::abs(tau_j(d, 1)), 0.0, 1e-9);
  });
  rec.guard("zeta.torus_residue", "res sum_{n in Z^2} 2 (1+|n|^2)^{-1-z} = 2 pi", [&] {
    const HeatTrace h{"torus", "1", [](double t) { return cplx(2.0 * theta(t) * theta(t)); }, {-1.0, 0.0}};
    const LaurentData d = mellin_continuation(h, 1.0, 2.0, 0);
    rec.close("zeta.torus_residue", "res sum_{n in Z^2} 2 (1+|n|^2)^{-1-z} = 2 pi", tau_j(d, 0).real(),
              2.0 * std::numbers::pi, 1e-9);
  });
  rec.guard("zeta.direct_sum", "zeta(z) = sum_n (1+n^2)^{-1/2-z}, Re z > 0", [&] {
    const HeatTrace h = scalar_circle_heat();
    const MellinSpec spec;
    const MellinFit fit = fit_small_t(h, spec);
    for (double z : {1.5, 2.0, 3.0}) {
      double direct = 1.0;
      for (int n = 200000; n >= 1; --n) direct += 2.0 * std::pow(1.0 + double(n) * n, -0.5 - z);
      rec.close("zeta.direct_sum" + at("z", z), "zeta(z) = sum_n (1+n^2)^{-1/2-z}, Re z > 0",
                mellin_value(h, fit, 0.5, z, spec).real(), direct, 1e-8);
    }
  });
  rec.guard("zeta.split", "Laurent data independent of the Mellin split point", [&] {
    MellinSpec s2;
    s2.split = 2.0;
    const LaurentData a = mellin_continuation(scalar_circle_heat(), 0.5, 1.0, 2);
    const LaurentData b = mellin_continuation(scalar_circle_heat(), 0.5, 1.0, 2, s2);
    double worst = 0.0;
    for (std::size_t i = 0; i < a.coeffs.size(); ++i) worst = std::max(worst, std::abs(a.coeffs[i] - b.coeffs[i]));
    rec.close("zeta.split", "Laurent data independent of the Mellin split point", worst, 0.0, 1e-7);
  });
  const std::string a_m = "res_{z=0} sum_m phi_m(Ch_m(p)) = Ind(pD+p) (matrix)";
  std::mt19937_64 rng(seed);
  for (int i = 0; i < 5; ++i) {
    rec.guard(tag("zeta.matrix_residue", i), a_m, [&] {
      const EvenModel m = build_random_even(seed * 1000 + i, random_even_options(rng, 3));
      const auto [res, ind] = zeta_sum_residue_check(m.triple, m.p, 2, matrix_tau_provider(m.triple));
      rec.close(tag("zeta.matrix_residue", i), a_m, res, ind, 1e-10);
    });
  }
}

void torus_index(Recorder& rec, int lambda, double mass, bool stability, bool hard) {
  const std::string anchor = "Ind(pD+p) = sum_m phi_m(Ch_m(p))";
  const std::string suffix = "@Lambda=" + std::to_string(lambda);
  rec.guard("torus.pairing" + suffix, anchor, [&] {
    const TorusModel t = build_torus(lambda, mass);
    const TorusPairing pr = torus_residue_pairing(t);
    const TorusIndex ki = torus_kernel_index(t);
    rec.close("torus.kernel_vs_chern" + suffix, "Ind(pD+p) = Chern number of the line bundle", ki.index,
              chern_number(mass), 0.0,
              "kernel " + std::to_string(ki.kernel) + ", cokernel " + std::to_string(ki.cokernel) + ", gap " + sci(ki.gap));
    rec.close("torus.pairing" + suffix, anchor, pr.pairing, ki.index, 0.05,
              "fit residual " + sci(pr.fit_residual));
    rec.close("torus.strand0" + suffix, "phi_0(Ch_0(p)) = tau_{-1}(gamma p) = 0", std::abs(pr.strand0), 0.0, 1e-9);
    if (hard) {
      const double h = torus_residue_pairing(t, {}, true).pairing;
      rec.close("torus.wrap_vs_hard" + suffix, "pairing independent of the truncation convention", pr.pairing, h,
                1e-3);
    }
  });
  if (!stability) return;
  rec.guard("torus.stability", anchor, [&] {
    const double a = torus_residue_pairing(build_torus(16, mass)).pairing;
    const double b = torus_residue_pairing(build_torus(32, mass)).pairing;
    rec.close("torus.stability@Lambda=16,32", anchor, a, b, 1e-3);
  });
}

void circle(Recorder& rec, int cutoff) {
  const std::string anchor = "Ind(pD+p) = phi_0(Ch_0(p)) = tau_{-1}(gamma p) for 1 <= q < 2";
  rec.guard("circle.pairing", anchor, [&] {
    const CircleModel c = build_circle_even(cutoff);
    const TauProvider tau =
        mellin_tau_provider([&](const BlockOperator& b) { return circle_heat_trace(c, b); }, c.triple.q);
    const cplx pairing = residue_pairing(c.triple, c.p, 2, tau);
    const cplx strand0 = tau(-1, c.triple.gamma * c.p, 0.0);
    rec.close("circle.pairing_vs_strand0", anchor, pairing.real(), strand0.real(), 1e-6);
    rec.close("circle.pairing_imag", anchor, pairing.imag(), 0.0, 1e-6);
    rec.close("circle.strand0", "tau_{-1}(gamma) = 0", std::abs(strand0), 0.0, 1e-6);
    const ChernComponent c2 = chern(c.p, 2);
    const cplx phi2 = residue_cocycle(c.triple, c2.word, 2, tau);
    rec.close("circle.strand2", "[D, 1] = 0 so phi_2(Ch_2(1)) = 0", std::abs(phi2), 0.0, 1e-12);
    rec.close("circle.index", anchor, corner_index(c.triple.D, c.triple.gamma, c.p), pairing.real(), 1e-6);
    const LaurentData d = mellin_continuation(circle_heat_trace(c, c.triple.one(), "1"), 0.5, 1.0, 0);
    rec.close("circle.residue_unit", "res tau((1+D^2)^{-1/2-z}) = 2", tau_j(d, 0).real(), 2.0, 1e-9);
  });
}

void matrix_residue(Recorder& rec, std::uint64_t seed, int instances) {
  const std::string anchor = "Ind(pD+p) = sum_m phi_m(Ch_m(p))";
  std::mt19937_64 rng(seed);
  for (int i = 0; i < instances; ++i) {
    rec.guard(tag("matrix_residue", i), anchor, [&] {
      const EvenModel m = build_random_even(seed * 1000 + i, random_even_options(rng, 4));
      const auto [res, ind] = zeta_sum_residue_check(m.triple, m.p, 2, matrix_tau_provider(m.triple));
      rec.close(tag("matrix_residue", i), anchor, res, m.index, 1e-10);
      rec.close(tag("matrix_residue.count", i), "Ind(pD+p) by kernel count", ind, m.index, 1e-10);
    });
  }
}

}  // namespace sfindex::checks
