#include "sfindex/quadrature.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <queue>
#include <thread>
#include <vector>

namespace sfindex {

namespace {

int threads_from_env() {
  const char* s = std::getenv("SFINDEX_THREADS");
  if (!s) return 1;
  const int n = std::atoi(s);
  return n >= 1 ? n : 1;
}

std::atomic<int>& thread_setting() {
  static std::atomic<int> n{threads_from_env()};
  return n;
}

constexpr double kXgk[8] = {0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                            0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                            0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                            0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr double kWgk[8] = {0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                            0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                            0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                            0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double kWg[4] = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                           0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
  double a, b;
  CVec value;
  double error;
  bool operator<(const Segment& o) const { return error < o.error; }
};

Segment gk15(const VecFn& f, double a, double b, int& evals) {
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  double xs[15];
  for (int j = 0; j < 7; ++j) {
    xs[2 * j] = c - h * kXgk[j];
    xs[2 * j + 1] = c + h * kXgk[j];
  }
  xs[14] = c;
  std::vector<CVec> fv(15);
  parallel_for(15, [&](int i) { fv[i] = f(xs[i]); });
  evals += 15;
  CVec k = kWgk[7] * fv[14];
  CVec g = kWg[3] * fv[14];
  for (int j = 0; j < 7; ++j) {
    const CVec s = fv[2 * j] + fv[2 * j + 1];
    k += kWgk[j] * s;
    if (j % 2 == 1) g += kWg[j / 2] * s;
  }
  k *= h;
  g *= h;
  return Segment{a, b, k, max_abs(k - g)};
}

QuadResult finite_sum(std::vector<Segment>& segs, int evals, bool converged) {
  QuadResult r;
  std::sort(segs.begin(), segs.end(), [](const Segment& x, const Segment& y) { return x.a < y.a; });
  r.value = CVec::Zero(segs.front().value.size());
  for (const auto& s : segs) {
    r.value += s.value;
    r.error += s.error;
  }
  r.evaluations = evals;
  r.converged = converged;
  return r;
}

}  // namespace

double max_abs(const CVec& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

int num_threads() { return thread_setting().load(); }

void set_num_threads(int n) { thread_setting().store(n >= 1 ? n : 1); }

void parallel_for(int n, const std::function<void(int)>& body) {
  const int t = std::min(num_threads(), n);
  if (t <= 1) {
    for (int i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  for (int w = 0; w < t; ++w)
    pool.emplace_back([&] {
      for (int i = next++; i < n; i = next++) body(i);
    });
  for (auto& th : pool) th.join();
}

QuadResult integrate_gk(const VecFn& f, double a, double b, double abs_tol, double rel_tol,
                        int max_intervals) {
  int evals = 0;
  std::priority_queue<Segment> heap;
  std::vector<Segment> done;
  const int initial = 4;
  for (int i = 0; i < initial; ++i) {
    const double lo = a + (b - a) * i / initial, hi = a + (b - a) * (i + 1) / initial;
    heap.push(gk15(f, lo, hi, evals));
  }
  CVec total = CVec::Zero(heap.top().value.size());
  double err = 0.0;
  {
    auto copy = heap;
    while (!copy.empty()) {
      total += copy.top().value;
      err += copy.top().error;
      copy.pop();
    }
  }
  bool converged = false;
  int count = initial;
  for (;;) {
    if (err <= std::max(abs_tol, rel_tol * max_abs(total))) {
      converged = true;
      break;
    }
    if (count >= max_intervals || heap.empty()) break;
    Segment worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) {
      done.push_back(worst);
      err -= worst.error;
      continue;
    }
    Segment left = gk15(f, worst.a, mid, evals);
    Segment right = gk15(f, mid, worst.b, evals);
    total += left.value + right.value - worst.value;
    err += left.error + right.error - worst.error;
    heap.push(std::move(left));
    heap.push(std::move(right));
    ++count;
  }
  while (!heap.empty()) {
    done.push_back(heap.top());
    heap.pop();
  }
  return finite_sum(done, evals, converged);
}

QuadResult integrate_real_line(const VecFn& f, double abs_tol, double rel_tol, int max_intervals) {
  const double hp = 0.5 * M_PI;
  auto g = [&](double u) -> CVec {
    const double c = std::cos(u);
    if (c <= 0.0) return 0.0 * f(0.0);
    return f(std::tan(u)) / (c * c);
  };
  return integrate_gk(g, -hp, hp, abs_tol, rel_tol, max_intervals);
}

QuadResult integrate_half_line(const VecFn& f, double abs_tol, double rel_tol, int max_intervals) {
  const double hp = 0.5 * M_PI;
  auto g = [&](double u) -> CVec {
    const double c = std::cos(u);
    if (c <= 0.0) return 0.0 * f(0.0);
    return f(std::tan(u)) / (c * c);
  };
  return integrate_gk(g, 0.0, hp, abs_tol, rel_tol, max_intervals);
}

namespace {

QuadResult trapezoid_sinh_impl(const VecFn& g, double scale, double t_max, double abs_tol,
                               double rel_tol, double h0, int max_levels, bool half) {
  auto node = [&](double t) -> CVec { return g(scale * std::sinh(t)) * (scale * std::cosh(t)); };
  // Level 0 nodes: t = k h0, |t| <= t_max.
  const int n0 = static_cast<int>(std::ceil(t_max / h0));
  std::vector<double> ts;
  for (int k = half ? 0 : -n0; k <= n0; ++k) ts.push_back(k * h0);
  std::vector<CVec> vals(ts.size());
  parallel_for(static_cast<int>(ts.size()), [&](int i) { vals[i] = node(ts[i]); });
  int evals = static_cast<int>(ts.size());
  CVec sum = CVec::Zero(vals[0].size());
  for (std::size_t i = 0; i < ts.size(); ++i) sum += (half && ts[i] == 0.0 ? 0.5 : 1.0) * vals[i];
  double h = h0;
  CVec prev = h * sum;
  QuadResult r;
  r.converged = false;
  for (int level = 1; level <= max_levels; ++level) {
    // New nodes: odd multiples of h/2.
    std::vector<double> nt;
    const int n = static_cast<int>(std::ceil(t_max / h));
    for (int k = half ? 0 : -n; k < n; ++k) nt.push_back((k + 0.5) * h);
    std::vector<CVec> nv(nt.size());
    parallel_for(static_cast<int>(nt.size()), [&](int i) { nv[i] = node(nt[i]); });
    evals += static_cast<int>(nt.size());
    for (const auto& v : nv) sum += v;
    h *= 0.5;
    const CVec cur = h * sum;
    const double diff = max_abs(cur - prev);
    prev = cur;
    if (diff <= std::max(abs_tol, rel_tol * max_abs(cur))) {
      r.converged = true;
      r.error = diff;
      break;
    }
    r.error = diff;
  }
  r.value = prev;
  r.evaluations = evals;
  return r;
}

}  // namespace

QuadResult trapezoid_sinh(const VecFn& g, double scale, double t_max, double abs_tol, double rel_tol,
                          double h0, int max_levels) {
  return trapezoid_sinh_impl(g, scale, t_max, abs_tol, rel_tol, h0, max_levels, false);
}

QuadResult trapezoid_sinh_half(const VecFn& g, double scale, double t_max, double abs_tol,
                               double rel_tol, double h0, int max_levels) {
  return trapezoid_sinh_impl(g, scale, t_max, abs_tol, rel_tol, h0, max_levels, true);
}

QuadResult romberg(const VecFn& f, double a, double b, int n0, double abs_tol, double rel_tol,
                   int max_levels) {
  std::vector<std::vector<CVec>> table;
  int n = n0;
  double h = (b - a) / n;
  CVec sum = 0.5 * (f(a) + f(b));
  {
    std::vector<CVec> v(n - 1);
    parallel_for(n - 1, [&](int i) { v[i] = f(a + (i + 1) * h); });
    for (const auto& x : v) sum += x;
  }
  int evals = n + 1;
  table.push_back({h * sum});
  QuadResult r;
  r.converged = false;
  for (int level = 1; level <= max_levels; ++level) {
    std::vector<CVec> v(n);
    parallel_for(n, [&](int i) { v[i] = f(a + (i + 0.5) * h); });
    for (const auto& x : v) sum += x;
    evals += n;
    n *= 2;
    h *= 0.5;
    std::vector<CVec> row{h * sum};
    double p = 4.0;
    for (std::size_t k = 1; k <= table.back().size(); ++k) {
      row.push_back(row[k - 1] + (row[k - 1] - table.back()[k - 1]) / (p - 1.0));
      p *= 4.0;
    }
    const double diff = max_abs(row.back() - table.back().back());
    table.push_back(row);
    r.error = diff;
    if (diff <= std::max(abs_tol, rel_tol * max_abs(row.back()))) {
      r.converged = true;
      break;
    }
  }
  r.value = table.back().back();
  r.evaluations = evals;
  return r;
}

}  // namespace sfindex
