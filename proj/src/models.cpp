#include "sfindex/models.hpp"

#include "sfindex/fredholm.hpp"

#include <algorithm>
#include <cmath>

namespace sfindex {

Mat random_gaussian(std::mt19937_64& rng, int rows, int cols) {
  std::normal_distribution<double> n(0.0, std::sqrt(0.5));
  Mat m(rows, cols);
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i) m(i, j) = cplx(n(rng), n(rng));
  return m;
}

Mat random_isometry(std::mt19937_64& rng, int rows, int cols) {
  if (cols > rows) throw PreconditionError("isometry needs cols <= rows");
  if (cols == 0) return Mat(rows, 0);
  Eigen::HouseholderQR<Mat> qr(random_gaussian(rng, rows, cols));
  return qr.householderQ() * Mat::Identity(rows, cols);
}

BlockOperator random_even_element(std::mt19937_64& rng, const TracedAlgebra& alg, const BlockOperator& gamma) {
  std::vector<Mat> b;
  for (std::size_t i = 0; i < alg.num_blocks(); ++i) {
    const int d = alg.block(i).dim;
    const Mat g = gamma.block(i);
    const Mat pp = 0.5 * (Mat::Identity(d, d) + g);
    const Mat pm = Mat::Identity(d, d) - pp;
    const Mat x = random_gaussian(rng, d, d);
    b.push_back(pp * x * pp + pm * x * pm);
  }
  BlockOperator a(alg, b);
  return (1.0 / std::max(a.norm(), 1e-300)) * a;
}

BlockOperator random_operator(std::mt19937_64& rng, const TracedAlgebra& alg) {
  std::vector<Mat> b;
  for (const auto& blk : alg.blocks()) b.push_back(random_gaussian(rng, blk.dim, blk.dim));
  return BlockOperator(alg, b);
}

BlockOperator random_projection(std::mt19937_64& rng, const TracedAlgebra& alg, const std::vector<int>& ranks) {
  if (ranks.size() != alg.num_blocks()) throw PreconditionError("one rank per block");
  std::vector<Mat> b;
  for (std::size_t i = 0; i < alg.num_blocks(); ++i) {
    const Mat w = random_isometry(rng, alg.block(i).dim, ranks[i]);
    b.push_back(w * w.adjoint());
  }
  return BlockOperator(alg, b);
}

BlockOperator random_corner_operator(std::mt19937_64& rng, const BlockOperator& p, const BlockOperator& q,
                                     const std::vector<int>& ranks, double lo, double hi) {
  const auto wp = range_basis(p), wq = range_basis(q);
  if (ranks.size() != wp.size()) throw PreconditionError("one rank per block");
  std::uniform_real_distribution<double> sv(lo, hi);
  std::vector<Mat> b;
  for (std::size_t i = 0; i < wp.size(); ++i) {
    const int r = ranks[i];
    const Mat u = random_isometry(rng, static_cast<int>(wp[i].cols()), r);
    const Mat v = random_isometry(rng, static_cast<int>(wq[i].cols()), r);
    CVec s(r);
    for (int k = 0; k < r; ++k) s(k) = sv(rng);
    b.push_back(wp[i] * u * s.asDiagonal() * v.adjoint() * wq[i].adjoint());
  }
  return BlockOperator(p.algebra(), b);
}

EvenModel build_random_even(std::uint64_t seed, const RandomEvenOptions& opt) {
  if (opt.blocks.empty()) throw PreconditionError("random even model needs at least one block");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> sig(opt.sigma_lo, opt.sigma_hi);
  std::vector<Block> blocks;
  for (const auto& b : opt.blocks) {
    if (b.n_plus < 0 || b.n_minus < 0 || b.n_plus + b.n_minus < 1)
      throw PreconditionError("block needs a positive dimension");
    if (b.p_plus < 0 || b.p_plus > b.n_plus || b.p_minus < 0 || b.p_minus > b.n_minus)
      throw PreconditionError("projection rank exceeds chirality dimension");
    blocks.push_back({b.n_plus + b.n_minus, b.weight});
  }
  TracedAlgebra alg(blocks);
  std::vector<Mat> dblocks, gblocks, pblocks;
  EvenModel model;
  for (std::size_t i = 0; i < opt.blocks.size(); ++i) {
    const auto& spec = opt.blocks[i];
    const int np = spec.n_plus, nm = spec.n_minus, d = np + nm;
    const int kp = spec.p_plus, km = spec.p_minus;
    const int rho = spec.corner_rank < 0 ? std::min(kp, km) : spec.corner_rank;
    if (rho > std::min(kp, km)) throw PreconditionError("corner rank too large");
    const Mat wp = random_isometry(rng, np, kp);
    const Mat wm = random_isometry(rng, nm, km);
    const Mat projp = wp * wp.adjoint(), projm = wm * wm.adjoint();
    // B maps the +1 eigenspace to the -1 eigenspace. Outside the corner it is
    // generic; inside, it is U diag(sigma) V* with known rank rho.
    const Mat b0 = random_gaussian(rng, nm, np);
    Mat corner = Mat::Zero(nm, np);
    if (rho > 0) {
      const Mat u = random_isometry(rng, km, rho), v = random_isometry(rng, kp, rho);
      CVec sv(rho);
      for (int k = 0; k < rho; ++k) sv(k) = sig(rng);
      corner = wm * u * sv.asDiagonal() * v.adjoint() * wp.adjoint();
    }
    const Mat b = b0 - projm * b0 * projp + corner;
    Mat dm = Mat::Zero(d, d), gm = Mat::Zero(d, d), pm = Mat::Zero(d, d);
    dm.block(np, 0, nm, np) = b;
    dm.block(0, np, np, nm) = b.adjoint();
    gm.block(0, 0, np, np) = Mat::Identity(np, np);
    gm.block(np, np, nm, nm) = -Mat::Identity(nm, nm);
    pm.block(0, 0, np, np) = projp;
    pm.block(np, np, nm, nm) = projm;
    dblocks.push_back(dm);
    gblocks.push_back(gm);
    pblocks.push_back(pm);
    model.index += spec.weight * (kp - km);
    model.kernel_trace += spec.weight * (kp - rho);
    model.cokernel_trace += spec.weight * (km - rho);
  }
  EvenTriple t;
  t.algebra = alg;
  t.D = BlockOperator(alg, dblocks);
  t.gamma = BlockOperator(alg, gblocks);
  t.q = opt.q;
  model.p = BlockOperator(alg, pblocks);
  t.generators.push_back(model.p);
  for (int g = 0; g < opt.extra_generators; ++g) t.generators.push_back(random_even_element(rng, alg, t.gamma));
  if (opt.rescale) model.rescale_factor = auto_rescale(t, t.generators);
  t.validate();
  model.triple = t;
  model.id = "random-even:" + std::to_string(seed);
  return model;
}

RandomEvenOptions random_even_options(std::mt19937_64& rng, int max_dim, int max_blocks) {
  std::uniform_int_distribution<int> nb(1, max_blocks), dim(1, max_dim), wsel(0, 2);
  const double weights[3] = {1.0, std::sqrt(2.0), 0.5};
  RandomEvenOptions opt;
  const int count = nb(rng);
  for (int i = 0; i < count; ++i) {
    EvenBlockSpec b;
    b.n_plus = dim(rng);
    b.n_minus = dim(rng);
    b.weight = weights[wsel(rng)];
    b.p_plus = std::uniform_int_distribution<int>(0, b.n_plus)(rng);
    b.p_minus = std::uniform_int_distribution<int>(0, b.n_minus)(rng);
    const int mx = std::min(b.p_plus, b.p_minus);
    b.corner_rank = std::uniform_int_distribution<int>(std::max(0, mx - 1), mx)(rng);
    opt.blocks.push_back(b);
  }
  return opt;
}

EvenModel build_weighted_even(std::uint64_t seed, int k1, int k2) {
  auto block = [](int k, double w) {
    EvenBlockSpec b;
    b.weight = w;
    b.n_plus = 3 + std::max(k, 0);
    b.n_minus = 3 + std::max(-k, 0);
    b.p_plus = 1 + std::max(k, 0);
    b.p_minus = 1 + std::max(-k, 0);
    b.corner_rank = 1;
    return b;
  };
  RandomEvenOptions opt;
  opt.blocks = {block(k1, 1.0), block(k2, std::sqrt(2.0))};
  EvenModel m = build_random_even(seed, opt);
  m.id = "weighted-even:" + std::to_string(seed);
  return m;
}

CircleModel build_circle_even(int cutoff) {
  if (cutoff < 1) throw PreconditionError("circle cutoff must be >= 1");
  const int k = 2 * cutoff + 1, d = 2 * k;
  TracedAlgebra alg({{d, 1.0}});
  Mat dm = Mat::Zero(d, d), gm = Mat::Zero(d, d), u = Mat::Zero(d, d);
  for (int j = 0; j < k; ++j) {
    const double n = j - cutoff;
    dm(j, k + j) = n;
    dm(k + j, j) = n;
    gm(j, j) = 1.0;
    gm(k + j, k + j) = -1.0;
  }
  // Multiplication by e^{ix}: n -> n+1 with wrap-around, on both spinor parts.
  for (int j = 0; j < k; ++j) {
    const int to = (j + 1) % k;
    u(to, j) = 1.0;
    u(k + to, k + j) = 1.0;
  }
  CircleModel m;
  m.cutoff = cutoff;
  m.triple.algebra = alg;
  m.triple.D = BlockOperator(alg, {dm});
  m.triple.gamma = BlockOperator(alg, {gm});
  m.triple.q = 1.0;
  m.p = BlockOperator::identity(alg);
  m.triple.generators = {m.p, BlockOperator(alg, {u})};
  m.triple.validate();
  return m;
}

HeatTrace circle_heat_trace(const CircleModel& m, const BlockOperator& b, const std::string& b_word) {
  if (b.algebra() != m.triple.algebra) throw PreconditionError("b is not an operator of the circle model");
  const int k = 2 * m.cutoff + 1;
  const Mat& x = b.block(0);
  const cplx c = x(0, 0) + x(k, k);
  const double scale = std::max(1.0, x.cwiseAbs().maxCoeff());
  for (int j = 1; j < k; ++j)
    if (std::abs(x(j, j) + x(k + j, k + j) - c) > 1e-10 * scale)
      throw PreconditionError("b has no translation-invariant momentum diagonal");
  return {"circle:L=" + std::to_string(m.cutoff), b_word, [c](double t) { return c * theta(t); }, {-0.5}};
}

}  // namespace sfindex
