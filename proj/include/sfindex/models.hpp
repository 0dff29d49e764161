#pragma once

// Test-model generators: random even matrix triples with a prescribed
// compressed index, a truncated even circle model (q = 1), and a lattice
// torus model (q = 2) carrying an index-one projection.

#include "sfindex/triple.hpp"
#include "sfindex/zeta.hpp"

#include <cstdint>
#include <random>
#include <string>

namespace sfindex {

struct EvenBlockSpec {
  int n_plus = 2;
  int n_minus = 2;
  double weight = 1.0;
  int p_plus = 1;   // rank of p on the +1 eigenspace of gamma
  int p_minus = 1;  // rank of p on the -1 eigenspace
  // Rank of the corner compression p- D p+; -1 means min(p_plus, p_minus).
  int corner_rank = -1;
};

struct RandomEvenOptions {
  std::vector<EvenBlockSpec> blocks;
  double q = 1.0;
  int extra_generators = 2;
  bool rescale = true;
  // Smallest and largest nonzero singular value of the corner compression.
  double sigma_lo = 0.5;
  double sigma_hi = 2.0;
};

struct EvenModel {
  std::string id;
  EvenTriple triple;
  BlockOperator p;
  // Constructed values: Ind(pD+p), its kernel and cokernel traces.
  double index = 0.0;
  double kernel_trace = 0.0;
  double cokernel_trace = 0.0;
  double rescale_factor = 1.0;
};

EvenModel build_random_even(std::uint64_t seed, const RandomEvenOptions& opt);

// Draws block data (dimensions <= max_dim per chirality, weights from
// {1, sqrt 2, 0.5}) and builds the model.
RandomEvenOptions random_even_options(std::mt19937_64& rng, int max_dim, int max_blocks = 2);

// Two blocks with weights 1 and sqrt 2 and corner indices k1, k2, so the
// index is k1 + sqrt(2) k2.
EvenModel build_weighted_even(std::uint64_t seed, int k1, int k2);

// Generic building blocks shared by the generators.
Mat random_gaussian(std::mt19937_64& rng, int rows, int cols);
Mat random_isometry(std::mt19937_64& rng, int rows, int cols);
BlockOperator random_even_element(std::mt19937_64& rng, const TracedAlgebra& alg,
                                  const BlockOperator& gamma);
BlockOperator random_operator(std::mt19937_64& rng, const TracedAlgebra& alg);
// Projection of the given rank in each block.
BlockOperator random_projection(std::mt19937_64& rng, const TracedAlgebra& alg, const std::vector<int>& ranks);
// Operator in pNq of the given blockwise rank, W_p U diag(s) V* W_q* with
// singular values s drawn from [lo, hi].
BlockOperator random_corner_operator(std::mt19937_64& rng, const BlockOperator& p, const BlockOperator& q,
                                     const std::vector<int>& ranks, double lo = 0.5, double hi = 2.0);

// Even circle model: H = l^2({-L..L}) (x) C^2, D = sigma1 (x) diag(n),
// gamma = sigma3 (x) 1, algebra generated by multiplication by e^{ix}
// realized as a cyclic shift. q = 1.
struct CircleModel {
  int cutoff = 8;
  EvenTriple triple;
  BlockOperator p;  // the identity projection
};

CircleModel build_circle_even(int cutoff);

// tau(b exp(-t D^2)) on the untruncated circle for b whose momentum diagonal
// (summed over the spinor) is the same at every n, as for the algebra
// generated by the shift: c theta(t), menu {-1/2}. Throws PreconditionError
// otherwise.
HeatTrace circle_heat_trace(const CircleModel& m, const BlockOperator& b, const std::string& b_word = "b");

}  // namespace sfindex
