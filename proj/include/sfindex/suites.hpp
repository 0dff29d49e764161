#pragma once

// Check groups. Each group draws its instances from the seed, runs one family
// of identities and appends one record per comparison.

#include "sfindex/harness.hpp"

#include <cstdint>
#include <vector>

namespace sfindex::checks {

// Kernel-count index of D+ against tau(gamma f(D))/f(0) for two f, on random
// even triples with blocks of dimension up to 2 max_dim.
void mckean_singer(Recorder& rec, std::uint64_t seed, int instances = 100, int max_dim = 32);

// Ind(ST) = Ind(S) + Ind(T) and the dimension-count index on composable
// corner operators over blocks of weight 1 and sqrt 2.
void additivity(Recorder& rec, std::uint64_t seed, int instances = 200);

// Ind of the bounded transform and of small perturbations, and the
// continuity bound ||bt(T) - bt(T+A)|| <= ||A||.
void transform(Recorder& rec, std::uint64_t seed, int index_instances = 100, int continuity_instances = 50);

// Compressed McKean-Singer at n = 3, a in {0, 1}.
void compressed_ms(Recorder& rec, std::uint64_t seed, int instances = 50);

// a(w) spread over w in {0, 1/4, 1/2, 3/4, 1} and the key identity at n = q + 2.
void doubling(Recorder& rec, std::uint64_t seed, int instances = 20, double quad_abs_tol = 1e-10);

// Move-right and resolvent expansion reconstruction; odd supertrace terms.
void expansions(Recorder& rec, std::uint64_t seed);

// Contour power integral and s-integral against their closed forms.
void integrals(Recorder& rec, std::uint64_t seed, int draws = 20);

// alpha, C(k), sigma_{n,j}, eta, Legendre duplication, C_{n/2}.
void constants(Recorder& rec);

// (B phi_{m+2} + b phi_m) for m in {0, 2} at r in {0.75, 1, 1.5} on matrix
// triples and, when `torus` is set, on the dense Lambda = 2 torus generators.
void cocycle_bB(Recorder& rec, std::uint64_t seed, int matrix_triples = 3, bool torus = true);

// Residue-table ratio against the constructed index on random triples.
void residue_table(Recorder& rec, std::uint64_t seed, int instances = 10, int max_dim = 3);

// Mellin continuation against direct sums and known residues, and the
// zeta-sum residue on matrix triples.
void zeta(Recorder& rec, std::uint64_t seed);

// Residue pairing on the torus at Lambda against the kernel count, Lambda
// stability 16 vs 32, and wrap-around vs hard truncation at Lambda.
void torus_index(Recorder& rec, int lambda = 24, double mass = 1.0, bool stability = true, bool hard = true);

// Circle model: only the m = 0 strand, pairing = tau_{-1}(gamma p) = 0.
void circle(Recorder& rec, int cutoff = 8);

// Residue pairing with exact matrix tau_j against the corner index.
void matrix_residue(Recorder& rec, std::uint64_t seed, int instances = 10);

}  // namespace sfindex::checks
