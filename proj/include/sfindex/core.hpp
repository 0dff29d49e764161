#pragma once

// Finite-dimensional model of a semifinite von Neumann algebra: a direct sum
// of full matrix blocks M_{d_i}(C), each carrying a positive trace weight.
// The trace is tau(x) = sum_i w_i Tr(x_i).

#include <Eigen/Dense>

#include <complex>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace sfindex {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using RVec = Eigen::VectorXd;
using CVec = Eigen::VectorXcd;

class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class NotSelfAdjoint : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class SingularOperator : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

struct Block {
  int dim = 0;
  double weight = 1.0;
};

class TracedAlgebra {
 public:
  TracedAlgebra() = default;
  explicit TracedAlgebra(std::vector<Block> blocks);

  std::size_t num_blocks() const { return blocks_.size(); }
  const Block& block(std::size_t i) const { return blocks_[i]; }
  const std::vector<Block>& blocks() const { return blocks_; }
  int total_dim() const;

  // M_2(C) tensor this algebra, trace Tr_2 (x) tau.
  TracedAlgebra doubled() const;

  bool operator==(const TracedAlgebra& other) const;
  bool operator!=(const TracedAlgebra& other) const { return !(*this == other); }

 private:
  std::vector<Block> blocks_;
};

class BlockOperator {
 public:
  BlockOperator() = default;
  BlockOperator(TracedAlgebra alg, std::vector<Mat> blocks);

  static BlockOperator zero(const TracedAlgebra& alg);
  static BlockOperator identity(const TracedAlgebra& alg);

  const TracedAlgebra& algebra() const { return alg_; }
  std::size_t num_blocks() const { return blocks_.size(); }
  const Mat& block(std::size_t i) const { return blocks_[i]; }
  Mat& block(std::size_t i) { return blocks_[i]; }

  BlockOperator adjoint() const;
  cplx trace() const;
  // Operator norm: the largest singular value over all blocks.
  double norm() const;
  // Frobenius norm summed over blocks, unweighted.
  double frobenius() const;
  bool is_self_adjoint(double rel_tol = 1e-12) const;

  BlockOperator& operator+=(const BlockOperator& o);
  BlockOperator& operator-=(const BlockOperator& o);
  BlockOperator& operator*=(cplx s);

 private:
  TracedAlgebra alg_;
  std::vector<Mat> blocks_;
};

BlockOperator operator+(BlockOperator a, const BlockOperator& b);
BlockOperator operator-(BlockOperator a, const BlockOperator& b);
BlockOperator operator-(BlockOperator a);
BlockOperator operator*(const BlockOperator& a, const BlockOperator& b);
BlockOperator operator*(cplx s, BlockOperator a);
BlockOperator operator*(BlockOperator a, cplx s);

// Adds s times the identity.
BlockOperator shift(BlockOperator a, cplx s);
BlockOperator commutator(const BlockOperator& a, const BlockOperator& b);
// (A + A*)/2, for operators that are self-adjoint up to rounding.
BlockOperator hermitian_part(const BlockOperator& a);
BlockOperator anticommutator(const BlockOperator& a, const BlockOperator& b);

struct EigenDecomp {
  TracedAlgebra alg;
  std::vector<RVec> values;
  std::vector<Mat> vectors;

  double min_value() const;
  double max_abs_value() const;
};

// Throws NotSelfAdjoint when ||A - A*||_F > 1e-12 ||A||_F; otherwise
// symmetrizes before solving.
EigenDecomp herm_eig(const BlockOperator& a);

BlockOperator func_calc(const EigenDecomp& e, const std::function<cplx(double)>& f);
BlockOperator func_calc(const BlockOperator& a, const std::function<cplx(double)>& f);

// X^{-z} for positive X, principal branch. Throws SingularOperator when X has
// an eigenvalue <= 0 (relative threshold 1e-14).
BlockOperator complex_power(const BlockOperator& x, cplx minus_z);
BlockOperator complex_power(const EigenDecomp& e, cplx minus_z);

// (lambda - X)^{-1} for self-adjoint X; throws SingularOperator when lambda is
// within 1e-14 (relative) of the spectrum.
BlockOperator resolvent(const EigenDecomp& x, cplx lambda);
BlockOperator resolvent(const BlockOperator& x, cplx lambda);

// Pauli matrices and 2x2 tensoring into the doubled algebra.
Eigen::Matrix2cd pauli(int k);  // k = 0 (identity), 1, 2, 3
BlockOperator kron2(const Eigen::Matrix2cd& s, const BlockOperator& x);

std::string describe(const TracedAlgebra& alg);

}  // namespace sfindex
