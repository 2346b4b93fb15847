#ifndef NEVP_NUMKERNEL_HPP
#define NEVP_NUMKERNEL_HPP

#include <memory>
#include <vector>

#include <Eigen/Sparse>

#include "nevp/types.hpp"

namespace nevp {

/// Short-form singular value decomposition M = V Sigma W^* (conjugate adjoint).
struct SvdFactors {
  CMatrix left;           ///< V, m x kappa, orthonormal columns
  RVector singular;       ///< descending nonnegative singular values (kappa)
  CMatrix right;          ///< W, l x kappa, orthonormal columns
  RVector all_singular;   ///< full singular spectrum for diagnostics

  CMatrix reconstruct() const {
    return left * singular.asDiagonal() * right.adjoint();
  }
};

/// Full (thin) SVD of a complex matrix. Throws InputError on non-finite input.
SvdFactors svd(const CMatrix& m);

struct EigResult {
  CVector values;
  CMatrix vectors;  ///< columns are (right) eigenvectors
};

/// Dense complex eigendecomposition. Throws NumericalError if the QR iteration fails.
EigResult eig(const CMatrix& d);

/// Adjugate by cofactor expansion: a * adjugate(a) = det(a) * I, defined for
/// singular input as well.  Laplace expansion keeps the entries polynomial in
/// the input (no pivoting), which is what the holomorphic call sites need.
CMatrix adjugate(const CMatrix& a);

/// Determinant by Laplace expansion (pivot-free companion to adjugate).
Complex cofactor_determinant(const CMatrix& a);

/// Direct solver for the sparse block systems produced by the discretized
/// boundary value problems: block-bidiagonal interior rows plus one boundary
/// row coupling the first and last node.  Factorizes once, solves many
/// right-hand sides.
class BlockSystemSolver {
 public:
  BlockSystemSolver(int size, const std::vector<Eigen::Triplet<Complex>>& entries);

  bool factorized() const { return ok_; }
  int size() const { return static_cast<int>(mat_.rows()); }

  /// Throws OnSpectrumError if the factorization failed (singular system).
  CVector solve(const CVector& rhs) const;

  /// Apply the (unfactorized) system matrix; used for residual checks.
  CVector apply(const CVector& x) const { return mat_ * x; }

 private:
  Eigen::SparseMatrix<Complex> mat_;
  std::unique_ptr<Eigen::SparseLU<Eigen::SparseMatrix<Complex>>> lu_;
  bool ok_ = false;
};

}  // namespace nevp

#endif
