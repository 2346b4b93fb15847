#include "nevp/numkernel.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace nevp {

SvdFactors svd(const CMatrix& m) {
  if (!m.allFinite()) throw InputError("svd: input has non-finite entries");
  Eigen::JacobiSVD<CMatrix> dec(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  SvdFactors f;
  f.left = dec.matrixU();
  f.right = dec.matrixV();
  f.singular = dec.singularValues();
  f.all_singular = f.singular;
  return f;
}

EigResult eig(const CMatrix& d) {
  if (!d.allFinite()) throw InputError("eig: input has non-finite entries");
  Eigen::ComplexEigenSolver<CMatrix> dec(d, /*computeEigenvectors=*/true);
  if (dec.info() != Eigen::Success)
    throw NumericalError("eig: QR iteration failed to converge");
  return {dec.eigenvalues(), dec.eigenvectors()};
}

namespace {

// Laplace expansion along the first column; fine for the small d used here.
Complex laplace_det(const CMatrix& a) {
  const auto d = a.rows();
  if (d == 1) return a(0, 0);
  if (d == 2) return a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0);
  Complex det(0.0, 0.0);
  CMatrix minor(d - 1, d - 1);
  for (Eigen::Index i = 0; i < d; ++i) {
    if (a(i, 0) == Complex(0.0, 0.0)) continue;
    Eigen::Index r = 0;
    for (Eigen::Index ii = 0; ii < d; ++ii) {
      if (ii == i) continue;
      for (Eigen::Index jj = 1; jj < d; ++jj) minor(r, jj - 1) = a(ii, jj);
      ++r;
    }
    const double sign = (i % 2 == 0) ? 1.0 : -1.0;
    det += sign * a(i, 0) * laplace_det(minor);
  }
  return det;
}

}  // namespace

Complex cofactor_determinant(const CMatrix& a) {
  if (a.rows() != a.cols() || a.rows() < 1)
    throw InputError("cofactor_determinant: square matrix with d >= 1 required");
  return laplace_det(a);
}

CMatrix adjugate(const CMatrix& a) {
  const auto d = a.rows();
  if (d != a.cols() || d < 1) throw InputError("adjugate: square matrix with d >= 1 required");
  if (d == 1) return CMatrix::Identity(1, 1);
  CMatrix adj(d, d);
  CMatrix minor(d - 1, d - 1);
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) {
      Eigen::Index r = 0;
      for (Eigen::Index ii = 0; ii < d; ++ii) {
        if (ii == i) continue;
        Eigen::Index c = 0;
        for (Eigen::Index jj = 0; jj < d; ++jj) {
          if (jj == j) continue;
          minor(r, c++) = a(ii, jj);
        }
        ++r;
      }
      const double sign = ((i + j) % 2 == 0) ? 1.0 : -1.0;
      // adj(A) = cof(A)^T, hence the (j, i) placement.
      adj(j, i) = sign * laplace_det(minor);
    }
  }
  return adj;
}

BlockSystemSolver::BlockSystemSolver(int size,
                                     const std::vector<Eigen::Triplet<Complex>>& entries)
    : mat_(size, size) {
  mat_.setFromTriplets(entries.begin(), entries.end());
  mat_.makeCompressed();
  lu_ = std::make_unique<Eigen::SparseLU<Eigen::SparseMatrix<Complex>>>();
  lu_->compute(mat_);
  ok_ = (lu_->info() == Eigen::Success);
}

CVector BlockSystemSolver::solve(const CVector& rhs) const {
  if (!ok_)
    throw OnSpectrumError(
        "block solver: singular factorization (lambda appears to lie on the "
        "discrete spectrum); move or shrink the contour");
  return lu_->solve(rhs);
}

}  // namespace nevp
