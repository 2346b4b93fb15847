#ifndef NEVP_PENCIL_HPP
#define NEVP_PENCIL_HPP

#include <functional>
#include <memory>

#include "nevp/types.hpp"

namespace nevp {

/// Finite-dimensional holomorphic pencil F(lambda) in C^{n x n}.
struct MatrixPencil {
  int n = 0;
  std::function<CMatrix(Complex)> value;
  std::function<CMatrix(Complex)> derivative;  ///< optional, may be empty
};

/// First-order ODE pencil on the line: F(lambda) y = -y' + A(lambda, x) y,
/// with asymptotic matrices A_pm(lambda) and dichotomy rank k (the number of
/// eigenvalues of A_pm with negative real part).
struct OdePencil {
  int d = 0;
  int k = 0;
  std::function<CMatrix(Complex, double)> coeff;   ///< A(lambda, x)
  std::function<CMatrix(Complex)> limit_minus;     ///< A_-(lambda)
  std::function<CMatrix(Complex)> limit_plus;      ///< A_+(lambda)
};

/// Cached dense factorization of F(lambda) for a MatrixPencil.
class EvaluatedOperator {
 public:
  EvaluatedOperator(const MatrixPencil& pencil, Complex lambda);

  Complex lambda() const { return lambda_; }

  /// Solve F(lambda) y = v.  Throws OnSpectrumError if F(lambda) is singular.
  CVector solve(const CVector& v) const;

 private:
  Complex lambda_;
  struct Impl;
  std::shared_ptr<const Impl> impl_;
};

inline EvaluatedOperator evaluate(const MatrixPencil& pencil, Complex lambda) {
  return EvaluatedOperator(pencil, lambda);
}

/// Unit-column bases of the stable / unstable invariant subspaces of the two
/// asymptotic matrices, computed by (reordered) Schur decomposition.
struct Splitting {
  CMatrix stable_minus;    ///< d x k
  CMatrix unstable_minus;  ///< d x (d-k)
  CMatrix stable_plus;     ///< d x k
  CMatrix unstable_plus;   ///< d x (d-k)
  double cond_minus = 0.0;  ///< condition number of (V_-^s | V_-^u)
  double cond_plus = 0.0;   ///< condition number of (V_+^s | V_+^u)
};

/// Throws EssentialSpectrumError if an eigenvalue of A_pm(lambda) lies within
/// tol_hyp of the imaginary axis, or if the stable counts disagree with k.
Splitting asymptotic_splitting(const OdePencil& pencil, Complex lambda,
                               double tol_hyp = kDefaultHyperbolicityTol);

/// Stable-first ordered Schur helper: returns (V_s, V_u) with unit columns
/// spanning the invariant subspaces for Re < 0 and Re > 0 respectively.
std::pair<CMatrix, CMatrix> stable_unstable_subspaces(const CMatrix& a, double tol_hyp);

}  // namespace nevp

#endif
