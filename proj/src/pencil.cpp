#include "nevp/pencil.hpp"

#include <limits>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace nevp {

struct EvaluatedOperator::Impl {
  Eigen::FullPivLU<CMatrix> lu;
  bool invertible = false;
};

EvaluatedOperator::EvaluatedOperator(const MatrixPencil& pencil, Complex lambda)
    : lambda_(lambda) {
  if (!pencil.value) throw InputError("evaluate: pencil has no evaluator");
  CMatrix f = pencil.value(lambda);
  if (f.rows() != pencil.n || f.cols() != pencil.n)
    throw InputError("evaluate: evaluator returned wrong dimensions");
  auto impl = std::make_shared<Impl>();
  impl->lu.compute(f);
  impl->lu.setThreshold(1e-13);
  impl->invertible = impl->lu.isInvertible();
  impl_ = std::move(impl);
}

CVector EvaluatedOperator::solve(const CVector& v) const {
  if (!impl_->invertible) {
    std::ostringstream os;
    os << "evaluate: F(lambda) singular at lambda = " << lambda_;
    throw OnSpectrumError(os.str());
  }
  return impl_->lu.solve(v);
}

namespace {

// Swap the diagonal entries T(i,i) and T(i+1,i+1) of an upper-triangular
// complex Schur factor by a unitary similarity, updating U accordingly so
// that A = U T U^* is preserved.
void swap_adjacent(CMatrix& t, CMatrix& u, Eigen::Index i) {
  const Complex a = t(i, i);
  const Complex b = t(i, i + 1);
  const Complex c = t(i + 1, i + 1);
  // Eigenvector of [[a, b], [0, c]] for eigenvalue c is (b, c - a).  Eigen's
  // makeGivens(p, q) builds G with G^* (p, q)^T = (r, 0)^T, so the similarity
  // T -> G^* T G rotates that eigenvector onto e_1 and swaps the diagonal.
  Eigen::JacobiRotation<Complex> rot;
  rot.makeGivens(b, c - a);
  t.applyOnTheLeft(i, i + 1, rot.adjoint());
  t.applyOnTheRight(i, i + 1, rot);
  u.applyOnTheRight(i, i + 1, rot);
  // Clean the subdiagonal entry that is zero in exact arithmetic.
  t(i + 1, i) = Complex(0.0, 0.0);
  t(i, i) = c;
  t(i + 1, i + 1) = a;
}

}  // namespace

std::pair<CMatrix, CMatrix> stable_unstable_subspaces(const CMatrix& a, double tol_hyp) {
  const Eigen::Index d = a.rows();
  Eigen::ComplexSchur<CMatrix> schur(a, /*computeU=*/true);
  if (schur.info() != Eigen::Success)
    throw NumericalError("asymptotic splitting: Schur decomposition failed");
  CMatrix t = schur.matrixT();
  CMatrix u = schur.matrixU();
  for (Eigen::Index i = 0; i < d; ++i) {
    if (std::abs(t(i, i).real()) < tol_hyp) {
      std::ostringstream os;
      os << "essential spectrum proximity: asymptotic matrix eigenvalue "
         << t(i, i) << " within " << tol_hyp << " of the imaginary axis";
      throw EssentialSpectrumError(os.str());
    }
  }
  // Bubble the stable (Re < 0) eigenvalues to the top of T.
  bool moved = true;
  while (moved) {
    moved = false;
    for (Eigen::Index i = 0; i + 1 < d; ++i) {
      if (t(i, i).real() > 0.0 && t(i + 1, i + 1).real() < 0.0) {
        swap_adjacent(t, u, i);
        moved = true;
      }
    }
  }
  Eigen::Index ns = 0;
  while (ns < d && t(ns, ns).real() < 0.0) ++ns;
  CMatrix vs = u.leftCols(ns);
  CMatrix vu = u.rightCols(d - ns);
  return {vs, vu};
}

namespace {

Splitting splitting_half(const OdePencil& pencil, const CMatrix& am, const CMatrix& ap,
                         Complex lambda, double tol_hyp) {
  auto [vsm, vum] = stable_unstable_subspaces(am, tol_hyp);
  auto [vsp, vup] = stable_unstable_subspaces(ap, tol_hyp);
  auto check = [&](const CMatrix& vs, const char* side) {
    if (vs.cols() != pencil.k) {
      std::ostringstream os;
      os << "asymptotic splitting at lambda = " << lambda << ": A" << side
         << " has " << vs.cols() << " stable eigenvalues, expected k = " << pencil.k;
      throw EssentialSpectrumError(os.str());
    }
  };
  check(vsm, "-");
  check(vsp, "+");
  Splitting s;
  s.stable_minus = vsm;
  s.unstable_minus = vum;
  s.stable_plus = vsp;
  s.unstable_plus = vup;
  auto cond = [](const CMatrix& vs, const CMatrix& vu) {
    CMatrix w(vs.rows(), vs.cols() + vu.cols());
    w << vs, vu;
    Eigen::JacobiSVD<CMatrix> dec(w);
    const auto& sv = dec.singularValues();
    return sv(sv.size() - 1) > 0.0 ? sv(0) / sv(sv.size() - 1)
                                   : std::numeric_limits<double>::infinity();
  };
  s.cond_minus = cond(vsm, vum);
  s.cond_plus = cond(vsp, vup);
  return s;
}

}  // namespace

Splitting asymptotic_splitting(const OdePencil& pencil, Complex lambda, double tol_hyp) {
  if (!pencil.limit_minus || !pencil.limit_plus)
    throw InputError("asymptotic splitting: pencil lacks asymptotic evaluators");
  return splitting_half(pencil, pencil.limit_minus(lambda), pencil.limit_plus(lambda),
                        lambda, tol_hyp);
}

}  // namespace nevp
