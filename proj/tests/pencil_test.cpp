#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Eigenvalues>

#include "nevp/pencil.hpp"
#include "testutil.hpp"

using namespace nevp;

namespace {

MatrixPencil shifted_diag_pencil() {
  MatrixPencil p;
  p.n = 2;
  p.value = [](Complex lambda) {
    CMatrix d = CMatrix::Zero(2, 2);
    d(0, 0) = lambda - 1.0;
    d(1, 1) = lambda - 2.0;
    return d;
  };
  return p;
}

OdePencil constant_pencil(const CMatrix& a, int k) {
  OdePencil p;
  p.d = static_cast<int>(a.rows());
  p.k = k;
  p.coeff = [a](Complex, double) { return a; };
  p.limit_minus = [a](Complex) { return a; };
  p.limit_plus = [a](Complex) { return a; };
  return p;
}

}  // namespace

TEST_CASE("evaluate: diagonal resolvent") {
  EvaluatedOperator op = evaluate(shifted_diag_pencil(), Complex(0.0, 0.0));
  CVector e1 = CVector::Zero(2);
  e1(0) = 1.0;
  CVector y = op.solve(e1);
  CHECK(std::abs(y(0) - Complex(-1.0, 0.0)) <= 1e-14);
  CHECK(std::abs(y(1)) <= 1e-14);
}

TEST_CASE("evaluate: quadratic pencil at lambda = 0 gives -I action") {
  MatrixPencil p;
  p.n = 3;
  p.value = [](Complex lambda) {
    return (lambda * lambda - 1.0) * CMatrix::Identity(3, 3);
  };
  EvaluatedOperator op = evaluate(p, Complex(0.0, 0.0));
  CVector v = testutil::random_complex_vector(3, 17);
  CHECK((op.solve(v) + v).norm() <= 1e-14 * v.norm());
}

TEST_CASE("evaluate: random quadratic pencil matches dense oracle") {
  CMatrix m = testutil::random_complex(4, 4, 1);
  CMatrix c = testutil::random_complex(4, 4, 2);
  CMatrix k = testutil::random_complex(4, 4, 3);
  MatrixPencil p;
  p.n = 4;
  p.value = [=](Complex lambda) { return lambda * lambda * m + lambda * c + k; };
  const Complex lambda(0.0, 3.0);
  EvaluatedOperator op = evaluate(p, lambda);
  CMatrix f = lambda * lambda * m + lambda * c + k;
  CVector v = testutil::random_complex_vector(4, 4);
  CVector oracle = f.fullPivLu().solve(v);
  CHECK((op.solve(v) - oracle).norm() <= 1e-10 * oracle.norm());
}

TEST_CASE("evaluate: singular F(lambda) raises on-spectrum") {
  EvaluatedOperator op = evaluate(shifted_diag_pencil(), Complex(1.0, 0.0));
  CVector v = CVector::Ones(2);
  CHECK_THROWS_AS(op.solve(v), OnSpectrumError);
}

TEST_CASE("splitting: free Schroedinger matrix at lambda = -1") {
  OdePencil p;
  p.d = 2;
  p.k = 1;
  auto mat = [](Complex lambda) {
    CMatrix a = CMatrix::Zero(2, 2);
    a(0, 1) = 1.0;
    a(1, 0) = -lambda;
    return a;
  };
  p.coeff = [mat](Complex lambda, double) { return mat(lambda); };
  p.limit_minus = mat;
  p.limit_plus = mat;
  Splitting s = asymptotic_splitting(p, Complex(-1.0, 0.0));
  // Stable direction span{(1,-1)}, unstable span{(1,1)} (eigenvalues -1, +1).
  CVector vs(2), vu(2);
  vs << 1.0, -1.0;
  vu << 1.0, 1.0;
  vs.normalize();
  vu.normalize();
  CHECK(std::abs((vs.adjoint() * s.stable_plus)(0, 0)) == doctest::Approx(1.0));
  CHECK(std::abs((vu.adjoint() * s.unstable_plus)(0, 0)) == doctest::Approx(1.0));
  CHECK(std::abs(s.stable_plus.col(0).norm() - 1.0) <= 1e-12);
}

TEST_CASE("splitting: already-diagonal matrix") {
  CMatrix a = CMatrix::Zero(2, 2);
  a(0, 0) = -1.0;
  a(1, 1) = 2.0;
  Splitting s = asymptotic_splitting(constant_pencil(a, 1), Complex(0.5, 0.0));
  CHECK(std::abs(std::abs(s.stable_plus(0, 0)) - 1.0) <= 1e-12);
  CHECK(std::abs(s.stable_plus(1, 0)) <= 1e-12);
  CHECK(std::abs(std::abs(s.unstable_plus(1, 0)) - 1.0) <= 1e-12);
}

TEST_CASE("splitting: FHN-style constant-coefficient matrix at lambda = 1") {
  // First-order form of the pulse linearization with zero wave profile term,
  // c = -0.514, phi = 0.08, b = 0.8.
  const double c = -0.514, phi = 0.08, b = 0.8;
  const Complex lambda(1.0, 0.0);
  CMatrix a = CMatrix::Zero(3, 3);
  a(0, 1) = 1.0;
  a(1, 0) = lambda - 1.0;  // zero profile term
  a(1, 1) = -c;
  a(1, 2) = 1.0;
  a(2, 0) = -phi / c;
  a(2, 2) = (lambda + phi * b) / c;
  // Oracle: count of characteristic roots with negative real part.
  Eigen::ComplexEigenSolver<CMatrix> es(a);
  int stable = 0;
  for (int i = 0; i < 3; ++i)
    if (es.eigenvalues()(i).real() < 0.0) ++stable;
  REQUIRE(stable == 2);

  Splitting s = asymptotic_splitting(constant_pencil(a, 2), lambda);
  CHECK(s.stable_plus.cols() == 2);
  CHECK(s.unstable_plus.cols() == 1);
  // Restriction-matrix check: spectrum of (V^s)^+ A V^s in the left half-plane.
  CMatrix restr = (s.stable_plus.adjoint() * s.stable_plus)
                      .ldlt()
                      .solve(s.stable_plus.adjoint() * a * s.stable_plus);
  Eigen::ComplexEigenSolver<CMatrix> er(restr);
  for (int i = 0; i < 2; ++i) CHECK(er.eigenvalues()(i).real() < -1e-8);
  CHECK(s.cond_plus < 1e8);
}

TEST_CASE("splitting: invariant-subspace route handles repeated eigenvalues") {
  // Defective stable block plus one unstable direction.
  CMatrix a = CMatrix::Zero(3, 3);
  a(0, 0) = -1.0;
  a(0, 1) = 1.0;
  a(1, 1) = -1.0;
  a(2, 2) = 2.0;
  Splitting s = asymptotic_splitting(constant_pencil(a, 2), Complex(0.0, 0.0));
  CHECK(s.stable_plus.cols() == 2);
  // A V^s stays in the span of V^s.
  CMatrix proj = s.stable_plus * (s.stable_plus.adjoint() * s.stable_plus).inverse() *
                 s.stable_plus.adjoint();
  CHECK(((CMatrix::Identity(3, 3) - proj) * a * s.stable_plus).norm() <= 1e-10);
}

TEST_CASE("splitting: imaginary-axis eigenvalue raises essential-spectrum error") {
  CMatrix a = CMatrix::Zero(2, 2);
  a(0, 1) = 1.0;
  a(1, 0) = -1.0;  // eigenvalues +-i
  CHECK_THROWS_AS(asymptotic_splitting(constant_pencil(a, 1), Complex(0.0, 0.0)),
                  EssentialSpectrumError);
}

TEST_CASE("splitting: wrong stable count raises essential-spectrum error") {
  CMatrix a = CMatrix::Zero(2, 2);
  a(0, 0) = -1.0;
  a(1, 1) = -2.0;
  CHECK_THROWS_AS(asymptotic_splitting(constant_pencil(a, 1), Complex(0.0, 0.0)),
                  EssentialSpectrumError);
}
