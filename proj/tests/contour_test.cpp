#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "nevp/contour.hpp"
#include "testutil.hpp"

using namespace nevp;

namespace {

OdePencil shifted_hyperbolic_pencil() {
  // A(lambda, x) = diag(-1, 1) - lambda I: hyperbolic for small |lambda|,
  // and the line pencil -y' + A y has empty spectrum there.
  OdePencil p;
  p.d = 2;
  p.k = 1;
  auto mat = [](Complex lambda) {
    CMatrix a = CMatrix::Zero(2, 2);
    a(0, 0) = -1.0 - lambda;
    a(1, 1) = 1.0 - lambda;
    return a;
  };
  p.coeff = [mat](Complex lambda, double) { return mat(lambda); };
  p.limit_minus = mat;
  p.limit_plus = mat;
  return p;
}

}  // namespace

TEST_CASE("quadrature: Cauchy formula, first moment, analytic integrand") {
  Contour c = Contour::circle(Complex(0.3, -0.2), 1.0, 32);
  const Complex pole(0.5, 0.1);
  Complex cauchy(0.0, 0.0), first(0.0, 0.0), analytic(0.0, 0.0);
  for (const auto& [lambda, w] : c.nodes()) {
    cauchy += w / (lambda - pole);
    first += w * lambda / (lambda - pole);
    analytic += w;
  }
  CHECK(std::abs(cauchy - 1.0) <= 1e-12);
  CHECK(std::abs(first - pole) <= 1e-12);
  CHECK(std::abs(analytic) <= 1e-13);
}

TEST_CASE("parametric contour quadrature agrees with the circle") {
  Contour c = Contour::parametric(
      [](double t) { return Complex(2.0 * std::cos(t), std::sin(t)); },
      [](double t) { return Complex(-2.0 * std::sin(t), std::cos(t)); }, 48);
  Complex cauchy(0.0, 0.0);
  for (const auto& [lambda, w] : c.nodes()) cauchy += w / (lambda - Complex(0.5, 0.0));
  CHECK(std::abs(cauchy - 1.0) <= 1e-10);
  CHECK(c.contains(Complex(0.5, 0.0)));
  CHECK(!c.contains(Complex(3.0, 0.0)));
}

TEST_CASE("random hat right-hand sides are deterministic and supported") {
  TestData a = TestData::random_hats(2, 3, 1234);
  TestData b = TestData::random_hats(2, 3, 1234);
  TestData c = TestData::random_hats(2, 3, 999);
  for (double x : {-4.9, -1.0, 0.3, 2.2, 4.9}) {
    CHECK((a.rhs[0](x) - b.rhs[0](x)).norm() == 0.0);
    CHECK((a.rhs[2](x) - b.rhs[2](x)).norm() == 0.0);
  }
  CHECK((a.rhs[0](0.3) - c.rhs[0](0.3)).norm() > 0.0);
  // Support ends one hat-spacing past the outermost centers at +-5.
  CHECK(a.rhs_support_lo == doctest::Approx(-5.0 - 10.0 / 39.0));
  CHECK(a.rhs[0](-6.0).norm() == 0.0);
  CHECK(a.rhs[0](6.0).norm() == 0.0);
}

TEST_CASE("matrix-pencil sample assembly reproduces the Keldysh sum") {
  MatrixPencil p;
  p.n = 2;
  p.value = [](Complex lambda) {
    CMatrix f = CMatrix::Zero(2, 2);
    f(0, 0) = lambda - 1.0;
    f(1, 1) = lambda - 2.0;
    return f;
  };
  Contour c = Contour::circle(Complex(1.0, 0.0), 0.5, 32);
  SampleSet s = assemble_samples(p, CMatrix::Identity(2, 2), CMatrix::Identity(2, 2), c);
  MomentSet ms = moments(s, 1);
  CMatrix expect = CMatrix::Zero(2, 2);
  expect(0, 0) = 1.0;
  // The pole at 2 outside the contour leaks (r/dist)^M ~ 2e-10 into the moments.
  CHECK((ms.d[0] - expect).norm() <= 1e-9);
  CHECK((ms.d[1] - expect).norm() <= 1e-9);  // D1 = lambda_0 e1 e1^T with lambda_0 = 1
}

TEST_CASE("empty spectrum inside the contour gives a vanishing moment") {
  OdePencil p = shifted_hyperbolic_pencil();
  Grid g = Grid::from_step(-8.0, 8.0, 0.02);
  TestData td = TestData::random_hats(2, 2, 77);
  td.functionals.push_back(Functional::point(0.0, 0));
  td.functionals.push_back(Functional::point(0.5, 1));
  Contour c = Contour::circle(Complex(0.0, 0.0), 0.3, 32);
  SampleSet s = assemble_samples(p, g, BoundaryConditionSpec::projection(), td, c);
  MomentSet ms = moments(s, 1);
  CHECK(ms.d[0].norm() <= 1e-8);
  for (double r : s.residuals) CHECK(r <= 1e-8);
}

TEST_CASE("assembly is linear in the right-hand side") {
  OdePencil p = shifted_hyperbolic_pencil();
  Grid g = Grid::from_step(-8.0, 8.0, 0.02);
  Contour c = Contour::circle(Complex(0.0, 0.0), 0.3, 8);
  TestData base = TestData::random_hats(2, 2, 5);
  base.functionals.push_back(Functional::point(0.24, 0));
  base.functionals.push_back(
      Functional::density_fn(
          [](double x) {
            CVector v(2);
            v(0) = hat(x, 0.0, 1.0);
            v(1) = 0.0;
            return v;
          },
          -1.0, 1.0));

  TestData sum = base;
  sum.rhs = {[&](double x) -> CVector { return base.rhs[0](x) + base.rhs[1](x); }};
  SampleSet s_base = assemble_samples(p, g, BoundaryConditionSpec::projection(), base, c);
  SampleSet s_sum = assemble_samples(p, g, BoundaryConditionSpec::projection(), sum, c);
  for (size_t j = 0; j < s_sum.values.size(); ++j) {
    CVector combined = s_base.values[j].col(0) + s_base.values[j].col(1);
    CHECK((s_sum.values[j].col(0) - combined).norm() <= 1e-9);
  }
}

TEST_CASE("worker parallelism is bit-stable") {
  OdePencil p = shifted_hyperbolic_pencil();
  Grid g = Grid::from_step(-6.0, 6.0, 0.05);
  TestData td = TestData::random_hats(2, 2, 9);
  td.functionals.push_back(Functional::point(0.0, 0));
  Contour c = Contour::circle(Complex(0.0, 0.0), 0.25, 16);
  SampleSet s1 = assemble_samples(p, g, BoundaryConditionSpec::projection(), td, c, 1);
  SampleSet s4 = assemble_samples(p, g, BoundaryConditionSpec::projection(), td, c, 4);
  for (size_t j = 0; j < s1.values.size(); ++j)
    CHECK((s1.values[j] - s4.values[j]).norm() == 0.0);
}

TEST_CASE("moments of a constant sample set vanish; pole data is recovered") {
  Contour c = Contour::circle(Complex(0.0, 0.0), 1.0, 64);
  const CVector v = testutil::random_complex_vector(3, 21);
  const CVector w = testutil::random_complex_vector(2, 22);
  const Complex pole(0.2, -0.1);

  SampleSet constant, single, pair;
  const CVector v2 = testutil::random_complex_vector(3, 23);
  const CVector w2 = testutil::random_complex_vector(2, 24);
  const Complex pole2(-0.4, 0.3);
  for (const auto& [lambda, weight] : c.nodes()) {
    constant.lambdas.push_back(lambda);
    constant.weights.push_back(weight);
    constant.values.push_back(CMatrix::Ones(3, 2));
    constant.residuals.push_back(0.0);
    single.lambdas.push_back(lambda);
    single.weights.push_back(weight);
    single.values.push_back(v * w.transpose() / (lambda - pole));
    single.residuals.push_back(0.0);
    pair.lambdas.push_back(lambda);
    pair.weights.push_back(weight);
    pair.values.push_back(v * w.transpose() / (lambda - pole) +
                          v2 * w2.transpose() / (lambda - pole2));
    pair.residuals.push_back(0.0);
  }
  MomentSet m0 = moments(constant, 2);
  for (const auto& d : m0.d) CHECK(d.norm() <= 1e-12);

  MomentSet m1 = moments(single, 1);
  CHECK((m1.d[0] - v * w.transpose()).norm() <= 1e-10);
  CHECK((m1.d[1] - pole * v * w.transpose()).norm() <= 1e-10);

  MomentSet m2 = moments(pair, 1);
  CMatrix expect = pole * v * w.transpose() + pole2 * v2 * w2.transpose();
  CHECK((m2.d[1] - expect).norm() <= 1e-10);
}

TEST_CASE("quadrature error for a pole drops quickly with node doubling") {
  const CVector v = testutil::random_complex_vector(2, 31);
  const CVector w = testutil::random_complex_vector(2, 32);
  const Complex pole(0.65, 0.0);
  auto d0_err = [&](int m) {
    Contour c = Contour::circle(Complex(0.0, 0.0), 1.0, m);
    SampleSet s;
    for (const auto& [lambda, weight] : c.nodes()) {
      s.lambdas.push_back(lambda);
      s.weights.push_back(weight);
      s.values.push_back(v * w.transpose() / (lambda - pole));
      s.residuals.push_back(0.0);
    }
    return (moments(s, 1).d[0] - v * w.transpose()).norm();
  };
  const double e16 = d0_err(16), e32 = d0_err(32), e64 = d0_err(64);
  CHECK(e16 / e32 >= 10.0);
  CHECK(e32 / e64 >= 10.0);
}

TEST_CASE("alignment: constant frames unchanged, phase rotation removed") {
  CMatrix f = testutil::random_complex(4, 2, 51);
  f.col(0).normalize();
  f.col(1).normalize();
  CHECK((align_bases(f, f) - f).norm() <= 1e-12);

  CMatrix rotated = f;
  rotated.col(0) *= std::polar(1.0, 0.3);
  rotated.col(1) *= std::polar(1.0, -1.2);
  CMatrix aligned = align_bases(f, rotated);
  CHECK((aligned - f).norm() <= 1e-10);
}

TEST_CASE("alignment: permuted frames are restored") {
  CMatrix f = CMatrix::Identity(3, 2);
  CMatrix swapped(3, 2);
  swapped.col(0) = f.col(1) * std::polar(1.0, 0.4);
  swapped.col(1) = f.col(0);
  CMatrix aligned = align_bases(f, swapped);
  CHECK((aligned - f).norm() <= 1e-12);
}

TEST_CASE("alignment: orthogonal frames are rejected") {
  CMatrix a = CMatrix::Identity(4, 2);
  CMatrix b = CMatrix::Zero(4, 2);
  b(2, 0) = 1.0;
  b(3, 1) = 1.0;
  CHECK_THROWS_AS(align_bases(a, b), NumericalError);
}

TEST_CASE("alignment chain closes along a contour of stable directions") {
  // Stable eigendirection of [[0,1],[-lambda,0]] along a circle about -1.
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
  Contour c = Contour::circle(Complex(-1.0, 0.0), 0.5, 64);
  CMatrix first, prev;
  bool have_first = false;
  for (const auto& [lambda, w] : c.nodes()) {
    CMatrix vs = asymptotic_splitting(p, lambda).stable_plus;
    if (!have_first) {
      first = prev = vs;
      have_first = true;
    } else {
      prev = align_bases(prev, vs);
    }
  }
  CMatrix closed = align_bases(prev, first);
  const double mismatch = (closed - prev).norm();
  CHECK(mismatch <= 0.2);  // end-to-start mismatch small and reported
}
