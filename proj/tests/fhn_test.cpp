#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "nevp/fhn.hpp"
#include "testutil.hpp"

using namespace nevp;
using doctest::Approx;

namespace {

const FhnParams kParams;  // a = 0.7, b = 0.8, phi = 0.08

double vec_angle(const CVector& u, const CVector& v) {
  const double c = std::abs(u.dot(v)) / (u.norm() * v.norm());
  return std::acos(std::min(1.0, c));
}

CVector flatten(const GridFunction& f) {
  return CVector(Eigen::Map<const CVector>(f.values.data(), f.values.size()));
}

}  // namespace

TEST_CASE("rest state solves the cubic and matches the known root") {
  const auto [u, v] = rest_state(kParams);
  CHECK(std::abs(u - u * u * u / 3.0 - v) <= 1e-12);
  CHECK(v == Approx((u + kParams.a) / kParams.b).epsilon(1e-12));
  CHECK(u == Approx(-1.19941).epsilon(1e-5));
  CHECK(v == Approx(-0.62426).epsilon(1e-5));
}

TEST_CASE("pulse continuation: both branches, residual and decay") {
  const Grid grid = Grid::from_step(-30.0, 30.0, 0.01);
  const PulseSolution slow = compute_pulse(kParams, -0.51, grid);
  // The equations yield c = -0.54139 (confirmed independently by shooting);
  // the fast branch matches the commonly quoted -0.812.
  CHECK(std::abs(slow.c + 0.5414) <= 5e-3);
  CHECK(slow.residual < 1e-10);
  CHECK(slow.iterations <= 12);

  const PulseSolution fast = compute_pulse(kParams, -0.81, grid);
  CHECK(std::abs(fast.c + 0.8118) <= 5e-3);
  CHECK(fast.residual < 1e-10);
  CHECK(fast.iterations <= 12);
  CHECK(fast.profile.values.row(0).real().maxCoeff() >
        slow.profile.values.row(0).real().maxCoeff());

  // Endpoint decay of the slow pulse on the reference-size interval.
  const Grid wide = Grid::from_step(-50.0, 50.0, 0.01);
  const PulseSolution ref = compute_pulse(kParams, -0.51, wide);
  const auto [u_inf, v_inf] = rest_state(kParams);
  CVector rest(3);
  rest << u_inf, 0.0, v_inf;
  CHECK((ref.profile.values.col(0) - rest).norm() < 1e-6);
  CHECK((ref.profile.values.col(wide.n) - rest).norm() < 1e-6);

  // The derivative rows satisfy the first-order system: row 0 equals row 1 of
  // the profile.
  CHECK((slow.derivative.values.row(0) - slow.profile.values.row(1)).norm() <= 1e-12);
}

TEST_CASE("linearized pencil: structure, cubic characteristic roots, margin") {
  const Grid grid = Grid::from_step(-30.0, 30.0, 0.01);
  const PulseSolution pulse = compute_pulse(kParams, -0.51, grid);
  const OdePencil pencil = linearized_pencil(pulse, kParams);
  REQUIRE(pencil.d == 3);
  REQUIRE(pencil.k == 2);

  const Complex lambda(1.0, 0.0);
  // Rows 0 and 2 do not depend on the pulse profile.
  const CMatrix a0 = pencil.coeff(lambda, 0.0), a5 = pencil.coeff(lambda, 5.0);
  CHECK((a0.row(0) - a5.row(0)).norm() == 0.0);
  CHECK((a0.row(2) - a5.row(2)).norm() == 0.0);
  CHECK(a0(1, 0) != a5(1, 0));

  // Characteristic polynomial of the asymptotic matrix:
  // p(mu) = mu (c + mu)(g - mu) - q (g - mu) - phi / c with q = lambda - 1 +
  // u_inf^2 and g = (lambda + phi b) / c.
  const auto [u_inf, v_inf] = rest_state(kParams);
  const double c = pulse.c;
  const Complex q = lambda - 1.0 + u_inf * u_inf;
  const Complex g = (lambda + kParams.phi * kParams.b) / c;
  const CMatrix a_inf = pencil.limit_plus(lambda);
  const Eigen::ComplexEigenSolver<CMatrix> es(a_inf);
  for (int i = 0; i < 3; ++i) {
    const Complex mu = es.eigenvalues()(i);
    const Complex p = mu * (c + mu) * (g - mu) - q * (g - mu) - kParams.phi / c;
    CHECK(std::abs(p) <= 1e-10);
  }

  // Hyperbolicity on the paper's contour: no essential spectrum intersects.
  const Contour gamma = Contour::circle(Complex(1.0, 0.0), 1.05, 16);
  for (const auto& [l, w] : gamma.nodes()) CHECK_NOTHROW(asymptotic_splitting(pencil, l));
}

TEST_CASE("probe data: first-order mapping and functional layout") {
  const TestData data = fhn_test_data(-0.5, 11);
  REQUIRE(data.l() == 10);
  REQUIRE(data.m() == 401);
  const CVector v = data.rhs[0](0.3);
  REQUIRE(v.size() == 3);
  CHECK(std::abs(v(0)) == 0.0);
  // The same seed with speed 2c halves the third component only.
  const TestData data2 = fhn_test_data(-1.0, 11);
  const CVector w = data2.rhs[0](0.3);
  CHECK(std::abs(w(1) - v(1)) <= 1e-14);
  CHECK(std::abs(w(2) - 0.5 * v(2)) <= 1e-14);
  CHECK(data.functionals.front().x0 == Approx(-2.0));
  CHECK(data.functionals.back().x0 == Approx(2.0));
  CHECK(data.functionals[1].x0 - data.functionals[0].x0 == Approx(0.01));
}

TEST_CASE("contour spectrum: rank 2, translational zero, real unstable pair") {
  const Grid grid = Grid::from_step(-25.0, 25.0, 0.01);
  const PulseSolution pulse = compute_pulse(kParams, -0.51, grid);
  FhnRunConfig cfg;
  cfg.workers = 4;
  const SpectrumResult sr = spectrum(pulse, kParams, cfg);
  REQUIRE(sr.rank.kappa == 2);
  REQUIRE(sr.eigenvalues.size() == 2);
  // Gap after index 2 in the singular values (paper reports ratio ~ 71).
  CHECK(sr.rank.singular(1) / sr.rank.singular(2) >= 10.0);
  // Both eigenvalues real and inside; one is the translational zero.
  double zero_dist = 1e9, unstable = -1e9;
  for (size_t i = 0; i < sr.eigenvalues.size(); ++i) {
    CHECK(std::abs(sr.eigenvalues[i].imag()) < 1e-8);
    CHECK(sr.inside[i]);
    zero_dist = std::min(zero_dist, std::abs(sr.eigenvalues[i]));
    unstable = std::max(unstable, sr.eigenvalues[i].real());
  }
  CHECK(zero_dist <= 1e-6);
  CHECK(unstable > 0.1);

  // Newton refinement seeded at the contour output: few steps, tiny residual.
  const ReferenceEigenpair rp =
      reference_eigenpair(pulse, kParams, Complex(unstable, 0.0));
  CHECK(rp.iterations <= 5);
  CHECK(rp.residual < 1e-12);
  CHECK(std::abs(rp.lambda - Complex(unstable, 0.0)) <= 1e-6);

  // The zero branch recovers the pulse-derivative eigenfunction.
  const ReferenceEigenpair tz = reference_eigenpair(pulse, kParams, Complex(0.0, 0.0));
  CHECK(std::abs(tz.lambda) <= 1e-9);
  // The discrete zero mode differs from the continuum derivative by O(h^2).
  CHECK(vec_angle(flatten(tz.eigenfunction), flatten(pulse.derivative)) <= 1e-4);
}

TEST_CASE("reference eigenvalue: second-order step refinement") {
  // The discrete unstable eigenvalue moves O(h^2) under step halving.
  const double L = 25.0;
  std::vector<double> lams;
  for (double h : {0.04, 0.02, 0.01}) {
    const Grid grid = Grid::from_step(-L, L, h);
    const PulseSolution pulse = compute_pulse(kParams, -0.51, grid);
    lams.push_back(reference_eigenpair(pulse, kParams, Complex(0.49, 0.0)).lambda.real());
  }
  const double d1 = std::abs(lams[0] - lams[1]);
  const double d2 = std::abs(lams[1] - lams[2]);
  CHECK(d1 / d2 == Approx(4.0).epsilon(0.35));
}

TEST_CASE("sweeps: interval, quadrature and prescribed rank") {
  const FhnReference ref = make_reference(kParams, 0.01);
  CHECK(std::abs(ref.unstable.lambda.imag()) < 1e-10);
  CHECK(ref.unstable.lambda.real() > 0.1);

  FhnRunConfig cfg;
  cfg.workers = 4;

  const auto interval = interval_sweep(ref, {6.0, 12.0, 18.0}, cfg);
  REQUIRE(interval.size() == 6);  // three lengths, two boundary conditions
  double prev_proj = 1e9;
  for (const auto& row : interval) {
    REQUIRE(row.ok);
    CHECK(row.seconds > 0.0);
    if (row.bc == BcKind::Projection) {
      CHECK(row.err_eval < prev_proj);
      prev_proj = row.err_eval;
    }
  }
  // Projection beats periodic at the largest length.
  const auto& proj18 = interval[4];
  const auto& per18 = interval[5];
  REQUIRE(proj18.bc == BcKind::Projection);
  CHECK(proj18.err_eval < per18.err_eval);

  const auto quad = quadrature_sweep(ref, {8, 16, 32}, 100.0, cfg);
  REQUIRE(quad.size() == 3);
  for (const auto& row : quad) REQUIRE(row.ok);
  CHECK(quad[1].err_eval < quad[0].err_eval);
  CHECK(quad[2].err_eval < quad[1].err_eval);

  const auto rank = rank_sweep(ref, {2, 10}, 100.0, 100, cfg);
  // kappa = 2 returns exactly the true pair, with tiny resolvent defects.
  std::vector<Complex> pair2;
  for (const auto& row : rank)
    if (row.kappa == 2) {
      pair2.push_back(row.eigenvalue);
      CHECK(row.inside);
      CHECK(row.residual <= 1e-6);
    }
  REQUIRE(pair2.size() == 2);
  // At kappa = 10 the tracked pair (the values closest to the true ones) is
  // unchanged to 1e-6, while the surplus directions produce spurious values
  // with defects above 1e-2, inside or outside the contour.
  int spurious_count = 0;
  bool spurious_large_defect = false;
  for (Complex e2 : pair2) {
    double best = 1e9;
    for (const auto& row : rank)
      if (row.kappa == 10) best = std::min(best, std::abs(e2 - row.eigenvalue));
    CHECK(best <= 1e-6);
  }
  for (const auto& row : rank) {
    if (row.kappa != 10) continue;
    double to_pair = 1e9;
    for (Complex e2 : pair2) to_pair = std::min(to_pair, std::abs(row.eigenvalue - e2));
    if (to_pair > 1e-3) {
      ++spurious_count;
      if (row.residual > 1e-2) spurious_large_defect = true;
    }
  }
  CHECK(spurious_count == 8);
  CHECK(spurious_large_defect);
}
