// Standalone property checks for the numeric core: adjugate identities,
// quasi-projector identities, moment identities on synthetic pole sums, and
// the SVD / eigendecomposition contracts.  No application modules involved.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "nevp/contour.hpp"
#include "nevp/evans.hpp"
#include "nevp/extract.hpp"
#include "nevp/numkernel.hpp"
#include "testutil.hpp"

using namespace nevp;
using doctest::Approx;

TEST_CASE("adjugate identities on random matrices") {
  for (unsigned seed = 1; seed <= 12; ++seed) {
    const int n = 1 + static_cast<int>(seed % 5);
    const CMatrix a = testutil::random_complex(n, n, seed);
    const CMatrix adj = adjugate(a);
    const Complex det = cofactor_determinant(a);
    // a adj(a) = adj(a) a = det(a) I.
    CHECK((a * adj - det * CMatrix::Identity(n, n)).norm() <= 1e-10 * std::abs(det) * n);
    CHECK((adj * a - det * CMatrix::Identity(n, n)).norm() <= 1e-10 * std::abs(det) * n);
    // det matches the pivoted computation.
    CHECK(std::abs(det - a.determinant()) <= 1e-10 * std::abs(det));
    // adj(adj(a)) = det(a)^{n-2} a for n >= 2.
    if (n >= 2) {
      const Complex scale = std::pow(det, n - 2);
      CHECK((adjugate(adj) - scale * a).norm() <= 1e-8 * std::abs(scale) * a.norm() + 1e-12);
    }
  }
}

TEST_CASE("adjugate of a rank-deficient matrix annihilates the range") {
  const CMatrix b = testutil::random_complex(4, 3, 77);
  const CMatrix a = b * testutil::random_complex(3, 4, 78);  // rank 3, singular
  const CMatrix adj = adjugate(a);
  CHECK(std::abs(cofactor_determinant(a)) <= 1e-10 * std::pow(a.norm(), 4));
  CHECK((adj * a).norm() <= 1e-9 * adj.norm() * a.norm() + 1e-12);
  CHECK((a * adj).norm() <= 1e-9 * adj.norm() * a.norm() + 1e-12);
}

TEST_CASE("quasi-projector identities for synthetic frames") {
  for (unsigned seed = 3; seed <= 8; ++seed) {
    const int d = 4, k = 2;
    SubspaceFrame f = SubspaceFrame::from_data(Complex(0.3, -0.1),
                                               testutil::random_complex(d, k, seed),
                                               testutil::random_complex(d, d - k, seed + 50));
    const Complex e = evans(f);
    const auto [yu, yv] = quasi_projectors(f);
    const CMatrix id = CMatrix::Identity(d, d);
    // Partition and quasi-idempotence.
    CHECK((yu + yv - e * id).norm() <= 1e-10 * std::abs(e) * d);
    CHECK((yu * yu - e * yu).norm() <= 1e-8 * std::abs(e) * (yu.norm() + 1.0));
    CHECK((yv * yv - e * yv).norm() <= 1e-8 * std::abs(e) * (yv.norm() + 1.0));
    CHECK((yu * yv).norm() <= 1e-8 * std::abs(e) * (yu.norm() + yv.norm() + 1.0));
    // Ranges: Y_U maps into span P, and annihilates span Q.
    const Eigen::ColPivHouseholderQR<CMatrix> qr(f.p);
    CHECK((yu * f.p.col(0) - f.p * qr.solve(yu * f.p.col(0))).norm() <=
          1e-8 * (yu.norm() + 1.0));
    CHECK((yu * f.q).norm() <= 1e-8 * std::abs(e) * (yu.norm() + 1.0));
  }
}

TEST_CASE("moment identities for a synthetic pole sum") {
  // E(lambda) = sum_n R_n / (lambda - lambda_n) + analytic part: the contour
  // moments reproduce sum over interior poles of lambda_n^nu R_n.
  const int m = 5, l = 4;
  const std::vector<Complex> poles = {Complex(0.2, 0.1), Complex(-0.4, 0.0),
                                      Complex(2.5, 0.0)};  // third is exterior
  std::vector<CMatrix> res;
  for (unsigned n = 0; n < poles.size(); ++n)
    res.push_back(testutil::random_complex(m, 1, 10 + n) *
                  testutil::random_complex(1, l, 20 + n));

  const Contour gamma = Contour::circle(Complex(0.0, 0.0), 1.0, 96);
  SampleSet samples;
  for (const auto& [lambda, weight] : gamma.nodes()) {
    CMatrix e = CMatrix::Zero(m, l);
    for (size_t n = 0; n < poles.size(); ++n) e += res[n] / (lambda - poles[n]);
    e += lambda * lambda * testutil::random_complex(m, l, 99) / 10.0;  // analytic
    samples.lambdas.push_back(lambda);
    samples.weights.push_back(weight);
    samples.values.push_back(e);
    samples.residuals.push_back(0.0);
  }
  const MomentSet ms = moments(samples, 2);
  REQUIRE(ms.order_count() == 4);
  for (int nu = 0; nu < 4; ++nu) {
    CMatrix expect = CMatrix::Zero(m, l);
    for (int n = 0; n < 2; ++n) expect += std::pow(poles[n], nu) * res[n];
    CHECK((ms.d[nu] - expect).norm() <= 1e-10 * (expect.norm() + 1.0));
  }
  // Rank of D_0 equals the number of interior poles.
  const RankDecision rd = rank_test(svd(ms.d[0]).all_singular, 1e-8);
  CHECK(rd.kappa == 2);
  // Extraction returns exactly the interior poles.
  const SpectrumResult sr = eigs_simple(ms.d[0], ms.d[1], 1e-8);
  REQUIRE(sr.eigenvalues.size() == 2);
  for (Complex p : {poles[0], poles[1]}) {
    double best = 1e9;
    for (Complex ev : sr.eigenvalues) best = std::min(best, std::abs(ev - p));
    CHECK(best <= 1e-9);
  }
}

TEST_CASE("svd contract") {
  for (unsigned seed = 30; seed < 36; ++seed) {
    const int rows = 3 + static_cast<int>(seed % 4), cols = 3;
    const CMatrix a = testutil::random_complex(rows, cols, seed);
    const SvdFactors f = svd(a);
    CHECK((f.reconstruct() - a).norm() <= 1e-10 * a.norm());
    CHECK((f.left.adjoint() * f.left - CMatrix::Identity(f.left.cols(), f.left.cols()))
              .norm() <= 1e-10);
    CHECK((f.right.adjoint() * f.right - CMatrix::Identity(f.right.cols(), f.right.cols()))
              .norm() <= 1e-10);
    for (int i = 1; i < f.singular.size(); ++i) CHECK(f.singular(i) <= f.singular(i - 1));
    CHECK(f.singular.minCoeff() >= 0.0);
  }
  CHECK_THROWS_AS(svd(CMatrix::Constant(2, 2, Complex(std::nan(""), 0.0))), InputError);
}

TEST_CASE("eigendecomposition contract") {
  for (unsigned seed = 40; seed < 44; ++seed) {
    const int n = 4;
    const CMatrix a = testutil::random_complex(n, n, seed);
    const EigResult e = eig(a);
    REQUIRE(e.values.size() == n);
    for (int i = 0; i < n; ++i) {
      const CVector v = e.vectors.col(i);
      CHECK((a * v - e.values(i) * v).norm() <= 1e-9 * a.norm() * v.norm());
    }
    // Spectrum invariant under similarity.
    const CMatrix t = testutil::random_complex(n, n, seed + 100);
    const EigResult e2 = eig(t * a * t.inverse());
    for (int i = 0; i < n; ++i) {
      double best = 1e9;
      for (int j = 0; j < n; ++j) best = std::min(best, std::abs(e.values(i) - e2.values(j)));
      CHECK(best <= 1e-6);
    }
  }
}
