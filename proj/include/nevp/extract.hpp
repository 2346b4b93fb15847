#ifndef NEVP_EXTRACT_HPP
#define NEVP_EXTRACT_HPP

#include <optional>
#include <vector>

#include "nevp/contour.hpp"

namespace nevp {

/// Relative-threshold rank decision on a singular value list.
struct RankDecision {
  double theta = 1e-8;
  int kappa = 0;
  RVector singular;
  double gap = 0.0;  ///< sigma_kappa / sigma_{kappa+1} (inf if kappa is full)
};

RankDecision rank_test(const RVector& singular_values, double theta);

/// Jordan cluster: eigenvalue estimate (cluster mean) and algebraic multiplicity.
struct JordanCluster {
  Complex lambda;
  int multiplicity = 1;
};

/// Eigenvalues, coefficient matrix and diagnostics extracted from moments.
struct SpectrumResult {
  std::vector<Complex> eigenvalues;
  CMatrix coeffs;  ///< G_l = V0 S, m x kappa
  RankDecision rank;
  std::vector<GridFunction> eigenfunctions;  ///< filled when BVP-backed
  std::vector<double> residuals;             ///< per eigenvalue (when computed)
  std::vector<bool> inside;                  ///< inside-contour flags
  int kappa0 = -1;                           ///< Hankel variant only
  std::vector<JordanCluster> jordan;         ///< Hankel variant only
  bool ill_conditioned = false;
};

/// Simple-eigenvalue extraction: SVD of D0 truncated by the rank test,
/// projected matrix D = V0^* D1 W0 Sigma0^{-1}, eigenvalues of D.
SpectrumResult eigs_simple(const CMatrix& d0, const CMatrix& d1, double theta);

/// Same recipe with a prescribed rank (the kappa-sweep path).
SpectrumResult eigs_simple_fixed_rank(const CMatrix& d0, const CMatrix& d1, int kappa);

/// Block-Hankel variant over moments D_0..D_{2K-1}; K = 1 reduces exactly to
/// eigs_simple.  Reports kappa0 and clustered multiplicities.
SpectrumResult eigs_hankel(const MomentSet& moments, double theta,
                           double cluster_tol = 0.0);

/// Reconstruct eigenfunctions from the coefficient matrix: synthesize the hat
/// basis cardinal to the point functionals with the G_l entries as
/// coefficients; unit discrete L2 norm, phase fixed by the largest-magnitude
/// entry.
std::vector<GridFunction> reconstruct_eigenfunctions(const CMatrix& g_l,
                                                     const TestData& data,
                                                     const Grid& grid);

/// Flag eigenvalues inside/outside the contour, attach residuals computed by
/// applying the discretized operator to the reconstructed eigenfunctions, and
/// sort everything by distance from the contour center.
void filter_and_diagnose(SpectrumResult& result, const Contour& contour,
                         const OdePencil* pencil = nullptr, const Grid* grid = nullptr,
                         const BoundaryConditionSpec* bc = nullptr);

}  // namespace nevp

#endif
