#ifndef NEVP_FHN_HPP
#define NEVP_FHN_HPP

#include <string>
#include <vector>

#include "nevp/bvp.hpp"
#include "nevp/contour.hpp"
#include "nevp/extract.hpp"
#include "nevp/pencil.hpp"

namespace nevp {

/// FitzHugh-Nagumo reaction-diffusion parameters:
///   u_t = u_xx + u - u^3/3 - v,   v_t = phi (u + a - b v).
struct FhnParams {
  double a = 0.7;
  double b = 0.8;
  double phi = 0.08;
};

/// The spatially homogeneous rest state (u_inf, v_inf):
/// u - u^3/3 - (u + a)/b = 0 with v = (u + a)/b; unique real root for the
/// default parameters, approximately (-1.19941, -0.62426).
std::pair<double, double> rest_state(const FhnParams& params);

/// Traveling pulse of the FHN system in the comoving frame, computed on a
/// finite interval.  profile rows are (u, u', v); derivative rows are
/// (u', u'', v'), which is the translational eigenfunction of the
/// linearization.  Values are real (stored in complex grid functions).
struct PulseSolution {
  Grid grid;
  GridFunction profile;     ///< 3 x (n+1): (u, u', v)
  GridFunction derivative;  ///< 3 x (n+1): (u', u'', v')
  double c = 0.0;           ///< converged wave speed
  double residual = 0.0;    ///< final Newton residual, discrete max norm
  int iterations = 0;
};

/// Newton solve of the first-order traveling-wave system in (u, u', v) with
/// the wave speed appended as an unknown.  Boundary conditions project the
/// deviation from the rest state onto the stable (right end) / unstable (left
/// end) subspaces of the rest-state Jacobian; an integral phase condition
/// against the initial guess fixes translation.  Initial guess: rest state
/// plus a sech bump of amplitude 2 in u.  c_init -0.51 converges to the
/// unstable pulse (c ~ -0.514), c_init -0.81 to the stable one (c ~ -0.812).
/// Throws NumericalError on non-convergence (message carries the last
/// residual and iterate count).
PulseSolution compute_pulse(const FhnParams& params, double c_init, const Grid& grid,
                            double tol = 1e-10, int max_iter = 25);

/// Linearization of the traveling-wave system about a pulse as a first-order
/// pencil in z = (z1, z1', z3):
///   A(lambda, x) = [[0, 1, 0],
///                   [lambda - 1 + u(x)^2, -c, 1],
///                   [-phi/c, 0, (lambda + phi b)/c]],
/// with asymptotic matrices at the rest state; d = 3, k = 2.
OdePencil linearized_pencil(const PulseSolution& pulse, const FhnParams& params);

/// Probe data for the linearized pencil: l random right-hand sides drawn over
/// hat functions in the two dynamical components (u, v) on [lo, hi], mapped
/// into the first-order form as (0, f_u, f_v / c), plus point functionals on
/// the first component at x_j = -2 + j * 4 / (m - 1).
TestData fhn_test_data(double c, unsigned seed, int l = 10, int m = 401,
                       int basis_size = 40, double lo = -5.0, double hi = 5.0);

/// Settings of a single spectrum run on the linearized pencil.
struct FhnRunConfig {
  Contour contour = Contour::circle(Complex(1.0, 0.0), 1.05, 100);
  BoundaryConditionSpec bc = BoundaryConditionSpec::projection();
  double theta = 1e-8;
  int fixed_kappa = -1;  ///< >= 0 prescribes the rank instead of theta
  unsigned seed = 1;
  int l = 10;
  int m = 401;
  int workers = 1;
};

/// Full pipeline: samples along the contour, moments, rank test, eigenvalue
/// extraction, eigenfunction reconstruction at the probe points, and
/// inside-contour flags.
SpectrumResult spectrum(const PulseSolution& pulse, const FhnParams& params,
                        const FhnRunConfig& config = {});

/// Eigenpair refined by bordered inverse iteration on the discrete boundary
/// eigenvalue problem: solve F_N(lambda) y = (dA/dlambda) y with a
/// normalization functional closing the system; quadratically convergent for
/// simple eigenvalues.  dA/dlambda = [[0,0,0],[1,0,0],[0,0,1/c]].
struct ReferenceEigenpair {
  Complex lambda;
  GridFunction eigenfunction;  ///< 3 x (n+1), normalized to unit discrete L2
  double residual = 0.0;       ///< relative discrete eigen-residual
  int iterations = 0;
};

ReferenceEigenpair reference_eigenpair(const PulseSolution& pulse,
                                       const FhnParams& params, Complex lambda_guess,
                                       double tol = 1e-12, int max_iter = 12);

/// One row of the interval-length sweep: pulse and spectrum recomputed on
/// [-length/2, length/2] at fixed step, error against the reference unstable
/// eigenvalue from [-50, 50].
struct IntervalSweepRow {
  double length = 0.0;
  BcKind bc = BcKind::Projection;
  double err_eval = 0.0;
  double angle_evec = 0.0;
  double seconds = 0.0;
  bool ok = true;
  std::string error;
};

/// One row of the quadrature-points sweep at fixed interval.
struct QuadratureSweepRow {
  int quad_points = 0;
  double err_eval = 0.0;
  double angle_evec = 0.0;
  bool ok = true;
  std::string error;
};

/// One row of the prescribed-rank sweep: every extracted eigenvalue with its
/// inside-contour flag and a resolvent-based defect (norm of F_N(lambda)
/// applied to a unit resolvent image; small only near true eigenvalues).
struct RankSweepRow {
  int kappa = 0;
  Complex eigenvalue;
  bool inside = false;
  double residual = 0.0;
};

/// Reference context shared by the sweeps: unstable pulse and refined unstable
/// eigenpair on [-50, 50] with the step used everywhere.
struct FhnReference {
  FhnParams params;
  double step = 0.01;
  PulseSolution pulse;
  ReferenceEigenpair unstable;
  CVector probe_values;  ///< reference eigenfunction at the probe abscissas
};

FhnReference make_reference(const FhnParams& params, double step = 0.01,
                            int m = 401);

std::vector<IntervalSweepRow> interval_sweep(const FhnReference& ref,
                                             const std::vector<double>& lengths,
                                             const FhnRunConfig& config = {});

std::vector<QuadratureSweepRow> quadrature_sweep(const FhnReference& ref,
                                                 const std::vector<int>& quad_points,
                                                 double length = 100.0,
                                                 const FhnRunConfig& config = {});

std::vector<RankSweepRow> rank_sweep(const FhnReference& ref,
                                     const std::vector<int>& kappas,
                                     double length = 100.0, int quad_points = 45,
                                     const FhnRunConfig& config = {});

}  // namespace nevp

#endif
