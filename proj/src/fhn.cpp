#include "nevp/fhn.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Sparse>

namespace nevp {

namespace {

// Right-hand side of the first-order traveling-wave system in y = (u, u', v).
RVector wave_rhs(const FhnParams& p, double c, const RVector& y) {
  RVector f(3);
  f(0) = y(1);
  f(1) = -c * y(1) - y(0) + y(0) * y(0) * y(0) / 3.0 + y(2);
  f(2) = -(p.phi / c) * (y(0) + p.a - p.b * y(2));
  return f;
}

RMatrix wave_jacobian(const FhnParams& p, double c, const RVector& y) {
  RMatrix j = RMatrix::Zero(3, 3);
  j(0, 1) = 1.0;
  j(1, 0) = -1.0 + y(0) * y(0);
  j(1, 1) = -c;
  j(1, 2) = 1.0;
  j(2, 0) = -p.phi / c;
  j(2, 2) = p.phi * p.b / c;
  return j;
}

RVector wave_rhs_dc(const FhnParams& p, double c, const RVector& y) {
  RVector f(3);
  f(0) = 0.0;
  f(1) = -y(1);
  f(2) = (p.phi / (c * c)) * (y(0) + p.a - p.b * y(2));
  return f;
}

// Real orthonormal basis of an invariant subspace of a real matrix, given a
// (possibly complex) spanning set: stack real and imaginary parts and keep the
// leading rank columns of a QR factorization.
RMatrix real_basis(const CMatrix& v) {
  const int rank = static_cast<int>(v.cols());
  RMatrix stacked(v.rows(), 2 * v.cols());
  stacked << v.real(), v.imag();
  Eigen::ColPivHouseholderQR<RMatrix> qr(stacked);
  RMatrix q = qr.householderQ() * RMatrix::Identity(v.rows(), rank);
  return q;
}

// Rows annihilating the stable / unstable subspaces of the rest-state
// Jacobian: with T = (B_s | B_u), T^{-1} = (L_s; L_u).
std::pair<RMatrix, RMatrix> rest_projection_rows(const FhnParams& p, double c,
                                                 double u_inf, double v_inf) {
  RVector rest(3);
  rest << u_inf, 0.0, v_inf;
  const RMatrix j = wave_jacobian(p, c, rest);
  auto [vs, vu] = stable_unstable_subspaces(j.cast<Complex>(), kDefaultHyperbolicityTol);
  const RMatrix bs = real_basis(vs), bu = real_basis(vu);
  RMatrix t(3, 3);
  t << bs, bu;
  const RMatrix tinv = t.inverse();
  return {tinv.topRows(bs.cols()), tinv.bottomRows(bu.cols())};
}

double interp(const GridFunction& f, int row, double x) {
  const Grid& g = f.grid;
  if (x <= g.xmin) return f.values(row, 0).real();
  if (x >= g.xmax) return f.values(row, g.n).real();
  const double s = (x - g.xmin) / g.h();
  const int i = std::min(g.n - 1, static_cast<int>(s));
  const double w = s - i;
  return (1.0 - w) * f.values(row, i).real() + w * f.values(row, i + 1).real();
}

double angle_between(const CVector& u, const CVector& v) {
  const double nu = u.norm(), nv = v.norm();
  if (nu == 0.0 || nv == 0.0) return 1.5707963267948966;
  double cosang = std::abs(u.dot(v)) / (nu * nv);
  cosang = std::min(1.0, cosang);
  return std::acos(cosang);
}

// Eigenvalue from a spectrum run matching the reference unstable one.
int match_eigenvalue(const SpectrumResult& r, Complex target) {
  int best = -1;
  double best_dist = 0.0;
  for (size_t i = 0; i < r.eigenvalues.size(); ++i) {
    const double dist = std::abs(r.eigenvalues[i] - target);
    if (best < 0 || dist < best_dist) {
      best = static_cast<int>(i);
      best_dist = dist;
    }
  }
  return best;
}

CVector probe_column(const GridFunction& ef, int m) {
  CVector out(m);
  for (int j = 0; j < m; ++j) {
    const double x = -2.0 + j * 4.0 / (m - 1);
    const int i = ef.grid.index_of_nearest(x);
    out(j) = ef.values(0, i);
  }
  return out;
}

}  // namespace

std::pair<double, double> rest_state(const FhnParams& params) {
  if (params.b <= 0.0 || params.phi <= 0.0)
    throw InputError("rest_state: parameters must satisfy b > 0, phi > 0");
  auto f = [&](double u) { return u - u * u * u / 3.0 - (u + params.a) / params.b; };
  double lo = -10.0, hi = 10.0;
  if (f(lo) * f(hi) > 0.0) throw NumericalError("rest_state: no bracketed real root");
  if (f(lo) < 0.0) std::swap(lo, hi);
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) >= 0.0 ? lo : hi) = mid;
  }
  const double u = 0.5 * (lo + hi);
  return {u, (u + params.a) / params.b};
}

PulseSolution compute_pulse(const FhnParams& params, double c_init, const Grid& grid,
                            double tol, int max_iter) {
  if (c_init == 0.0) throw InputError("compute_pulse: wave speed must be nonzero");
  const auto [u_inf, v_inf] = rest_state(params);
  const int nodes = grid.size();
  const int nvar = 3 * nodes + 1;
  const double h = grid.h();

  // Initial guess: rest state plus a sech bump of amplitude 2 in u whose
  // width scales with the requested speed; this is what steers Newton to the
  // slow branch for c_init near -0.5 and the fast one near -0.8.
  const double width = 0.45 / std::abs(c_init);
  RVector x(nvar);
  std::vector<double> guess_u(nodes), guess_du(nodes);
  for (int i = 0; i < nodes; ++i) {
    const double xi = grid.node(i);
    const double sech = 1.0 / std::cosh(width * xi);
    guess_u[i] = u_inf + 2.0 * sech;
    guess_du[i] = -2.0 * width * sech * std::tanh(width * xi);
    x(3 * i) = guess_u[i];
    x(3 * i + 1) = guess_du[i];
    x(3 * i + 2) = v_inf;
  }
  x(nvar - 1) = c_init;

  auto trap_weight = [&](int i) { return (i == 0 || i == grid.n) ? 0.5 * h : h; };

  RVector res(nvar);
  double res_norm = 0.0;
  int iter = 0;
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  for (; iter < max_iter; ++iter) {
    const double c = x(nvar - 1);
    if (c == 0.0) throw NumericalError("compute_pulse: wave speed collapsed to zero");
    const auto [ls, lu_rows] = rest_projection_rows(params, c, u_inf, v_inf);
    const int ks = static_cast<int>(ls.rows());

    res.setZero();
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(22 * nodes);
    std::vector<RVector> f(nodes), fc(nodes);
    std::vector<RMatrix> df(nodes);
    for (int i = 0; i < nodes; ++i) {
      const RVector yi = x.segment<3>(3 * i);
      f[i] = wave_rhs(params, c, yi);
      fc[i] = wave_rhs_dc(params, c, yi);
      df[i] = wave_jacobian(params, c, yi);
    }
    // Interior box-scheme rows.
    for (int i = 0; i < grid.n; ++i) {
      const RVector yi = x.segment<3>(3 * i), yi1 = x.segment<3>(3 * (i + 1));
      res.segment<3>(3 * i) = yi1 - yi - 0.5 * h * (f[i] + f[i + 1]);
      const RMatrix ji = -RMatrix::Identity(3, 3) - 0.5 * h * df[i];
      const RMatrix ji1 = RMatrix::Identity(3, 3) - 0.5 * h * df[i + 1];
      const RVector jc = -0.5 * h * (fc[i] + fc[i + 1]);
      for (int r = 0; r < 3; ++r) {
        for (int s = 0; s < 3; ++s) {
          trip.emplace_back(3 * i + r, 3 * i + s, ji(r, s));
          trip.emplace_back(3 * i + r, 3 * (i + 1) + s, ji1(r, s));
        }
        trip.emplace_back(3 * i + r, nvar - 1, jc(r));
      }
    }
    // Projection boundary rows on the deviation from the rest state.
    RVector rest(3);
    rest << u_inf, 0.0, v_inf;
    const RVector dev0 = x.segment<3>(0) - rest;
    const RVector devn = x.segment<3>(3 * grid.n) - rest;
    const int row_bc = 3 * grid.n;
    res.segment(row_bc, ks) = ls * dev0;
    res.segment(row_bc + ks, 3 - ks) = lu_rows * devn;
    for (int r = 0; r < ks; ++r)
      for (int s = 0; s < 3; ++s) trip.emplace_back(row_bc + r, s, ls(r, s));
    for (int r = 0; r < 3 - ks; ++r)
      for (int s = 0; s < 3; ++s)
        trip.emplace_back(row_bc + ks + r, 3 * grid.n + s, lu_rows(r, s));
    // Phase condition against the initial guess.
    double phase = 0.0;
    for (int i = 0; i < nodes; ++i) {
      phase += trap_weight(i) * guess_du[i] * (x(3 * i) - guess_u[i]);
      trip.emplace_back(nvar - 1, 3 * i, trap_weight(i) * guess_du[i]);
    }
    res(nvar - 1) = phase;

    res_norm = res.lpNorm<Eigen::Infinity>();
    if (res_norm < tol) break;

    Eigen::SparseMatrix<double> jac(nvar, nvar);
    jac.setFromTriplets(trip.begin(), trip.end());
    lu.compute(jac);
    if (lu.info() != Eigen::Success)
      throw NumericalError("compute_pulse: singular Newton system");
    x -= lu.solve(res);
  }
  if (res_norm >= tol) {
    std::ostringstream msg;
    msg << "compute_pulse: no convergence after " << iter
        << " iterations, residual " << res_norm;
    throw NumericalError(msg.str());
  }

  PulseSolution sol;
  sol.grid = grid;
  sol.c = x(nvar - 1);
  sol.residual = res_norm;
  sol.iterations = iter;
  sol.profile = GridFunction(grid, 3);
  sol.derivative = GridFunction(grid, 3);
  for (int i = 0; i < nodes; ++i) {
    const RVector yi = x.segment<3>(3 * i);
    const RVector fi = wave_rhs(params, sol.c, yi);
    sol.profile.values.col(i) = yi.cast<Complex>();
    sol.derivative.values.col(i) = fi.cast<Complex>();
  }
  return sol;
}

OdePencil linearized_pencil(const PulseSolution& pulse, const FhnParams& params) {
  if (pulse.c == 0.0) throw InputError("linearized_pencil: zero wave speed");
  const auto [u_inf, v_inf] = rest_state(params);
  const double c = pulse.c;
  const double phi = params.phi, b = params.b;
  const GridFunction profile = pulse.profile;

  auto coeff_at = [c, phi, b](Complex lambda, double u) {
    CMatrix a = CMatrix::Zero(3, 3);
    a(0, 1) = 1.0;
    a(1, 0) = lambda - 1.0 + u * u;
    a(1, 1) = -c;
    a(1, 2) = 1.0;
    a(2, 0) = -phi / c;
    a(2, 2) = (lambda + phi * b) / c;
    return a;
  };

  OdePencil pencil;
  pencil.d = 3;
  pencil.k = 2;
  pencil.coeff = [coeff_at, profile](Complex lambda, double x) {
    return coeff_at(lambda, interp(profile, 0, x));
  };
  pencil.limit_minus = [coeff_at, u_inf](Complex lambda) {
    return coeff_at(lambda, u_inf);
  };
  pencil.limit_plus = pencil.limit_minus;
  return pencil;
}

TestData fhn_test_data(double c, unsigned seed, int l, int m, int basis_size,
                       double lo, double hi) {
  if (c == 0.0) throw InputError("fhn_test_data: zero wave speed");
  if (m < 2) throw InputError("fhn_test_data: need at least two functionals");
  TestData base = TestData::random_hats(2, l, seed, basis_size, lo, hi);
  TestData td;
  td.rhs_support_lo = base.rhs_support_lo;
  td.rhs_support_hi = base.rhs_support_hi;
  for (auto& f : base.rhs) {
    td.rhs.push_back([f = std::move(f), c](double x) -> CVector {
      const CVector g = f(x);
      CVector v(3);
      v << Complex(0.0, 0.0), g(0), g(1) / c;
      return v;
    });
  }
  for (int j = 0; j < m; ++j)
    td.functionals.push_back(Functional::point(-2.0 + j * 4.0 / (m - 1), 0));
  return td;
}

SpectrumResult spectrum(const PulseSolution& pulse, const FhnParams& params,
                        const FhnRunConfig& config) {
  const OdePencil pencil = linearized_pencil(pulse, params);
  // Clamp the probe support when the interval is shorter than the default
  // [-5, 5] so short-interval sweeps stay well posed.
  const double lo = std::max(-5.0, 0.8 * pulse.grid.xmin);
  const double hi = std::min(5.0, 0.8 * pulse.grid.xmax);
  const TestData data =
      fhn_test_data(pulse.c, config.seed, config.l, config.m, 40, lo, hi);
  const SampleSet samples = assemble_samples(pencil, pulse.grid, config.bc, data,
                                             config.contour, config.workers);
  const MomentSet ms = moments(samples, 1);
  SpectrumResult result = config.fixed_kappa >= 0
                              ? eigs_simple_fixed_rank(ms.d[0], ms.d[1], config.fixed_kappa)
                              : eigs_simple(ms.d[0], ms.d[1], config.theta);
  result.eigenfunctions = reconstruct_eigenfunctions(result.coeffs, data, pulse.grid);
  filter_and_diagnose(result, config.contour);
  return result;
}

ReferenceEigenpair reference_eigenpair(const PulseSolution& pulse,
                                       const FhnParams& params, Complex lambda_guess,
                                       double tol, int max_iter) {
  const OdePencil pencil = linearized_pencil(pulse, params);
  const Grid& grid = pulse.grid;
  const auto bc = BoundaryConditionSpec::projection();
  CMatrix dadl = CMatrix::Zero(3, 3);
  dadl(1, 0) = 1.0;
  dadl(2, 2) = 1.0 / pulse.c;

  // Seed: one resolvent application to a smooth bump amplifies the nearby
  // eigencomponent.
  GridFunction bump = GridFunction::sample(grid, 3, [](double x) -> CVector {
    CVector v(3);
    const double s = 1.0 / std::cosh(x);
    v << s, s, s;
    return v;
  });

  Complex lambda = lambda_guess;
  GridFunction y;
  CVector w;
  double residual = 0.0;
  int iter = 0;
  for (; iter <= max_iter; ++iter) {
    DiscreteSystem sys(pencil, lambda, grid, bc);
    if (iter == 0) {
      y = sys.solve(bump);
      y.values /= y.norm();
      w = CVector(Eigen::Map<const CVector>(y.values.data(), y.values.size()));
    }
    residual = sys.eigen_residual(y);
    if (residual < tol) break;
    GridFunction rhs(grid, 3);
    rhs.values = dadl * y.values;
    const GridFunction s = sys.solve(rhs);
    const Complex ws =
        w.transpose() * Eigen::Map<const CVector>(s.values.data(), s.values.size());
    if (ws == Complex(0.0, 0.0))
      throw NumericalError("reference_eigenpair: degenerate normalization");
    lambda -= 1.0 / ws;
    y.values = s.values / ws;
    y.values /= y.norm();
  }
  if (residual >= tol) {
    std::ostringstream msg;
    msg << "reference_eigenpair: no convergence after " << iter
        << " iterations, residual " << residual;
    throw NumericalError(msg.str());
  }

  ReferenceEigenpair out;
  out.lambda = lambda;
  out.residual = residual;
  out.iterations = iter;
  // Phase: largest-magnitude entry made real positive.
  Eigen::Index r0 = 0, c0 = 0;
  y.values.cwiseAbs().maxCoeff(&r0, &c0);
  const Complex pivot = y.values(r0, c0);
  y.values *= std::abs(pivot) / pivot;
  out.eigenfunction = y;
  return out;
}

FhnReference make_reference(const FhnParams& params, double step, int m) {
  FhnReference ref;
  ref.params = params;
  ref.step = step;
  const Grid grid = Grid::from_step(-50.0, 50.0, step);
  ref.pulse = compute_pulse(params, -0.51, grid);

  // Locate the unstable eigenvalue with a coarse contour run, then refine.
  FhnRunConfig coarse;
  coarse.m = m;
  coarse.workers = 4;
  SpectrumResult sr = spectrum(ref.pulse, params, coarse);
  Complex guess(0.1, 0.0);
  double best_re = 0.0;
  for (size_t i = 0; i < sr.eigenvalues.size(); ++i) {
    if (!sr.inside[i]) continue;
    if (sr.eigenvalues[i].real() > best_re) {
      best_re = sr.eigenvalues[i].real();
      guess = sr.eigenvalues[i];
    }
  }
  ref.unstable = reference_eigenpair(ref.pulse, params, guess);
  ref.probe_values = probe_column(ref.unstable.eigenfunction, m);
  return ref;
}

namespace {

// Sweep-point evaluation shared by the interval and quadrature sweeps.
void score_run(const SpectrumResult& sr, const FhnReference& ref, int m,
               double* err_eval, double* angle_evec) {
  const int idx = match_eigenvalue(sr, ref.unstable.lambda);
  if (idx < 0) throw NumericalError("sweep: no eigenvalue extracted");
  *err_eval = std::abs(sr.eigenvalues[idx] - ref.unstable.lambda);
  *angle_evec = angle_between(probe_column(sr.eigenfunctions[idx], m), ref.probe_values);
}

// Restriction of the reference pulse to [-length/2, length/2].  The sweeps
// measure the truncation error of the eigenvalue problem alone, so the wave
// itself is kept at reference accuracy instead of being re-solved on the
// short interval (which would contaminate every boundary condition with the
// same wave-truncation error).
PulseSolution restrict_pulse(const PulseSolution& pulse, double length) {
  const double h = pulse.grid.h();
  const Grid sub = Grid::from_step(-0.5 * length, 0.5 * length, h);
  const int i0 = pulse.grid.index_of(sub.xmin);
  if (i0 < 0 || pulse.grid.index_of(sub.xmax) < 0)
    throw InputError("restrict_pulse: target interval is not nested in the grid");
  PulseSolution out = pulse;
  out.grid = sub;
  out.profile = GridFunction(sub, 3);
  out.profile.values = pulse.profile.values.middleCols(i0, sub.size());
  out.derivative = GridFunction(sub, 3);
  out.derivative.values = pulse.derivative.values.middleCols(i0, sub.size());
  return out;
}

}  // namespace

std::vector<IntervalSweepRow> interval_sweep(const FhnReference& ref,
                                             const std::vector<double>& lengths,
                                             const FhnRunConfig& config) {
  std::vector<IntervalSweepRow> rows;
  for (double length : lengths) {
    for (BcKind kind : {BcKind::Projection, BcKind::Periodic}) {
      IntervalSweepRow row;
      row.length = length;
      row.bc = kind;
      const auto t0 = std::chrono::steady_clock::now();
      try {
        const PulseSolution pulse = restrict_pulse(ref.pulse, length);
        FhnRunConfig cfg = config;
        cfg.bc = kind == BcKind::Periodic ? BoundaryConditionSpec::periodic()
                                          : BoundaryConditionSpec::projection();
        const SpectrumResult sr = spectrum(pulse, ref.params, cfg);
        score_run(sr, ref, cfg.m, &row.err_eval, &row.angle_evec);
      } catch (const Error& e) {
        row.ok = false;
        row.error = e.what();
      }
      row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      rows.push_back(row);
    }
  }
  return rows;
}

std::vector<QuadratureSweepRow> quadrature_sweep(const FhnReference& ref,
                                                 const std::vector<int>& quad_points,
                                                 double length,
                                                 const FhnRunConfig& config) {
  const PulseSolution pulse =
      length == ref.pulse.grid.xmax - ref.pulse.grid.xmin
          ? ref.pulse
          : restrict_pulse(ref.pulse, length);
  std::vector<QuadratureSweepRow> rows;
  for (int m_quad : quad_points) {
    QuadratureSweepRow row;
    row.quad_points = m_quad;
    try {
      FhnRunConfig cfg = config;
      cfg.contour = Contour::circle(cfg.contour.center, cfg.contour.radius, m_quad);
      const SpectrumResult sr = spectrum(pulse, ref.params, cfg);
      score_run(sr, ref, cfg.m, &row.err_eval, &row.angle_evec);
    } catch (const Error& e) {
      row.ok = false;
      row.error = e.what();
    }
    rows.push_back(row);
  }
  return rows;
}

std::vector<RankSweepRow> rank_sweep(const FhnReference& ref,
                                     const std::vector<int>& kappas, double length,
                                     int quad_points, const FhnRunConfig& config) {
  const PulseSolution pulse =
      length == ref.pulse.grid.xmax - ref.pulse.grid.xmin
          ? ref.pulse
          : restrict_pulse(ref.pulse, length);
  const Grid& grid = pulse.grid;
  const OdePencil pencil = linearized_pencil(pulse, ref.params);
  GridFunction bump = GridFunction::sample(grid, 3, [](double x) -> CVector {
    CVector v(3);
    const double s = 1.0 / std::cosh(x);
    v << s, s, s;
    return v;
  });
  bump.values /= bump.norm();

  // One sample assembly serves every prescribed rank: the sweep varies only
  // the extraction step.
  const Contour contour =
      Contour::circle(config.contour.center, config.contour.radius, quad_points);
  const double lo = std::max(-5.0, 0.8 * grid.xmin);
  const double hi = std::min(5.0, 0.8 * grid.xmax);
  const TestData data = fhn_test_data(pulse.c, config.seed, config.l, config.m, 40, lo, hi);
  const SampleSet samples =
      assemble_samples(pencil, grid, config.bc, data, contour, config.workers);
  const MomentSet ms = moments(samples, 1);

  std::vector<RankSweepRow> rows;
  for (int kappa : kappas) {
    SpectrumResult sr = eigs_simple_fixed_rank(ms.d[0], ms.d[1], kappa);
    sr.eigenfunctions = reconstruct_eigenfunctions(sr.coeffs, data, grid);
    filter_and_diagnose(sr, contour);
    for (size_t i = 0; i < sr.eigenvalues.size(); ++i) {
      RankSweepRow row;
      row.kappa = kappa;
      row.eigenvalue = sr.eigenvalues[i];
      row.inside = sr.inside[i];
      // Resolvent defect: 1 / || F_N(lambda)^{-1} bump ||; tiny only when
      // lambda sits next to a true discrete eigenvalue.
      try {
        DiscreteSystem sys(pencil, row.eigenvalue, grid, config.bc);
        row.residual = 1.0 / sys.solve(bump).norm();
      } catch (const OnSpectrumError&) {
        row.residual = 0.0;
      } catch (const EssentialSpectrumError&) {
        // A spurious value sitting on the essential spectrum has no decaying
        // boundary condition at all; report an unbounded defect.
        row.residual = std::numeric_limits<double>::infinity();
      }
      rows.push_back(row);
    }
  }
  return rows;
}

}  // namespace nevp
