#include "nevp/schrodinger.hpp"

#include <cmath>

#include "nevp/bvp.hpp"
#include "nevp/extract.hpp"
#include "nevp/numkernel.hpp"

namespace nevp {

Potential Potential::zero() {
  Potential p;
  p.kind = Kind::Zero;
  p.v = [](double) { return 0.0; };
  p.decay_rate = 0.0;
  p.support_bound = 0.0;
  return p;
}

Potential Potential::poschl_teller(double depth) {
  Potential p;
  p.kind = Kind::PoschlTeller;
  p.v = [depth](double x) {
    const double s = 1.0 / std::cosh(x);
    return -depth * s * s;
  };
  p.decay_rate = 2.0;
  p.support_bound = 1.0;
  return p;
}

Potential Potential::square_well(double depth, double half_width) {
  Potential p;
  p.kind = Kind::SquareWell;
  p.v = [depth, half_width](double x) {
    const double d = std::abs(x) - half_width;
    if (std::abs(d) < 1e-12) return -0.5 * depth;  // jump midpoint value
    return d < 0.0 ? -depth : 0.0;
  };
  p.decay_rate = 0.0;
  p.support_bound = half_width;
  return p;
}

Potential Potential::custom(std::function<double(double)> v, double decay_rate,
                            double support_bound) {
  Potential p;
  p.kind = Kind::Custom;
  p.v = std::move(v);
  p.decay_rate = decay_rate;
  p.support_bound = support_bound;
  return p;
}

Complex sqrt_upper(Complex lambda) {
  if (lambda.imag() == 0.0 && lambda.real() >= 0.0)
    throw InputError("square root branch: lambda lies on the cut [0, infinity)");
  Complex s = std::sqrt(lambda);
  if (s.imag() <= 0.0) s = -s;
  return s;
}

namespace {

// One box-scheme relation (I - h/2 A_{i+1}) y_{i+1} = (I + h/2 A_i) y_i for
// the 2x2 system y' = [[0,1],[q,0]] y with q = V - lambda.
CVector step_forward(Complex q_i, Complex q_ip1, double h, const CVector& y) {
  CVector rhs(2);
  rhs(0) = y(0) + 0.5 * h * y(1);
  rhs(1) = y(1) + 0.5 * h * q_i * y(0);
  // Invert I - h/2 A_{i+1} = [[1, -h/2], [-h/2 q, 1]].
  const Complex det = 1.0 - 0.25 * h * h * q_ip1;
  CVector out(2);
  out(0) = (rhs(0) + 0.5 * h * rhs(1)) / det;
  out(1) = (0.5 * h * q_ip1 * rhs(0) + rhs(1)) / det;
  return out;
}

CVector step_backward(Complex q_i, Complex q_ip1, double h, const CVector& y) {
  // Solve (I + h/2 A_i) y_i = (I - h/2 A_{i+1}) y_{i+1} for y_i.
  CVector rhs(2);
  rhs(0) = y(0) - 0.5 * h * y(1);
  rhs(1) = y(1) - 0.5 * h * q_ip1 * y(0);
  const Complex det = 1.0 - 0.25 * h * h * q_i;
  CVector out(2);
  out(0) = (rhs(0) - 0.5 * h * rhs(1)) / det;
  out(1) = (-0.5 * h * q_i * rhs(0) + rhs(1)) / det;
  return out;
}

constexpr double kOverflowGuard = 1e120;

}  // namespace

JostPair jost(const Potential& pot, Complex lambda, double cutoff_minus,
              double cutoff_plus, double step) {
  if (cutoff_minus >= cutoff_plus || step <= 0.0)
    throw InputError("jost: invalid interval or step");
  const Complex mu = sqrt_upper(lambda);
  Grid g = Grid::from_step(cutoff_minus, cutoff_plus, step);
  const double h = g.h();

  std::vector<Complex> q(g.size());
  for (int i = 0; i < g.size(); ++i) q[i] = pot(g.node(i)) - lambda;

  JostPair jp;
  jp.lambda = lambda;
  jp.sqrt_lambda = mu;
  jp.y_plus = GridFunction(g, 2);
  jp.y_minus = GridFunction(g, 2);
  const Complex imu = Complex(0.0, 1.0) * mu;

  // u_minus ~ e^{-i mu x} toward -inf: integrate forward from the left end.
  CVector y(2);
  const Complex em = std::exp(-imu * cutoff_minus);
  y(0) = em;
  y(1) = -imu * em;
  jp.y_minus.values.col(0) = y;
  for (int i = 0; i + 1 <= g.n; ++i) {
    y = step_forward(q[i], q[i + 1], h, y);
    if (y.norm() > kOverflowGuard) {
      jp.log_scale_minus += std::log(y.norm());
      y /= y.norm();
    }
    jp.y_minus.values.col(i + 1) = y;
  }

  // u_plus ~ e^{+i mu x} toward +inf: integrate backward from the right end.
  const Complex ep = std::exp(imu * cutoff_plus);
  y(0) = ep;
  y(1) = imu * ep;
  jp.y_plus.values.col(g.n) = y;
  for (int i = g.n - 1; i >= 0; --i) {
    y = step_backward(q[i], q[i + 1], h, y);
    if (y.norm() > kOverflowGuard) {
      jp.log_scale_plus += std::log(y.norm());
      y /= y.norm();
    }
    jp.y_plus.values.col(i) = y;
  }

  // Wronskian W = u_- u_+' - u_-' u_+ at every node. The transfer matrix of
  // one box step has determinant (1 - h^2 q_i / 4)/(1 - h^2 q_{i+1} / 4), so
  // the exactly conserved discrete quantity is (1 - h^2 q_i / 4) W_i; the
  // correction is O(h^2) and the spread becomes a pure roundoff diagnostic.
  const int mid = g.index_of_nearest(0.0);
  auto w_at = [&](int i) {
    return (1.0 - 0.25 * h * h * q[i]) *
           (jp.y_minus.values(0, i) * jp.y_plus.values(1, i) -
            jp.y_minus.values(1, i) * jp.y_plus.values(0, i));
  };
  jp.wronskian = w_at(mid);
  double max_dev = 0.0;
  for (int i = 0; i <= g.n; ++i) max_dev = std::max(max_dev, std::abs(w_at(i) - jp.wronskian));
  jp.wronskian_spread = max_dev / std::max(std::abs(jp.wronskian), 1e-300);
  return jp;
}

std::vector<std::pair<Complex, Complex>> wronskian_trace(
    const Potential& pot, const std::vector<Complex>& lambdas, double cutoff_minus,
    double cutoff_plus, double step) {
  std::vector<std::pair<Complex, Complex>> out;
  out.reserve(lambdas.size());
  for (Complex lambda : lambdas) {
    JostPair jp = jost(pot, lambda, cutoff_minus, cutoff_plus, step);
    if (jp.wronskian_spread > 1e-6)
      throw NumericalError("wronskian: x-dependence exceeds tolerance");
    out.emplace_back(lambda, jp.wronskian);
  }
  return out;
}

ResidueData residue(const Potential& pot, Complex lambda_n, double radius,
                    double cutoff_minus, double cutoff_plus, double step,
                    int node_count) {
  if (radius <= 0.0) throw InputError("residue: radius must be positive");
  Contour gamma = Contour::circle(lambda_n, radius, node_count);
  Complex rho(0.0, 0.0);
  for (const auto& [lambda, weight] : gamma.nodes()) {
    JostPair jp = jost(pot, lambda, cutoff_minus, cutoff_plus, step);
    if (std::abs(jp.wronskian) < 1e-12)
      throw NumericalError("residue: Wronskian vanishes on the circle; shrink radius");
    rho += weight / jp.wronskian;
  }

  // Proportionality u_+ = c u_- at the eigenvalue, least squares over the
  // middle half of the interval where both solutions are well resolved.
  JostPair at_ev = jost(pot, lambda_n, cutoff_minus, cutoff_plus, step);
  const Grid& g = at_ev.y_plus.grid;
  const double lo = cutoff_minus / 2.0, hi = cutoff_plus / 2.0;
  Complex num(0.0, 0.0);
  double den = 0.0;
  for (int i = 0; i <= g.n; ++i) {
    const double x = g.node(i);
    if (x < lo || x > hi) continue;
    const Complex um = at_ev.y_minus.values(0, i);
    num += std::conj(um) * at_ev.y_plus.values(0, i);
    den += std::norm(um);
  }
  if (den <= 0.0) throw NumericalError("residue: degenerate overlap window");

  ResidueData rd;
  rd.lambda_n = lambda_n;
  rd.rho = rho;
  rd.c = num / den;
  rd.radius = radius;
  return rd;
}

OdePencil schrodinger_pencil(const Potential& pot) {
  OdePencil p;
  p.d = 2;
  p.k = 1;
  auto vfun = pot.v;
  p.coeff = [vfun](Complex lambda, double x) {
    CMatrix a = CMatrix::Zero(2, 2);
    a(0, 1) = 1.0;
    a(1, 0) = vfun(x) - lambda;
    return a;
  };
  auto limit = [](Complex lambda) {
    CMatrix a = CMatrix::Zero(2, 2);
    a(0, 1) = 1.0;
    a(1, 0) = -lambda;
    return a;
  };
  p.limit_minus = limit;
  p.limit_plus = limit;
  return p;
}

SingularPartReport singular_part_check(const Potential& pot, const TestData& data,
                                       Complex lambda_n, const Grid& grid,
                                       double offset_radius, int offset_count) {
  if (offset_count < 2) throw InputError("singular part: need at least two offsets");
  OdePencil pencil = schrodinger_pencil(pot);
  BoundaryConditionSpec bc = BoundaryConditionSpec::projection();

  std::vector<GridFunction> rhs;
  rhs.reserve(data.l());
  for (const auto& f : data.rhs) rhs.push_back(GridFunction::sample(grid, 2, f));

  CMatrix fitted = CMatrix::Zero(data.m(), data.l());
  for (int t = 0; t < offset_count; ++t) {
    const double theta = 2.0 * 3.14159265358979323846 * t / offset_count;
    const Complex lambda = lambda_n + offset_radius * std::polar(1.0, theta);
    DiscreteSystem sys(pencil, lambda, grid, bc);
    for (int k = 0; k < data.l(); ++k) {
      GridFunction y = sys.solve(rhs[k]);
      for (int j = 0; j < data.m(); ++j)
        fitted(j, k) += (lambda - lambda_n) * data.functionals[j].apply(y);
    }
  }
  fitted /= static_cast<double>(offset_count);

  // Jost-side prediction: rho_n * (int y_-^T w_hat_j) * (int y_+^perp v_hat_k).
  ResidueData rd =
      residue(pot, lambda_n, offset_radius, grid.xmin, grid.xmax, grid.h());
  JostPair jp = jost(pot, lambda_n, grid.xmin, grid.xmax, grid.h());
  const Grid& g = jp.y_plus.grid;

  CVector left(data.m());
  for (int j = 0; j < data.m(); ++j) {
    const Functional& f = data.functionals[j];
    if (f.kind == Functional::Kind::Point) {
      const int i = g.index_of(f.x0);
      if (i < 0) throw InputError("singular part: functional abscissa off the grid");
      left(j) = jp.y_minus.values(f.component, i);
    } else {
      Complex acc(0.0, 0.0);
      for (int i = 0; i <= g.n; ++i) {
        const double x = g.node(i);
        if (x < f.support_lo - g.h() || x > f.support_hi + g.h()) continue;
        const double w = (i == 0 || i == g.n) ? 0.5 : 1.0;
        acc += w * (f.density(x).transpose() * jp.y_minus.values.col(i)).value();
      }
      left(j) = acc * g.h();
    }
  }
  CVector right(data.l());
  for (int k = 0; k < data.l(); ++k) {
    Complex acc(0.0, 0.0);
    for (int i = 0; i <= g.n; ++i) {
      const double x = g.node(i);
      if (x < data.rhs_support_lo - g.h() || x > data.rhs_support_hi + g.h()) continue;
      const CVector v = data.rhs[k](x);
      const double w = (i == 0 || i == g.n) ? 0.5 : 1.0;
      // v^perp pairing: (-y_2, y_1) . v.
      acc += w * (-jp.y_plus.values(1, i) * v(0) + jp.y_plus.values(0, i) * v(1));
    }
    right(k) = acc * g.h();
  }

  SingularPartReport rep;
  rep.fitted = fitted;
  rep.predicted = rd.rho * left * right.transpose();
  const double scale = std::max(rep.predicted.norm(), 1e-300);
  rep.mismatch = std::min((fitted - rep.predicted).norm(),
                          (fitted + rep.predicted).norm()) /
                 scale;
  if (std::min(fitted.rows(), fitted.cols()) >= 2) {
    Eigen::JacobiSVD<CMatrix> svd(fitted);
    rep.rank_ratio = svd.singularValues()(1) / svd.singularValues()(0);
  }
  return rep;
}

SpectrumResult spectrum_via_contour(const Potential& pot, const Contour& contour,
                                    const Grid& grid, const BoundaryConditionSpec& bc,
                                    const TestData& data, double theta, int workers) {
  OdePencil pencil = schrodinger_pencil(pot);
  SampleSet samples = assemble_samples(pencil, grid, bc, data, contour, workers);
  MomentSet ms = moments(samples, 1);

  // Empty-interior guard: when the contour encloses no spectrum the moments
  // cancel to quadrature/roundoff noise; a relative rank test alone would then
  // report spurious eigenvalues from that noise.
  double sample_scale = 0.0;
  for (const auto& e : samples.values) sample_scale = std::max(sample_scale, e.norm());
  if (ms.d[0].norm() <= 1e-10 * sample_scale) {
    SpectrumResult empty;
    empty.rank.theta = theta;
    empty.rank.singular = svd(ms.d[0]).all_singular;
    return empty;
  }

  SpectrumResult result = eigs_simple(ms.d[0], ms.d[1], theta);

  bool all_points = !data.functionals.empty();
  for (const auto& f : data.functionals)
    if (f.kind != Functional::Kind::Point) all_points = false;
  if (all_points && result.coeffs.size() > 0)
    result.eigenfunctions = reconstruct_eigenfunctions(result.coeffs, data, grid);

  filter_and_diagnose(result, contour, &pencil, &grid, &bc);
  return result;
}

}  // namespace nevp
