#include "nevp/contour.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>
#include <thread>

namespace nevp {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

Contour Contour::circle(Complex center, double radius, int node_count) {
  if (!(radius > 0.0)) throw InputError("contour: radius must be positive");
  if (node_count < 2) throw InputError("contour: need at least 2 nodes");
  Contour c;
  c.kind = Kind::Circle;
  c.center = center;
  c.radius = radius;
  c.node_count = node_count;
  return c;
}

Contour Contour::parametric(std::function<Complex(double)> path,
                            std::function<Complex(double)> path_deriv, int node_count) {
  if (!path || !path_deriv) throw InputError("contour: parametric evaluators required");
  if (node_count < 2) throw InputError("contour: need at least 2 nodes");
  Contour c;
  c.kind = Kind::Parametric;
  c.path = std::move(path);
  c.path_deriv = std::move(path_deriv);
  c.node_count = node_count;
  return c;
}

std::vector<std::pair<Complex, Complex>> Contour::nodes() const {
  std::vector<std::pair<Complex, Complex>> out;
  out.reserve(node_count);
  for (int j = 0; j < node_count; ++j) {
    const double t = kTwoPi * j / node_count;
    if (kind == Kind::Circle) {
      const Complex e = std::polar(1.0, t);
      out.emplace_back(center + radius * e, radius * e / static_cast<double>(node_count));
    } else {
      out.emplace_back(path(t), path_deriv(t) / (Complex(0.0, 1.0) *
                                                 static_cast<double>(node_count)));
    }
  }
  return out;
}

bool Contour::contains(Complex lambda) const {
  if (kind == Kind::Circle) return std::abs(lambda - center) < radius;
  // Polygonal winding number of the sampled path about lambda.
  const int samples = std::max(node_count, 256);
  double total = 0.0;
  Complex prev = path(0.0) - lambda;
  for (int j = 1; j <= samples; ++j) {
    const Complex cur = path(kTwoPi * j / samples) - lambda;
    total += std::arg(cur / prev);
    prev = cur;
  }
  return std::lround(total / kTwoPi) != 0;
}

double Contour::scale() const {
  if (kind == Kind::Circle) return radius;
  double r = 0.0;
  Complex mean(0.0, 0.0);
  const int samples = 64;
  for (int j = 0; j < samples; ++j) mean += path(kTwoPi * j / samples);
  mean /= static_cast<double>(samples);
  for (int j = 0; j < samples; ++j)
    r = std::max(r, std::abs(path(kTwoPi * j / samples) - mean));
  return r;
}

Functional Functional::point(double x0, int component) {
  Functional f;
  f.kind = Kind::Point;
  f.x0 = x0;
  f.component = component;
  f.support_lo = f.support_hi = x0;
  return f;
}

Functional Functional::density_fn(std::function<CVector(double)> fn, double lo, double hi) {
  Functional f;
  f.kind = Kind::Density;
  f.density = std::move(fn);
  f.support_lo = lo;
  f.support_hi = hi;
  return f;
}

Complex Functional::apply(const GridFunction& y) const {
  if (kind == Kind::Point) {
    const int i = y.grid.index_of(x0);
    if (i < 0) {
      std::ostringstream os;
      os << "point functional at x = " << x0
         << " does not coincide with a grid node (no interpolation is done)";
      throw InputError(os.str());
    }
    if (component < 0 || component >= y.dim())
      throw InputError("point functional: component out of range");
    return y.values(component, i);
  }
  // Bilinear pairing: trapezoid of density(x)^T y(x) over the support.
  const Grid& g = y.grid;
  Complex acc(0.0, 0.0);
  for (int i = 0; i <= g.n; ++i) {
    const double x = g.node(i);
    if (x < support_lo - g.h() || x > support_hi + g.h()) continue;
    const double w = (i == 0 || i == g.n) ? 0.5 : 1.0;
    acc += w * (density(x).transpose() * y.values.col(i)).value();
  }
  return acc * g.h();
}

double hat(double x, double center, double halfwidth) {
  return std::max(0.0, 1.0 - std::abs(x - center) / halfwidth);
}

TestData TestData::random_hats(int d, int l, unsigned seed, int basis_size, double lo,
                               double hi) {
  if (d < 1 || l < 1 || basis_size < 2)
    throw InputError("test data: require d >= 1, l >= 1, basis_size >= 2");
  std::mt19937 gen(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double spacing = (hi - lo) / (basis_size - 1);
  TestData td;
  // Edge hats extend one spacing beyond the outermost centers.
  td.rhs_support_lo = lo - spacing;
  td.rhs_support_hi = hi + spacing;
  td.rhs.reserve(l);
  for (int k = 0; k < l; ++k) {
    RMatrix coeffs(d, basis_size);
    for (int c = 0; c < d; ++c)
      for (int j = 0; j < basis_size; ++j) coeffs(c, j) = normal(gen);
    td.rhs.push_back([coeffs, d, basis_size, lo, spacing](double x) {
      CVector v = CVector::Zero(d);
      for (int c = 0; c < d; ++c) {
        double acc = 0.0;
        for (int j = 0; j < basis_size; ++j)
          acc += coeffs(c, j) * hat(x, lo + j * spacing, spacing);
        v(c) = acc;
      }
      return v;
    });
  }
  return td;
}

namespace {

void check_supports(const Grid& grid, const TestData& data) {
  for (const auto& f : data.functionals) {
    if (f.support_lo < grid.xmin - 1e-12 || f.support_hi > grid.xmax + 1e-12)
      throw InputError("functional support lies outside the grid");
    if (f.kind == Functional::Kind::Point && grid.index_of(f.x0) < 0)
      throw InputError("point functional abscissa is not a grid node");
  }
  if (data.rhs_support_lo < grid.xmin || data.rhs_support_hi > grid.xmax)
    throw InputError("right-hand-side support lies outside the grid");
}

}  // namespace

SampleSet assemble_samples(const OdePencil& pencil, const Grid& grid,
                           const BoundaryConditionSpec& bc, const TestData& data,
                           const Contour& contour, int workers) {
  if (data.m() < 1 || data.l() < 1) throw InputError("assemble: empty test data");
  check_supports(grid, data);
  const auto node_list = contour.nodes();
  const int node_count = static_cast<int>(node_list.size());

  // Right-hand sides are lambda-independent grid functions; sample once.
  std::vector<GridFunction> rhs;
  rhs.reserve(data.l());
  for (const auto& f : data.rhs) rhs.push_back(GridFunction::sample(grid, pencil.d, f));

  SampleSet out;
  out.lambdas.resize(node_count);
  out.weights.resize(node_count);
  out.values.resize(node_count);
  out.residuals.resize(node_count);

  std::vector<std::exception_ptr> errors(node_count);
  auto process = [&](int j) {
    try {
      const auto [lambda, weight] = node_list[j];
      DiscreteSystem sys(pencil, lambda, grid, bc);
      CMatrix e(data.m(), data.l());
      double worst = 0.0;
      for (int k = 0; k < data.l(); ++k) {
        GridFunction y = sys.solve(rhs[k]);
        worst = std::max(worst, sys.residual(y, rhs[k]));
        for (int jm = 0; jm < data.m(); ++jm) e(jm, k) = data.functionals[jm].apply(y);
      }
      out.lambdas[j] = lambda;
      out.weights[j] = weight;
      out.values[j] = std::move(e);
      out.residuals[j] = worst;
    } catch (...) {
      errors[j] = std::current_exception();
    }
  };

  const int nthreads = std::max(1, std::min(workers, node_count));
  if (nthreads == 1) {
    for (int j = 0; j < node_count; ++j) process(j);
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < nthreads; ++t)
      pool.emplace_back([&, t] {
        for (int j = t; j < node_count; j += nthreads) process(j);
      });
    for (auto& th : pool) th.join();
  }
  // Deterministic node order regardless of completion order; first error wins.
  for (int j = 0; j < node_count; ++j)
    if (errors[j]) std::rethrow_exception(errors[j]);
  return out;
}

SampleSet assemble_samples(const MatrixPencil& pencil, const CMatrix& w_hats,
                           const CMatrix& v_hats, const Contour& contour) {
  if (w_hats.rows() != pencil.n || v_hats.rows() != pencil.n)
    throw InputError("assemble: probe matrices must have n rows");
  SampleSet out;
  for (const auto& [lambda, weight] : contour.nodes()) {
    EvaluatedOperator op = evaluate(pencil, lambda);
    CMatrix y(pencil.n, v_hats.cols());
    for (Eigen::Index k = 0; k < v_hats.cols(); ++k) y.col(k) = op.solve(v_hats.col(k));
    out.lambdas.push_back(lambda);
    out.weights.push_back(weight);
    out.values.push_back(w_hats.transpose() * y);  // bilinear pairing
    out.residuals.push_back(0.0);
  }
  return out;
}

MomentSet moments(const SampleSet& samples, int big_k) {
  if (big_k < 1) throw InputError("moments: K >= 1 required");
  if (samples.values.empty()) throw InputError("moments: empty sample set");
  MomentSet ms;
  ms.d.assign(2 * big_k, CMatrix::Zero(samples.values[0].rows(), samples.values[0].cols()));
  for (size_t j = 0; j < samples.values.size(); ++j) {
    Complex power(1.0, 0.0);
    for (int nu = 0; nu < 2 * big_k; ++nu) {
      ms.d[nu] += samples.weights[j] * power * samples.values[j];
      power *= samples.lambdas[j];
    }
  }
  return ms;
}

CMatrix align_bases(const CMatrix& previous, const CMatrix& current) {
  if (previous.rows() != current.rows() || previous.cols() != current.cols())
    throw InputError("align: frame shapes differ");
  const Eigen::Index k = current.cols();
  CMatrix overlap = previous.adjoint() * current;
  // Defensive normalization against non-unit columns.
  for (Eigen::Index j = 0; j < k; ++j) {
    const double np = previous.col(j).norm(), nc = current.col(j).norm();
    if (np > 0.0 && nc > 0.0) overlap.col(j) /= nc;
    if (np > 0.0) overlap.row(j) /= np;
  }
  CMatrix out(current.rows(), k);
  std::vector<bool> used_prev(k, false), used_cur(k, false);
  for (Eigen::Index pass = 0; pass < k; ++pass) {
    double best = -1.0;
    Eigen::Index bi = -1, bj = -1;
    for (Eigen::Index i = 0; i < k; ++i) {
      if (used_prev[i]) continue;
      for (Eigen::Index j = 0; j < k; ++j) {
        if (used_cur[j]) continue;
        if (std::abs(overlap(i, j)) > best) {
          best = std::abs(overlap(i, j));
          bi = i;
          bj = j;
        }
      }
    }
    if (best < 0.5)
      throw NumericalError(
          "contour too coarse for base tracking (frame overlap below 0.5)");
    used_prev[bi] = used_cur[bj] = true;
    const Complex phase = overlap(bi, bj) / std::abs(overlap(bi, bj));
    out.col(bi) = current.col(bj) * std::conj(phase);
  }
  return out;
}

}  // namespace nevp
