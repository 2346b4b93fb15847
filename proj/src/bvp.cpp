#include "nevp/bvp.hpp"

#include <cmath>
#include <sstream>

namespace nevp {

Grid Grid::from_step(double xmin, double xmax, double step) {
  if (!(xmax > xmin) || !(step > 0.0))
    throw InputError("grid: require xmax > xmin and step > 0");
  Grid g;
  g.xmin = xmin;
  g.xmax = xmax;
  g.n = static_cast<int>(std::lround((xmax - xmin) / step));
  if (g.n < 1) throw InputError("grid: fewer than two nodes");
  return g;
}

int Grid::index_of(double x) const {
  const double t = (x - xmin) / h();
  const int i = static_cast<int>(std::lround(t));
  if (i < 0 || i > n || std::abs(t - i) > 1e-9) return -1;
  return i;
}

int Grid::index_of_nearest(double x) const {
  const int i = static_cast<int>(std::lround((x - xmin) / h()));
  return std::max(0, std::min(n, i));
}

GridFunction GridFunction::sample(const Grid& g, int d,
                                  const std::function<CVector(double)>& f) {
  GridFunction gf(g, d);
  for (int i = 0; i <= g.n; ++i) gf.values.col(i) = f(g.node(i));
  return gf;
}

std::string to_string(BcKind kind) {
  switch (kind) {
    case BcKind::Projection: return "projection";
    case BcKind::Periodic: return "periodic";
    case BcKind::Custom: return "custom";
  }
  return "unknown";
}

std::pair<CMatrix, CMatrix> build_projection_bc(const OdePencil& pencil, Complex lambda) {
  Splitting s = asymptotic_splitting(pencil, lambda);
  const int d = pencil.d;
  const int k = pencil.k;
  const double cond_limit = 1e10;
  if (s.cond_minus > cond_limit || s.cond_plus > cond_limit) {
    std::ostringstream os;
    os << "projection bc: ill-conditioned splitting at lambda = " << lambda
       << " (cond- = " << s.cond_minus << ", cond+ = " << s.cond_plus << ")";
    throw NumericalError(os.str());
  }
  CMatrix wm(d, d), wp(d, d);
  wm << s.stable_minus, s.unstable_minus;
  wp << s.stable_plus, s.unstable_plus;
  CMatrix lm = wm.inverse();  // rows: (L_-^s; L_-^u)
  CMatrix lp = wp.inverse();
  CMatrix rminus = CMatrix::Zero(d, d);
  CMatrix rplus = CMatrix::Zero(d, d);
  rminus.topRows(k) = lm.topRows(k);       // L_-^s
  rplus.bottomRows(d - k) = lp.bottomRows(d - k);  // L_+^u
  return {rminus, rplus};
}

std::pair<CMatrix, CMatrix> build_periodic_bc(int d) {
  return {CMatrix::Identity(d, d), -CMatrix::Identity(d, d)};
}

std::pair<CMatrix, CMatrix> boundary_matrices(const OdePencil& pencil,
                                              const BoundaryConditionSpec& bc,
                                              Complex lambda) {
  switch (bc.kind) {
    case BcKind::Projection: return build_projection_bc(pencil, lambda);
    case BcKind::Periodic: return build_periodic_bc(pencil.d);
    case BcKind::Custom:
      if (!bc.custom) throw InputError("custom bc: no evaluator supplied");
      return bc.custom(lambda);
  }
  throw InputError("bc: unknown kind");
}

DiscreteSystem::DiscreteSystem(const OdePencil& pencil, Complex lambda, const Grid& grid,
                               const BoundaryConditionSpec& bc)
    : lambda_(lambda), grid_(grid), d_(pencil.d) {
  const int n = grid.n;
  const int d = d_;
  const double h = grid.h();
  coeffs_.reserve(n + 1);
  for (int i = 0; i <= n; ++i) coeffs_.push_back(pencil.coeff(lambda, grid.node(i)));
  std::tie(rminus_, rplus_) = boundary_matrices(pencil, bc, lambda);

  // Box scheme for y' = A y - v:
  //   (I - h/2 A_{i+1}) y_{i+1} - (I + h/2 A_i) y_i = -h/2 (v_{i+1} + v_i),
  // one block row per interval, plus the boundary row
  //   R_- y_0 + R_+ y_n = 0.
  std::vector<Eigen::Triplet<Complex>> trips;
  trips.reserve(static_cast<size_t>(n) * 2 * d * d + 2 * d * d);
  auto put_block = [&](int row_block, int col_block, const CMatrix& b) {
    for (int r = 0; r < d; ++r)
      for (int c = 0; c < d; ++c)
        if (b(r, c) != Complex(0.0, 0.0))
          trips.emplace_back(row_block * d + r, col_block * d + c, b(r, c));
  };
  const CMatrix id = CMatrix::Identity(d, d);
  for (int i = 0; i < n; ++i) {
    put_block(i, i, -(id + 0.5 * h * coeffs_[i]));
    put_block(i, i + 1, id - 0.5 * h * coeffs_[i + 1]);
  }
  put_block(n, 0, rminus_);
  put_block(n, n, rplus_);
  solver_ = std::make_shared<BlockSystemSolver>(d * (n + 1), trips);
}

CVector DiscreteSystem::pack_rhs(const GridFunction& rhs) const {
  const int n = grid_.n;
  const int d = d_;
  const double h = grid_.h();
  if (rhs.dim() != d || rhs.grid.size() != grid_.size())
    throw InputError("solve_resolvent: rhs shape mismatch");
  CVector b = CVector::Zero(d * (n + 1));
  for (int i = 0; i < n; ++i)
    b.segment(i * d, d) = -0.5 * h * (rhs.values.col(i + 1) + rhs.values.col(i));
  return b;  // boundary row rhs is zero
}

GridFunction DiscreteSystem::solve(const GridFunction& rhs) const {
  CVector y = solver_->solve(pack_rhs(rhs));
  GridFunction out(grid_, d_);
  for (int i = 0; i <= grid_.n; ++i) out.values.col(i) = y.segment(i * d_, d_);
  return out;
}

std::vector<GridFunction> DiscreteSystem::solve_many(
    const std::vector<GridFunction>& rhs) const {
  std::vector<GridFunction> out;
  out.reserve(rhs.size());
  for (const auto& r : rhs) out.push_back(solve(r));
  return out;
}

double DiscreteSystem::residual(const GridFunction& y, const GridFunction& rhs) const {
  CVector packed(d_ * grid_.size());
  for (int i = 0; i <= grid_.n; ++i) packed.segment(i * d_, d_) = y.values.col(i);
  CVector b = pack_rhs(rhs);
  const double scale = std::max(b.norm(), 1e-300);
  return (solver_->apply(packed) - b).norm() / scale;
}

double DiscreteSystem::eigen_residual(const GridFunction& y) const {
  CVector packed(d_ * grid_.size());
  for (int i = 0; i <= grid_.n; ++i) packed.segment(i * d_, d_) = y.values.col(i);
  const double scale = std::max(packed.norm(), 1e-300);
  return solver_->apply(packed).norm() / scale;
}

double DiscreteSystem::boundary_defect(const GridFunction& y) const {
  return (rminus_ * y.values.col(0) + rplus_ * y.values.col(grid_.n)).norm();
}

}  // namespace nevp
