#ifndef NEVP_BVP_HPP
#define NEVP_BVP_HPP

#include <functional>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "nevp/numkernel.hpp"
#include "nevp/pencil.hpp"

namespace nevp {

/// Uniform grid on [xmin, xmax] with n intervals (n + 1 nodes).
struct Grid {
  double xmin = 0.0;
  double xmax = 0.0;
  int n = 0;

  static Grid from_step(double xmin, double xmax, double step);

  double h() const { return (xmax - xmin) / n; }
  int size() const { return n + 1; }
  double node(int i) const { return xmin + i * h(); }

  /// Index of the node coinciding with x (tolerance 1e-9 * h); -1 if none.
  int index_of(double x) const;

  /// Nearest node index, clamped to [0, n].
  int index_of_nearest(double x) const;
};

/// Vector-valued function sampled on a grid; values is d x (n + 1).
struct GridFunction {
  Grid grid;
  CMatrix values;

  GridFunction() = default;
  GridFunction(const Grid& g, int d) : grid(g), values(CMatrix::Zero(d, g.size())) {}

  int dim() const { return static_cast<int>(values.rows()); }
  double norm() const { return values.norm(); }

  /// Sample a continuous function at the grid nodes.
  static GridFunction sample(const Grid& g, int d,
                             const std::function<CVector(double)>& f);
};

enum class BcKind { Projection, Periodic, Custom };

/// Boundary condition R_-(lambda) y(xmin) + R_+(lambda) y(xmax) = 0.
struct BoundaryConditionSpec {
  BcKind kind = BcKind::Projection;
  /// Only for Custom: evaluator returning (R_-, R_+).
  std::function<std::pair<CMatrix, CMatrix>(Complex)> custom;

  static BoundaryConditionSpec projection() { return {BcKind::Projection, nullptr}; }
  static BoundaryConditionSpec periodic() { return {BcKind::Periodic, nullptr}; }
};

std::string to_string(BcKind kind);

/// Projection boundary matrices built from the asymptotic splitting at lambda:
/// with (V^s | V^u)^{-1} = (L^s; L^u), R_- = (L_-^s; 0), R_+ = (0; L_+^u).
std::pair<CMatrix, CMatrix> build_projection_bc(const OdePencil& pencil, Complex lambda);

/// Periodic boundary matrices (I, -I).
std::pair<CMatrix, CMatrix> build_periodic_bc(int d);

/// Resolve a BoundaryConditionSpec into concrete matrices at lambda.
std::pair<CMatrix, CMatrix> boundary_matrices(const OdePencil& pencil,
                                              const BoundaryConditionSpec& bc,
                                              Complex lambda);

/// Trapezoidal (box scheme) discretization of
///   F(lambda) y = -y' + A(lambda, x) y = v  on the grid,
///   R_- y(xmin) + R_+ y(xmax) = 0,
/// factorized once and reusable across right-hand sides.
class DiscreteSystem {
 public:
  DiscreteSystem(const OdePencil& pencil, Complex lambda, const Grid& grid,
                 const BoundaryConditionSpec& bc);

  Complex lambda() const { return lambda_; }
  const Grid& grid() const { return grid_; }
  bool factorized() const { return solver_->factorized(); }

  GridFunction solve(const GridFunction& rhs) const;
  std::vector<GridFunction> solve_many(const std::vector<GridFunction>& rhs) const;

  /// Relative residual of the discrete equations for a candidate solution.
  double residual(const GridFunction& y, const GridFunction& rhs) const;

  /// Residual treating y as a candidate eigenfunction (zero right-hand side),
  /// relative to ||y||.
  double eigen_residual(const GridFunction& y) const;

  /// Boundary defect ||R_- y(xmin) + R_+ y(xmax)||.
  double boundary_defect(const GridFunction& y) const;

 private:
  CVector pack_rhs(const GridFunction& rhs) const;

  Complex lambda_;
  Grid grid_;
  int d_;
  std::vector<CMatrix> coeffs_;  ///< A(lambda, x_i) per node
  CMatrix rminus_, rplus_;
  std::shared_ptr<BlockSystemSolver> solver_;
};

}  // namespace nevp

#endif
