#ifndef NEVP_CONTOUR_HPP
#define NEVP_CONTOUR_HPP

#include <functional>
#include <optional>
#include <vector>

#include "nevp/bvp.hpp"
#include "nevp/pencil.hpp"

namespace nevp {

/// Closed analytic contour with a trapezoid quadrature rule: nodes lambda_j
/// and weights w_j such that (1 / 2 pi i) contour-integral f approx
/// sum_j w_j f(lambda_j).
struct Contour {
  enum class Kind { Circle, Parametric };
  Kind kind = Kind::Circle;
  Complex center;
  double radius = 0.0;
  int node_count = 100;
  std::function<Complex(double)> path;        ///< t in [0, 2 pi) -> lambda
  std::function<Complex(double)> path_deriv;  ///< d lambda / d t

  static Contour circle(Complex center, double radius, int node_count);
  static Contour parametric(std::function<Complex(double)> path,
                            std::function<Complex(double)> path_deriv, int node_count);

  std::vector<std::pair<Complex, Complex>> nodes() const;
  bool contains(Complex lambda) const;
  double scale() const;  ///< characteristic size (radius for circles)
};

/// A probe functional w_hat: either a point evaluation of one component or a
/// compactly supported density integrated against the solution (bilinear
/// pairing, no conjugation).
struct Functional {
  enum class Kind { Point, Density };
  Kind kind = Kind::Point;
  double x0 = 0.0;      ///< Point: abscissa (must land on a grid node)
  int component = 0;    ///< Point: state component index
  std::function<CVector(double)> density;  ///< Density: vector-valued weight
  double support_lo = 0.0, support_hi = 0.0;

  static Functional point(double x0, int component);
  static Functional density_fn(std::function<CVector(double)> f, double lo, double hi);

  Complex apply(const GridFunction& y) const;
};

/// Probe data: m functionals and l compactly supported right-hand sides.
struct TestData {
  std::vector<Functional> functionals;
  std::vector<std::function<CVector(double)>> rhs;  ///< x -> C^d
  double rhs_support_lo = 0.0, rhs_support_hi = 0.0;

  int m() const { return static_cast<int>(functionals.size()); }
  int l() const { return static_cast<int>(rhs.size()); }

  /// Random right-hand sides: independent standard-normal coefficients over a
  /// hat-function basis (basis_size hats per component on [lo, hi]).
  static TestData random_hats(int d, int l, unsigned seed, int basis_size = 40,
                              double lo = -5.0, double hi = 5.0);
};

/// Triangular hat of unit height: max{0, 1 - |x - center| / halfwidth}.
double hat(double x, double center, double halfwidth);

/// E(lambda_j) samples along a contour plus solver metadata.
struct SampleSet {
  std::vector<Complex> lambdas;
  std::vector<Complex> weights;
  std::vector<CMatrix> values;     ///< E(lambda_j), m x l
  std::vector<double> residuals;   ///< max relative BVP residual per node
};

/// BVP-backed assembly: E(lambda)_{jk} = <w_hat_j, y_k(lambda)> with
/// F_N(lambda) y_k = v_hat_k on the grid.
SampleSet assemble_samples(const OdePencil& pencil, const Grid& grid,
                           const BoundaryConditionSpec& bc, const TestData& data,
                           const Contour& contour, int workers = 1);

/// MatrixPencil path (no BVP): columns of w_hats / v_hats are the probe
/// vectors; E(lambda) = w_hats^T F(lambda)^{-1} v_hats (bilinear pairing).
SampleSet assemble_samples(const MatrixPencil& pencil, const CMatrix& w_hats,
                           const CMatrix& v_hats, const Contour& contour);

/// Moment matrices D_nu = sum_j w_j lambda_j^nu E(lambda_j), nu = 0..2K-1.
struct MomentSet {
  std::vector<CMatrix> d;  ///< size 2K
  int order_count() const { return static_cast<int>(d.size()); }
};

MomentSet moments(const SampleSet& samples, int big_k);

/// Phase/permutation alignment of a frame against the previous one along a
/// contour: columns permuted and rescaled by unit-modulus factors to maximize
/// overlap.  Throws NumericalError when the best overlap drops below 0.5.
CMatrix align_bases(const CMatrix& previous, const CMatrix& current);

}  // namespace nevp

#endif
