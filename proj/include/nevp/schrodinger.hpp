#ifndef NEVP_SCHRODINGER_HPP
#define NEVP_SCHRODINGER_HPP

#include <functional>
#include <vector>

#include "nevp/contour.hpp"
#include "nevp/extract.hpp"
#include "nevp/pencil.hpp"

namespace nevp {

/// Real potential of the operator -u'' + V u on the line, with a decay
/// descriptor used to justify interval truncation.
struct Potential {
  enum class Kind { Zero, PoschlTeller, SquareWell, Custom };
  Kind kind = Kind::Zero;
  std::function<double(double)> v;
  double decay_rate = 0.0;     ///< exponential tail rate; 0 = compact support
  double support_bound = 0.0;  ///< |x| beyond which the tail bound applies

  static Potential zero();
  /// V(x) = -depth * sech^2(x); depth = 2 has the single bound state -1.
  static Potential poschl_teller(double depth);
  /// V(x) = -depth on |x| < half_width, 0 outside.
  static Potential square_well(double depth, double half_width);
  static Potential custom(std::function<double(double)> v, double decay_rate,
                          double support_bound);

  double operator()(double x) const { return v(x); }
};

/// Branch of the square root with a cut on [0, infinity): Im sqrt > 0.
/// Throws InputError for lambda on the cut.
Complex sqrt_upper(Complex lambda);

/// Solutions decaying at +inf (u_plus ~ e^{+i sqrt(lambda) x}) and at -inf
/// (u_minus ~ e^{-i sqrt(lambda) x}) of -u'' + V u = lambda u, integrated
/// across the whole truncation interval so both are available everywhere.
/// Rows of the grid functions are (u, u').
struct JostPair {
  Complex lambda;
  Complex sqrt_lambda;
  GridFunction y_plus;   ///< from e^{i sqrt(lambda) x_plus} (1, i sqrt(lambda))
  GridFunction y_minus;  ///< from e^{-i sqrt(lambda) x_minus} (1, -i sqrt(lambda))
  Complex wronskian = 0.0;        ///< W(u_minus, u_plus) = u_- u_+' - u_-' u_+
  double wronskian_spread = 0.0;  ///< max relative variation over x
  double log_scale_plus = 0.0;    ///< overflow-guard log factors (0 normally)
  double log_scale_minus = 0.0;
};

JostPair jost(const Potential& pot, Complex lambda, double cutoff_minus = -20.0,
              double cutoff_plus = 20.0, double step = 0.01);

/// Wronskian along a list of spectral points, with the x-independence check
/// of each sample enforced.
std::vector<std::pair<Complex, Complex>> wronskian_trace(
    const Potential& pot, const std::vector<Complex>& lambdas,
    double cutoff_minus = -20.0, double cutoff_plus = 20.0, double step = 0.01);

struct ResidueData {
  Complex lambda_n;
  Complex rho;    ///< residue of 1 / W at lambda_n
  Complex c;      ///< proportionality u_+(lambda_n, .) = c * u_-(lambda_n, .)
  double radius;  ///< small-circle radius used for the quadrature
};

ResidueData residue(const Potential& pot, Complex lambda_n, double radius = 0.1,
                    double cutoff_minus = -20.0, double cutoff_plus = 20.0,
                    double step = 0.01, int node_count = 32);

/// First-order pencil -y' + A(lambda, x) y with A = [[0,1],[V-lambda,0]],
/// d = 2, k = 1.
OdePencil schrodinger_pencil(const Potential& pot);

/// Cross-validation of the simple-pole structure of the probe matrix near an
/// eigenvalue: the limit of (lambda - lambda_n) E(lambda) computed through the
/// resolvent path is compared against the rank-one prediction
/// rho_n * (integral y_-^T w_hat_j) * (integral y_+^perp v_hat_k) from Jost
/// data, with v^perp = (-v_2, v_1).
struct SingularPartReport {
  CMatrix fitted;     ///< limit of (lambda - lambda_n) E(lambda), m x l
  CMatrix predicted;  ///< Jost-side rank-one matrix, m x l
  double mismatch = 0.0;    ///< relative difference, global sign absorbed
  double rank_ratio = 0.0;  ///< sigma_2 / sigma_1 of the fitted matrix
};

SingularPartReport singular_part_check(const Potential& pot, const TestData& data,
                                       Complex lambda_n, const Grid& grid,
                                       double offset_radius = 1e-3,
                                       int offset_count = 8);

/// Full pipeline on the first-order Schroedinger pencil.
SpectrumResult spectrum_via_contour(const Potential& pot, const Contour& contour,
                                    const Grid& grid, const BoundaryConditionSpec& bc,
                                    const TestData& data, double theta = 1e-8,
                                    int workers = 1);

}  // namespace nevp

#endif
