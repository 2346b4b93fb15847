#ifndef NEVP_CONFIG_HPP
#define NEVP_CONFIG_HPP

#include <string>
#include <vector>

#include "nevp/types.hpp"

namespace nevp {

/// Flat run configuration parsed from an INI-style file with [section]
/// headers and key = value lines; '#' starts a comment.  Unknown sections or
/// keys are errors, as are non-positive or unordered numeric fields.
struct RunConfig {
  // [problem]
  std::string problem = "schrodinger";  ///< matrix-pencil | schrodinger | fhn

  // [contour]
  double contour_center_re = 0.0;
  double contour_center_im = 0.0;
  double contour_radius = 1.0;
  int contour_points = 64;

  // [grid]
  double grid_min = -20.0;
  double grid_max = 20.0;
  double grid_step = 0.01;

  // [bc]
  std::string bc = "projection";  ///< projection | periodic

  // [testdata]
  int functional_count = 401;
  int rhs_count = 10;
  unsigned seed = 1;
  int hat_basis_size = 40;

  // [extraction]
  double theta = 1e-8;
  int kappa = -1;        ///< >= 0 prescribes the rank
  int hankel_k = 1;      ///< K > 1 switches to the block-Hankel variant

  // [run]
  int workers = 1;
  std::string out_dir = "out";

  // [schrodinger]
  std::string potential = "poschl-teller";  ///< zero | poschl-teller | square-well
  double potential_depth = 2.0;
  double potential_width = 1.0;

  // [fhn]
  double fhn_a = 0.7;
  double fhn_b = 0.8;
  double fhn_phi = 0.08;
  double fhn_c_init = -0.51;

  // [sweep]
  std::string sweep_kind;            ///< interval | quadrature | rank
  std::vector<double> sweep_values;  ///< comma-separated list in the file

  // [evans]
  double evans_half_length = 20.0;
  double evans_step = 0.01;
};

/// Parse and validate; throws InputError with file/line context on malformed
/// input, unknown keys, or invalid values.
RunConfig parse_config_text(const std::string& text, const std::string& origin = "<config>");
RunConfig parse_config_file(const std::string& path);

}  // namespace nevp

#endif
