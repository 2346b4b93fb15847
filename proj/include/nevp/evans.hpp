#ifndef NEVP_EVANS_HPP
#define NEVP_EVANS_HPP

#include <utility>
#include <vector>

#include "nevp/contour.hpp"
#include "nevp/pencil.hpp"

namespace nevp {

/// Bases at x = 0 of the solution subspaces decaying at +inf (P, k columns)
/// and at -inf (Q, d - k columns).  Frames built by integration are
/// re-orthonormalized each step; the accumulated positive-real scaling is kept
/// as a log so determinant arguments (winding) are unaffected.
struct SubspaceFrame {
  Complex lambda;
  CMatrix p;  ///< d x k
  CMatrix q;  ///< d x (d - k)
  double log_scale_p = 0.0;
  double log_scale_q = 0.0;
  double half_length = 0.0;
  double step = 0.0;
  double min_sv_p = 0.0;  ///< smallest singular value of P (rank diagnostic)
  double min_sv_q = 0.0;

  static SubspaceFrame from_data(Complex lambda, CMatrix p, CMatrix q);
};

/// Integrate the pencil's solutions from +-half_length toward 0 starting from
/// the asymptotic stable/unstable bases.  initial_plus / initial_minus can
/// override the automatically computed V_+^s / V_-^u (used for contour-aligned
/// traversals); pass empty matrices to use the splitting.
SubspaceFrame subspace_frame(const OdePencil& pencil, Complex lambda,
                             double half_length, double step,
                             const CMatrix& initial_plus = CMatrix(),
                             const CMatrix& initial_minus = CMatrix());

/// Evans determinant det(P | Q) of the stored (frame-relative) bases.
Complex evans(const SubspaceFrame& frame);

/// Normalized Evans determinant: both frames rescaled so det(P^T P) = 1
/// (bilinear transpose, not conjugate); defined up to a global sign.
Complex normalized_evans(const SubspaceFrame& frame);

/// Quasi-projectors from the adjugate partition adj(P|Q) = (R^T; S^T):
/// Y_U = P R^T, Y_V = Q S^T, with Y_U + Y_V = evans * I and Y^2 = evans * Y.
std::pair<CMatrix, CMatrix> quasi_projectors(const SubspaceFrame& frame);

/// Derivative of the Evans determinant at a simple zero lambda0 via
/// v0^T adj(P|Q) (P'|Q') v0, frames at lambda0 +- delta aligned to the center
/// frame before differencing.
Complex evans_derivative(const OdePencil& pencil, Complex lambda0, double half_length,
                         double step, double delta);

/// Frame-level form of the derivative: central differences of the given
/// side frames (already gauge-consistent with the center frame).
Complex evans_derivative_frames(const SubspaceFrame& center, const SubspaceFrame& plus,
                                const SubspaceFrame& minus, double delta);

struct WindingResult {
  int winding = 0;
  double drift = 0.0;      ///< distance of the raw argument sum / 2 pi from an integer
  double min_abs = 0.0;    ///< min |evans| along the contour nodes
  std::vector<Complex> trace;  ///< evans values per node (frame-relative)
};

/// Argument-principle count of Evans zeros inside the contour, with bases
/// aligned node to node.  Throws NumericalError when the winding is
/// inconclusive (drift > 0.1) or the Evans value nearly vanishes on a node.
WindingResult winding_number(const OdePencil& pencil, const Contour& contour,
                             double half_length, double step);

}  // namespace nevp

#endif
