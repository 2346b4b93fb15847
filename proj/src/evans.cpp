#include "nevp/evans.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include <Eigen/SVD>

#include "nevp/numkernel.hpp"

namespace nevp {

namespace {

double min_singular(const CMatrix& m) {
  if (m.cols() == 0) return 0.0;
  Eigen::JacobiSVD<CMatrix> dec(m);
  return dec.singularValues()(dec.singularValues().size() - 1);
}

// Modified Gram-Schmidt with positive-real diagonal; returns log det R.
double orthonormalize(CMatrix& y) {
  double log_det = 0.0;
  for (Eigen::Index j = 0; j < y.cols(); ++j) {
    for (Eigen::Index i = 0; i < j; ++i)
      y.col(j) -= (y.col(i).adjoint() * y.col(j)).value() * y.col(i);
    const double nrm = y.col(j).norm();
    if (!(nrm > 1e-300))
      throw NumericalError(
          "frame integration lost column independence; reduce the step size");
    y.col(j) /= nrm;
    log_det += std::log(nrm);
  }
  return log_det;
}

// Integrate Y' = A(lambda, x) Y from x_start to 0 with the box scheme,
// re-orthonormalizing each step.  Returns the frame at 0 and the accumulated
// log of the (positive real) orthonormalization determinants.
std::pair<CMatrix, double> integrate_frame(const OdePencil& pencil, Complex lambda,
                                           double x_start, double step,
                                           const CMatrix& initial) {
  const int d = pencil.d;
  const int steps = std::max(1, static_cast<int>(std::lround(std::abs(x_start) / step)));
  const double delta = -x_start / steps;  // signed step toward 0
  CMatrix y = initial;
  double log_scale = orthonormalize(y);
  const CMatrix id = CMatrix::Identity(d, d);
  CMatrix a_cur = pencil.coeff(lambda, x_start);
  for (int i = 0; i < steps; ++i) {
    const double x_next = x_start + (i + 1) * delta;
    CMatrix a_next = pencil.coeff(lambda, x_next);
    CMatrix lhs = id - 0.5 * delta * a_next;
    CMatrix rhs = (id + 0.5 * delta * a_cur) * y;
    y = lhs.partialPivLu().solve(rhs);
    log_scale += orthonormalize(y);
    a_cur = std::move(a_next);
  }
  return {y, log_scale};
}

}  // namespace

SubspaceFrame SubspaceFrame::from_data(Complex lambda, CMatrix p, CMatrix q) {
  SubspaceFrame f;
  f.lambda = lambda;
  f.p = std::move(p);
  f.q = std::move(q);
  f.min_sv_p = min_singular(f.p);
  f.min_sv_q = min_singular(f.q);
  return f;
}

SubspaceFrame subspace_frame(const OdePencil& pencil, Complex lambda,
                             double half_length, double step,
                             const CMatrix& initial_plus, const CMatrix& initial_minus) {
  if (!(half_length > 0.0) || !(step > 0.0))
    throw InputError("subspace frame: half_length and step must be positive");
  CMatrix vp = initial_plus, vm = initial_minus;
  if (vp.size() == 0 || vm.size() == 0) {
    Splitting s = asymptotic_splitting(pencil, lambda);
    if (vp.size() == 0) vp = s.stable_plus;
    if (vm.size() == 0) vm = s.unstable_minus;
  }
  SubspaceFrame f;
  f.lambda = lambda;
  f.half_length = half_length;
  f.step = step;
  std::tie(f.p, f.log_scale_p) = integrate_frame(pencil, lambda, half_length, step, vp);
  std::tie(f.q, f.log_scale_q) = integrate_frame(pencil, lambda, -half_length, step, vm);
  f.min_sv_p = min_singular(f.p);
  f.min_sv_q = min_singular(f.q);
  return f;
}

namespace {

CMatrix concat(const SubspaceFrame& f) {
  CMatrix m(f.p.rows(), f.p.cols() + f.q.cols());
  m << f.p, f.q;
  return m;
}

}  // namespace

Complex evans(const SubspaceFrame& frame) { return cofactor_determinant(concat(frame)); }

Complex normalized_evans(const SubspaceFrame& frame) {
  auto rescale = [](const CMatrix& m) {
    const Complex det = cofactor_determinant(m.transpose() * m);
    if (std::abs(det) < 1e-12)
      throw NumericalError(
          "normalized Evans undefined here: det of the bilinear frame Gramian "
          "vanishes (degenerate-pairing set)");
    CMatrix out = m;
    out.col(0) *= std::pow(det, -0.5);
    return out;
  };
  SubspaceFrame f0 = frame;
  f0.p = rescale(frame.p);
  f0.q = rescale(frame.q);
  return evans(f0);
}

std::pair<CMatrix, CMatrix> quasi_projectors(const SubspaceFrame& frame) {
  const Eigen::Index k = frame.p.cols();
  CMatrix adj = adjugate(concat(frame));
  CMatrix rt = adj.topRows(k);
  CMatrix st = adj.bottomRows(adj.rows() - k);
  return {frame.p * rt, frame.q * st};
}

Complex evans_derivative_frames(const SubspaceFrame& center, const SubspaceFrame& plus,
                                const SubspaceFrame& minus, double delta) {
  CMatrix m0 = concat(center);
  Eigen::JacobiSVD<CMatrix> dec(m0, Eigen::ComputeFullV);
  const auto& sv = dec.singularValues();
  const Eigen::Index d = m0.rows();
  int small = 0;
  for (Eigen::Index i = 0; i < d; ++i)
    if (sv(i) < 1e-4 * sv(0)) ++small;
  if (small != 1)
    throw NumericalError("Evans derivative: zero of the determinant is not simple "
                         "(kernel dimension != 1 at the requested tolerance)");
  CVector v0 = dec.matrixV().col(d - 1);
  const Complex bilinear = (v0.transpose() * v0).value();
  if (std::abs(bilinear) < 1e-12)
    throw NumericalError("Evans derivative: kernel vector is bilinearly isotropic");
  v0 /= std::sqrt(bilinear);
  CMatrix dm = (concat(plus) - concat(minus)) / (2.0 * delta);
  return (v0.transpose() * adjugate(m0) * dm * v0).value();
}

Complex evans_derivative(const OdePencil& pencil, Complex lambda0, double half_length,
                         double step, double delta) {
  Splitting s0 = asymptotic_splitting(pencil, lambda0);
  SubspaceFrame f0 = subspace_frame(pencil, lambda0, half_length, step, s0.stable_plus,
                                    s0.unstable_minus);
  auto side_frame = [&](Complex lambda) {
    Splitting s = asymptotic_splitting(pencil, lambda);
    CMatrix vp = align_bases(s0.stable_plus, s.stable_plus);
    CMatrix vm = align_bases(s0.unstable_minus, s.unstable_minus);
    return subspace_frame(pencil, lambda, half_length, step, vp, vm);
  };
  return evans_derivative_frames(f0, side_frame(lambda0 + delta),
                                 side_frame(lambda0 - delta), delta);
}

WindingResult winding_number(const OdePencil& pencil, const Contour& contour,
                             double half_length, double step) {
  const auto node_list = contour.nodes();
  const int count = static_cast<int>(node_list.size());
  WindingResult out;
  out.trace.reserve(count);

  CMatrix vp, vm;
  double max_abs = 0.0;
  for (int j = 0; j < count; ++j) {
    const Complex lambda = node_list[j].first;
    Splitting s = asymptotic_splitting(pencil, lambda);
    vp = (j == 0) ? s.stable_plus : align_bases(vp, s.stable_plus);
    vm = (j == 0) ? s.unstable_minus : align_bases(vm, s.unstable_minus);
    SubspaceFrame f = subspace_frame(pencil, lambda, half_length, step, vp, vm);
    const Complex e = evans(f);
    out.trace.push_back(e);
    max_abs = std::max(max_abs, std::abs(e));
  }
  // Close the loop: revisit node 0 with the alignment continued from the end.
  {
    const Complex lambda = node_list[0].first;
    Splitting s = asymptotic_splitting(pencil, lambda);
    vp = align_bases(vp, s.stable_plus);
    vm = align_bases(vm, s.unstable_minus);
    SubspaceFrame f = subspace_frame(pencil, lambda, half_length, step, vp, vm);
    out.trace.push_back(evans(f));
  }

  out.min_abs = std::abs(out.trace[0]);
  for (const auto& e : out.trace) out.min_abs = std::min(out.min_abs, std::abs(e));
  if (out.min_abs < 1e-12 * std::max(max_abs, 1e-300))
    throw NumericalError(
        "winding inconclusive: Evans value nearly vanishes on the contour");

  double total = 0.0;
  for (int j = 0; j < count; ++j)
    total += std::arg(out.trace[j + 1] / out.trace[j]);
  const double turns = total / (2.0 * std::numbers::pi);
  out.winding = static_cast<int>(std::lround(turns));
  out.drift = std::abs(turns - out.winding);
  if (out.drift > 0.1)
    throw NumericalError(
        "winding inconclusive: argument drift exceeds 0.1 turns; increase the "
        "number of contour nodes");
  return out;
}

}  // namespace nevp
