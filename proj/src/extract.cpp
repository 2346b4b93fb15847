#include "nevp/extract.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include "nevp/numkernel.hpp"

namespace nevp {

RankDecision rank_test(const RVector& singular_values, double theta) {
  if (singular_values.size() == 0) throw InputError("rank test: empty list");
  RankDecision r;
  r.theta = theta;
  r.singular = singular_values;
  if (!(singular_values(0) > 0.0)) return r;  // zero matrix: kappa = 0
  const double cutoff = theta * singular_values(0);
  int kappa = 0;
  while (kappa < singular_values.size() && singular_values(kappa) >= cutoff) ++kappa;
  r.kappa = kappa;
  r.gap = (kappa < singular_values.size() && singular_values(kappa) > 0.0)
              ? singular_values(kappa - 1) / singular_values(kappa)
              : std::numeric_limits<double>::infinity();
  return r;
}

namespace {

SpectrumResult extraction_core(const CMatrix& b0, const CMatrix& b1, double theta,
                               int fixed_kappa) {
  if (b0.rows() != b1.rows() || b0.cols() != b1.cols())
    throw InputError("extraction: moment matrices differ in shape");
  SpectrumResult out;
  SvdFactors f = svd(b0);
  if (fixed_kappa >= 0) {
    out.rank.theta = 0.0;
    out.rank.singular = f.all_singular;
    out.rank.kappa = std::min<int>(fixed_kappa, static_cast<int>(f.all_singular.size()));
    out.rank.gap =
        (out.rank.kappa < f.all_singular.size() && f.all_singular(out.rank.kappa) > 0.0)
            ? f.all_singular(out.rank.kappa - 1) / f.all_singular(out.rank.kappa)
            : std::numeric_limits<double>::infinity();
  } else {
    out.rank = rank_test(f.all_singular, theta);
  }
  const int kappa = out.rank.kappa;
  if (kappa == 0) return out;  // valid empty result
  if (kappa > std::min(b0.rows(), b0.cols()))
    throw InputError("extraction: kappa exceeds probe dimensions");

  CMatrix v0 = f.left.leftCols(kappa);
  CMatrix w0 = f.right.leftCols(kappa);
  RVector sigma = f.singular.head(kappa);
  const double eps = std::numeric_limits<double>::epsilon();
  if (sigma(kappa - 1) < 1e3 * eps * sigma(0)) out.ill_conditioned = true;

  CMatrix d = v0.adjoint() * b1 * w0 * sigma.cwiseInverse().asDiagonal();
  EigResult e = eig(d);
  out.eigenvalues.assign(e.values.data(), e.values.data() + e.values.size());
  out.coeffs = v0 * e.vectors;  // G_l = V0 S
  out.inside.assign(out.eigenvalues.size(), false);
  out.residuals.assign(out.eigenvalues.size(),
                       std::numeric_limits<double>::quiet_NaN());
  return out;
}

}  // namespace

SpectrumResult eigs_simple(const CMatrix& d0, const CMatrix& d1, double theta) {
  return extraction_core(d0, d1, theta, -1);
}

SpectrumResult eigs_simple_fixed_rank(const CMatrix& d0, const CMatrix& d1, int kappa) {
  if (kappa < 1) throw InputError("extraction: prescribed kappa must be >= 1");
  return extraction_core(d0, d1, 0.0, kappa);
}

SpectrumResult eigs_hankel(const MomentSet& ms, double theta, double cluster_tol) {
  const int orders = ms.order_count();
  if (orders < 2 || orders % 2 != 0)
    throw InputError("hankel extraction: need moments D_0..D_{2K-1}");
  const int big_k = orders / 2;
  const Eigen::Index m = ms.d[0].rows(), l = ms.d[0].cols();
  CMatrix b0 = CMatrix::Zero(big_k * m, big_k * l);
  CMatrix b1 = CMatrix::Zero(big_k * m, big_k * l);
  for (int i = 0; i < big_k; ++i)
    for (int j = 0; j < big_k; ++j) {
      b0.block(i * m, j * l, m, l) = ms.d[i + j];
      b1.block(i * m, j * l, m, l) = ms.d[i + j + 1];
    }
  SpectrumResult out = extraction_core(b0, b1, theta, -1);
  out.kappa0 = out.rank.kappa;
  // Coefficients restricted to the zeroth block row (the G_l part).
  if (out.coeffs.size() > 0) out.coeffs = out.coeffs.topRows(m).eval();

  // Cluster eigenvalues into algebraic multiplicities.
  double tol = cluster_tol;
  if (tol <= 0.0) {
    double scale = 1.0;
    for (const auto& ev : out.eigenvalues) scale = std::max(scale, std::abs(ev));
    tol = 1e-6 * scale;
  }
  std::vector<int> label(out.eigenvalues.size());
  std::iota(label.begin(), label.end(), 0);
  std::function<int(int)> find = [&](int i) {
    return label[i] == i ? i : label[i] = find(label[i]);
  };
  for (size_t i = 0; i < out.eigenvalues.size(); ++i)
    for (size_t j = i + 1; j < out.eigenvalues.size(); ++j)
      if (std::abs(out.eigenvalues[i] - out.eigenvalues[j]) < tol)
        label[find(static_cast<int>(i))] = find(static_cast<int>(j));
  std::map<int, JordanCluster> clusters;
  for (size_t i = 0; i < out.eigenvalues.size(); ++i) {
    const int root = find(static_cast<int>(i));
    auto it = clusters.find(root);
    if (it == clusters.end()) {
      clusters[root] = {out.eigenvalues[i], 1};
    } else {
      it->second.lambda += out.eigenvalues[i];
      ++it->second.multiplicity;
    }
  }
  for (auto& [root, c] : clusters) {
    c.lambda /= static_cast<double>(c.multiplicity);
    out.jordan.push_back(c);
  }
  std::sort(out.jordan.begin(), out.jordan.end(),
            [](const JordanCluster& a, const JordanCluster& b) {
              return std::abs(a.lambda) < std::abs(b.lambda);
            });
  return out;
}

std::vector<GridFunction> reconstruct_eigenfunctions(const CMatrix& g_l,
                                                     const TestData& data,
                                                     const Grid& grid) {
  const int m = data.m();
  if (g_l.rows() != m) throw InputError("reconstruct: coefficient rows != m");
  int dim = 0;
  for (const auto& f : data.functionals) {
    if (f.kind != Functional::Kind::Point)
      throw InputError("reconstruct: only point functionals have a hat dual basis");
    dim = std::max(dim, f.component + 1);
  }
  // Hat halfwidth per functional: the spacing of abscissas within its component.
  std::vector<double> halfwidth(m, 0.0);
  for (int comp = 0; comp < dim; ++comp) {
    std::vector<std::pair<double, int>> xs;
    for (int k = 0; k < m; ++k)
      if (data.functionals[k].component == comp) xs.emplace_back(data.functionals[k].x0, k);
    if (xs.empty()) continue;
    std::sort(xs.begin(), xs.end());
    double s;
    if (xs.size() == 1) {
      s = grid.h();
    } else {
      s = xs[1].first - xs[0].first;
      for (size_t i = 1; i + 1 < xs.size(); ++i)
        if (std::abs((xs[i + 1].first - xs[i].first) - s) > 1e-9)
          throw InputError("reconstruct: functional abscissas must be uniformly spaced");
    }
    for (const auto& [x, k] : xs) halfwidth[k] = s;
  }

  // The hats are cardinal for the point functionals (hat_k(x_j) = delta_jk),
  // so the coefficients that minimize the probe defect are the G_l entries
  // themselves and a member of the hat span is reproduced exactly.
  const CMatrix& beta = g_l;

  std::vector<GridFunction> out;
  for (Eigen::Index ncol = 0; ncol < g_l.cols(); ++ncol) {
    GridFunction v(grid, dim);
    for (int k = 0; k < m; ++k) {
      const auto& f = data.functionals[k];
      const double s = halfwidth[k];
      const int lo = std::max(0, grid.index_of_nearest(f.x0 - s));
      const int hi = std::min(grid.n, grid.index_of_nearest(f.x0 + s));
      for (int i = lo; i <= hi; ++i)
        v.values(f.component, i) += beta(k, ncol) * hat(grid.node(i), f.x0, s);
    }
    const double nrm = std::sqrt(grid.h()) * v.values.norm();
    if (nrm > 0.0) v.values /= nrm;
    // Phase fix: largest-magnitude entry real positive.
    Eigen::Index r, c;
    v.values.cwiseAbs().maxCoeff(&r, &c);
    const Complex top = v.values(r, c);
    if (std::abs(top) > 0.0) v.values *= std::conj(top) / std::abs(top);
    out.push_back(std::move(v));
  }
  return out;
}

void filter_and_diagnose(SpectrumResult& result, const Contour& contour,
                         const OdePencil* pencil, const Grid* grid,
                         const BoundaryConditionSpec* bc) {
  const size_t count = result.eigenvalues.size();
  result.inside.assign(count, false);
  if (result.residuals.size() != count)
    result.residuals.assign(count, std::numeric_limits<double>::quiet_NaN());
  for (size_t i = 0; i < count; ++i)
    result.inside[i] = contour.contains(result.eigenvalues[i]);

  if (pencil && grid && bc && result.eigenfunctions.size() == count) {
    for (size_t i = 0; i < count; ++i) {
      try {
        DiscreteSystem sys(*pencil, result.eigenvalues[i], *grid, *bc);
        result.residuals[i] = sys.eigen_residual(result.eigenfunctions[i]);
      } catch (const Error&) {
        result.residuals[i] = std::numeric_limits<double>::quiet_NaN();
      }
    }
  }

  // Sort by distance from the contour center.
  Complex center = contour.center;
  if (contour.kind == Contour::Kind::Parametric) {
    center = Complex(0.0, 0.0);
    for (int j = 0; j < 64; ++j)
      center += contour.path(2.0 * 3.14159265358979323846 * j / 64.0);
    center /= 64.0;
  }
  std::vector<size_t> order(count);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    return std::abs(result.eigenvalues[a] - center) <
           std::abs(result.eigenvalues[b] - center);
  });
  SpectrumResult sorted = result;
  if (result.coeffs.size() > 0) sorted.coeffs.resize(result.coeffs.rows(), result.coeffs.cols());
  for (size_t i = 0; i < count; ++i) {
    const size_t s = order[i];
    sorted.eigenvalues[i] = result.eigenvalues[s];
    sorted.inside[i] = result.inside[s];
    sorted.residuals[i] = result.residuals[s];
    if (result.coeffs.size() > 0) sorted.coeffs.col(i) = result.coeffs.col(s);
    if (result.eigenfunctions.size() == count)
      sorted.eigenfunctions[i] = result.eigenfunctions[s];
  }
  result = std::move(sorted);
}

}  // namespace nevp
