#include "nevp/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace nevp {

namespace {

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot open output file: " + path);
  return out;
}

nlohmann::json complex_json(Complex z) {
  return {{"re", z.real()}, {"im", z.imag()}};
}

}  // namespace

std::string environment_fingerprint() {
  std::ostringstream out;
#if defined(__clang__)
  out << "clang " << __clang_major__ << "." << __clang_minor__;
#elif defined(__GNUC__)
  out << "gcc " << __GNUC__ << "." << __GNUC_MINOR__;
#else
  out << "unknown-compiler";
#endif
  out << ", eigen " << EIGEN_WORLD_VERSION << "." << EIGEN_MAJOR_VERSION << "."
      << EIGEN_MINOR_VERSION;
#if defined(__linux__)
  out << ", linux";
#elif defined(__APPLE__)
  out << ", darwin";
#endif
  out << ", sizeof(long)=" << sizeof(long);
  return out.str();
}

void write_report_json(const std::string& path, const RunReport& report,
                       const SpectrumResult* spectrum, const WindingResult* winding,
                       const PulseSolution* pulse) {
  nlohmann::json j;
  j["schema"] = report.schema;
  j["command"] = report.command;
  j["config"] = report.config_text;
  j["seed"] = report.seed;
  j["workers"] = report.workers;
  j["seconds"] = report.seconds;
  j["warnings"] = report.warnings;
  j["environment"] = environment_fingerprint();
  if (spectrum) {
    nlohmann::json s;
    s["kappa"] = spectrum->rank.kappa;
    s["theta"] = spectrum->rank.theta;
    s["gap"] = spectrum->rank.gap;
    s["ill_conditioned"] = spectrum->ill_conditioned;
    s["singular_values"] = std::vector<double>(
        spectrum->rank.singular.data(),
        spectrum->rank.singular.data() + spectrum->rank.singular.size());
    for (size_t i = 0; i < spectrum->eigenvalues.size(); ++i) {
      nlohmann::json e = complex_json(spectrum->eigenvalues[i]);
      if (i < spectrum->inside.size()) e["inside"] = static_cast<bool>(spectrum->inside[i]);
      if (i < spectrum->residuals.size() && std::isfinite(spectrum->residuals[i]))
        e["residual"] = spectrum->residuals[i];
      s["eigenvalues"].push_back(e);
    }
    if (!s.contains("eigenvalues")) s["eigenvalues"] = nlohmann::json::array();
    j["spectrum"] = s;
  }
  if (winding) {
    j["evans"] = {{"winding", winding->winding},
                  {"drift", winding->drift},
                  {"min_abs", winding->min_abs},
                  {"nodes", winding->trace.size()}};
  }
  if (pulse) {
    j["pulse"] = {{"speed", pulse->c},
                  {"iterations", pulse->iterations},
                  {"residual", pulse->residual},
                  {"interval", {pulse->grid.xmin, pulse->grid.xmax}},
                  {"step", pulse->grid.h()}};
  }
  auto out = open_out(path);
  out << j.dump(2) << "\n";
}

void write_spectrum_csv(const std::string& path, const SpectrumResult& result) {
  auto out = open_out(path);
  out << "index,eig_re,eig_im,inside,residual\n";
  for (size_t i = 0; i < result.eigenvalues.size(); ++i) {
    out << i << "," << fmt(result.eigenvalues[i].real()) << ","
        << fmt(result.eigenvalues[i].imag()) << ","
        << (i < result.inside.size() && result.inside[i] ? 1 : 0) << ","
        << (i < result.residuals.size() && std::isfinite(result.residuals[i])
                ? fmt(result.residuals[i])
                : "")
        << "\n";
  }
}

void write_samples_csv(const std::string& path, const SampleSet& samples) {
  auto out = open_out(path);
  out << "node,lambda_re,lambda_im,weight_re,weight_im,norm_E,residual\n";
  for (size_t i = 0; i < samples.lambdas.size(); ++i) {
    out << i << "," << fmt(samples.lambdas[i].real()) << ","
        << fmt(samples.lambdas[i].imag()) << "," << fmt(samples.weights[i].real())
        << "," << fmt(samples.weights[i].imag()) << "," << fmt(samples.values[i].norm())
        << "," << fmt(samples.residuals[i]) << "\n";
  }
}

void write_gridfunction_csv(const std::string& path, const GridFunction& f) {
  auto out = open_out(path);
  out << "x";
  for (int r = 0; r < f.dim(); ++r) out << ",re" << r << ",im" << r;
  out << "\n";
  for (int i = 0; i < f.grid.size(); ++i) {
    out << fmt(f.grid.node(i));
    for (int r = 0; r < f.dim(); ++r)
      out << "," << fmt(f.values(r, i).real()) << "," << fmt(f.values(r, i).imag());
    out << "\n";
  }
}

void write_evans_csv(const std::string& path, const Contour& contour,
                     const WindingResult& winding) {
  auto out = open_out(path);
  out << "node,lambda_re,lambda_im,evans_re,evans_im\n";
  const auto nodes = contour.nodes();
  for (size_t i = 0; i < winding.trace.size(); ++i) {
    const Complex lambda = i < nodes.size() ? nodes[i].first : Complex(0, 0);
    out << i << "," << fmt(lambda.real()) << "," << fmt(lambda.imag()) << ","
        << fmt(winding.trace[i].real()) << "," << fmt(winding.trace[i].imag()) << "\n";
  }
}

void write_interval_sweep_csv(const std::string& path,
                              const std::vector<IntervalSweepRow>& rows) {
  auto out = open_out(path);
  out << "L,bc_kind,err_eval,angle_evec,seconds,ok,error\n";
  for (const auto& r : rows) {
    out << fmt(r.length) << "," << to_string(r.bc) << "," << fmt(r.err_eval) << ","
        << fmt(r.angle_evec) << "," << fmt(r.seconds) << "," << (r.ok ? 1 : 0) << ",\""
        << r.error << "\"\n";
  }
}

void write_quadrature_sweep_csv(const std::string& path,
                                const std::vector<QuadratureSweepRow>& rows) {
  auto out = open_out(path);
  out << "M,err_eval,angle_evec,ok,error\n";
  for (const auto& r : rows) {
    out << r.quad_points << "," << fmt(r.err_eval) << "," << fmt(r.angle_evec) << ","
        << (r.ok ? 1 : 0) << ",\"" << r.error << "\"\n";
  }
}

void write_rank_sweep_csv(const std::string& path, const std::vector<RankSweepRow>& rows) {
  auto out = open_out(path);
  out << "kappa,eig_re,eig_im,inside,residual\n";
  for (const auto& r : rows) {
    out << r.kappa << "," << fmt(r.eigenvalue.real()) << "," << fmt(r.eigenvalue.imag())
        << "," << (r.inside ? 1 : 0) << "," << fmt(r.residual) << "\n";
  }
}

}  // namespace nevp
