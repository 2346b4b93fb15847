// Command-line frontend: configuration-driven spectrum runs, experiment
// sweeps, Evans winding computations and FHN pulse continuation.
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include <CLI11.hpp>

#include "nevp/config.hpp"
#include "nevp/evans.hpp"
#include "nevp/fhn.hpp"
#include "nevp/report.hpp"
#include "nevp/schrodinger.hpp"

using namespace nevp;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;
constexpr int kExitSolver = 4;

struct CliOptions {
  std::string config_path;
  int seed = -1;
  int workers = -1;
  std::string out_dir;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open config file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

RunConfig load_config(const CliOptions& opt, std::string* text) {
  *text = read_file(opt.config_path);
  RunConfig cfg = parse_config_text(*text, opt.config_path);
  if (opt.seed >= 0) cfg.seed = static_cast<unsigned>(opt.seed);
  if (opt.workers > 0) cfg.workers = opt.workers;
  if (!opt.out_dir.empty()) cfg.out_dir = opt.out_dir;
  if (const char* env = std::getenv("NEVP_OUT_DIR")) cfg.out_dir = env;
  return cfg;
}

Potential make_potential(const RunConfig& cfg) {
  if (cfg.potential == "zero") return Potential::zero();
  if (cfg.potential == "poschl-teller") return Potential::poschl_teller(cfg.potential_depth);
  return Potential::square_well(cfg.potential_depth, cfg.potential_width);
}

Contour make_contour(const RunConfig& cfg) {
  return Contour::circle(Complex(cfg.contour_center_re, cfg.contour_center_im),
                         cfg.contour_radius, cfg.contour_points);
}

// Uniformly index-strided point functionals on the first component, centered
// on [-2, 2] (clipped to the grid).
std::vector<Functional> point_functionals(const Grid& grid, int m) {
  const double lo = std::max(grid.xmin, -2.0), hi = std::min(grid.xmax, 2.0);
  const int i_lo = grid.index_of_nearest(lo), i_hi = grid.index_of_nearest(hi);
  const int stride = std::max(1, (i_hi - i_lo) / std::max(1, m - 1));
  std::vector<Functional> out;
  for (int j = 0; j < m && i_lo + j * stride <= i_hi; ++j)
    out.push_back(Functional::point(grid.node(i_lo + j * stride), 0));
  return out;
}

// Built-in quadratic matrix pencil demo: F(lambda) = lambda^2 I + lambda C + K.
MatrixPencil demo_matrix_pencil() {
  const int n = 3;
  CMatrix c = CMatrix::Zero(n, n), k = CMatrix::Zero(n, n);
  c << Complex(0.6, 0.0), Complex(0.1, 0.0), Complex(0.0, 0.0),
       Complex(0.1, 0.0), Complex(0.8, 0.0), Complex(0.2, 0.0),
       Complex(0.0, 0.0), Complex(0.2, 0.0), Complex(1.0, 0.0);
  k << Complex(2.0, 0.0), Complex(-0.3, 0.0), Complex(0.0, 0.0),
       Complex(-0.3, 0.0), Complex(1.5, 0.0), Complex(-0.2, 0.0),
       Complex(0.0, 0.0), Complex(-0.2, 0.0), Complex(1.0, 0.0);
  MatrixPencil p;
  p.n = n;
  p.value = [c, k, n](Complex lambda) {
    return (lambda * lambda * CMatrix::Identity(n, n) + lambda * c + k).eval();
  };
  p.derivative = [c, n](Complex lambda) {
    return (2.0 * lambda * CMatrix::Identity(n, n) + c).eval();
  };
  return p;
}

SpectrumResult extract_from_moments(const RunConfig& cfg, const SampleSet& samples) {
  const MomentSet ms = moments(samples, cfg.hankel_k);
  if (cfg.hankel_k > 1) return eigs_hankel(ms, cfg.theta);
  if (cfg.kappa >= 0) return eigs_simple_fixed_rank(ms.d[0], ms.d[1], cfg.kappa);
  return eigs_simple(ms.d[0], ms.d[1], cfg.theta);
}

SpectrumResult run_spectrum(const RunConfig& cfg, RunReport* report) {
  const Contour contour = make_contour(cfg);
  if (cfg.problem == "matrix-pencil") {
    const MatrixPencil pencil = demo_matrix_pencil();
    std::mt19937 rng(cfg.seed);
    std::normal_distribution<double> dist;
    CMatrix w(pencil.n, cfg.functional_count), v(pencil.n, cfg.rhs_count);
    for (Eigen::Index j = 0; j < w.size(); ++j) w.data()[j] = Complex(dist(rng), dist(rng));
    for (Eigen::Index j = 0; j < v.size(); ++j) v.data()[j] = Complex(dist(rng), dist(rng));
    const SampleSet samples = assemble_samples(pencil, w, v, contour);
    SpectrumResult result = extract_from_moments(cfg, samples);
    filter_and_diagnose(result, contour);
    return result;
  }

  const Grid grid = Grid::from_step(cfg.grid_min, cfg.grid_max, cfg.grid_step);
  const BoundaryConditionSpec bc = cfg.bc == "periodic" ? BoundaryConditionSpec::periodic()
                                                        : BoundaryConditionSpec::projection();
  OdePencil pencil;
  TestData data;
  if (cfg.problem == "fhn") {
    const FhnParams params{cfg.fhn_a, cfg.fhn_b, cfg.fhn_phi};
    const PulseSolution pulse = compute_pulse(params, cfg.fhn_c_init, grid);
    report->warnings.push_back("pulse speed " + std::to_string(pulse.c));
    pencil = linearized_pencil(pulse, params);
    data = fhn_test_data(pulse.c, cfg.seed, cfg.rhs_count, cfg.functional_count,
                         cfg.hat_basis_size);
  } else {
    pencil = schrodinger_pencil(make_potential(cfg));
    data = TestData::random_hats(2, cfg.rhs_count, cfg.seed, cfg.hat_basis_size);
    data.functionals = point_functionals(grid, cfg.functional_count);
  }
  const SampleSet samples = assemble_samples(pencil, grid, bc, data, contour, cfg.workers);
  double max_residual = 0.0;
  for (double r : samples.residuals) max_residual = std::max(max_residual, r);
  if (max_residual > 1e-8)
    report->warnings.push_back("large BVP residual on a contour node: " +
                               std::to_string(max_residual));
  SpectrumResult result = extract_from_moments(cfg, samples);
  bool all_points = !data.functionals.empty();
  for (const auto& f : data.functionals)
    all_points = all_points && f.kind == Functional::Kind::Point;
  if (all_points && result.coeffs.size() > 0)
    result.eigenfunctions = reconstruct_eigenfunctions(result.coeffs, data, grid);
  filter_and_diagnose(result, contour);
  if (result.ill_conditioned) report->warnings.push_back("ill-conditioned extraction");
  return result;
}

int run_solve(const CliOptions& opt) {
  RunReport report;
  report.command = "solve";
  RunConfig cfg = load_config(opt, &report.config_text);
  report.seed = cfg.seed;
  report.workers = cfg.workers;
  std::filesystem::create_directories(cfg.out_dir);
  const auto t0 = std::chrono::steady_clock::now();
  const SpectrumResult result = run_spectrum(cfg, &report);
  report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  write_spectrum_csv(cfg.out_dir + "/spectrum.csv", result);
  write_report_json(cfg.out_dir + "/report.json", report, &result);
  return 0;
}

int run_sweep(const CliOptions& opt) {
  RunReport report;
  report.command = "sweep";
  RunConfig cfg = load_config(opt, &report.config_text);
  report.seed = cfg.seed;
  report.workers = cfg.workers;
  if (cfg.problem != "fhn")
    throw InputError("sweep: only the fhn problem has sweep experiments");
  if (cfg.sweep_kind.empty()) throw InputError("sweep: config has no sweep block");
  std::filesystem::create_directories(cfg.out_dir);

  FhnRunConfig run;
  run.contour = make_contour(cfg);
  run.theta = cfg.theta;
  run.seed = cfg.seed;
  run.l = cfg.rhs_count;
  run.m = cfg.functional_count;
  run.workers = cfg.workers;

  const auto t0 = std::chrono::steady_clock::now();
  const FhnParams params{cfg.fhn_a, cfg.fhn_b, cfg.fhn_phi};
  const FhnReference ref = make_reference(params, cfg.grid_step, cfg.functional_count);
  if (cfg.sweep_kind == "interval") {
    write_interval_sweep_csv(cfg.out_dir + "/interval_sweep.csv",
                             interval_sweep(ref, cfg.sweep_values, run));
  } else if (cfg.sweep_kind == "quadrature") {
    std::vector<int> ms(cfg.sweep_values.begin(), cfg.sweep_values.end());
    write_quadrature_sweep_csv(cfg.out_dir + "/quadrature_sweep.csv",
                               quadrature_sweep(ref, ms, cfg.grid_max - cfg.grid_min, run));
  } else {
    std::vector<int> kappas(cfg.sweep_values.begin(), cfg.sweep_values.end());
    write_rank_sweep_csv(cfg.out_dir + "/rank_sweep.csv",
                         rank_sweep(ref, kappas, cfg.grid_max - cfg.grid_min,
                                    cfg.contour_points, run));
  }
  report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  write_report_json(cfg.out_dir + "/report.json", report);
  return 0;
}

int run_evans(const CliOptions& opt) {
  RunReport report;
  report.command = "evans";
  RunConfig cfg = load_config(opt, &report.config_text);
  report.seed = cfg.seed;
  report.workers = cfg.workers;
  std::filesystem::create_directories(cfg.out_dir);
  OdePencil pencil;
  if (cfg.problem == "fhn") {
    const FhnParams params{cfg.fhn_a, cfg.fhn_b, cfg.fhn_phi};
    const Grid grid = Grid::from_step(cfg.grid_min, cfg.grid_max, cfg.grid_step);
    pencil = linearized_pencil(compute_pulse(params, cfg.fhn_c_init, grid), params);
  } else if (cfg.problem == "schrodinger") {
    pencil = schrodinger_pencil(make_potential(cfg));
  } else {
    throw InputError("evans: requires an ODE problem (schrodinger or fhn)");
  }
  const Contour contour = make_contour(cfg);
  const auto t0 = std::chrono::steady_clock::now();
  const WindingResult winding =
      winding_number(pencil, contour, cfg.evans_half_length, cfg.evans_step);
  report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  write_evans_csv(cfg.out_dir + "/evans.csv", contour, winding);
  write_report_json(cfg.out_dir + "/report.json", report, nullptr, &winding);
  return 0;
}

int run_pulse(const CliOptions& opt) {
  RunReport report;
  report.command = "pulse";
  RunConfig cfg = load_config(opt, &report.config_text);
  report.seed = cfg.seed;
  report.workers = cfg.workers;
  if (cfg.problem != "fhn") throw InputError("pulse: requires problem = fhn");
  std::filesystem::create_directories(cfg.out_dir);
  const Grid grid = Grid::from_step(cfg.grid_min, cfg.grid_max, cfg.grid_step);
  const FhnParams params{cfg.fhn_a, cfg.fhn_b, cfg.fhn_phi};
  const auto t0 = std::chrono::steady_clock::now();
  const PulseSolution pulse = compute_pulse(params, cfg.fhn_c_init, grid);
  report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  write_gridfunction_csv(cfg.out_dir + "/pulse.csv", pulse.profile);
  write_report_json(cfg.out_dir + "/report.json", report, nullptr, nullptr, &pulse);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Contour-integral eigenvalue solver for operator pencils on the line"};
  app.require_subcommand(1);
  CliOptions opt;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", opt.config_path, "Path to a run configuration file")
        ->required();
    sub->add_option("--seed", opt.seed, "Override the test-data seed");
    sub->add_option("--workers", opt.workers, "Override the worker count");
    sub->add_option("--out", opt.out_dir, "Override the output directory");
  };
  CLI::App* solve = app.add_subcommand("solve", "Contour spectrum run");
  CLI::App* sweep = app.add_subcommand("sweep", "Experiment sweep (fhn)");
  CLI::App* evans = app.add_subcommand("evans", "Evans winding number");
  CLI::App* pulse = app.add_subcommand("pulse", "FHN pulse continuation");
  for (CLI::App* sub : {solve, sweep, evans, pulse}) add_common(sub);

  CLI11_PARSE(app, argc, argv);

  try {
    if (solve->parsed()) return run_solve(opt);
    if (sweep->parsed()) return run_sweep(opt);
    if (evans->parsed()) return run_evans(opt);
    return run_pulse(opt);
  } catch (const InputError& e) {
    std::cerr << "error-class: config\n" << e.what() << "\n";
    return kExitConfig;
  } catch (const std::ios_base::failure& e) {
    std::cerr << "error-class: io\n" << e.what() << "\n";
    return kExitIo;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error-class: io\n" << e.what() << "\n";
    return kExitIo;
  } catch (const Error& e) {
    std::cerr << "error-class: solver\n" << e.what() << "\n";
    return kExitSolver;
  }
}
