#include "nevp/config.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

namespace nevp {

namespace {

std::string trim(const std::string& s) {
  size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

[[noreturn]] void fail(const std::string& origin, int line, const std::string& what) {
  std::ostringstream msg;
  msg << origin << ":" << line << ": " << what;
  throw InputError(msg.str());
}

double to_double(const std::string& origin, int line, const std::string& v) {
  try {
    size_t pos = 0;
    const double d = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    fail(origin, line, "expected a number, got '" + v + "'");
  }
}

int to_int(const std::string& origin, int line, const std::string& v) {
  const double d = to_double(origin, line, v);
  const int i = static_cast<int>(d);
  if (static_cast<double>(i) != d) fail(origin, line, "expected an integer, got '" + v + "'");
  return i;
}

std::vector<double> to_list(const std::string& origin, int line, const std::string& v) {
  std::vector<double> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(to_double(origin, line, item));
  }
  if (out.empty()) fail(origin, line, "expected a comma-separated list");
  return out;
}

void validate(const RunConfig& c, const std::string& origin) {
  auto bad = [&](const std::string& what) { fail(origin, 0, "invalid config: " + what); };
  if (c.problem != "matrix-pencil" && c.problem != "schrodinger" && c.problem != "fhn")
    bad("problem must be matrix-pencil, schrodinger or fhn");
  if (c.contour_radius <= 0.0) bad("contour.radius must be positive");
  if (c.contour_points < 1) bad("contour.points must be positive");
  if (c.grid_step <= 0.0) bad("grid.step must be positive");
  if (c.grid_min >= c.grid_max) bad("grid.min must be below grid.max");
  if (c.bc != "projection" && c.bc != "periodic") bad("bc.kind must be projection or periodic");
  if (c.functional_count < 1) bad("testdata.functionals must be positive");
  if (c.rhs_count < 1) bad("testdata.rhs must be positive");
  if (c.hat_basis_size < 2) bad("testdata.hats must be at least 2");
  if (c.theta <= 0.0) bad("extraction.theta must be positive");
  if (c.hankel_k < 1) bad("extraction.hankel-k must be at least 1");
  if (c.workers < 1) bad("run.workers must be positive");
  if (c.potential != "zero" && c.potential != "poschl-teller" && c.potential != "square-well")
    bad("schrodinger.potential must be zero, poschl-teller or square-well");
  if (c.potential_width <= 0.0) bad("schrodinger.width must be positive");
  if (c.fhn_b <= 0.0 || c.fhn_phi <= 0.0) bad("fhn parameters must satisfy b > 0, phi > 0");
  if (c.fhn_c_init == 0.0) bad("fhn.c-init must be nonzero");
  if (!c.sweep_kind.empty() && c.sweep_kind != "interval" && c.sweep_kind != "quadrature" &&
      c.sweep_kind != "rank")
    bad("sweep.kind must be interval, quadrature or rank");
  if (!c.sweep_kind.empty() && c.sweep_values.empty()) bad("sweep.values must be nonempty");
  for (double v : c.sweep_values)
    if (v <= 0.0) bad("sweep.values must be positive");
  if (c.evans_half_length <= 0.0) bad("evans.half-length must be positive");
  if (c.evans_step <= 0.0) bad("evans.step must be positive");
}

}  // namespace

RunConfig parse_config_text(const std::string& text, const std::string& origin) {
  RunConfig c;
  std::istringstream in(text);
  std::string raw;
  std::string section;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    const size_t hash = raw.find('#');
    if (hash != std::string::npos) raw.erase(hash);
    const std::string line = trim(raw);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') fail(origin, lineno, "unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const size_t eq = line.find('=');
    if (eq == std::string::npos) fail(origin, lineno, "expected key = value");
    const std::string key = section + "." + trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (value.empty()) fail(origin, lineno, "empty value for " + key);

    if (key == "problem.kind") c.problem = value;
    else if (key == "contour.center-re") c.contour_center_re = to_double(origin, lineno, value);
    else if (key == "contour.center-im") c.contour_center_im = to_double(origin, lineno, value);
    else if (key == "contour.radius") c.contour_radius = to_double(origin, lineno, value);
    else if (key == "contour.points") c.contour_points = to_int(origin, lineno, value);
    else if (key == "grid.min") c.grid_min = to_double(origin, lineno, value);
    else if (key == "grid.max") c.grid_max = to_double(origin, lineno, value);
    else if (key == "grid.step") c.grid_step = to_double(origin, lineno, value);
    else if (key == "bc.kind") c.bc = value;
    else if (key == "testdata.functionals") c.functional_count = to_int(origin, lineno, value);
    else if (key == "testdata.rhs") c.rhs_count = to_int(origin, lineno, value);
    else if (key == "testdata.seed") c.seed = static_cast<unsigned>(to_int(origin, lineno, value));
    else if (key == "testdata.hats") c.hat_basis_size = to_int(origin, lineno, value);
    else if (key == "extraction.theta") c.theta = to_double(origin, lineno, value);
    else if (key == "extraction.kappa") c.kappa = to_int(origin, lineno, value);
    else if (key == "extraction.hankel-k") c.hankel_k = to_int(origin, lineno, value);
    else if (key == "run.workers") c.workers = to_int(origin, lineno, value);
    else if (key == "run.out-dir") c.out_dir = value;
    else if (key == "schrodinger.potential") c.potential = value;
    else if (key == "schrodinger.depth") c.potential_depth = to_double(origin, lineno, value);
    else if (key == "schrodinger.width") c.potential_width = to_double(origin, lineno, value);
    else if (key == "fhn.a") c.fhn_a = to_double(origin, lineno, value);
    else if (key == "fhn.b") c.fhn_b = to_double(origin, lineno, value);
    else if (key == "fhn.phi") c.fhn_phi = to_double(origin, lineno, value);
    else if (key == "fhn.c-init") c.fhn_c_init = to_double(origin, lineno, value);
    else if (key == "sweep.kind") c.sweep_kind = value;
    else if (key == "sweep.values") c.sweep_values = to_list(origin, lineno, value);
    else if (key == "evans.half-length") c.evans_half_length = to_double(origin, lineno, value);
    else if (key == "evans.step") c.evans_step = to_double(origin, lineno, value);
    else fail(origin, lineno, "unknown key '" + key + "'");
  }
  validate(c, origin);
  return c;
}

RunConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open config file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str(), path);
}

}  // namespace nevp
