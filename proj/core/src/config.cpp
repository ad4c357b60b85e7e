#include "saddle/config.hpp"

#include <cctype>
#include <cstdint>
#include <fstream>
#include <sstream>

#include "saddle/errors.hpp"

namespace saddle {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ConfigError("config: bad numeric value for " + key + ": '" + v + "'");
  }
}

long to_long(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const long x = std::stol(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ConfigError("config: bad integer value for " + key + ": '" + v + "'");
  }
}

}  // namespace

std::vector<double> parse_double_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(to_double("list", item));
  }
  return out;
}

std::vector<std::string> parse_string_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

void apply_override(ExperimentConfig& cfg, const std::string& key, const std::string& value) {
  if (key == "nonlinearity.kind")
    cfg.nl_kind = value;
  else if (key == "nonlinearity.coeffs")
    cfg.nl_coeffs = parse_double_list(value);
  else if (key == "nonlinearity.M")
    cfg.nl_M = to_double(key, value);
  else if (key == "profile.tau_max")
    cfg.profile_tau_max = to_double(key, value);
  else if (key == "profile.n_nodes")
    cfg.profile_n_nodes = static_cast<int>(to_long(key, value));
  else if (key == "grid.m")
    cfg.grid_m = static_cast<int>(to_long(key, value));
  else if (key == "grid.R")
    cfg.grid_R = to_double(key, value);
  else if (key == "grid.h")
    cfg.grid_h = to_double(key, value);
  else if (key == "solver.max_iter")
    cfg.solver_max_iter = to_long(key, value);
  else if (key == "solver.tol")
    cfg.solver_tol = to_double(key, value);
  else if (key == "solver.step")
    cfg.solver_step = to_double(key, value);
  else if (key == "solver.method")
    cfg.solver_method = value;
  else if (key == "solver.bc")
    cfg.solver_bc = value;
  else if (key == "stability.modes")
    cfg.stability_modes = parse_string_list(value);
  else if (key == "stability.k")
    cfg.stability_k = static_cast<int>(to_long(key, value));
  else if (key == "stability.rho1")
    cfg.stability_rho1 = to_double(key, value);
  else if (key == "stability.rho2")
    cfg.stability_rho2 = to_double(key, value);
  else if (key == "stability.alpha")
    cfg.stability_alpha = to_double(key, value);
  else if (key == "stability.a_list")
    cfg.stability_a_list = parse_double_list(value);
  else if (key == "stability.trials")
    cfg.stability_trials = static_cast<int>(to_long(key, value));
  else if (key == "stability.annulus") {
    const auto pos = value.find(':');
    if (pos == std::string::npos)
      throw ConfigError("config: stability.annulus expects inner:outer");
    cfg.stability_has_annulus = true;
    cfg.stability_annulus_inner = to_double(key, trim(value.substr(0, pos)));
    cfg.stability_annulus_outer = to_double(key, trim(value.substr(pos + 1)));
  } else if (key == "pipeline.stages")
    cfg.pipeline_stages = parse_string_list(value);
  else if (key == "output.dir")
    cfg.output_dir = value;
  else if (key == "seed")
    cfg.seed = static_cast<unsigned long>(to_long(key, value));
  else
    throw ConfigError("config: unknown key '" + key + "'");
}

ExperimentConfig parse_config_text(const std::string& text) {
  ExperimentConfig cfg;
  std::stringstream ss(text);
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config: line " + std::to_string(lineno) + " is not key = value");
    apply_override(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return cfg;
}

ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

void validate(const ExperimentConfig& cfg) {
  if (cfg.nl_kind != "allen_cahn" && cfg.nl_kind != "sine" && cfg.nl_kind != "custom")
    throw ConfigError("config: nonlinearity.kind must be allen_cahn, sine or custom");
  if (cfg.nl_kind == "custom" && cfg.nl_coeffs.empty())
    throw ConfigError("config: custom nonlinearity needs nonlinearity.coeffs");
  if (!(cfg.nl_M > 0.0)) throw ConfigError("config: nonlinearity.M must be positive");
  if (!(cfg.profile_tau_max >= 5.0)) throw ConfigError("config: profile.tau_max >= 5 required");
  if (cfg.profile_n_nodes < 65) throw ConfigError("config: profile.n_nodes >= 65 required");
  if (cfg.grid_m < 1) throw ConfigError("config: grid.m >= 1 required");
  if (!(cfg.grid_R >= 4.0)) throw ConfigError("config: grid.R >= 4 required");
  if (!(cfg.grid_h > 0.0) || cfg.grid_h > cfg.grid_R / 16.0)
    throw ConfigError("config: 0 < grid.h <= grid.R/16 required");
  if (cfg.solver_max_iter < 1) throw ConfigError("config: solver.max_iter >= 1 required");
  if (!(cfg.solver_tol > 0.0)) throw ConfigError("config: solver.tol must be positive");
  if (cfg.solver_method != "gauss_seidel" && cfg.solver_method != "gradient_descent")
    throw ConfigError("config: solver.method must be gauss_seidel or gradient_descent");
  if (cfg.solver_bc != "dirichlet" && cfg.solver_bc != "profile")
    throw ConfigError("config: solver.bc must be dirichlet or profile");
  if (cfg.stability_k < 1 || cfg.stability_k > 20)
    throw ConfigError("config: stability.k must be in [1, 20]");
  if (!(cfg.stability_rho1 > 0.0 && 2.0 * cfg.stability_rho1 < 1.0))
    throw ConfigError("config: stability.rho1 must satisfy 0 < 2 rho1 < 1");
  if (!(cfg.stability_rho2 > 1.0)) throw ConfigError("config: stability.rho2 must exceed 1");
  if (!(cfg.stability_alpha > 0.5 && cfg.stability_alpha < 1.0))
    throw ConfigError("config: stability.alpha must lie in (1/2, 1)");
  if (cfg.stability_trials < 1) throw ConfigError("config: stability.trials >= 1 required");
  for (const auto& s : cfg.pipeline_stages) {
    if (s != "profile" && s != "solve" && s != "verify" && s != "stability")
      throw ConfigError("config: unknown pipeline stage '" + s + "'");
  }
  for (const auto& mode : cfg.stability_modes) {
    if (mode != "hardy" && mode != "spectrum" && mode != "probe" && mode != "sweep" &&
        mode != "form")
      throw ConfigError("config: unknown stability mode '" + mode + "'");
  }
}

std::string ExperimentConfig::canonical_text() const {
  std::ostringstream os;
  os.precision(17);
  auto list = [](const std::vector<double>& v) {
    std::ostringstream s;
    s.precision(17);
    for (std::size_t i = 0; i < v.size(); ++i) s << (i ? "," : "") << v[i];
    return s.str();
  };
  auto slist = [](const std::vector<std::string>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + v[i];
    return s;
  };
  os << "grid.R = " << grid_R << "\n";
  os << "grid.h = " << grid_h << "\n";
  os << "grid.m = " << grid_m << "\n";
  os << "nonlinearity.M = " << nl_M << "\n";
  os << "nonlinearity.coeffs = " << list(nl_coeffs) << "\n";
  os << "nonlinearity.kind = " << nl_kind << "\n";
  os << "output.dir = " << output_dir << "\n";
  os << "pipeline.stages = " << slist(pipeline_stages) << "\n";
  os << "profile.n_nodes = " << profile_n_nodes << "\n";
  os << "profile.tau_max = " << profile_tau_max << "\n";
  os << "seed = " << seed << "\n";
  os << "solver.bc = " << solver_bc << "\n";
  os << "solver.max_iter = " << solver_max_iter << "\n";
  os << "solver.method = " << solver_method << "\n";
  os << "solver.step = " << solver_step << "\n";
  os << "solver.tol = " << solver_tol << "\n";
  os << "stability.a_list = " << list(stability_a_list) << "\n";
  os << "stability.alpha = " << stability_alpha << "\n";
  if (stability_has_annulus)
    os << "stability.annulus = " << stability_annulus_inner << ":" << stability_annulus_outer
       << "\n";
  os << "stability.k = " << stability_k << "\n";
  os << "stability.modes = " << slist(stability_modes) << "\n";
  os << "stability.rho1 = " << stability_rho1 << "\n";
  os << "stability.rho2 = " << stability_rho2 << "\n";
  os << "stability.trials = " << stability_trials << "\n";
  return os.str();
}

std::string config_hash(const ExperimentConfig& cfg) {
  const std::string text = cfg.canonical_text();
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return std::string(buf);
}

}  // namespace saddle
