#pragma once

#include <map>
#include <string>
#include <vector>

namespace saddle {

/// Flat `section.key = value` configuration for a full experiment run.
struct ExperimentConfig {
  // nonlinearity.*
  std::string nl_kind = "allen_cahn";
  std::vector<double> nl_coeffs;  // custom odd-polynomial coefficients
  double nl_M = 1.0;

  // profile.*
  double profile_tau_max = 20.0;
  int profile_n_nodes = 4001;

  // grid.*
  int grid_m = 2;
  double grid_R = 16.0;
  double grid_h = 0.25;

  // solver.*
  long solver_max_iter = 200000;
  double solver_tol = 1e-10;
  double solver_step = 0.0;
  std::string solver_method = "gauss_seidel";
  std::string solver_bc = "dirichlet";

  // stability.*
  std::vector<std::string> stability_modes = {"hardy", "spectrum"};
  int stability_k = 6;
  double stability_rho1 = 0.05;
  double stability_rho2 = 100.0;
  double stability_alpha = 0.75;
  std::vector<double> stability_a_list = {5.0, 10.0, 20.0, 40.0};
  int stability_trials = 200;
  bool stability_has_annulus = false;
  double stability_annulus_inner = 0.0;
  double stability_annulus_outer = 0.0;

  // pipeline.*
  std::vector<std::string> pipeline_stages = {"profile", "solve", "verify", "stability"};

  // output.*
  std::string output_dir = ".";

  unsigned long seed = 12345;

  /// Canonical text form (sorted keys); hashing input for the manifest.
  std::string canonical_text() const;
};

/// Parses `key = value` lines ('#' comments, blank lines allowed).
/// Throws ConfigError on unknown keys or malformed values.
ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig parse_config_file(const std::string& path);

/// Applies a single dotted-key override (sweep support).
void apply_override(ExperimentConfig& cfg, const std::string& key, const std::string& value);

/// Validates every module precondition before any computation starts.
/// Throws ConfigError with the first violated precondition.
void validate(const ExperimentConfig& cfg);

/// FNV-1a hash of the canonical text, hex-encoded.
std::string config_hash(const ExperimentConfig& cfg);

std::vector<double> parse_double_list(const std::string& text);
std::vector<std::string> parse_string_list(const std::string& text);

}  // namespace saddle
