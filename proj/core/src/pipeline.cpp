#include "saddle/pipeline.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "saddle/errors.hpp"
#include "saddle/estimates.hpp"
#include "saddle/profile1d.hpp"
#include "saddle/solver.hpp"
#include "saddle/stability.hpp"

namespace saddle {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string fmt(double x) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  (void)ec;
  return std::string(buf, ptr);
}

bool enabled(const ExperimentConfig& cfg, const std::string& stage) {
  return std::find(cfg.pipeline_stages.begin(), cfg.pipeline_stages.end(), stage) !=
         cfg.pipeline_stages.end();
}

bool mode_enabled(const ExperimentConfig& cfg, const std::string& mode) {
  return std::find(cfg.stability_modes.begin(), cfg.stability_modes.end(), mode) !=
         cfg.stability_modes.end();
}

Nonlinearity make_nl(const ExperimentConfig& cfg) {
  if (cfg.nl_kind == "custom") return Nonlinearity::odd_polynomial(cfg.nl_coeffs, cfg.nl_M);
  return make_builtin(cfg.nl_kind);
}

void write_text(const std::filesystem::path& path, const std::string& text,
                std::vector<std::string>& written) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  written.push_back(path.string());
}

void write_json(const std::filesystem::path& path, const ordered_json& j,
                std::vector<std::string>& written) {
  write_text(path, j.dump(2) + "\n", written);
}

ordered_json estimate_json(const EstimateReport& r) {
  return ordered_json{{"name", r.name},
                      {"worst_violation", r.worst_violation},
                      {"worst_node", {r.worst_s, r.worst_t}},
                      {"tolerance_used", r.tolerance_used},
                      {"pass", r.pass}};
}

struct StageTimer {
  using clock = std::chrono::steady_clock;
  clock::time_point start = clock::now();
  double seconds() const {
    return std::chrono::duration<double>(clock::now() - start).count();
  }
};

}  // namespace

PipelineResult run_pipeline(const ExperimentConfig& cfg) {
  PipelineResult result;
  try {
    validate(cfg);
  } catch (const ConfigError& e) {
    result.exit_code = 2;
    result.message = e.what();
    return result;
  }

  namespace fs = std::filesystem;
  const fs::path dir(cfg.output_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);

  ordered_json manifest;
  manifest["schema"] = 1;
  manifest["tool"] = "saddle_lab";
  manifest["version"] = "0.1.0";
  manifest["config_hash"] = config_hash(cfg);
  manifest["config"] = cfg.canonical_text();
  ordered_json wall;

  bool checks_ok = true;
  std::string first_failure;
  auto check = [&](bool ok, const std::string& what) {
    if (!ok && checks_ok) {
      checks_ok = false;
      first_failure = what;
    }
  };

  try {
    const Nonlinearity nl = make_nl(cfg);
    const bool need_profile = enabled(cfg, "profile") || enabled(cfg, "verify") ||
                              (enabled(cfg, "stability") &&
                               (mode_enabled(cfg, "sweep") || mode_enabled(cfg, "form")));
    const bool need_solve = enabled(cfg, "solve") || enabled(cfg, "verify") ||
                            (enabled(cfg, "stability") &&
                             (mode_enabled(cfg, "spectrum") || mode_enabled(cfg, "probe")));

    std::optional<Profile1D> profile;
    if (need_profile || cfg.solver_bc == "profile") {
      StageTimer timer;
      profile.emplace(build_profile(nl, cfg.profile_tau_max, cfg.profile_n_nodes));
      if (enabled(cfg, "profile")) {
        std::string csv = "tau,u0,u0dot\n";
        const auto& tau = profile->tau_grid();
        for (std::size_t i = 0; i < tau.size(); ++i) {
          csv += fmt(tau[i]) + "," + fmt(profile->u0()[i]) + "," + fmt(profile->u0dot()[i]) +
                 "\n";
        }
        write_text(dir / "profile.csv", csv, result.written);
        const double ham = hamiltonian_residual_sup(*profile);
        ordered_json j;
        j["schema"] = 1;
        j["kind"] = nl.name();
        j["tau_max"] = cfg.profile_tau_max;
        j["n_nodes"] = cfg.profile_n_nodes;
        j["decay_c"] = profile->decay_c();
        j["decay_C"] = profile->decay_C();
        j["line_energy"] = profile_energy_line(*profile);
        j["max_hamiltonian_residual"] = ham;
        j["ode_residual_sup"] = ode_residual_sup(*profile);
        j["zero_mode_residual_sup"] = zero_mode_residual_sup(*profile);
        write_json(dir / "profile_summary.json", j, result.written);
        check(ham < 1e-10, "profile: first-integral residual exceeds 1e-10");
        wall["profile"] = timer.seconds();
      }
    }

    std::optional<Field> solved;
    std::optional<SolveReport> solve_rep;
    std::shared_ptr<const TriangleGrid> grid;
    if (need_solve) {
      StageTimer timer;
      grid = std::make_shared<const TriangleGrid>(build_grid(cfg.grid_m, cfg.grid_R, cfg.grid_h));
      SolveOptions opts;
      opts.max_iter = cfg.solver_max_iter;
      opts.tol = cfg.solver_tol;
      opts.step = cfg.solver_step;
      opts.method = cfg.solver_method == "gauss_seidel" ? SolveMethod::gauss_seidel
                                                        : SolveMethod::gradient_descent;
      opts.bc = cfg.solver_bc == "profile" ? BoundaryMode::profile : BoundaryMode::dirichlet;
      if (opts.bc == BoundaryMode::profile) opts.boundary_profile = &*profile;
      auto [fld, rep] = minimize(initial_guess(grid, nl), nl, opts);
      solved.emplace(std::move(fld));
      solve_rep = rep;
      if (enabled(cfg, "solve")) {
        std::string csv = "s,t,u\n";
        const TriangleGrid& g = *grid;
        for (std::size_t id = 0; id < g.nodes.size(); ++id) {
          const auto& nd = g.nodes[id];
          csv += fmt(g.s_of(nd.i)) + "," + fmt(g.t_of(nd.j)) + "," +
                 fmt(solved->values[id]) + "\n";
        }
        write_text(dir / "field.csv", csv, result.written);
        ordered_json j;
        j["schema"] = 1;
        j["m"] = cfg.grid_m;
        j["R"] = cfg.grid_R;
        j["h"] = cfg.grid_h;
        j["method"] = cfg.solver_method;
        j["bc"] = cfg.solver_bc;
        j["energy"] = rep.energy;
        j["iterations"] = rep.iterations;
        j["final_step_norm"] = rep.final_step_norm;
        j["el_residual_sup"] = rep.el_residual_sup;
        j["el_residual_scale"] = rep.el_residual_scale;
        j["positivity_min"] = rep.positivity_min;
        j["max_abs_value"] = rep.max_abs_value;
        j["axis_flux_sup"] = rep.axis_flux_sup;
        write_json(dir / "solve_report.json", j, result.written);
        wall["solve"] = timer.seconds();
      }
    }

    if (enabled(cfg, "verify")) {
      StageTimer timer;
      const SaddleField refl = reflect_odd(*solved);
      ordered_json reports = ordered_json::array();
      const EstimateReport mod = modica_check(refl, nl);
      const EstimateReport pw = pointwise_bound_check(refl, *profile);
      const EstimateReport super = supersolution_check(*profile, nl, *grid);
      reports.push_back(estimate_json(mod));
      reports.push_back(estimate_json(pw));
      reports.push_back(estimate_json(super));
      ordered_json j;
      j["schema"] = 1;
      j["reports"] = reports;
      write_json(dir / "verify.json", j, result.written);
      check(mod.pass, "verify: gradient bound check failed");
      check(pw.pass, "verify: pointwise profile bound failed");
      check(super.pass, "verify: comparison-function sign check failed");
      wall["verify"] = timer.seconds();
    }

    if (enabled(cfg, "stability")) {
      StageTimer timer;
      ordered_json j;
      j["schema"] = 1;
      if (mode_enabled(cfg, "hardy")) {
        ordered_json margins = ordered_json::array();
        for (int m : {2, 3, 4})
          margins.push_back(ordered_json{{"m", m}, {"margin", hardy_margin(m)}});
        if (cfg.grid_m >= 2) j["hardy_margin_m"] = hardy_margin(cfg.grid_m);
        j["hardy_margins"] = margins;
      }
      if (mode_enabled(cfg, "spectrum")) {
        const SaddleField refl = reflect_odd(*solved);
        std::optional<Annulus> ann;
        if (cfg.stability_has_annulus)
          ann = Annulus{cfg.stability_annulus_inner, cfg.stability_annulus_outer};
        SpectrumOptions sopts;
        sopts.seed = cfg.seed;
        const SpectrumReport rep = linearized_spectrum(refl, nl, cfg.stability_k, ann, sopts);
        ordered_json js;
        js["eigenvalues"] = rep.eigenvalues;
        js["morse_count"] = rep.morse_count;
        js["neg_tol"] = rep.neg_tol;
        if (rep.annulus) js["annulus"] = {rep.annulus->inner, rep.annulus->outer};
        j["spectrum"] = js;
      }
      if (mode_enabled(cfg, "probe")) {
        const SaddleField refl = reflect_odd(*solved);
        const ProbeResult pr =
            cone_vanishing_stability_probe(refl, nl, cfg.stability_trials, cfg.seed);
        j["probe"] = ordered_json{{"min_q", pr.min_q},
                                  {"slack", pr.slack},
                                  {"trials", pr.trials},
                                  {"pass", pr.pass}};
        check(pr.pass, "stability: cone-vanishing probe found a violating direction");
      }
      if (mode_enabled(cfg, "sweep") || mode_enabled(cfg, "form")) {
        const EtaFamily fam(cfg.stability_rho1, cfg.stability_rho2, cfg.stability_alpha);
        if (mode_enabled(cfg, "form")) {
          const XiYZ xi = separable_xi(fam, *profile, 1.0);
          const QuadraticFormReport qr =
              quadratic_form_yz(VSource::from_profile(*profile), xi, nl, cfg.grid_m);
          j["form"] = ordered_json{{"value", qr.value},
                                   {"gradient_term", qr.gradient_term},
                                   {"potential_term", qr.potential_term},
                                   {"boundary_term", qr.boundary_term},
                                   {"a_scaling", qr.a_scaling}};
        }
        if (mode_enabled(cfg, "sweep")) {
          const InstabilitySweepResult sw =
              instability_sweep(*profile, nl, cfg.grid_m, fam, cfg.stability_a_list);
          ordered_json rows = ordered_json::array();
          for (const auto& r : sw.rows)
            rows.push_back(ordered_json{{"a", r.a},
                                        {"q_scaled", r.q_scaled},
                                        {"boundary_decay", r.boundary_decay}});
          j["sweep"] = ordered_json{{"rows", rows}, {"separable_limit", sw.separable_limit}};
        }
      }
      j["asymptotic_functional_self"] =
          asymptotic_functional(EtaFamily(cfg.stability_rho1, cfg.stability_rho2,
                                          cfg.stability_alpha),
                                std::max(cfg.grid_m, 1));
      write_json(dir / "stability.json", j, result.written);
      wall["stability"] = timer.seconds();
    }
  } catch (const ConfigError& e) {
    result.exit_code = 2;
    result.message = e.what();
    return result;
  } catch (const std::exception& e) {
    result.exit_code = 3;
    result.message = e.what();
    return result;
  }

  manifest["wall_times_s"] = wall;
  write_json(dir / "manifest.json", manifest, result.written);

  if (!checks_ok) {
    result.exit_code = 4;
    result.message = first_failure;
  }
  return result;
}

}  // namespace saddle
