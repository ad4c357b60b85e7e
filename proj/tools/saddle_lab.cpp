// Command-line entry point: profile, solve, verify, stability, pipeline and
// sweep subcommands over the experiment pipeline. See --help per subcommand.

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "saddle/config.hpp"
#include "saddle/errors.hpp"
#include "saddle/pipeline.hpp"

namespace {

int finish(const saddle::PipelineResult& res) {
  for (const auto& f : res.written) std::printf("wrote %s\n", f.c_str());
  if (res.exit_code != 0) std::fprintf(stderr, "error: %s\n", res.message.c_str());
  return res.exit_code;
}

unsigned worker_cap(std::size_t jobs) {
  unsigned cap = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("SADDLE_LAB_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) cap = static_cast<unsigned>(v);
  }
  return std::min<unsigned>(cap, static_cast<unsigned>(std::max<std::size_t>(jobs, 1)));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"numerical laboratory for block-radial saddle fields"};
  app.set_help_flag("--help", "print help");  // frees -h/--h for the mesh flag
  app.require_subcommand(1);

  saddle::ExperimentConfig cfg;
  std::string config_path;
  std::vector<std::string> overrides;
  std::string annulus_text, a_list_text, coeffs_text, mode_text = "spectrum";

  auto add_common = [&](CLI::App* cmd) {
    cmd->set_help_flag("--help", "print help");
    cmd->add_option("--nl", cfg.nl_kind, "nonlinearity kind (allen_cahn|sine|custom)");
    cmd->add_option("--M", cfg.nl_M, "well location for custom nonlinearities");
    cmd->add_option("--coeffs", coeffs_text, "odd-power coefficients c1,c3,c5,...");
    cmd->add_option("--out", cfg.output_dir, "output directory");
    cmd->add_option("--seed", cfg.seed, "seed for randomized probes");
  };

  CLI::App* profile =
      app.add_subcommand("profile", "tabulate the planar connection; emits profile.csv "
                                    "(columns tau,u0,u0dot) and profile_summary.json");
  add_common(profile);
  profile->add_option("--tau-max", cfg.profile_tau_max, "half-width of the grid");
  profile->add_option("--n-nodes", cfg.profile_n_nodes, "number of grid nodes");

  CLI::App* solve =
      app.add_subcommand("solve", "minimize the sector energy; emits field.csv (columns "
                                  "s,t,u) and solve_report.json");
  add_common(solve);
  solve->add_option("--m", cfg.grid_m, "half-dimension (ambient dimension 2m)");
  solve->add_option("--R", cfg.grid_R, "ball radius");
  solve->add_option("--h", cfg.grid_h, "mesh spacing");
  solve->add_option("--bc", cfg.solver_bc, "dirichlet|profile outer data");
  solve->add_option("--max-iter", cfg.solver_max_iter, "iteration cap");
  solve->add_option("--tol", cfg.solver_tol, "sweep update tolerance");
  solve->add_option("--method", cfg.solver_method, "gauss_seidel|gradient_descent");

  CLI::App* verify = app.add_subcommand("verify", "run the three field checks");
  add_common(verify);
  verify->add_option("--m", cfg.grid_m, "half-dimension");
  verify->add_option("--R", cfg.grid_R, "ball radius");
  verify->add_option("--h", cfg.grid_h, "mesh spacing");
  verify->add_option("--bc", cfg.solver_bc, "dirichlet|profile outer data");

  CLI::App* stability = app.add_subcommand("stability", "second-variation reports");
  add_common(stability);
  stability->add_option("--mode", mode_text, "form|sweep|spectrum|hardy|probe");
  stability->add_option("--m", cfg.grid_m, "half-dimension");
  stability->add_option("--R", cfg.grid_R, "ball radius");
  stability->add_option("--h", cfg.grid_h, "mesh spacing");
  stability->add_option("--rho1", cfg.stability_rho1, "test family inner knot");
  stability->add_option("--rho2", cfg.stability_rho2, "test family support end");
  stability->add_option("--alpha", cfg.stability_alpha, "test family decay power");
  stability->add_option("--a-list", a_list_text, "sweep scales a1,a2,...");
  stability->add_option("--k", cfg.stability_k, "number of eigenvalues");
  stability->add_option("--annulus", annulus_text, "inner:outer restriction");
  stability->add_option("--trials", cfg.stability_trials, "probe trial count");

  CLI::App* pipeline = app.add_subcommand("pipeline", "run stages from a config file");
  pipeline->add_option("--config", config_path, "config file")->required();
  pipeline->add_option("--set", overrides, "key=value overrides (repeatable)");
  pipeline->add_option("--out", cfg.output_dir, "output directory override");

  CLI::App* sweep = app.add_subcommand("sweep", "fan a config out over parameter lists");
  sweep->add_option("--config", config_path, "base config file")->required();
  std::vector<std::string> vary;
  sweep->add_option("--vary", vary, "key=v1,v2,... (repeatable, cartesian)")->required();
  std::string sweep_out = "sweep_out";
  sweep->add_option("--out", sweep_out, "output root");

  CLI11_PARSE(app, argc, argv);

  try {
    if (!coeffs_text.empty()) cfg.nl_coeffs = saddle::parse_double_list(coeffs_text);

    if (profile->parsed()) {
      cfg.pipeline_stages = {"profile"};
      return finish(saddle::run_pipeline(cfg));
    }
    if (solve->parsed()) {
      cfg.pipeline_stages = {"solve"};
      return finish(saddle::run_pipeline(cfg));
    }
    if (verify->parsed()) {
      cfg.pipeline_stages = {"verify"};
      return finish(saddle::run_pipeline(cfg));
    }
    if (stability->parsed()) {
      cfg.pipeline_stages = {"stability"};
      cfg.stability_modes = {mode_text};
      if (!a_list_text.empty()) cfg.stability_a_list = saddle::parse_double_list(a_list_text);
      if (!annulus_text.empty())
        saddle::apply_override(cfg, "stability.annulus", annulus_text);
      return finish(saddle::run_pipeline(cfg));
    }
    if (pipeline->parsed()) {
      saddle::ExperimentConfig file_cfg = saddle::parse_config_file(config_path);
      for (const auto& kv : overrides) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw saddle::ConfigError("--set expects key=value");
        saddle::apply_override(file_cfg, kv.substr(0, eq), kv.substr(eq + 1));
      }
      if (!cfg.output_dir.empty() && cfg.output_dir != ".") file_cfg.output_dir = cfg.output_dir;
      return finish(saddle::run_pipeline(file_cfg));
    }
    if (sweep->parsed()) {
      const saddle::ExperimentConfig base = saddle::parse_config_file(config_path);
      std::vector<std::pair<std::string, std::vector<std::string>>> axes;
      for (const auto& v : vary) {
        const auto eq = v.find('=');
        if (eq == std::string::npos) throw saddle::ConfigError("--vary expects key=v1,v2,...");
        axes.emplace_back(v.substr(0, eq), saddle::parse_string_list(v.substr(eq + 1)));
      }
      std::vector<saddle::ExperimentConfig> jobs{base};
      for (const auto& [key, values] : axes) {
        std::vector<saddle::ExperimentConfig> next;
        for (const auto& j : jobs) {
          for (const auto& val : values) {
            saddle::ExperimentConfig c = j;
            saddle::apply_override(c, key, val);
            next.push_back(std::move(c));
          }
        }
        jobs = std::move(next);
      }
      for (std::size_t i = 0; i < jobs.size(); ++i) {
        char sub[32];
        std::snprintf(sub, sizeof(sub), "/run_%04zu", i);
        jobs[i].output_dir = sweep_out + sub;
      }
      std::atomic<std::size_t> cursor{0};
      std::atomic<int> worst{0};
      const unsigned nthreads = worker_cap(jobs.size());
      std::vector<std::thread> pool;
      for (unsigned t = 0; t < nthreads; ++t) {
        pool.emplace_back([&] {
          for (;;) {
            const std::size_t i = cursor.fetch_add(1);
            if (i >= jobs.size()) return;
            const auto res = saddle::run_pipeline(jobs[i]);
            if (res.exit_code != 0) {
              std::fprintf(stderr, "run_%04zu failed (%d): %s\n", i, res.exit_code,
                           res.message.c_str());
              int cur = worst.load();
              while (cur < res.exit_code && !worst.compare_exchange_weak(cur, res.exit_code)) {
              }
            } else {
              std::printf("run_%04zu ok -> %s\n", i, jobs[i].output_dir.c_str());
            }
          }
        });
      }
      for (auto& th : pool) th.join();
      return worst.load();
    }
  } catch (const saddle::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
  return 0;
}
