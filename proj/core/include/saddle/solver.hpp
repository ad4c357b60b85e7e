#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "saddle/field.hpp"
#include "saddle/nonlinearity.hpp"
#include "saddle/profile1d.hpp"

namespace saddle {

/// Weighted energy of a sector field,
///   a_m [ sum_edges w_mid (du)^2 / 2 + sum_nodes w_node G(u) ],
/// with edge weights s^(m-1) t^(m-1) at edge midpoints (one-sided
/// differences on the staggered lattice) and the potential summed over
/// nodes inside the disc. a_m = |S^{m-1}|^2.
double discrete_energy(const Field& fld, const Nonlinearity& nl);

/// dE/du per node (same normalization as discrete_energy).
std::vector<double> energy_gradient(const Field& fld, const Nonlinearity& nl);

/// Energy of the sector field restricted to s^2 + t^2 <= R_sub^2.
double restricted_energy(const Field& fld, const Nonlinearity& nl, double R_sub);

/// Energy of the odd-reflected field over the ball of radius R_sub
/// (twice the sector energy; gradient and potential are reflection-even).
double reflected_ball_energy(const Field& fld, const Nonlinearity& nl, double R_sub);

/// min{M, (s - t)/sqrt2} at non-Dirichlet nodes, 0 on cone and arc.
Field initial_guess(std::shared_ptr<const TriangleGrid> grid, const Nonlinearity& nl);

enum class SolveMethod { gauss_seidel, gradient_descent };
enum class BoundaryMode { dirichlet, profile };

struct SolveOptions {
  long max_iter = 200000;
  double tol = 1e-10;         // sweep sup-norm of updates
  double step = 0.0;          // gradient descent step; 0 = h^2/4
  bool backtrack = true;      // halve the step on energy increase
  SolveMethod method = SolveMethod::gauss_seidel;
  BoundaryMode bc = BoundaryMode::dirichlet;
  const Profile1D* boundary_profile = nullptr;  // required for bc = profile
  int record_every = 25;      // energy history cadence (sweeps)
};

struct SolveReport {
  double energy = 0.0;
  long iterations = 0;
  double final_step_norm = 0.0;
  double el_residual_sup = 0.0;    // checked interior nodes, s,t >= 2h
  double el_residual_scale = 1.0;  // max(1, sup |f(u)|) over checked nodes
  double positivity_min = 0.0;     // min over non-Dirichlet inside nodes
  double max_abs_value = 0.0;
  double axis_flux_sup = 0.0;      // sup |u(i,1) - u(i,0)| / h
  std::vector<double> energy_history;
};

/// Projected minimization of discrete_energy over [0, M] with the cone and
/// arc held at Dirichlet data. Gauss-Seidel does guarded nodewise Newton
/// sweeps; gradient descent is measure-preconditioned with backtracking.
/// Throws NonDecreaseFailure when a step cannot decrease the energy.
std::pair<Field, SolveReport> minimize(Field fld, const Nonlinearity& nl,
                                       const SolveOptions& opts = {});

SaddleField reflect_odd(const Field& fld);

struct EnergyGrowthPoint {
  double R = 0.0;
  double energy = 0.0;
};

struct EnergyGrowthResult {
  std::vector<EnergyGrowthPoint> points;
  double slope = 0.0;  // log-log fit
};

/// Solves once at the largest radius and evaluates the reflected-field
/// energy on each sub-ball; fits the log-log growth rate.
EnergyGrowthResult energy_growth_study(const Nonlinearity& nl, int m,
                                       const std::vector<double>& radii, double h,
                                       const SolveOptions& opts = {});

/// Growth of the constant-zero field's potential energy (volume control).
EnergyGrowthResult zero_field_growth(const Nonlinearity& nl, int m,
                                     const std::vector<double>& radii, double h);

}  // namespace saddle
