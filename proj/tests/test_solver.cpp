#include <doctest.h>

#include <cmath>
#include <memory>

#include "saddle/errors.hpp"
#include "saddle/solver.hpp"

using namespace saddle;

namespace {

constexpr double kSqrt1_2 = 0.70710678118654752440;

std::shared_ptr<const TriangleGrid> grid_of(int m, double R, double h) {
  return std::make_shared<const TriangleGrid>(build_grid(m, R, h));
}

// shared converged solve for the heavier checks
const Field& solved_m2_r16() {
  static const Field fld = [] {
    const Nonlinearity nl = make_builtin("allen_cahn");
    auto [f, rep] = minimize(initial_guess(grid_of(2, 16.0, 0.25), nl), nl, {});
    return f;
  }();
  return fld;
}

}  // namespace

TEST_CASE("constant fields: exact potential-only energy") {
  const Nonlinearity nl = make_builtin("allen_cahn");
  auto grid = grid_of(2, 8.0, 0.25);
  const Field z = zero_field(grid);
  double wsum = 0.0;
  for (const auto& nd : grid->nodes)
    if (nd.inside) wsum += nd.weight;
  const double expected = sector_measure_constant(2) * nl.G(0.0) * wsum;
  CHECK(discrete_energy(z, nl) == doctest::Approx(expected).epsilon(1e-13));
}

TEST_CASE("clamped cone-distance field: finite energy, cubic-order bound") {
  const Nonlinearity nl = make_builtin("allen_cahn");
  auto grid = grid_of(2, 16.0, 0.25);
  Field f = initial_guess(grid, nl);
  const double e = discrete_energy(f, nl);
  CHECK(std::isfinite(e));
  // direct-summation bound: strip + boundary jump, generously C R^3
  CHECK(e < 100.0 * 16.0 * 16.0 * 16.0);
  CHECK(e > 0.0);
}

TEST_CASE("initial guess nodal values") {
  const Nonlinearity nl = make_builtin("allen_cahn");
  auto grid = grid_of(2, 16.0, 0.1);
  const Field f = initial_guess(grid, nl);
  // (s - t)/sqrt2 above M clamps to M
  CHECK(f.at(50, 10) == 1.0);
  // (1.1, 1.0) -> 0.1/sqrt2
  CHECK(f.at(11, 10) == doctest::Approx(0.1 * kSqrt1_2).epsilon(1e-13));
  // Dirichlet zero on the cone
  CHECK(f.at(20, 20) == 0.0);
}

TEST_CASE("energy halves by O(h^2) for a smooth interior test field") {
  const Nonlinearity nl = make_builtin("allen_cahn");
  auto fill = [&](const std::shared_ptr<const TriangleGrid>& g) {
    Field f = zero_field(g);
    for (std::size_t id = 0; id < g->nodes.size(); ++id) {
      const auto& nd = g->nodes[id];
      const double s = g->s_of(nd.i), t = g->t_of(nd.j);
      const double r2 = (s - 5.0) * (s - 5.0) + (t - 2.5) * (t - 2.5);
      f.values[id] = (r2 < 4.0) ? std::pow(1.0 - r2 / 4.0, 5) : 0.0;
    }
    return f;
  };
  // subtract the zero-field energy so the staircase volume term cancels and
  // only the (compactly supported) excess is measured
  auto excess = [&](double h) {
    auto g = grid_of(2, 12.0, h);
    return discrete_energy(fill(g), nl) - discrete_energy(zero_field(g), nl);
  };
  const double e1 = excess(0.2), e2 = excess(0.1), e3 = excess(0.05);
  const double r12 = std::abs(e1 - e3), r23 = std::abs(e2 - e3);
  CHECK(r12 / r23 > 3.0);  // ~5 for clean second order with this triplet
  CHECK(r12 / r23 < 8.0);
}

TEST_CASE("gauss-seidel minimization: monotone, positive, bounded") {
  const Nonlinearity nl = make_builtin("allen_cahn");
  auto [fld, rep] = minimize(initial_guess(grid_of(2, 16.0, 0.25), nl), nl, {});

  double prev = 1e300;
  for (double e : rep.energy_history) {
    CHECK(e <= prev + 1e-12 * (1.0 + std::abs(prev)));
    prev = e;
  }
  CHECK(rep.positivity_min > 0.0);
  CHECK(rep.max_abs_value < 1.0);
  CHECK(rep.final_step_norm < 1e-9);
  CHECK(rep.el_residual_sup < 5.0 * 0.25 * 0.25 * rep.el_residual_scale);
  // zero-mass axis values equilibrate exactly for m >= 2
  CHECK(rep.axis_flux_sup < 1e-9);

  // escape from the zero critical point: strictly below the zero field
  const double e0 = discrete_energy(zero_field(fld.grid), nl);
  CHECK(rep.energy < e0);

  // field invariants: Dirichlet zeros and the [0, M] truncation
  for (std::size_t id = 0; id < fld.grid->nodes.size(); ++id) {
    const auto cls = fld.grid->nodes[id].cls;
    if (cls == NodeClass::cone || cls == NodeClass::arc) CHECK(fld.values[id] == 0.0);
    CHECK(fld.values[id] >= 0.0);
    CHECK(fld.values[id] <= 1.0);
  }
}

TEST_CASE("the zero field is a critical point") {
  const Nonlinearity nl = make_builtin("allen_cahn");
  auto grid = grid_of(2, 16.0, 0.25);
  SolveOptions opts;
  opts.max_iter = 50;
  auto [fld, rep] = minimize(zero_field(grid), nl, opts);
  for (double v : fld.values) CHECK(v == 0.0);
  CHECK(rep.final_step_norm == 0.0);
}

TEST_CASE("gradient descent agrees with gauss-seidel") {
  const Nonlinearity nl = make_builtin("allen_cahn");
  auto grid = grid_of(1, 8.0, 0.25);
  SolveOptions gs;
  auto [f1, r1] = minimize(initial_guess(grid, nl), nl, gs);
  SolveOptions gd;
  gd.method = SolveMethod::gradient_descent;
  gd.max_iter = 100000;
  gd.tol = 1e-11;
  auto [f2, r2] = minimize(initial_guess(grid, nl), nl, gd);
  CHECK(r1.energy == doctest::Approx(r2.energy).epsilon(1e-6));
  double worst = 0.0;
  for (std::size_t i = 0; i < f1.values.size(); ++i)
    worst = std::max(worst, std::abs(f1.values[i] - f2.values[i]));
  CHECK(worst < 1e-4);
}

TEST_CASE("fixed oversized step reports NonDecreaseFailure") {
  const Nonlinearity nl = make_builtin("allen_cahn");
  SolveOptions opts;
  opts.method = SolveMethod::gradient_descent;
  opts.backtrack = false;
  opts.step = 100.0;
  CHECK_THROWS_AS(minimize(initial_guess(grid_of(1, 8.0, 0.25), nl), nl, opts),
                  NonDecreaseFailure);
}

TEST_CASE("m=1 axis ray approaches the planar profile") {
  const Nonlinearity nl = make_builtin("allen_cahn");
  const Profile1D p = build_profile(nl, 20.0, 4001);
  auto grid = grid_of(1, 30.0, 0.25);
  auto [fld, rep] = minimize(initial_guess(grid, nl), nl, {});
  double worst = 0.0;
  for (const auto& nd : grid->nodes) {
    if (nd.cls != NodeClass::axis) continue;
    const double s = grid->s_of(nd.i);
    if (s < 5.0 || s > 15.0) continue;
    worst = std::max(worst,
                     std::abs(fld.values[grid->node_id(nd.i, 0)] - p.value(s * kSqrt1_2)));
  }
  CHECK(worst < 0.05);
  // Neumann flux at the interior axis is first order in h for m = 1
  CHECK(rep.axis_flux_sup < 0.5 * 0.25);
}

TEST_CASE("odd reflection") {
  const Field& fld = solved_m2_r16();
  const SaddleField refl = reflect_odd(fld);
  const TriangleGrid& g = *fld.grid;
  double sup_sector = 0.0;
  for (double v : fld.values) sup_sector = std::max(sup_sector, std::abs(v));
  CHECK(refl.sup_norm() == doctest::Approx(sup_sector).epsilon(1e-15));
  for (int i = 0; i <= g.ni; i += 3) {
    for (int j = 0; j <= g.ni; j += 3) {
      if (!refl.has(i, j)) continue;
      CHECK(refl.at(i, j) + refl.at(j, i) == 0.0);
    }
  }
  for (int i = 0; i <= g.ni; ++i)
    if (refl.has(i, i)) CHECK(refl.at(i, i) == 0.0);

  // reflection requires exact zeros on the cone
  Field bad = fld;
  for (std::size_t id = 0; id < g.nodes.size(); ++id)
    if (g.nodes[id].cls == NodeClass::cone) bad.values[id] = 0.01;
  CHECK_THROWS_AS(reflect_odd(bad), std::invalid_argument);
}

TEST_CASE("stencil consistency: nodal gradient matches the radial operator") {
  // Apply the energy gradient to a smooth analytic field and compare with
  // the continuum operator; the defect must shrink at second order.
  const Nonlinearity nl = make_builtin("allen_cahn");
  auto defect = [&](double h) {
    auto grid = grid_of(3, 12.0, h);
    Field f = zero_field(grid);
    auto uexact = [](double s, double t) {
      return std::sin(0.4 * s) * std::cos(0.3 * t) * 0.2;
    };
    for (std::size_t id = 0; id < grid->nodes.size(); ++id)
      f.values[id] = uexact(grid->s_of(grid->nodes[id].i), grid->t_of(grid->nodes[id].j));
    const auto grad = energy_gradient(f, nl);
    const double am = sector_measure_constant(3);
    double worst = 0.0;
    for (std::size_t id = 0; id < grid->nodes.size(); ++id) {
      const auto& nd = grid->nodes[id];
      if (nd.cls != NodeClass::interior) continue;
      const double s = grid->s_of(nd.i), t = grid->t_of(nd.j);
      if (s < 2.0 || t < 2.0 || s * s + t * t > 10.0 * 10.0) continue;
      const double u = uexact(s, t);
      const double uss = -0.16 * u, utt = -0.09 * u;
      const double us = 0.4 * std::cos(0.4 * s) * std::cos(0.3 * t) * 0.2;
      const double ut = -0.3 * std::sin(0.4 * s) * std::sin(0.3 * t) * 0.2;
      const double op = -(uss + utt) - 2.0 * (us / s + ut / t) - nl.f(u);
      const double discrete = grad[id] / (am * nd.weight);
      worst = std::max(worst, std::abs(discrete - op));
    }
    return worst;
  };
  const double d1 = defect(0.2), d2 = defect(0.1);
  CHECK(d1 / d2 > 2.5);
  CHECK(d1 / d2 < 6.0);
}

TEST_CASE("energy growth: volume control and transition-layer scaling") {
  const Nonlinearity nl = make_builtin("allen_cahn");
  // constant-zero control: slope 2m within 0.1
  for (int m : {1, 2}) {
    const auto z = zero_field_growth(nl, m, {8.0, 16.0, 32.0}, 0.25);
    CHECK(std::abs(z.slope - 2.0 * m) < 0.1);
  }
  // solved field through profile boundary data: slope 2m - 1 within 0.3
  const Profile1D p = build_profile(nl, 20.0, 4001);
  SolveOptions opts;
  opts.bc = BoundaryMode::profile;
  opts.boundary_profile = &p;
  for (int m : {1, 2}) {
    const auto g = energy_growth_study(nl, m, {8.0, 16.0, 32.0}, 0.25, opts);
    CHECK(std::abs(g.slope - (2.0 * m - 1.0)) < 0.3);
    CHECK(g.points.size() == 3);
    CHECK(g.points[0].energy > 0.0);
  }
  CHECK_THROWS_AS(energy_growth_study(nl, 2, {8.0, 16.0}, 0.25), std::invalid_argument);
}

TEST_CASE("restricted energies are monotone in the radius") {
  const Nonlinearity nl = make_builtin("allen_cahn");
  const Field& fld = solved_m2_r16();
  double prev = 0.0;
  for (double R : {4.0, 8.0, 12.0, 16.0}) {
    const double e = restricted_energy(fld, nl, R);
    CHECK(e >= prev);
    prev = e;
  }
  CHECK(reflected_ball_energy(fld, nl, 8.0) ==
        doctest::Approx(2.0 * restricted_energy(fld, nl, 8.0)).epsilon(1e-15));
}
