#include <doctest.h>

#include <cmath>
#include <memory>
#include <random>
#include <stdexcept>

#include "saddle/errors.hpp"
#include "saddle/quadrature.hpp"
#include "saddle/solver.hpp"
#include "saddle/stability.hpp"

using namespace saddle;

namespace {

struct Lab {
  Nonlinearity nl = make_builtin("allen_cahn");
  Profile1D profile = build_profile(nl, 20.0, 4001);
  std::shared_ptr<const TriangleGrid> grid =
      std::make_shared<const TriangleGrid>(build_grid(2, 16.0, 0.25));
  Field solved;
  Lab() : solved(minimize(initial_guess(grid, nl), nl, {}).first) {}
};

const Lab& lab() {
  static const Lab L;
  return L;
}

double functional_by_quadrature(const EtaFamily& fam, int m) {
  auto integrand = [&](double r) {
    const double e = eta_eval(fam, r), d = eta_deriv(fam, r);
    return std::pow(r, 2.0 * m - 2.0) * (d * d - (m - 1.0) * e * e / (r * r));
  };
  // integrate branch by branch; the integrand kinks at the branch points
  double total = 0.0;
  const double pts[4] = {fam.rho1, 2.0 * fam.rho1, 1.0, fam.rho2};
  for (int k = 0; k < 3; ++k)
    total += adaptive_simpson(integrand, pts[k] * (1.0 + 1e-14), pts[k + 1] * (1.0 - 1e-14),
                              1e-11, 30);
  return total;
}

}  // namespace

TEST_CASE("eta family: branch values and support") {
  const EtaFamily fam(0.05, 100.0, 0.75);
  CHECK(eta_eval(fam, 0.05) == 0.0);
  CHECK(eta_eval(fam, 100.0) == 0.0);
  CHECK(eta_eval(fam, 0.01) == 0.0);
  CHECK(eta_eval(fam, 150.0) == 0.0);
  const double plateau = 1.0 - std::pow(100.0, -0.75);
  CHECK(eta_eval(fam, 1.0) == doctest::Approx(0.9683772233983162).epsilon(1e-14));
  for (double rho : {0.1, 0.3, 0.6, 1.0})
    CHECK(eta_eval(fam, rho) == doctest::Approx(plateau).epsilon(1e-14));
  // linear ramp midpoint
  CHECK(eta_eval(fam, 0.075) == doctest::Approx(0.5 * plateau).epsilon(1e-14));

  CHECK_THROWS_AS(EtaFamily(0.6, 100.0, 0.75), std::invalid_argument);
  CHECK_THROWS_AS(EtaFamily(0.05, 0.9, 0.75), std::invalid_argument);
  CHECK_THROWS_AS(EtaFamily(0.05, 100.0, 0.4), std::invalid_argument);
}

TEST_CASE("hardy margins") {
  CHECK(hardy_margin(2) == -0.75);
  CHECK(hardy_margin(3) == 0.25);
  CHECK(hardy_margin(4) == 3.25);
  CHECK_THROWS_AS(hardy_margin(1), std::invalid_argument);
}

TEST_CASE("asymptotic functional: closed form vs quadrature oracle") {
  for (const auto& fam :
       {EtaFamily(0.05, 100.0, 0.75), EtaFamily(0.1, 20.0, 0.6), EtaFamily(0.02, 500.0, 0.9)}) {
    for (int m : {2, 3, 4}) {
      const double exact = asymptotic_functional(fam, m);
      const double quad = functional_by_quadrature(fam, m);
      CHECK(exact == doctest::Approx(quad).epsilon(1e-8));
    }
  }
  // frozen reference value for the canonical family
  CHECK(asymptotic_functional(EtaFamily(0.05, 100.0, 0.75), 2) ==
        doctest::Approx(-1.0896858).epsilon(1e-6));
}

TEST_CASE("asymptotic functional sign flips with the hardy margin") {
  const EtaFamily fam(0.05, 100.0, 0.75);
  CHECK(asymptotic_functional(fam, 2) < -0.4);  // margin -3/4: instability
  CHECK(asymptotic_functional(fam, 3) >= 0.0);  // margin +1/4
  CHECK(asymptotic_functional(fam, 4) >= 0.0);
}

TEST_CASE("piecewise-linear eta: exact integration and dilation covariance") {
  PiecewiseLinearEta eta;
  eta.rho = {0.5, 1.0, 2.0, 4.0};
  eta.value = {0.0, 1.0, 0.7, 0.0};
  for (int m : {2, 3}) {
    const double exact = asymptotic_functional(eta, m);
    const double quad = adaptive_simpson(
        [&](double r) {
          // piecewise-linear interpolation of eta and its slope
          double e = 0.0, d = 0.0;
          for (std::size_t k = 0; k + 1 < eta.rho.size(); ++k) {
            if (r >= eta.rho[k] && r <= eta.rho[k + 1]) {
              const double B =
                  (eta.value[k + 1] - eta.value[k]) / (eta.rho[k + 1] - eta.rho[k]);
              e = eta.value[k] + B * (r - eta.rho[k]);
              d = B;
              break;
            }
          }
          return std::pow(r, 2.0 * m - 2.0) * (d * d - (m - 1.0) * e * e / (r * r));
        },
        0.5, 4.0, 1e-12, 48);
    CHECK(exact == doctest::Approx(quad).epsilon(1e-8));

    // eta(lambda rho) scales the functional by lambda^{-(2m-3)}
    for (double lambda : {2.0, 4.0}) {
      PiecewiseLinearEta dil;
      for (double r : eta.rho) dil.rho.push_back(r / lambda);
      dil.value = eta.value;
      CHECK(asymptotic_functional(dil, m) ==
            doctest::Approx(std::pow(lambda, -(2.0 * m - 3.0)) * exact).epsilon(1e-12));
    }
  }
  PiecewiseLinearEta bad;
  bad.rho = {0.5, 1.0};
  bad.value = {0.0, 1.0};
  CHECK_THROWS_AS(asymptotic_functional(bad, 2), std::invalid_argument);
}

TEST_CASE("wedge quadratic form: zero input and dense oracle") {
  const auto& L = lab();
  XiYZ zero;
  zero.value = [](double, double) { return 0.0; };
  zero.dy = zero.value;
  zero.dz = zero.value;
  zero.support_ymax = 5.0;
  const auto rep0 = quadratic_form_yz(VSource::from_profile(L.profile), zero, L.nl, 2);
  CHECK(rep0.value == 0.0);
  CHECK(rep0.value == rep0.gradient_term + rep0.potential_term + rep0.boundary_term);

  // separable bump at a = 1 vs a dense midpoint-rule oracle
  const EtaFamily fam(0.2, 3.0, 0.75);
  const XiYZ xi = separable_xi(fam, L.profile, 1.0);
  const auto rep = quadratic_form_yz(VSource::from_profile(L.profile), xi, L.nl, 2);
  double oracle = 0.0;
  const int ny = 2400, nz = 2400;
  const double ymax = 3.0, zmax = 12.0;
  for (int i = 0; i < ny; ++i) {
    const double y = (i + 0.5) * ymax / ny;
    for (int j = 0; j < nz; ++j) {
      const double z = -std::min(y, zmax) + (j + 0.5) * 2.0 * std::min(y, zmax) / nz;
      const double W = y * y - z * z;
      if (W <= 0.0) continue;
      const double v = xi.value(y, z), gy = xi.dy(y, z), gz = xi.dz(y, z);
      const double f = gy * gy + gz * gz - L.nl.fprime(L.profile.value(z)) * v * v;
      oracle += W * f * (ymax / ny) * (2.0 * std::min(y, zmax) / nz);
    }
  }
  oracle *= wedge_measure_constant(2);
  CHECK(rep.value == doctest::Approx(oracle).epsilon(1e-5));

  XiYZ nonvanishing = xi;
  nonvanishing.support_ymax = 2.0;  // eta is ~plateau-height at rho = 2/3... not zero
  CHECK_THROWS_AS(quadratic_form_yz(VSource::from_profile(L.profile), nonvanishing, L.nl, 2),
                  UnsupportedDomain);
}

TEST_CASE("instability sweep: decreasing toward the separable limit, final < 0") {
  const auto& L = lab();
  const EtaFamily fam(0.05, 100.0, 0.75);
  const auto sweep = instability_sweep(L.profile, L.nl, 2, fam, {5.0, 10.0, 20.0, 40.0});
  REQUIRE(sweep.rows.size() == 4);
  CHECK(sweep.rows.back().q_scaled < 0.0);
  // the scaled values approach the predicted separable limit
  CHECK(sweep.separable_limit ==
        doctest::Approx(wedge_measure_constant(2) * profile_energy_line(L.profile) *
                        asymptotic_functional(fam, 2))
            .epsilon(1e-12));
  CHECK(std::abs(sweep.rows.back().q_scaled - sweep.separable_limit) <
        0.05 * std::abs(sweep.separable_limit));
  // boundary correction decays along the tail of the sweep
  CHECK(sweep.rows.back().boundary_decay < sweep.rows[2].boundary_decay);

  // m = 3: the scaled form stays nonnegative in the limit (and already at a = 40)
  const auto sweep3 = instability_sweep(L.profile, L.nl, 3, fam, {5.0, 10.0, 20.0, 40.0});
  CHECK(sweep3.separable_limit >= 0.0);
  CHECK(sweep3.rows.back().q_scaled > -1e-10);

  // a = 1 equals the direct evaluation
  const auto one = instability_sweep(L.profile, L.nl, 2, EtaFamily(0.2, 3.0, 0.75), {1.0});
  const auto direct = quadratic_form_yz(VSource::from_profile(L.profile),
                                        separable_xi(EtaFamily(0.2, 3.0, 0.75), L.profile, 1.0),
                                        L.nl, 2);
  CHECK(one.rows[0].q_scaled == doctest::Approx(direct.value).epsilon(1e-12));

  CHECK_THROWS_AS(instability_sweep(L.profile, L.nl, 2, fam, {0.5}), std::invalid_argument);
}

TEST_CASE("wedge form with a cone-vanishing direction stays nonnegative") {
  const auto& L = lab();
  const SaddleField refl = reflect_odd(L.solved);
  XiYZ xi;  // odd factor z kills the direction along the cone line z = 0
  auto env = [](double y, double z) {
    return std::exp(-((y - 5.0) * (y - 5.0) + z * z) / 2.0);
  };
  xi.value = [&](double y, double z) { return z * env(y, z); };
  xi.dy = [&](double y, double z) { return -z * (y - 5.0) * env(y, z); };
  xi.dz = [&](double y, double z) { return (1.0 - z * z) * env(y, z); };
  xi.support_ymax = 10.5;
  const auto rep = quadratic_form_yz(VSource::from_field(refl), xi, L.nl, 2);
  CHECK(rep.value >= -10.0 * L.grid->h * L.grid->h);
}

TEST_CASE("everywhere-zero eta gives a zero functional") {
  PiecewiseLinearEta eta;
  eta.rho = {1.0, 2.0, 3.0};
  eta.value = {0.0, 0.0, 0.0};
  CHECK(asymptotic_functional(eta, 2) == 0.0);
}

TEST_CASE("comparison principle: field form below profile form") {
  const auto& L = lab();
  const SaddleField refl = reflect_odd(L.solved);
  for (double a : {1.0, 2.0}) {
    const EtaFamily fam(0.05, 4.0, 0.75);
    const XiYZ xi = separable_xi(fam, L.profile, a);
    const auto qf = quadratic_form_yz(VSource::from_field(refl), xi, L.nl, 2);
    const auto qp = quadratic_form_yz(VSource::from_profile(L.profile), xi, L.nl, 2);
    CHECK(qf.value <= qp.value + 1e-6 * std::abs(qp.value));
  }
}

TEST_CASE("grid form vs wedge quadrature (change of variables)") {
  const auto& L = lab();
  const SaddleField refl = reflect_odd(L.solved);
  const double h = L.grid->h;
  std::vector<double> xi_nodal(refl.size(), 0.0);
  auto smooth = [](double y, double z) {
    const double g = std::exp(-((y - 4.0) * (y - 4.0) + z * z) / 2.0);
    return g * std::exp(-0.002 * std::pow(y - 4.0, 8.0));
  };
  for (int i = 0; i <= L.grid->ni; ++i) {
    for (int j = 0; j <= L.grid->ni; ++j) {
      const int fid = refl.full_id(i, j);
      if (fid < 0 || refl.cls(i, j) == NodeClass::arc) continue;
      const double s = i * h, t = j * h;
      xi_nodal[fid] = smooth((s + t) / std::sqrt(2.0), (s - t) / std::sqrt(2.0));
    }
  }
  const auto grid_form = discrete_quadratic_form(refl, L.nl, xi_nodal);
  XiYZ xi;
  xi.value = smooth;
  xi.dy = [&](double y, double z) {
    return smooth(y, z) * (-(y - 4.0) - 0.016 * std::pow(y - 4.0, 7.0));
  };
  xi.dz = [&](double y, double z) { return smooth(y, z) * (-z); };
  xi.support_ymax = 9.0;
  const auto wedge = quadratic_form_yz(VSource::from_field(refl), xi, L.nl, 2);
  CHECK(grid_form.q == doctest::Approx(wedge.value).epsilon(0.4 * h * h));
}

TEST_CASE("spectrum: planar instability for m = 1 (sign only)") {
  const Nonlinearity nl = make_builtin("allen_cahn");
  auto grid = std::make_shared<const TriangleGrid>(build_grid(1, 12.0, 0.25));
  auto [fld, rep] = minimize(initial_guess(grid, nl), nl, {});
  const auto sr = linearized_spectrum(reflect_odd(fld), nl, 3);
  CHECK(sr.eigenvalues[0] < -sr.neg_tol);
  CHECK(sr.morse_count >= 1);
  // eigenvalues ascend and the reported count matches the list
  int count = 0;
  for (std::size_t i = 0; i < sr.eigenvalues.size(); ++i) {
    if (i > 0) CHECK(sr.eigenvalues[i] >= sr.eigenvalues[i - 1] - 1e-12);
    if (sr.eigenvalues[i] < -sr.neg_tol) ++count;
  }
  CHECK(count == sr.morse_count);
  // returned directions achieve their Rayleigh quotients
  for (int c = 0; c < 2; ++c) {
    const auto fv = discrete_quadratic_form(reflect_odd(fld), nl, sr.eigenvectors[c]);
    CHECK(fv.q / fv.mass == doctest::Approx(sr.eigenvalues[c]).epsilon(1e-6));
  }
}

TEST_CASE("spectrum: four-dimensional instability at desk scale") {
  const auto& L = lab();
  const auto sr = linearized_spectrum(reflect_odd(L.solved), L.nl, 3);
  CHECK(sr.eigenvalues[0] < -sr.neg_tol);
  CHECK(sr.morse_count >= 1);
}

TEST_CASE("spectrum: Dirichlet domain monotonicity within one background") {
  const auto& L = lab();
  const SaddleField refl = reflect_odd(L.solved);
  const auto sub = linearized_spectrum(refl, L.nl, 1, Annulus{0.0, 10.0});
  const auto full = linearized_spectrum(refl, L.nl, 1);
  CHECK(sub.eigenvalues[0] >= full.eigenvalues[0] - 1e-8);
}

TEST_CASE("spectrum: zero-mode Rayleigh quotient decays with widening bumps") {
  // weight-free strip: the profile derivative times a wide bump has a small
  // positive Rayleigh quotient that decreases toward zero
  const auto& L = lab();
  const double zc = 6.0, hh = 0.05;
  auto rayleigh = [&](double width) {
    const int nz = static_cast<int>(2.0 * zc / hh);
    const int ny = static_cast<int>(width / hh);
    double num = 0.0, den = 0.0;
    auto bump = [&](double y) { return std::sin(3.14159265358979323846 * y / width); };
    for (int i = 1; i < ny; ++i) {
      const double y = i * hh;
      for (int j = 1; j < nz; ++j) {
        const double z = -zc + j * hh;
        const double v = bump(y) * L.profile.deriv(z);
        const double vy = (bump(y + hh) - bump(y - hh)) / (2.0 * hh) * L.profile.deriv(z);
        const double vz =
            bump(y) * (L.profile.deriv(z + hh) - L.profile.deriv(z - hh)) / (2.0 * hh);
        num += (vy * vy + vz * vz - L.nl.fprime(L.profile.value(z)) * v * v);
        den += v * v;
      }
    }
    return num / den;
  };
  const double r10 = rayleigh(10.0), r20 = rayleigh(20.0), r40 = rayleigh(40.0);
  CHECK(r20 < r10);
  CHECK(r40 < r20);
  CHECK(r40 > -1e-4);
  CHECK(r40 < 0.02);
}

TEST_CASE("spectrum: argument validation and failure mode") {
  const auto& L = lab();
  const SaddleField refl = reflect_odd(L.solved);
  CHECK_THROWS_AS(linearized_spectrum(refl, L.nl, 0), std::invalid_argument);
  CHECK_THROWS_AS(linearized_spectrum(refl, L.nl, 21), std::invalid_argument);
  SpectrumOptions opts;
  opts.max_outer = 1;
  CHECK_THROWS_AS(linearized_spectrum(refl, L.nl, 2, {}, opts), EigenConvergenceFailure);
}

TEST_CASE("cone-vanishing probe: nonnegative within slack") {
  const auto& L = lab();
  const SaddleField refl = reflect_odd(L.solved);
  const auto pr = cone_vanishing_stability_probe(refl, L.nl, 80, 20240817);
  CHECK(pr.pass);
  CHECK(pr.min_q >= -pr.slack);

  // determinism under the same seed
  const auto pr2 = cone_vanishing_stability_probe(refl, L.nl, 80, 20240817);
  CHECK(pr.min_q == pr2.min_q);

  // contrast case: the separable direction without the cone constraint is
  // negative (from the sweep)
  const auto sweep = instability_sweep(L.profile, L.nl, 2, EtaFamily(0.05, 100.0, 0.75),
                                       {40.0});
  CHECK(sweep.rows[0].q_scaled < 0.0);
  CHECK(pr.min_q > sweep.rows[0].q_scaled);

  // concavity precondition
  const Nonlinearity convex = Nonlinearity::odd_polynomial({1.0, 1.0}, 1.0);
  CHECK_THROWS_AS(cone_vanishing_stability_probe(refl, convex, 10, 1), std::invalid_argument);
}
