#include <doctest.h>

#include <cmath>
#include <memory>
#include <random>

#include "saddle/estimates.hpp"
#include "saddle/solver.hpp"

using namespace saddle;

namespace {

constexpr double kSqrt1_2 = 0.70710678118654752440;
constexpr double kSqrt2 = 1.41421356237309504880;

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

}  // namespace

TEST_CASE("supersolution residual: closed form at a sample node") {
  // z = 1/sqrt2, u0dot(z) = (1/sqrt2) sech^2(z/sqrt2), r = u0dot (1 - 1/2)/sqrt2
  const auto& L = lab();
  const double z = 1.0 * kSqrt1_2;
  const double c = std::cosh(z * kSqrt1_2);
  const double oracle = (1.0 / (kSqrt2 * c * c)) * 0.5 * kSqrt1_2;
  const double r = supersolution_residual(L.profile, 2, 2.0, 1.0);
  CHECK(r == doctest::Approx(oracle).epsilon(1e-10));
  CHECK(r == doctest::Approx(0.19661).epsilon(1e-4));
}

TEST_CASE("supersolution residual: closed form at 1000 random interior nodes") {
  const auto& L = lab();
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> unif(0.25, 15.0);
  double worst = 0.0;
  int tested = 0;
  while (tested < 1000) {
    const double t = unif(rng);
    const double s = t + unif(rng) * 0.5 + 0.05;
    if (s * s + t * t > 16.0 * 16.0) continue;
    ++tested;
    const double z = (s - t) * kSqrt1_2;
    const double c = std::cosh(z * kSqrt1_2);
    const double oracle = (1.0 / (kSqrt2 * c * c)) * kSqrt1_2 * (1.0 / t - 1.0 / s);
    worst = std::max(worst, std::abs(supersolution_residual(L.profile, 2, s, t) - oracle));
  }
  CHECK(worst < 1e-10);
}

TEST_CASE("supersolution sign: nonnegative on the open sector") {
  const auto& L = lab();
  const auto rep = supersolution_check(L.profile, L.nl, *L.grid);
  CHECK(rep.pass);
  CHECK(rep.worst_violation <= 0.0);

  // m = 1: identically zero
  const auto g1 = std::make_shared<const TriangleGrid>(build_grid(1, 12.0, 0.25));
  const auto rep1 = supersolution_check(L.profile, L.nl, *g1);
  CHECK(rep1.pass);
  CHECK(rep1.worst_violation == doctest::Approx(0.0).epsilon(1e-300));
  for (auto [s, t] : {std::pair{3.0, 1.0}, std::pair{8.0, 0.5}})
    CHECK(supersolution_residual(L.profile, 1, s, t) == 0.0);
}

TEST_CASE("modica: constant and exact-equality cases") {
  const auto& L = lab();
  // constant zero field: (0)^2/2 - G(0) = -0.25 at every node, passes
  const SaddleField zero = reflect_odd(zero_field(L.grid));
  const auto rep0 = modica_check(zero, L.nl);
  CHECK(rep0.pass);
  CHECK(rep0.worst_violation == doctest::Approx(-0.25).epsilon(1e-14));

  // analytic-gradient equality case
  const auto eq = modica_equality_1d(L.profile, L.nl, *L.grid);
  CHECK(eq.pass);
  CHECK(eq.worst_violation < 1e-9);

  // stencil route on the same planar comparison field: within 10 h^2 and
  // shrinking at second order
  const auto coarse = modica_check(profile_saddle_field(L.profile, L.grid), L.nl);
  CHECK(coarse.pass);
  const auto gfine = std::make_shared<const TriangleGrid>(build_grid(2, 16.0, 0.125));
  const auto fine = modica_check(profile_saddle_field(L.profile, gfine), L.nl);
  CHECK(coarse.worst_violation / fine.worst_violation > 2.5);
  CHECK(coarse.worst_violation / fine.worst_violation < 6.0);
}

TEST_CASE("modica on the converged solve") {
  const auto& L = lab();
  const auto rep = modica_check(reflect_odd(L.solved), L.nl);
  CHECK(rep.pass);
  CHECK(rep.worst_violation <= 10.0 * 0.25 * 0.25);
}

TEST_CASE("pointwise bound on the converged solve and equality case") {
  const auto& L = lab();
  const SaddleField refl = reflect_odd(L.solved);
  const auto rep = pointwise_bound_check(refl, L.profile);
  CHECK(rep.pass);
  CHECK(rep.worst_violation <= 0.0 + 1e-12);

  // sampling the comparison function itself: equality up to rounding of the
  // mirrored interpolation
  const auto eq = pointwise_bound_check(profile_saddle_field(L.profile, L.grid), L.profile);
  CHECK(eq.worst_violation <= 1e-14);

  // inflated field must fail with a visible violation
  std::vector<double> scaled = L.solved.values;
  for (double& v : scaled) v = std::min(1.2 * v, 1.2);
  Field big{L.solved.grid, scaled};
  const auto bad = pointwise_bound_check(reflect_odd(big), L.profile, 1e-3);
  CHECK_FALSE(bad.pass);
  CHECK(bad.worst_violation > 0.15);
}

TEST_CASE("strict interior bound |u| < M on the converged solve") {
  const auto& L = lab();
  for (std::size_t id = 0; id < L.grid->nodes.size(); ++id) {
    if (!L.grid->nodes[id].inside) continue;
    CHECK(std::abs(L.solved.values[id]) < 1.0);
  }
}
