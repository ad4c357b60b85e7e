#pragma once

#include <string>

#include "saddle/field.hpp"
#include "saddle/nonlinearity.hpp"
#include "saddle/profile1d.hpp"

namespace saddle {

struct EstimateReport {
  std::string name;
  double worst_violation = 0.0;  // positive = violated
  double worst_s = 0.0, worst_t = 0.0;
  double tolerance_used = 0.0;
  bool pass = true;
};

/// max over checked nodes of |grad_h u|^2 / 2 - G(u), central stencils,
/// excluding the one-sided layer (Dirichlet nodes and their neighbors).
/// Default tolerance 10 h^2.
EstimateReport modica_check(const SaddleField& fld, const Nonlinearity& nl,
                            double tolerance = -1.0);

/// Equality case: the planar profile composed with the cone distance,
/// checked with its analytic gradient |grad u| = u0dot(z). Tight tolerance.
EstimateReport modica_equality_1d(const Profile1D& p, const Nonlinearity& nl,
                                  const TriangleGrid& grid, double tolerance = 1e-9);

/// max over nodes of |u(s,t)| - |u0((s-t)/sqrt2)|. Default tolerance 10 h^2.
EstimateReport pointwise_bound_check(const SaddleField& fld, const Profile1D& p,
                                     double tolerance = -1.0);

/// Residual of the profile-over-the-cone comparison function,
/// (m-1) (u0dot(z)/sqrt2) (1/t - 1/s); nonnegative on {s > t > 0}.
double supersolution_residual(const Profile1D& p, int m, double s, double t);

/// Checks supersolution_residual >= 0 at every interior node with t > 0.
EstimateReport supersolution_check(const Profile1D& p, const Nonlinearity& nl,
                                   const TriangleGrid& grid, double tolerance = 1e-12);

/// Samples u0((s-t)/sqrt2) on the full quarter-plane square.
SaddleField profile_saddle_field(const Profile1D& p,
                                 std::shared_ptr<const TriangleGrid> grid);

}  // namespace saddle
