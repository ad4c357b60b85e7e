#pragma once

#include <span>
#include <vector>

#include "saddle/nonlinearity.hpp"

namespace saddle {

/// Tabulated increasing heteroclinic connecting -M to M, normalized to
/// vanish at tau = 0 (or at the chosen anchor m0). The derivative table is
/// sqrt(2 G(u0)), so the first-integral identity holds by construction.
/// Immutable after construction; evaluation is pure and thread-safe.
class Profile1D {
 public:
  const std::vector<double>& tau_grid() const { return tau_; }
  const std::vector<double>& u0() const { return u0_; }
  const std::vector<double>& u0dot() const { return u0dot_; }
  double decay_c() const { return decay_c_; }
  double decay_C() const { return decay_C_; }
  double tau_max() const { return tau_.back(); }
  double spacing() const { return dt_; }
  double well() const { return nl_.well(); }
  const Nonlinearity& nonlinearity() const { return nl_; }

  /// Cubic Hermite inside the grid; fitted exponential tails outside,
  /// strictly inside (-M, M).
  double value(double tau) const;
  /// sqrt(2 G(value)); consistent with the first integral everywhere.
  double deriv(double tau) const;
  /// -f(value); the tabulated second derivative along the connection.
  double second_deriv(double tau) const;

  friend Profile1D build_profile(const Nonlinearity&, double, int, double);

 private:
  Profile1D() = default;

  Nonlinearity nl_;
  std::vector<double> tau_, u0_, u0dot_;
  double dt_ = 0.0;
  double decay_c_ = 0.0, decay_C_ = 0.0;
};

/// Builds the profile on a uniform grid over [-tau_max, tau_max] by
/// inverting the increasing map sigma -> \int_{m0}^{sigma} dw / sqrt(2 G(w)).
///
/// Throws QuadratureSingularity if G vanishes strictly inside (-M, M),
/// InversionFailure if the map is degenerate (e.g. flat well curvature).
Profile1D build_profile(const Nonlinearity& nl, double tau_max = 20.0, int n_nodes = 4001,
                        double m0 = 0.0);

/// Grid integral of 1/2 u0dot^2 + G(u0) (composite Simpson).
double profile_energy_line(const Profile1D& p);

/// u0(b . x + c) for a unit vector b.
double one_d_solution(const Profile1D& p, std::span<const double> b, double c,
                      std::span<const double> x);

/// sup_i | d^2 u0 / d tau^2 + f(u0) | with 4th-order central stencils.
double ode_residual_sup(const Profile1D& p);

/// sup_i | -(u0dot)'' - f'(u0) u0dot | with 4th-order central stencils.
double zero_mode_residual_sup(const Profile1D& p);

/// sup_i | u0dot^2 / 2 - G(u0) | over the grid.
double hamiltonian_residual_sup(const Profile1D& p);

}  // namespace saddle
