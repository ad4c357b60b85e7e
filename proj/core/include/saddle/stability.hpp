#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "saddle/field.hpp"
#include "saddle/nonlinearity.hpp"
#include "saddle/profile1d.hpp"

namespace saddle {

/// Piecewise test function on (0, inf) with compact support [rho1, rho2]:
/// a linear ramp on [rho1, 2 rho1], the plateau 1 - rho2^(-alpha) on
/// [2 rho1, 1], and rho^(-alpha) - rho2^(-alpha) on [1, rho2].
struct EtaFamily {
  double rho1, rho2, alpha;
  EtaFamily(double rho1_, double rho2_, double alpha_);
};

double eta_eval(const EtaFamily& fam, double rho);
double eta_deriv(const EtaFamily& fam, double rho);

struct PiecewiseLinearEta {
  std::vector<double> rho;    // increasing knots, all > 0
  std::vector<double> value;  // endpoint values must vanish
};

/// I_m(eta) = \int_0^inf rho^(2m-2) eta'^2 - (m-1) rho^(2m-4) eta^2 d rho,
/// by exact per-branch antiderivatives.
double asymptotic_functional(const EtaFamily& fam, int m);
double asymptotic_functional(const PiecewiseLinearEta& eta, int m);

/// (2m-3)^2/4 - (m-1): negative exactly when the radial Hardy constant in
/// dimension 2m-1 loses to the separable curvature coefficient.
double hardy_margin(int m);

struct QuadraticFormReport {
  double value = 0.0;          // gradient + potential + boundary
  double gradient_term = 0.0;  // c_m-normalized wedge integral of W (xi_y^2 + xi_z^2)
  double potential_term = 0.0; // - integral of W f'(v) xi^2
  double boundary_term = 0.0;  // only nonzero for integrated-by-parts routes
  double a_scaling = 1.0;      // divisor applied to value
};

/// Test function on the wedge {-y < z < y}; value and partials, support
/// bound in y, and optional breakpoints where the integrand kinks.
struct XiYZ {
  std::function<double(double, double)> value;
  std::function<double(double, double)> dy;
  std::function<double(double, double)> dz;
  double support_ymax = 0.0;
  std::vector<double> y_breakpoints;
};

/// Linearization background: either the planar profile u0(z) or a computed
/// field read through the rotated coordinates.
class VSource {
 public:
  static VSource from_profile(const Profile1D& p);
  static VSource from_field(const SaddleField& f);
  double value_at(double y, double z) const;

 private:
  const Profile1D* profile_ = nullptr;
  const SaddleField* field_ = nullptr;
};

struct WedgeQuadOptions {
  int y_panels_per_unit = 2;  // extra uniform panels between breakpoints
  int gl_order = 16;
  double z_max = 20.0;        // profile tail truncation
};

/// Second-variation quadratic form at v over the wedge,
///   c_m \int (y^2-z^2)^(m-1) { xi_y^2 + xi_z^2 - f'(v) xi^2 } dy dz,
/// with c_m = a_m 2^(1-m) so the value equals the full-space form on
/// doubly block-radial data. Throws UnsupportedDomain when xi does not
/// vanish near its stated support bound.
QuadraticFormReport quadratic_form_yz(const VSource& v, const XiYZ& xi,
                                      const Nonlinearity& nl, int m,
                                      const WedgeQuadOptions& opts = {});

/// Separable test function eta(y/a) u0dot(z).
XiYZ separable_xi(const EtaFamily& fam, const Profile1D& p, double a);

struct SweepRow {
  double a = 0.0;
  double q_scaled = 0.0;        // Q(xi_a) / a^(2m-3)
  double boundary_decay = 0.0;  // a * u0dot(a rho1)^2
};

struct InstabilitySweepResult {
  std::vector<SweepRow> rows;
  double separable_limit = 0.0;  // c_m (integral of u0dot^2) I_m(eta)
};

InstabilitySweepResult instability_sweep(const Profile1D& p, const Nonlinearity& nl, int m,
                                         const EtaFamily& fam,
                                         const std::vector<double>& a_values,
                                         const WedgeQuadOptions& opts = {});

struct Annulus {
  double inner = 0.0, outer = 0.0;
};

struct SpectrumOptions {
  int max_outer = 400;       // subspace iterations
  double tol = 1e-9;         // relative eigenvalue stall tolerance
  double cg_tol = 1e-10;
  int cg_max_iter = 20000;
  int block_extra = 4;       // Ritz buffer vectors
  unsigned long seed = 424242;
};

struct SpectrumReport {
  std::vector<double> eigenvalues;  // k smallest, ascending
  int morse_count = 0;              // eigenvalues < -neg_tol
  std::optional<Annulus> annulus;
  double neg_tol = 0.0;             // 1e-6 relative to the operator norm scale
  std::vector<std::vector<double>> eigenvectors;  // full-square nodal values
};

/// k smallest eigenvalues of the discrete second variation at the given
/// background over (s,t)-symmetric perturbations, Dirichlet on the outer
/// arc (and outside the annulus when given), via blocked shifted inverse
/// iteration with Gram-Schmidt deflation on the assembled sparse system.
SpectrumReport linearized_spectrum(const SaddleField& fld, const Nonlinearity& nl, int k,
                                   std::optional<Annulus> annulus = {},
                                   const SpectrumOptions& opts = {});

/// Discrete quadratic form of a nodal test function on the full square
/// (values indexed like the SaddleField); mass is the weighted l2 norm.
struct DiscreteFormValue {
  double q = 0.0;
  double mass = 0.0;
};
DiscreteFormValue discrete_quadratic_form(const SaddleField& fld, const Nonlinearity& nl,
                                          const std::vector<double>& xi);

struct ProbeResult {
  double min_q = 0.0;  // over B-normalized trial functions
  double slack = 0.0;
  int trials = 0;
  bool pass = true;
};

/// Random cone-vanishing trial functions (odd-factor polynomials under a
/// radial cutoff), B-normalized; returns the worst discrete form value.
/// Requires the concavity hypothesis.
ProbeResult cone_vanishing_stability_probe(const SaddleField& fld, const Nonlinearity& nl,
                                           int trials, unsigned long seed);

}  // namespace saddle
