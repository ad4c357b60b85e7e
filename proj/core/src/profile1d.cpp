#include "saddle/profile1d.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "saddle/errors.hpp"
#include "saddle/quadrature.hpp"

namespace saddle {

namespace {

// Cumulative table of phi(sigma) = \int_0^sigma dw / sqrt(2 G(w)) for
// sigma >= 0, on panels refined dyadically toward the well at M where the
// integrand has its logarithmic blow-up. phi is odd, so negative arguments
// are handled by sign.
class PhiTable {
 public:
  PhiTable(const Nonlinearity& nl, double tau_cover) : nl_(&nl), M_(nl.well()) {
    bp_.push_back(0.0);
    cum_.push_back(0.0);
    extend(tau_cover);
  }

  double max_covered() const { return cum_.back(); }
  double max_sigma() const { return bp_.back(); }

  double eval_abs(double sigma) const {
    // sigma in [0, bp_.back()]
    const auto it = std::upper_bound(bp_.begin(), bp_.end(), sigma);
    const std::size_t k = (it == bp_.begin()) ? 0 : (it - bp_.begin() - 1);
    return cum_[k] + panel(bp_[k], sigma);
  }

  double eval(double sigma) const {
    return sigma >= 0.0 ? eval_abs(sigma) : -eval_abs(-sigma);
  }

  // Solves phi(sigma) = target for target >= 0 by bracketed Newton.
  double invert_abs(double target) const {
    if (target <= 0.0) return 0.0;
    if (target >= cum_.back()) return bp_.back();  // saturated tail
    const auto it = std::upper_bound(cum_.begin(), cum_.end(), target);
    std::size_t k = (it - cum_.begin()) - 1;
    double lo = bp_[k], hi = bp_[k + 1];
    double x = 0.5 * (lo + hi);
    for (int iter = 0; iter < 80; ++iter) {
      const double fx = cum_[k] + panel(bp_[k], x);
      const double err = fx - target;
      if (std::abs(err) <= 1e-13 * (1.0 + target)) return x;
      (err > 0.0 ? hi : lo) = x;
      const double slope_inv = std::sqrt(2.0 * std::max(nl_->G(x), 0.0));
      double xn = x - err * slope_inv;
      if (!(xn > lo && xn < hi)) xn = 0.5 * (lo + hi);
      if (hi - lo <= std::numeric_limits<double>::epsilon() * M_) return 0.5 * (lo + hi);
      x = xn;
    }
    return x;
  }

  double invert(double target) const {
    return target >= 0.0 ? invert_abs(target) : -invert_abs(-target);
  }

 private:
  double integrand(double w) const {
    const double g = nl_->G(w);
    if (!(g > 0.0)) {
      throw QuadratureSingularity("profile quadrature: G vanishes at sigma = " +
                                  std::to_string(w));
    }
    return 1.0 / std::sqrt(2.0 * g);
  }

  double panel(double a, double b) const {
    if (b <= a) return 0.0;
    return integrate_panel([this](double w) { return integrand(w); }, a, b, 24);
  }

  void extend(double tau_cover) {
    const double eps = std::numeric_limits<double>::epsilon();
    while (cum_.back() < tau_cover) {
      const double gap = M_ - bp_.back();
      if (gap < 32.0 * eps * M_) break;  // cannot refine further in binary64
      const double next = M_ - 0.5 * gap;
      cum_.push_back(cum_.back() + panel(bp_.back(), next));
      bp_.push_back(next);
    }
  }

  const Nonlinearity* nl_;
  double M_;
  std::vector<double> bp_, cum_;
};

void validate_for_profile(const Nonlinearity& nl) {
  const double M = nl.well();
  for (int k = 1; k < 2048; ++k) {
    const double u = -M + 2.0 * M * k / 2048.0;
    if (std::abs(u) > M - 1e-9 * M) continue;
    if (!(nl.G(u) > 0.0)) {
      throw QuadratureSingularity("profile: potential vanishes inside the well at u = " +
                                  std::to_string(u));
    }
  }
  // Quadratic well curvature is required for the exponential tails.
  const double d = 1e-4 * M;
  const double curv = 2.0 * nl.G(M - d) / (d * d);
  if (!(curv > 1e-8)) {
    throw InversionFailure("profile: well curvature G''(M) is not positive");
  }
}

}  // namespace

Profile1D build_profile(const Nonlinearity& nl, double tau_max, int n_nodes, double m0) {
  if (!(tau_max >= 5.0)) throw std::invalid_argument("build_profile: tau_max >= 5 required");
  if (n_nodes < 65) throw std::invalid_argument("build_profile: n_nodes >= 65 required");
  const double M = nl.well();
  if (!(std::abs(m0) < M)) throw std::invalid_argument("build_profile: |m0| < M required");
  validate_for_profile(nl);

  Profile1D p;
  p.nl_ = nl;
  p.tau_.resize(n_nodes);
  p.u0_.resize(n_nodes);
  p.u0dot_.resize(n_nodes);
  p.dt_ = 2.0 * tau_max / (n_nodes - 1);
  for (int i = 0; i < n_nodes; ++i) p.tau_[i] = -tau_max + i * p.dt_;

  PhiTable phi(nl, tau_max + 5.0);
  const double shift = (m0 == 0.0) ? 0.0 : phi.eval(m0);

  if (m0 == 0.0) {
    // Odd-symmetric fill: invert on tau >= 0 and mirror.
    for (int i = (n_nodes - 1) / 2; i < n_nodes; ++i) {
      const double sigma = phi.invert(p.tau_[i]);
      p.u0_[i] = sigma;
      p.u0_[n_nodes - 1 - i] = -sigma;
    }
  } else {
    for (int i = 0; i < n_nodes; ++i) p.u0_[i] = phi.invert(p.tau_[i] + shift);
  }

  // Monotonicity hygiene: increments below one ulp collapse to nextafter
  // steps, saturating strictly inside (-M, M).
  const double cap = std::nextafter(M, 0.0);
  for (int i = 0; i < n_nodes; ++i) {
    if (p.u0_[i] > cap) p.u0_[i] = cap;
    if (p.u0_[i] < -cap) p.u0_[i] = -cap;
    if (i > 0 && p.u0_[i] <= p.u0_[i - 1]) {
      const double bumped = std::nextafter(p.u0_[i - 1], M);
      p.u0_[i] = (bumped <= cap) ? bumped : p.u0_[i - 1];
    }
  }

  for (int i = 0; i < n_nodes; ++i)
    p.u0dot_[i] = std::sqrt(2.0 * std::max(nl.G(p.u0_[i]), 0.0));

  // Exponential decay fit over the outer half of the grid, restricted to
  // nodes where the gap to the well is resolvable in binary64.
  std::vector<double> fit_tau, fit_log;
  auto gather = [&](double tau_lo) {
    fit_tau.clear();
    fit_log.clear();
    for (int i = 0; i < n_nodes; ++i) {
      if (p.tau_[i] < tau_lo) continue;
      const double gap = M - p.u0_[i];
      if (gap < 1e-13 * M || !(p.u0dot_[i] > 0.0)) continue;
      fit_tau.push_back(p.tau_[i]);
      fit_log.push_back(std::log(p.u0dot_[i]));
    }
  };
  gather(0.5 * tau_max);
  if (fit_tau.size() < 16) gather(0.25 * tau_max);
  if (fit_tau.size() < 2) throw InversionFailure("profile: decay fit has no usable tail");
  const auto [intercept, slope] = fit_line(fit_tau, fit_log);
  (void)intercept;
  if (!(slope < 0.0)) throw InversionFailure("profile: fitted decay rate is not positive");
  p.decay_c_ = -slope;
  double C = 0.0;
  for (int i = 0; i < n_nodes; ++i)
    C = std::max(C, p.u0dot_[i] * std::exp(p.decay_c_ * std::abs(p.tau_[i])));
  p.decay_C_ = C * (1.0 + 1e-12);

  return p;
}

double Profile1D::value(double tau) const {
  const double M = nl_.well();
  if (tau > tau_.back()) {
    const double gap = M - u0_.back();
    const double v = M - std::max(gap * std::exp(-decay_c_ * (tau - tau_.back())), 1e-300);
    return std::min(v, std::nextafter(M, 0.0));
  }
  if (tau < tau_.front()) {
    const double gap = u0_.front() + M;
    const double v = -M + std::max(gap * std::exp(decay_c_ * (tau - tau_.front())), 1e-300);
    return std::max(v, std::nextafter(-M, 0.0));
  }
  const int n = static_cast<int>(tau_.size());
  int i = static_cast<int>((tau - tau_.front()) / dt_);
  i = std::clamp(i, 0, n - 2);
  const double t = (tau - tau_[i]) / dt_;
  const double t2 = t * t, t3 = t2 * t;
  const double h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
  const double h10 = t3 - 2.0 * t2 + t;
  const double h01 = -2.0 * t3 + 3.0 * t2;
  const double h11 = t3 - t2;
  return h00 * u0_[i] + h10 * dt_ * u0dot_[i] + h01 * u0_[i + 1] + h11 * dt_ * u0dot_[i + 1];
}

double Profile1D::deriv(double tau) const {
  return std::sqrt(2.0 * std::max(nl_.G(value(tau)), 0.0));
}

double Profile1D::second_deriv(double tau) const { return -nl_.f(value(tau)); }

double profile_energy_line(const Profile1D& p) {
  const auto& u = p.u0();
  const auto& d = p.u0dot();
  std::vector<double> integrand(u.size());
  for (std::size_t i = 0; i < u.size(); ++i)
    integrand[i] = 0.5 * d[i] * d[i] + p.nonlinearity().G(u[i]);
  return simpson_uniform(integrand, p.spacing());
}

double one_d_solution(const Profile1D& p, std::span<const double> b, double c,
                      std::span<const double> x) {
  if (b.size() != x.size()) throw DimensionMismatch("one_d_solution: dim(b) != dim(x)");
  double norm2 = 0.0, dot = 0.0;
  for (std::size_t i = 0; i < b.size(); ++i) {
    norm2 += b[i] * b[i];
    dot += b[i] * x[i];
  }
  if (std::abs(norm2 - 1.0) > 1e-9)
    throw std::invalid_argument("one_d_solution: b must be a unit vector");
  return p.value(dot + c);
}

namespace {

// 4th-order second derivative; evaluated away from the outermost two nodes.
double second_diff4(const std::vector<double>& v, std::size_t i, double h) {
  return (-v[i - 2] + 16.0 * v[i - 1] - 30.0 * v[i] + 16.0 * v[i + 1] - v[i + 2]) /
         (12.0 * h * h);
}

}  // namespace

double ode_residual_sup(const Profile1D& p) {
  const auto& u = p.u0();
  const double h = p.spacing();
  double sup = 0.0;
  for (std::size_t i = 2; i + 2 < u.size(); ++i) {
    const double r = second_diff4(u, i, h) + p.nonlinearity().f(u[i]);
    sup = std::max(sup, std::abs(r));
  }
  return sup;
}

double zero_mode_residual_sup(const Profile1D& p) {
  const auto& u = p.u0();
  const auto& d = p.u0dot();
  const double h = p.spacing();
  double sup = 0.0;
  for (std::size_t i = 2; i + 2 < u.size(); ++i) {
    const double r = -second_diff4(d, i, h) - p.nonlinearity().fprime(u[i]) * d[i];
    sup = std::max(sup, std::abs(r));
  }
  return sup;
}

double hamiltonian_residual_sup(const Profile1D& p) {
  const auto& u = p.u0();
  const auto& d = p.u0dot();
  double sup = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i)
    sup = std::max(sup, std::abs(0.5 * d[i] * d[i] - p.nonlinearity().G(u[i])));
  return sup;
}

}  // namespace saddle
