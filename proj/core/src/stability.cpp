#include "saddle/stability.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "saddle/errors.hpp"
#include "saddle/quadrature.hpp"

namespace saddle {

namespace {
constexpr double kSqrt1_2 = 0.70710678118654752440;
}

EtaFamily::EtaFamily(double rho1_, double rho2_, double alpha_)
    : rho1(rho1_), rho2(rho2_), alpha(alpha_) {
  if (!(rho1 > 0.0 && 2.0 * rho1 < 1.0 && rho2 > 1.0))
    throw std::invalid_argument("EtaFamily: require 0 < 2 rho1 < 1 < rho2");
  if (!(alpha > 0.5 && alpha < 1.0))
    throw std::invalid_argument("EtaFamily: require 1/2 < alpha < 1");
}

double eta_eval(const EtaFamily& fam, double rho) {
  const double K = 1.0 - std::pow(fam.rho2, -fam.alpha);
  if (rho <= fam.rho1 || rho >= fam.rho2) return 0.0;
  if (rho <= 2.0 * fam.rho1) return K * (rho - fam.rho1) / fam.rho1;
  if (rho <= 1.0) return K;
  return std::pow(rho, -fam.alpha) - std::pow(fam.rho2, -fam.alpha);
}

double eta_deriv(const EtaFamily& fam, double rho) {
  const double K = 1.0 - std::pow(fam.rho2, -fam.alpha);
  if (rho <= fam.rho1 || rho >= fam.rho2) return 0.0;
  if (rho <= 2.0 * fam.rho1) return K / fam.rho1;
  if (rho <= 1.0) return 0.0;
  return -fam.alpha * std::pow(rho, -fam.alpha - 1.0);
}

double asymptotic_functional(const EtaFamily& fam, int m) {
  if (m < 1) throw std::invalid_argument("asymptotic_functional: m >= 1");
  const double r1 = fam.rho1, r2 = fam.rho2, a = fam.alpha;
  const double K = 1.0 - std::pow(r2, -a);
  const double K2 = K * K;
  const double pg = 2.0 * m - 2.0;  // rho power on the gradient term
  const double pp = 2.0 * m - 4.0;  // rho power on the Hardy term

  double grad = K2 / (r1 * r1) * power_integral(r1, 2.0 * r1, pg);
  grad += a * a * power_integral(1.0, r2, pp - 2.0 * a);

  double pot = K2 / (r1 * r1) *
               (power_integral(r1, 2.0 * r1, pp + 2.0) -
                2.0 * r1 * power_integral(r1, 2.0 * r1, pp + 1.0) +
                r1 * r1 * power_integral(r1, 2.0 * r1, pp));
  pot += K2 * power_integral(2.0 * r1, 1.0, pp);
  const double r2ma = std::pow(r2, -a);
  pot += power_integral(1.0, r2, pp - 2.0 * a) - 2.0 * r2ma * power_integral(1.0, r2, pp - a) +
         r2ma * r2ma * power_integral(1.0, r2, pp);

  return grad - (m - 1) * pot;
}

double asymptotic_functional(const PiecewiseLinearEta& eta, int m) {
  if (m < 1) throw std::invalid_argument("asymptotic_functional: m >= 1");
  const std::size_t n = eta.rho.size();
  if (n < 2 || eta.value.size() != n)
    throw std::invalid_argument("asymptotic_functional: malformed piecewise eta");
  if (eta.value.front() != 0.0 || eta.value.back() != 0.0)
    throw std::invalid_argument("asymptotic_functional: eta must vanish at the support ends");
  const double pg = 2.0 * m - 2.0, pp = 2.0 * m - 4.0;
  double grad = 0.0, pot = 0.0;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    const double r0 = eta.rho[k], r1 = eta.rho[k + 1];
    if (!(r0 > 0.0 && r1 > r0))
      throw std::invalid_argument("asymptotic_functional: knots must increase and stay > 0");
    const double B = (eta.value[k + 1] - eta.value[k]) / (r1 - r0);
    const double A = eta.value[k] - B * r0;
    grad += B * B * power_integral(r0, r1, pg);
    pot += A * A * power_integral(r0, r1, pp) + 2.0 * A * B * power_integral(r0, r1, pp + 1.0) +
           B * B * power_integral(r0, r1, pp + 2.0);
  }
  return grad - (m - 1) * pot;
}

double hardy_margin(int m) {
  if (m < 2) throw std::invalid_argument("hardy_margin: m >= 2 required");
  const double q = 2.0 * m - 3.0;
  return q * q / 4.0 - (m - 1.0);
}

VSource VSource::from_profile(const Profile1D& p) {
  VSource v;
  v.profile_ = &p;
  return v;
}

VSource VSource::from_field(const SaddleField& f) {
  VSource v;
  v.field_ = &f;
  return v;
}

double VSource::value_at(double y, double z) const {
  if (profile_) return profile_->value(z);
  const double s = std::max((y + z) * kSqrt1_2, 0.0);
  const double t = std::max((y - z) * kSqrt1_2, 0.0);
  return field_->interp(s, t);
}

namespace {

// Geometric panels on wide-ratio intervals, uniform otherwise.
void make_panels(double a, double b, std::vector<double>& pts) {
  if (b <= a + 1e-15) return;
  if (a > 0.0 && b / a > 4.0) {
    const int n = static_cast<int>(std::ceil(std::log2(b / a)));
    for (int k = 1; k < n; ++k) pts.push_back(a * std::pow(b / a, double(k) / n));
  } else {
    const int n = std::max(2, static_cast<int>(std::ceil((b - a) / 0.5)));
    const int capped = std::min(n, 64);
    for (int k = 1; k < capped; ++k) pts.push_back(a + (b - a) * k / capped);
  }
}

}  // namespace

QuadraticFormReport quadratic_form_yz(const VSource& v, const XiYZ& xi, const Nonlinearity& nl,
                                      int m, const WedgeQuadOptions& opts) {
  if (!(xi.support_ymax > 0.0))
    throw std::invalid_argument("quadratic_form_yz: xi needs a positive support bound");
  // Compact support means xi must be negligible at its stated bound.
  {
    const double ytest = xi.support_ymax * (1.0 - 1e-12);
    for (double zfrac : {0.0, 0.3, 0.7, 0.99}) {
      const double z = std::min(ytest, opts.z_max) * zfrac;
      if (std::abs(xi.value(ytest, z)) > 1e-8)
        throw UnsupportedDomain("quadratic_form_yz: xi does not vanish near y_max");
    }
  }

  std::vector<double> ypts{0.0, xi.support_ymax};
  for (double b : xi.y_breakpoints)
    if (b > 0.0 && b < xi.support_ymax) ypts.push_back(b);
  std::sort(ypts.begin(), ypts.end());
  ypts.erase(std::unique(ypts.begin(), ypts.end()), ypts.end());
  std::vector<double> panels;
  panels.push_back(ypts.front());
  for (std::size_t k = 0; k + 1 < ypts.size(); ++k) {
    make_panels(ypts[k], ypts[k + 1], panels);
    panels.push_back(ypts[k + 1]);
  }
  std::sort(panels.begin(), panels.end());

  const GaussRule& rule = gauss_legendre(opts.gl_order);
  double grad = 0.0, pot = 0.0;

  auto z_line = [&](double y, double& gacc, double& pacc) {
    const double zc = std::min(y, opts.z_max);
    if (!(zc > 0.0)) return;
    const int zpanels = std::max(2, static_cast<int>(std::ceil(2.0 * zc / 0.5)));
    const int zp = std::min(zpanels, 160);
    const double dz = 2.0 * zc / zp;
    for (int q = 0; q < zp; ++q) {
      const double za = -zc + q * dz;
      const double mid = za + 0.5 * dz, half = 0.5 * dz;
      for (int i = 0; i < opts.gl_order; ++i) {
        const double z = mid + half * rule.nodes[i];
        const double wq = half * rule.weights[i];
        const double W = std::pow(std::max(y * y - z * z, 0.0), m - 1);
        if (W == 0.0) continue;
        const double val = xi.value(y, z);
        const double gy = xi.dy(y, z);
        const double gz = xi.dz(y, z);
        const double fp = nl.fprime(v.value_at(y, z));
        gacc += wq * W * (gy * gy + gz * gz);
        pacc -= wq * W * fp * val * val;
      }
    }
  };

  for (std::size_t k = 0; k + 1 < panels.size(); ++k) {
    const double mid = 0.5 * (panels[k] + panels[k + 1]);
    const double half = 0.5 * (panels[k + 1] - panels[k]);
    if (!(half > 0.0)) continue;
    for (int i = 0; i < opts.gl_order; ++i) {
      const double y = mid + half * rule.nodes[i];
      const double wy = half * rule.weights[i];
      double g = 0.0, p = 0.0;
      z_line(y, g, p);
      grad += wy * g;
      pot += wy * p;
    }
  }

  const double cm = wedge_measure_constant(m);
  QuadraticFormReport rep;
  rep.gradient_term = cm * grad;
  rep.potential_term = cm * pot;
  rep.boundary_term = 0.0;
  rep.value = rep.gradient_term + rep.potential_term;
  rep.a_scaling = 1.0;
  return rep;
}

XiYZ separable_xi(const EtaFamily& fam, const Profile1D& p, double a) {
  if (!(a > 0.0)) throw std::invalid_argument("separable_xi: a > 0 required");
  XiYZ xi;
  xi.value = [fam, &p, a](double y, double z) { return eta_eval(fam, y / a) * p.deriv(z); };
  xi.dy = [fam, &p, a](double y, double z) {
    return eta_deriv(fam, y / a) / a * p.deriv(z);
  };
  xi.dz = [fam, &p, a](double y, double z) {
    return eta_eval(fam, y / a) * p.second_deriv(z);
  };
  xi.support_ymax = a * fam.rho2;
  xi.y_breakpoints = {a * fam.rho1, 2.0 * a * fam.rho1, a, a * fam.rho2};
  return xi;
}

InstabilitySweepResult instability_sweep(const Profile1D& p, const Nonlinearity& nl, int m,
                                         const EtaFamily& fam,
                                         const std::vector<double>& a_values,
                                         const WedgeQuadOptions& opts) {
  for (std::size_t k = 0; k < a_values.size(); ++k) {
    if (!(a_values[k] >= 1.0))
      throw std::invalid_argument("instability_sweep: scales must satisfy a >= 1");
    if (k > 0 && !(a_values[k] > a_values[k - 1]))
      throw std::invalid_argument("instability_sweep: scales must increase");
  }
  InstabilitySweepResult out;
  const VSource v = VSource::from_profile(p);
  for (double a : a_values) {
    const XiYZ xi = separable_xi(fam, p, a);
    const QuadraticFormReport rep = quadratic_form_yz(v, xi, nl, m, opts);
    SweepRow row;
    row.a = a;
    row.q_scaled = rep.value / std::pow(a, 2.0 * m - 3.0);
    const double psi1 = p.deriv(a * fam.rho1);
    row.boundary_decay = a * psi1 * psi1;
    out.rows.push_back(row);
  }
  out.separable_limit =
      wedge_measure_constant(m) * profile_energy_line(p) * asymptotic_functional(fam, m);
  return out;
}

}  // namespace saddle
