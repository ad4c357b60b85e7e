#pragma once

#include <functional>
#include <span>
#include <vector>

namespace saddle {

struct GaussRule {
  std::vector<double> nodes;    // on [-1, 1]
  std::vector<double> weights;  // sum to 2
};

/// Gauss-Legendre rule of order n (nodes computed once, cached per n).
const GaussRule& gauss_legendre(int n);

/// Integrate f over [a, b] with a single Gauss-Legendre panel.
double integrate_panel(const std::function<double(double)>& f, double a, double b, int n = 20);

/// Composite Gauss-Legendre with `panels` equal subintervals.
double integrate_composite(const std::function<double(double)>& f, double a, double b,
                           int panels, int n = 20);

/// Adaptive Simpson; abs_tol is an absolute tolerance on the result.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double abs_tol, int max_depth = 40);

/// Composite Simpson over uniformly spaced samples (odd count preferred;
/// a trapezoid step absorbs a trailing even interval).
double simpson_uniform(std::span<const double> values, double spacing);

/// ∫_a^b rho^p d rho with the log fallback at p = -1.
double power_integral(double a, double b, double p);

/// Least-squares line fit y = c0 + c1 x; returns {c0, c1}.
std::pair<double, double> fit_line(std::span<const double> x, std::span<const double> y);

}  // namespace saddle
