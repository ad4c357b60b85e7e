#include "saddle/geometry.hpp"

#include <cmath>
#include <stdexcept>

#include "saddle/errors.hpp"

namespace saddle {

namespace {
constexpr double kSqrt1_2 = 0.70710678118654752440;
constexpr double kPi = 3.14159265358979323846;

double ipow(double x, int p) {
  double r = 1.0;
  for (int k = 0; k < p; ++k) r *= x;
  return r;
}
}  // namespace

StPoint st_coords(std::span<const double> x) {
  if (x.empty() || x.size() % 2 != 0)
    throw DimensionMismatch("st_coords: point dimension must be even and positive");
  const std::size_t m = x.size() / 2;
  double s2 = 0.0, t2 = 0.0;
  for (std::size_t k = 0; k < m; ++k) s2 += x[k] * x[k];
  for (std::size_t k = m; k < 2 * m; ++k) t2 += x[k] * x[k];
  return {std::sqrt(s2), std::sqrt(t2)};
}

StPoint st_coords(std::span<const double> x, int m) {
  if (m < 1 || x.size() != static_cast<std::size_t>(2 * m))
    throw DimensionMismatch("st_coords: expected a point in R^{2m}");
  return st_coords(x);
}

double dist_to_cone(double s, double t) { return std::abs(s - t) * kSqrt1_2; }

YzPoint yz_coords(double s, double t) { return {(s + t) * kSqrt1_2, (s - t) * kSqrt1_2}; }

StPoint st_from_yz(double y, double z) {
  if (std::abs(z) > y * (1.0 + 1e-12) + 1e-300)
    throw DomainViolation("st_from_yz: |z| > y is outside the quarter-plane image");
  return {std::max((y + z) * kSqrt1_2, 0.0), std::max((y - z) * kSqrt1_2, 0.0)};
}

double TriangleGrid::edge_weight(double s_mid, double t_mid) const {
  return ipow(s_mid, m - 1) * ipow(t_mid, m - 1);
}

double TriangleGrid::node_density(int i, int j) const {
  return ipow(i * h, m - 1) * ipow(j * h, m - 1);
}

TriangleGrid build_grid(int m, double R, double h) {
  if (m < 1) throw std::invalid_argument("build_grid: m >= 1 required");
  if (!(R >= 4.0)) throw std::invalid_argument("build_grid: R >= 4 required");
  if (!(h > 0.0) || h > R / 16.0)
    throw std::invalid_argument("build_grid: 0 < h <= R/16 required");

  TriangleGrid g;
  g.m = m;
  g.R = R;
  g.h = h;
  g.ni = static_cast<int>(std::floor(R / h)) + 1;  // room for the outside layer

  const double R2 = R * R;
  auto inside = [&](int i, int j) {
    if (i < 0 || j < 0) return false;
    return (static_cast<double>(i) * i + static_cast<double>(j) * j) * h * h <= R2;
  };

  g.index_.assign(static_cast<std::size_t>(g.ni + 1) * (g.ni + 1), -1);
  for (int i = 0; i <= g.ni; ++i) {
    for (int j = 0; j <= i; ++j) {
      const bool in = inside(i, j);
      bool keep = in;
      if (!in) {
        keep = inside(i - 1, j) || inside(i, j - 1) || inside(i + 1, j) || inside(i, j + 1);
      }
      if (!keep) continue;
      NodeClass cls;
      if (i == j)
        cls = NodeClass::cone;
      else if (!in)
        cls = NodeClass::arc;
      else if (j == 0)
        cls = NodeClass::axis;
      else
        cls = NodeClass::interior;
      TriangleGrid::Node node{i, j, cls, in, g.node_density(i, j) * h * h};
      g.index_[static_cast<std::size_t>(i) * (g.ni + 1) + j] =
          static_cast<std::int32_t>(g.nodes.size());
      g.nodes.push_back(node);
      if (cls == NodeClass::interior) ++g.interior_count_;
      if (in) ++g.inside_count_;
    }
  }
  if (g.interior_count_ < 100)
    throw GridTooCoarse("build_grid: fewer than 100 interior nodes");
  return g;
}

double sector_measure_constant(int m) {
  // |S^{m-1}| = 2 pi^{m/2} / Gamma(m/2)
  const double area = 2.0 * std::pow(kPi, 0.5 * m) / std::tgamma(0.5 * m);
  return area * area;
}

double wedge_measure_constant(int m) {
  return sector_measure_constant(m) * std::pow(2.0, 1.0 - m);
}

}  // namespace saddle
