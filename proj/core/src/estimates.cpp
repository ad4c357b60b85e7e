#include "saddle/estimates.hpp"

#include <cmath>
#include <limits>

namespace saddle {

namespace {
constexpr double kSqrt1_2 = 0.70710678118654752440;

void finalize(EstimateReport& rep) { rep.pass = rep.worst_violation <= rep.tolerance_used; }
}  // namespace

EstimateReport modica_check(const SaddleField& fld, const Nonlinearity& nl, double tolerance) {
  const TriangleGrid& g = fld.grid();
  const double h = g.h;
  EstimateReport rep;
  rep.name = "modica";
  rep.tolerance_used = tolerance >= 0.0 ? tolerance : 10.0 * h * h;
  rep.worst_violation = -std::numeric_limits<double>::infinity();
  const int ni = g.ni;
  for (int i = 1; i < ni; ++i) {
    for (int j = 1; j < ni; ++j) {
      if (!fld.has(i, j) || !fld.inside(i, j)) continue;
      if (fld.cls(i, j) != NodeClass::interior && fld.cls(i, j) != NodeClass::cone) continue;
      // skip the layer whose stencil touches missing or arc nodes
      bool clean = true;
      const int di[4] = {1, -1, 0, 0};
      const int dj[4] = {0, 0, 1, -1};
      for (int k = 0; k < 4 && clean; ++k) {
        const int ii = i + di[k], jj = j + dj[k];
        if (!fld.has(ii, jj) || fld.cls(ii, jj) == NodeClass::arc) clean = false;
      }
      if (!clean) continue;
      const double us = (fld.at(i + 1, j) - fld.at(i - 1, j)) / (2.0 * h);
      const double ut = (fld.at(i, j + 1) - fld.at(i, j - 1)) / (2.0 * h);
      const double viol = 0.5 * (us * us + ut * ut) - nl.G(fld.at(i, j));
      if (viol > rep.worst_violation) {
        rep.worst_violation = viol;
        rep.worst_s = g.s_of(i);
        rep.worst_t = g.t_of(j);
      }
    }
  }
  finalize(rep);
  return rep;
}

EstimateReport modica_equality_1d(const Profile1D& p, const Nonlinearity& nl,
                                  const TriangleGrid& grid, double tolerance) {
  EstimateReport rep;
  rep.name = "modica_equality_1d";
  rep.tolerance_used = tolerance;
  rep.worst_violation = -std::numeric_limits<double>::infinity();
  for (const auto& nd : grid.nodes) {
    if (!nd.inside) continue;
    const double z = (grid.s_of(nd.i) - grid.t_of(nd.j)) * kSqrt1_2;
    const double u = p.value(z);
    const double du = p.deriv(z);  // |grad| of u0(z), since |grad z| = 1
    const double viol = std::abs(0.5 * du * du - nl.G(u));
    if (viol > rep.worst_violation) {
      rep.worst_violation = viol;
      rep.worst_s = grid.s_of(nd.i);
      rep.worst_t = grid.t_of(nd.j);
    }
  }
  finalize(rep);
  return rep;
}

EstimateReport pointwise_bound_check(const SaddleField& fld, const Profile1D& p,
                                     double tolerance) {
  const TriangleGrid& g = fld.grid();
  EstimateReport rep;
  rep.name = "pointwise_bound";
  rep.tolerance_used = tolerance >= 0.0 ? tolerance : 10.0 * g.h * g.h;
  rep.worst_violation = -std::numeric_limits<double>::infinity();
  const int ni = g.ni;
  for (int i = 0; i <= ni; ++i) {
    for (int j = 0; j <= ni; ++j) {
      if (!fld.has(i, j) || !fld.inside(i, j)) continue;
      const double z = (g.s_of(i) - g.t_of(j)) * kSqrt1_2;
      const double viol = std::abs(fld.at(i, j)) - std::abs(p.value(z));
      if (viol > rep.worst_violation) {
        rep.worst_violation = viol;
        rep.worst_s = g.s_of(i);
        rep.worst_t = g.t_of(j);
      }
    }
  }
  finalize(rep);
  return rep;
}

double supersolution_residual(const Profile1D& p, int m, double s, double t) {
  const double z = (s - t) * kSqrt1_2;
  return (m - 1) * (p.deriv(z) * kSqrt1_2) * (1.0 / t - 1.0 / s);
}

EstimateReport supersolution_check(const Profile1D& p, const Nonlinearity& nl,
                                   const TriangleGrid& grid, double tolerance) {
  (void)nl;
  EstimateReport rep;
  rep.name = "supersolution";
  rep.tolerance_used = tolerance;
  rep.worst_violation = -std::numeric_limits<double>::infinity();
  for (const auto& nd : grid.nodes) {
    if (nd.cls != NodeClass::interior || !nd.inside) continue;
    const double s = grid.s_of(nd.i), t = grid.t_of(nd.j);
    if (!(t > 0.0) || !(s > t)) continue;
    const double viol = -supersolution_residual(p, grid.m, s, t);
    if (viol > rep.worst_violation) {
      rep.worst_violation = viol;
      rep.worst_s = s;
      rep.worst_t = t;
    }
  }
  finalize(rep);
  return rep;
}

SaddleField profile_saddle_field(const Profile1D& p,
                                 std::shared_ptr<const TriangleGrid> grid) {
  std::vector<double> vals(grid->nodes.size(), 0.0);
  for (std::size_t id = 0; id < grid->nodes.size(); ++id) {
    const auto& nd = grid->nodes[id];
    const double z = (grid->s_of(nd.i) - grid->t_of(nd.j)) * kSqrt1_2;
    vals[id] = (nd.cls == NodeClass::cone) ? 0.0 : p.value(z);
  }
  return SaddleField(std::move(grid), std::move(vals));
}

}  // namespace saddle
