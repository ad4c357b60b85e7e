#include "saddle/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "saddle/errors.hpp"
#include "saddle/quadrature.hpp"

namespace saddle {

namespace {

constexpr double kSqrt1_2 = 0.70710678118654752440;

// Per-node stencil data for the staggered-edge energy.
struct Workspace {
  std::vector<std::int32_t> nbW, nbE, nbS, nbN;
  std::vector<double> weW, weE, weS, weN;  // edge midpoint weights
  std::vector<double> wnode;               // node weight, zero outside the disc
  std::vector<std::uint8_t> dirichlet;
  std::vector<std::int32_t> unknowns;

  explicit Workspace(const TriangleGrid& g) {
    const std::size_t n = g.nodes.size();
    nbW.assign(n, -1);
    nbE.assign(n, -1);
    nbS.assign(n, -1);
    nbN.assign(n, -1);
    weW.assign(n, 0.0);
    weE.assign(n, 0.0);
    weS.assign(n, 0.0);
    weN.assign(n, 0.0);
    wnode.assign(n, 0.0);
    dirichlet.assign(n, 0);
    const double h = g.h;
    for (std::size_t id = 0; id < n; ++id) {
      const auto& nd = g.nodes[id];
      const int i = nd.i, j = nd.j;
      nbW[id] = g.node_id(i - 1, j);
      nbE[id] = g.node_id(i + 1, j);
      nbS[id] = g.node_id(i, j - 1);
      nbN[id] = g.node_id(i, j + 1);
      if (nbW[id] >= 0) weW[id] = g.edge_weight((i - 0.5) * h, j * h);
      if (nbE[id] >= 0) weE[id] = g.edge_weight((i + 0.5) * h, j * h);
      if (nbS[id] >= 0) weS[id] = g.edge_weight(i * h, (j - 0.5) * h);
      if (nbN[id] >= 0) weN[id] = g.edge_weight(i * h, (j + 0.5) * h);
      wnode[id] = nd.inside ? nd.weight : 0.0;
      dirichlet[id] = (nd.cls == NodeClass::cone || nd.cls == NodeClass::arc) ? 1 : 0;
      if (!dirichlet[id] && nd.inside) unknowns.push_back(static_cast<std::int32_t>(id));
    }
  }
};

// Energy without the a_m prefactor.
double raw_energy(const TriangleGrid& g, const Workspace& ws, const std::vector<double>& v,
                  const Nonlinearity& nl) {
  double grad = 0.0, pot = 0.0;
  const std::size_t n = g.nodes.size();
  for (std::size_t id = 0; id < n; ++id) {
    if (ws.nbE[id] >= 0) {
      const double d = v[ws.nbE[id]] - v[id];
      grad += 0.5 * ws.weE[id] * d * d;
    }
    if (ws.nbN[id] >= 0) {
      const double d = v[ws.nbN[id]] - v[id];
      grad += 0.5 * ws.weN[id] * d * d;
    }
    if (ws.wnode[id] > 0.0 || g.nodes[id].inside) pot += ws.wnode[id] * nl.G(v[id]);
  }
  return grad + pot;
}

void raw_gradient(const TriangleGrid& g, const Workspace& ws, const std::vector<double>& v,
                  const Nonlinearity& nl, std::vector<double>& out) {
  const std::size_t n = g.nodes.size();
  out.assign(n, 0.0);
  for (std::size_t id = 0; id < n; ++id) {
    if (ws.nbE[id] >= 0) {
      const double d = v[id] - v[ws.nbE[id]];
      out[id] += ws.weE[id] * d;
      out[ws.nbE[id]] -= ws.weE[id] * d;
    }
    if (ws.nbN[id] >= 0) {
      const double d = v[id] - v[ws.nbN[id]];
      out[id] += ws.weN[id] * d;
      out[ws.nbN[id]] -= ws.weN[id] * d;
    }
    out[id] += -ws.wnode[id] * nl.f(v[id]);  // G' = -f
  }
}

void apply_boundary(const TriangleGrid& g, const SolveOptions& opts, std::vector<double>& v) {
  for (std::size_t id = 0; id < g.nodes.size(); ++id) {
    const auto& nd = g.nodes[id];
    if (nd.cls == NodeClass::cone) v[id] = 0.0;
    if (nd.cls == NodeClass::arc) {
      if (opts.bc == BoundaryMode::profile) {
        const double z = (g.s_of(nd.i) - g.t_of(nd.j)) * kSqrt1_2;
        v[id] = opts.boundary_profile->value(z);
      } else {
        v[id] = 0.0;
      }
    }
  }
}

struct ResidualSummary {
  double sup = 0.0;
  double scale = 1.0;
};

ResidualSummary el_residual(const TriangleGrid& g, const std::vector<double>& v,
                            const Nonlinearity& nl) {
  ResidualSummary out;
  const double h = g.h;
  const int m = g.m;
  double fmax = 0.0;
  for (const auto& nd : g.nodes) {
    if (nd.cls != NodeClass::interior) continue;
    const double s = g.s_of(nd.i), t = g.t_of(nd.j);
    if (s < 2.0 * h - 1e-12 || t < 2.0 * h - 1e-12) continue;
    const int pw = g.node_id(nd.i - 1, nd.j), pe = g.node_id(nd.i + 1, nd.j);
    const int ps = g.node_id(nd.i, nd.j - 1), pn = g.node_id(nd.i, nd.j + 1);
    if (pw < 0 || pe < 0 || ps < 0 || pn < 0) continue;
    const double vc = v[g.node_id(nd.i, nd.j)];
    const double laps = (v[pe] - 2.0 * vc + v[pw]) / (h * h);
    const double lapt = (v[pn] - 2.0 * vc + v[ps]) / (h * h);
    const double us = (v[pe] - v[pw]) / (2.0 * h);
    const double ut = (v[pn] - v[ps]) / (2.0 * h);
    const double r = -(laps + lapt) - (m - 1) * (us / s + ut / t) - nl.f(vc);
    out.sup = std::max(out.sup, std::abs(r));
    fmax = std::max(fmax, std::abs(nl.f(vc)));
  }
  out.scale = std::max(1.0, fmax);
  return out;
}

// Nodewise minimizer of 0.5 Sw v^2 - rhs v + w G(v) on [0, M].
double local_solve(double Sw, double rhs, double w, double M, const Nonlinearity& nl,
                   double v0) {
  double v = std::clamp(v0, 0.0, M);
  bool ok = false;
  for (int it = 0; it < 6; ++it) {
    const double gv = Sw * v - rhs - w * nl.f(v);
    const double gp = Sw - w * nl.fprime(v);
    if (!(gp > 1e-14 * (Sw + 1.0))) break;
    const double step = gv / gp;
    v = std::clamp(v - step, 0.0, M);
    if (std::abs(step) < 1e-15 * (1.0 + std::abs(v))) {
      ok = true;
      break;
    }
  }
  const double res = Sw * v - rhs - w * nl.f(v);
  const bool at_lower = (v == 0.0 && res > 0.0);
  const bool at_upper = (v == M && res < 0.0);
  if (!ok && !at_lower && !at_upper && std::abs(res) > 1e-10 * (Sw + 1.0)) {
    double lo = 0.0, hi = M;  // g(0) <= 0 <= g(M) for admissible neighbor data
    for (int it = 0; it < 80; ++it) {
      const double mid = 0.5 * (lo + hi);
      const double gm = Sw * mid - rhs - w * nl.f(mid);
      if (gm > 0.0)
        hi = mid;
      else
        lo = mid;
    }
    v = 0.5 * (lo + hi);
  }
  return v;
}

}  // namespace

Field zero_field(std::shared_ptr<const TriangleGrid> grid) {
  Field f;
  f.values.assign(grid->nodes.size(), 0.0);
  f.grid = std::move(grid);
  return f;
}

double discrete_energy(const Field& fld, const Nonlinearity& nl) {
  const Workspace ws(*fld.grid);
  return sector_measure_constant(fld.grid->m) * raw_energy(*fld.grid, ws, fld.values, nl);
}

std::vector<double> energy_gradient(const Field& fld, const Nonlinearity& nl) {
  const Workspace ws(*fld.grid);
  std::vector<double> grad;
  raw_gradient(*fld.grid, ws, fld.values, nl, grad);
  const double am = sector_measure_constant(fld.grid->m);
  for (double& x : grad) x *= am;
  return grad;
}

double restricted_energy(const Field& fld, const Nonlinearity& nl, double R_sub) {
  const TriangleGrid& g = *fld.grid;
  const double h = g.h;
  const double R2 = R_sub * R_sub;
  const auto& v = fld.values;
  double grad = 0.0, pot = 0.0;
  for (const auto& nd : g.nodes) {
    const int i = nd.i, j = nd.j;
    const int id = g.node_id(i, j);
    const int pe = g.node_id(i + 1, j);
    if (pe >= 0) {
      const double sm = (i + 0.5) * h, tm = j * h;
      if (sm * sm + tm * tm <= R2) {
        const double d = v[pe] - v[id];
        grad += 0.5 * g.edge_weight(sm, tm) * d * d;
      }
    }
    const int pn = g.node_id(i, j + 1);
    if (pn >= 0) {
      const double sm = i * h, tm = (j + 0.5) * h;
      if (sm * sm + tm * tm <= R2) {
        const double d = v[pn] - v[id];
        grad += 0.5 * g.edge_weight(sm, tm) * d * d;
      }
    }
    const double s = nd.i * h, t = nd.j * h;
    if (nd.inside && s * s + t * t <= R2) pot += nd.weight * nl.G(v[id]);
  }
  return sector_measure_constant(g.m) * (grad + pot);
}

double reflected_ball_energy(const Field& fld, const Nonlinearity& nl, double R_sub) {
  return 2.0 * restricted_energy(fld, nl, R_sub);
}

Field initial_guess(std::shared_ptr<const TriangleGrid> grid, const Nonlinearity& nl) {
  Field f = zero_field(std::move(grid));
  const TriangleGrid& g = *f.grid;
  const double M = nl.well();
  for (std::size_t id = 0; id < g.nodes.size(); ++id) {
    const auto& nd = g.nodes[id];
    if (nd.cls == NodeClass::cone || nd.cls == NodeClass::arc) continue;
    const double z = (g.s_of(nd.i) - g.t_of(nd.j)) * kSqrt1_2;
    f.values[id] = std::min(M, z);
  }
  return f;
}

std::pair<Field, SolveReport> minimize(Field fld, const Nonlinearity& nl,
                                       const SolveOptions& opts) {
  const TriangleGrid& g = *fld.grid;
  if (opts.bc == BoundaryMode::profile && opts.boundary_profile == nullptr)
    throw std::invalid_argument("minimize: profile boundary mode needs a Profile1D");
  const Workspace ws(g);
  const double M = nl.well();
  const double am = sector_measure_constant(g.m);
  auto& v = fld.values;
  for (double& x : v) x = std::clamp(x, 0.0, M);
  apply_boundary(g, opts, v);

  SolveReport rep;
  double energy = raw_energy(g, ws, v, nl);
  rep.energy_history.push_back(am * energy);

  long iter = 0;
  double step_norm = 0.0;

  if (opts.method == SolveMethod::gauss_seidel) {
    for (iter = 1; iter <= opts.max_iter; ++iter) {
      step_norm = 0.0;
      for (const std::int32_t id : ws.unknowns) {
        double Sw = 0.0, rhs = 0.0;
        if (ws.nbW[id] >= 0) {
          Sw += ws.weW[id];
          rhs += ws.weW[id] * v[ws.nbW[id]];
        }
        if (ws.nbE[id] >= 0) {
          Sw += ws.weE[id];
          rhs += ws.weE[id] * v[ws.nbE[id]];
        }
        if (ws.nbS[id] >= 0) {
          Sw += ws.weS[id];
          rhs += ws.weS[id] * v[ws.nbS[id]];
        }
        if (ws.nbN[id] >= 0) {
          Sw += ws.weN[id];
          rhs += ws.weN[id] * v[ws.nbN[id]];
        }
        if (Sw <= 0.0) continue;
        const double vn = local_solve(Sw, rhs, ws.wnode[id], M, nl, v[id]);
        step_norm = std::max(step_norm, std::abs(vn - v[id]));
        v[id] = vn;
      }
      if (iter % opts.record_every == 0) {
        energy = raw_energy(g, ws, v, nl);
        rep.energy_history.push_back(am * energy);
      }
      if (step_norm < opts.tol) break;
    }
  } else {
    double step = opts.step > 0.0 ? opts.step : g.h * g.h / 4.0;
    std::vector<double> grad, saved;
    std::vector<double> precond(g.nodes.size(), 1.0);
    for (const std::int32_t id : ws.unknowns) {
      const double Sw = ws.weW[id] + ws.weE[id] + ws.weS[id] + ws.weN[id];
      precond[id] = std::max(ws.wnode[id], 0.25 * g.h * g.h * Sw);
    }
    for (iter = 1; iter <= opts.max_iter; ++iter) {
      raw_gradient(g, ws, v, nl, grad);
      saved = v;
      const double e_before = energy;
      while (true) {
        step_norm = 0.0;
        for (const std::int32_t id : ws.unknowns) {
          const double dv = -step * grad[id] / precond[id];
          const double vn = std::clamp(saved[id] + dv, 0.0, M);
          step_norm = std::max(step_norm, std::abs(vn - saved[id]));
          v[id] = vn;
        }
        energy = raw_energy(g, ws, v, nl);
        if (energy <= e_before + 1e-14 * (1.0 + std::abs(e_before))) break;
        if (!opts.backtrack)
          throw NonDecreaseFailure("minimize: energy increased with a fixed step");
        step *= 0.5;
        if (step < 1e-14 * g.h * g.h)
          throw NonDecreaseFailure("minimize: backtracking exhausted");
      }
      if (iter % opts.record_every == 0) rep.energy_history.push_back(am * energy);
      if (step_norm < opts.tol) break;
    }
  }

  energy = raw_energy(g, ws, v, nl);
  rep.energy = am * energy;
  rep.energy_history.push_back(rep.energy);
  rep.iterations = std::min(iter, opts.max_iter);
  rep.final_step_norm = step_norm;

  const auto res = el_residual(g, v, nl);
  rep.el_residual_sup = res.sup;
  rep.el_residual_scale = res.scale;

  double pmin = std::numeric_limits<double>::infinity();
  double vmax = 0.0, axis_flux = 0.0;
  for (std::size_t id = 0; id < g.nodes.size(); ++id) {
    const auto& nd = g.nodes[id];
    vmax = std::max(vmax, std::abs(v[id]));
    if (nd.inside && nd.cls == NodeClass::interior) pmin = std::min(pmin, v[id]);
    if (nd.cls == NodeClass::axis && g.s_of(nd.i) <= g.R - 2.0 * g.h) {
      const int up = g.node_id(nd.i, 1);
      if (up >= 0) axis_flux = std::max(axis_flux, std::abs(v[up] - v[id]) / g.h);
    }
  }
  rep.positivity_min = std::isfinite(pmin) ? pmin : 0.0;
  rep.max_abs_value = vmax;
  rep.axis_flux_sup = axis_flux;
  return {std::move(fld), rep};
}

SaddleField reflect_odd(const Field& fld) {
  for (std::size_t id = 0; id < fld.grid->nodes.size(); ++id) {
    if (fld.grid->nodes[id].cls == NodeClass::cone && std::abs(fld.values[id]) > 1e-14)
      throw std::invalid_argument("reflect_odd: field must vanish on the cone");
  }
  return SaddleField(fld.grid, fld.values);
}

SaddleField::SaddleField(std::shared_ptr<const TriangleGrid> grid,
                         std::vector<double> sector_values)
    : grid_(std::move(grid)) {
  const TriangleGrid& g = *grid_;
  const int ni = g.ni;
  index_.assign(static_cast<std::size_t>(ni + 1) * (ni + 1), -1);
  for (int i = 0; i <= ni; ++i) {
    for (int j = 0; j <= ni; ++j) {
      const int sid = (j <= i) ? g.node_id(i, j) : g.node_id(j, i);
      if (sid < 0) continue;
      index_[static_cast<std::size_t>(i) * (ni + 1) + j] =
          static_cast<std::int32_t>(values_.size());
      ij_.emplace_back(i, j);
      values_.push_back(j <= i ? sector_values[sid] : -sector_values[sid]);
    }
  }
}

NodeClass SaddleField::cls(int i, int j) const {
  const TriangleGrid& g = *grid_;
  const int sid = (j <= i) ? g.node_id(i, j) : g.node_id(j, i);
  if (sid < 0) return NodeClass::arc;
  return g.nodes[sid].cls;
}

bool SaddleField::inside(int i, int j) const {
  const TriangleGrid& g = *grid_;
  const int sid = (j <= i) ? g.node_id(i, j) : g.node_id(j, i);
  return sid >= 0 && g.nodes[sid].inside;
}

double SaddleField::interp(double s, double t) const {
  const double h = grid_->h;
  if (s < 0.0 || t < 0.0) return 0.0;
  const int i = static_cast<int>(std::floor(s / h));
  const int j = static_cast<int>(std::floor(t / h));
  const double a = s / h - i, b = t / h - j;
  const double v00 = at(i, j), v10 = at(i + 1, j), v01 = at(i, j + 1), v11 = at(i + 1, j + 1);
  return (1 - a) * (1 - b) * v00 + a * (1 - b) * v10 + (1 - a) * b * v01 + a * b * v11;
}

double SaddleField::sup_norm() const {
  double m = 0.0;
  for (double x : values_) m = std::max(m, std::abs(x));
  return m;
}

namespace {

EnergyGrowthResult fit_growth(const std::vector<EnergyGrowthPoint>& pts) {
  std::vector<double> lr, le;
  for (const auto& p : pts) {
    lr.push_back(std::log(p.R));
    le.push_back(std::log(std::max(p.energy, 1e-300)));
  }
  EnergyGrowthResult out;
  out.points = pts;
  out.slope = fit_line(lr, le).second;
  return out;
}

void check_radii(const std::vector<double>& radii) {
  if (radii.size() < 3)
    throw std::invalid_argument("energy growth: at least 3 radii required");
  for (std::size_t k = 0; k < radii.size(); ++k) {
    if (!(radii[k] >= 4.0)) throw std::invalid_argument("energy growth: radii >= 4 required");
    if (k > 0 && !(radii[k] > radii[k - 1]))
      throw std::invalid_argument("energy growth: radii must increase");
  }
}

}  // namespace

EnergyGrowthResult energy_growth_study(const Nonlinearity& nl, int m,
                                       const std::vector<double>& radii, double h,
                                       const SolveOptions& opts) {
  check_radii(radii);
  auto grid = std::make_shared<const TriangleGrid>(build_grid(m, radii.back(), h));
  auto [fld, rep] = minimize(initial_guess(grid, nl), nl, opts);
  (void)rep;
  std::vector<EnergyGrowthPoint> pts;
  for (double R : radii) pts.push_back({R, reflected_ball_energy(fld, nl, R)});
  return fit_growth(pts);
}

EnergyGrowthResult zero_field_growth(const Nonlinearity& nl, int m,
                                     const std::vector<double>& radii, double h) {
  check_radii(radii);
  auto grid = std::make_shared<const TriangleGrid>(build_grid(m, radii.back(), h));
  const Field z = zero_field(grid);
  std::vector<EnergyGrowthPoint> pts;
  for (double R : radii) pts.push_back({R, reflected_ball_energy(z, nl, R)});
  return fit_growth(pts);
}

}  // namespace saddle
