#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "saddle/errors.hpp"
#include "saddle/stability.hpp"

namespace saddle {

namespace {

struct Edge {
  std::int32_t p, q;
  double w;
};

// Discrete second-variation operator on the reflected square: graph
// Laplacian with midpoint edge weights plus the diagonal -w f'(u), mass
// diag(w). Zero-mass axis chains (m >= 2) are eliminated exactly; their
// single positive edge carries no energy at stationarity in xi.
struct Assembly {
  std::vector<std::int32_t> dof_of_full;  // full node id -> dof or -1
  std::vector<std::int32_t> full_of_dof;
  std::vector<Edge> edges;       // dof-dof edges
  std::vector<double> diag_lap;  // sum of incident edge weights (incl. Dirichlet edges)
  std::vector<double> pot;       // -w f'(u)
  std::vector<double> mass;      // w
  double fprime_max = 0.0;

  std::size_t n() const { return full_of_dof.size(); }
};

Assembly assemble(const SaddleField& fld, const Nonlinearity& nl,
                  const std::optional<Annulus>& annulus) {
  const TriangleGrid& g = fld.grid();
  const int ni = g.ni;
  const double h = g.h;
  const int m = g.m;

  Assembly A;
  A.dof_of_full.assign(fld.size(), -1);

  auto radius = [&](int i, int j) { return h * std::sqrt(double(i) * i + double(j) * j); };
  auto is_dof = [&](int i, int j) {
    const int fid = fld.full_id(i, j);
    if (fid < 0) return false;
    if (fld.cls(i, j) == NodeClass::arc) return false;
    if (m >= 2 && (i == 0 || j == 0)) return false;  // zero-mass chains
    if (annulus) {
      const double r = radius(i, j);
      if (!(r > annulus->inner && r < annulus->outer)) return false;
    }
    return true;
  };

  for (int i = 0; i <= ni; ++i) {
    for (int j = 0; j <= ni; ++j) {
      if (!is_dof(i, j)) continue;
      const int fid = fld.full_id(i, j);
      A.dof_of_full[fid] = static_cast<std::int32_t>(A.full_of_dof.size());
      A.full_of_dof.push_back(fid);
    }
  }

  const std::size_t n = A.n();
  A.diag_lap.assign(n, 0.0);
  A.pot.assign(n, 0.0);
  A.mass.assign(n, 0.0);

  auto edge_w = [&](double smid, double tmid) {
    double w = 1.0;
    for (int k = 0; k < m - 1; ++k) w *= smid * tmid;
    return w;
  };

  for (std::size_t d = 0; d < n; ++d) {
    const auto [i, j] = fld.ij_of(A.full_of_dof[d]);
    const double u = fld.at(i, j);
    const double fp = nl.fprime(u);
    A.fprime_max = std::max(A.fprime_max, fp);
    double w = 1.0;
    for (int k = 0; k < m - 1; ++k) w *= (i * h) * (j * h);
    w *= h * h;
    A.mass[d] = w;
    A.pot[d] = -w * fp;

    // east and north edges; west/south are covered by the neighbors
    const int di[2] = {1, 0};
    const int dj[2] = {0, 1};
    for (int k = 0; k < 2; ++k) {
      const int ii = i + di[k], jj = j + dj[k];
      const int nfid = fld.full_id(ii, jj);
      if (nfid < 0) continue;
      const double smid = (i + 0.5 * di[k]) * h;
      const double tmid = (j + 0.5 * dj[k]) * h;
      const double w_e = edge_w(smid, tmid);
      if (w_e <= 0.0) continue;
      const std::int32_t dq = A.dof_of_full[nfid];
      A.diag_lap[d] += w_e;
      if (dq >= 0) {
        A.diag_lap[dq] += w_e;
        A.edges.push_back({static_cast<std::int32_t>(d), dq, w_e});
      }
      // Dirichlet neighbor (arc / outside annulus): diagonal only.
    }
    // west/south edges toward Dirichlet neighbors still stiffen the diagonal
    const int wi[2] = {-1, 0};
    const int wj[2] = {0, -1};
    for (int k = 0; k < 2; ++k) {
      const int ii = i + wi[k], jj = j + wj[k];
      const int nfid = fld.full_id(ii, jj);
      if (nfid < 0) continue;
      if (A.dof_of_full[nfid] >= 0) continue;  // counted from that dof
      const double smid = (i + 0.5 * wi[k]) * h;
      const double tmid = (j + 0.5 * wj[k]) * h;
      const double w_e = edge_w(smid, tmid);
      if (w_e <= 0.0) continue;
      if (m >= 2 && (ii == 0 || jj == 0)) continue;  // eliminated chain edge
      A.diag_lap[d] += w_e;
    }
  }
  return A;
}

void matvec(const Assembly& A, double sigma, const std::vector<double>& x,
            std::vector<double>& y) {
  const std::size_t n = A.n();
  for (std::size_t d = 0; d < n; ++d)
    y[d] = (A.diag_lap[d] + A.pot[d] - sigma * A.mass[d]) * x[d];
  for (const Edge& e : A.edges) {
    y[e.p] -= e.w * x[e.q];
    y[e.q] -= e.w * x[e.p];
  }
}

double bdot(const Assembly& A, const std::vector<double>& x, const std::vector<double>& y) {
  double s = 0.0;
  for (std::size_t d = 0; d < A.n(); ++d) s += A.mass[d] * x[d] * y[d];
  return s;
}

double dot(const std::vector<double>& x, const std::vector<double>& y) {
  double s = 0.0;
  for (std::size_t d = 0; d < x.size(); ++d) s += x[d] * y[d];
  return s;
}

// Jacobi-preconditioned CG on (A - sigma B); returns false on a breakdown
// that signals an indefinite shift.
bool cg_solve(const Assembly& A, double sigma, const std::vector<double>& b,
              std::vector<double>& x, double tol, int max_iter) {
  const std::size_t n = A.n();
  std::vector<double> r(n), z(n), p(n), Ap(n), prec(n);
  for (std::size_t d = 0; d < n; ++d) {
    const double dg = A.diag_lap[d] + A.pot[d] - sigma * A.mass[d];
    if (!(dg > 0.0)) return false;
    prec[d] = 1.0 / dg;
  }
  matvec(A, sigma, x, Ap);
  double bnorm = 0.0;
  for (std::size_t d = 0; d < n; ++d) {
    r[d] = b[d] - Ap[d];
    bnorm += b[d] * b[d];
  }
  bnorm = std::sqrt(bnorm);
  if (bnorm == 0.0) return true;
  for (std::size_t d = 0; d < n; ++d) z[d] = prec[d] * r[d];
  p = z;
  double rz = dot(r, z);
  for (int it = 0; it < max_iter; ++it) {
    matvec(A, sigma, p, Ap);
    const double pAp = dot(p, Ap);
    if (!(pAp > 0.0)) return false;  // indefinite
    const double alpha = rz / pAp;
    double rnorm = 0.0;
    for (std::size_t d = 0; d < n; ++d) {
      x[d] += alpha * p[d];
      r[d] -= alpha * Ap[d];
      rnorm += r[d] * r[d];
    }
    if (std::sqrt(rnorm) <= tol * bnorm) return true;
    for (std::size_t d = 0; d < n; ++d) z[d] = prec[d] * r[d];
    const double rz_new = dot(r, z);
    const double beta = rz_new / rz;
    rz = rz_new;
    for (std::size_t d = 0; d < n; ++d) p[d] = z[d] + beta * p[d];
  }
  return true;  // tolerate slow CG; outer iteration absorbs it
}

// Cyclic Jacobi for small dense symmetric matrices.
void small_sym_eig(std::vector<std::vector<double>>& M, std::vector<double>& evals,
                   std::vector<std::vector<double>>& evecs) {
  const int n = static_cast<int>(M.size());
  evecs.assign(n, std::vector<double>(n, 0.0));
  for (int i = 0; i < n; ++i) evecs[i][i] = 1.0;
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) off += M[i][j] * M[i][j];
    if (off < 1e-26) break;
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        if (std::abs(M[i][j]) < 1e-300) continue;
        const double theta = 0.5 * (M[j][j] - M[i][i]) / M[i][j];
        const double t = (theta >= 0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (int k = 0; k < n; ++k) {
          const double mik = M[i][k], mjk = M[j][k];
          M[i][k] = c * mik - s * mjk;
          M[j][k] = s * mik + c * mjk;
        }
        for (int k = 0; k < n; ++k) {
          const double mki = M[k][i], mkj = M[k][j];
          M[k][i] = c * mki - s * mkj;
          M[k][j] = s * mki + c * mkj;
        }
        for (int k = 0; k < n; ++k) {
          const double vki = evecs[k][i], vkj = evecs[k][j];
          evecs[k][i] = c * vki - s * vkj;
          evecs[k][j] = s * vki + c * vkj;
        }
      }
    }
  }
  evals.resize(n);
  for (int i = 0; i < n; ++i) evals[i] = M[i][i];
}

}  // namespace

SpectrumReport linearized_spectrum(const SaddleField& fld, const Nonlinearity& nl, int k,
                                   std::optional<Annulus> annulus,
                                   const SpectrumOptions& opts) {
  if (k < 1 || k > 20) throw std::invalid_argument("linearized_spectrum: 1 <= k <= 20");
  if (annulus && !(annulus->outer > annulus->inner && annulus->inner >= 0.0))
    throw std::invalid_argument("linearized_spectrum: malformed annulus");
  const Assembly A = assemble(fld, nl, annulus);
  const std::size_t n = A.n();
  if (n < static_cast<std::size_t>(k))
    throw std::invalid_argument("linearized_spectrum: fewer dofs than requested eigenvalues");

  double op_scale = 0.0;
  for (std::size_t d = 0; d < n; ++d)
    if (A.mass[d] > 0.0)
      op_scale = std::max(op_scale, (A.diag_lap[d] + std::abs(A.pot[d])) / A.mass[d]);

  const int nb = std::min<int>(static_cast<int>(n), k + opts.block_extra);
  std::mt19937_64 rng(opts.seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  std::vector<std::vector<double>> X(nb, std::vector<double>(n));
  for (auto& col : X)
    for (auto& x : col) x = unif(rng);

  auto b_orthonormalize = [&](std::vector<std::vector<double>>& V) {
    for (int i = 0; i < nb; ++i) {
      for (int rep = 0; rep < 2; ++rep) {
        for (int j = 0; j < i; ++j) {
          const double c = bdot(A, V[i], V[j]);
          for (std::size_t d = 0; d < n; ++d) V[i][d] -= c * V[j][d];
        }
      }
      double nrm = std::sqrt(std::max(bdot(A, V[i], V[i]), 0.0));
      if (nrm < 1e-140) {
        for (auto& x : V[i]) x = unif(rng);
        nrm = std::sqrt(std::max(bdot(A, V[i], V[i]), 1e-300));
      }
      for (std::size_t d = 0; d < n; ++d) V[i][d] /= nrm;
    }
  };
  b_orthonormalize(X);

  const double safe_sigma = -(std::max(A.fprime_max, 0.0)) - 0.05 * std::max(1.0, op_scale * 1e-3);
  double sigma = safe_sigma;
  std::vector<double> prev_ritz(k, std::numeric_limits<double>::infinity());
  std::vector<double> ritz;
  std::vector<std::vector<double>> W(nb, std::vector<double>(n, 0.0));
  std::vector<double> rhs(n), tmp(n);

  bool converged = false;
  for (int outer = 0; outer < opts.max_outer && !converged; ++outer) {
    for (int c = 0; c < nb; ++c) {
      for (std::size_t d = 0; d < n; ++d) rhs[d] = A.mass[d] * X[c][d];
      if (!cg_solve(A, sigma, rhs, W[c], opts.cg_tol, opts.cg_max_iter)) {
        sigma = 0.5 * (sigma + safe_sigma) - 0.01 * std::max(1.0, std::abs(sigma));
        for (auto& col : W)
          std::fill(col.begin(), col.end(), 0.0);
        break;
      }
    }
    b_orthonormalize(W);

    // Rayleigh-Ritz in the W basis (B-orthonormal, so reduced B = I).
    std::vector<std::vector<double>> Ar(nb, std::vector<double>(nb, 0.0));
    std::vector<std::vector<double>> HW(nb, std::vector<double>(n));
    for (int c = 0; c < nb; ++c) {
      matvec(A, 0.0, W[c], HW[c]);  // full operator, no shift
    }
    for (int i = 0; i < nb; ++i)
      for (int j = i; j < nb; ++j) Ar[i][j] = Ar[j][i] = dot(W[i], HW[j]);

    std::vector<double> evals;
    std::vector<std::vector<double>> evecs;
    small_sym_eig(Ar, evals, evecs);
    std::vector<int> order(nb);
    for (int i = 0; i < nb; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](int a, int b) { return evals[a] < evals[b]; });

    for (int c = 0; c < nb; ++c) {
      std::fill(tmp.begin(), tmp.end(), 0.0);
      for (int j = 0; j < nb; ++j) {
        const double coef = evecs[j][order[c]];
        for (std::size_t d = 0; d < n; ++d) tmp[d] += coef * W[j][d];
      }
      X[c].swap(tmp);
    }
    ritz.resize(nb);
    for (int c = 0; c < nb; ++c) ritz[c] = evals[order[c]];

    bool stalled = true;
    const double scale = std::max(1.0, op_scale * 1e-3);
    for (int c = 0; c < k; ++c) {
      if (std::abs(ritz[c] - prev_ritz[c]) > opts.tol * scale) stalled = false;
      prev_ritz[c] = ritz[c];
    }
    if (outer >= 2 && stalled) converged = true;

    // Re-shift just below the current smallest Ritz value.
    const double spread = std::max(ritz[nb - 1] - ritz[0], 1e-3 * scale);
    sigma = std::min(sigma, ritz[0] - 0.25 * spread);
  }
  if (!converged)
    throw EigenConvergenceFailure("linearized_spectrum: subspace iteration stalled out");

  SpectrumReport rep;
  rep.annulus = annulus;
  rep.neg_tol = 1e-6 * std::max(1.0, op_scale);
  rep.eigenvalues.assign(ritz.begin(), ritz.begin() + k);
  for (double v : rep.eigenvalues)
    if (v < -rep.neg_tol) ++rep.morse_count;
  rep.eigenvectors.resize(k);
  for (int c = 0; c < k; ++c) {
    std::vector<double> full(fld.size(), 0.0);
    for (std::size_t d = 0; d < n; ++d) full[A.full_of_dof[d]] = X[c][d];
    rep.eigenvectors[c] = std::move(full);
  }
  return rep;
}

DiscreteFormValue discrete_quadratic_form(const SaddleField& fld, const Nonlinearity& nl,
                                          const std::vector<double>& xi) {
  if (xi.size() != fld.size())
    throw std::invalid_argument("discrete_quadratic_form: xi size mismatch");
  const TriangleGrid& g = fld.grid();
  const int ni = g.ni;
  const double h = g.h;
  const int m = g.m;
  const double am = sector_measure_constant(m);
  auto edge_w = [&](double smid, double tmid) {
    double w = 1.0;
    for (int kk = 0; kk < m - 1; ++kk) w *= smid * tmid;
    return w;
  };
  double grad = 0.0, potmass[2] = {0.0, 0.0};
  for (int i = 0; i <= ni; ++i) {
    for (int j = 0; j <= ni; ++j) {
      const int fid = fld.full_id(i, j);
      if (fid < 0) continue;
      const double x = xi[fid];
      const int fe = fld.full_id(i + 1, j);
      if (fe >= 0) {
        const double d = xi[fe] - x;
        grad += edge_w((i + 0.5) * h, j * h) * d * d;
      }
      const int fn = fld.full_id(i, j + 1);
      if (fn >= 0) {
        const double d = xi[fn] - x;
        grad += edge_w(i * h, (j + 0.5) * h) * d * d;
      }
      double w = 1.0;
      for (int kk = 0; kk < m - 1; ++kk) w *= (i * h) * (j * h);
      w *= h * h;
      potmass[0] += -w * nl.fprime(fld.at(i, j)) * x * x;
      potmass[1] += w * x * x;
    }
  }
  return {am * (grad + potmass[0]), am * potmass[1]};
}

ProbeResult cone_vanishing_stability_probe(const SaddleField& fld, const Nonlinearity& nl,
                                           int trials, unsigned long seed) {
  if (trials < 1) throw std::invalid_argument("probe: trials >= 1");
  if (!check_hypotheses(nl, 256).h3.pass)
    throw std::invalid_argument("probe: concavity hypothesis required");
  const TriangleGrid& g = fld.grid();
  const double h = g.h, R = g.R;
  const double Rc = R - 2.0 * h;
  const int ni = g.ni;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  std::uniform_real_distribution<double> upos(0.0, 1.0);

  ProbeResult out;
  out.trials = trials;
  out.slack = 10.0 * h * h;
  out.min_q = std::numeric_limits<double>::infinity();

  std::vector<double> xi(fld.size());
  for (int trial = 0; trial < trials; ++trial) {
    const bool solution_mode = (trial % 4 == 3);
    double c[6], r0 = 0.0, wdt = 1.0;
    for (double& x : c) x = unif(rng);
    if (solution_mode) {
      r0 = 2.0 + upos(rng) * std::max(R - 6.0, 1.0);
      wdt = 1.0 + 3.0 * upos(rng);
    }
    for (int i = 0; i <= ni; ++i) {
      for (int j = 0; j <= ni; ++j) {
        const int fid = fld.full_id(i, j);
        if (fid < 0) continue;
        const double s = i * h, t = j * h;
        const double r = std::sqrt(s * s + t * t);
        double v = 0.0;
        if (r < Rc && fld.cls(i, j) != NodeClass::arc) {
          if (solution_mode) {
            const double q = (r - r0) / wdt;
            v = fld.at(i, j) * std::exp(-q * q);
          } else {
            const double ss = s / R, tt = t / R;
            const double z = (s - t) * 0.70710678118654752440;
            const double poly = c[0] + c[1] * ss + c[2] * tt + c[3] * ss * ss +
                                c[4] * ss * tt + c[5] * tt * tt;
            const double q = r / Rc;
            const double cut = (1.0 - q * q) * (1.0 - q * q);
            v = z * poly * cut;
          }
        }
        xi[fid] = v;
      }
    }
    const DiscreteFormValue fv = discrete_quadratic_form(fld, nl, xi);
    if (fv.mass <= 0.0) continue;
    out.min_q = std::min(out.min_q, fv.q / fv.mass);
  }
  out.pass = out.min_q >= -out.slack;
  return out;
}

}  // namespace saddle
