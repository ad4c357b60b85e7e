#include "saddle/nonlinearity.hpp"

#include <cmath>
#include <stdexcept>

#include "saddle/errors.hpp"

namespace saddle {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

double Nonlinearity::f(double u) const {
  switch (kind_) {
    case NonlinearityKind::allen_cahn:
      return u * (1.0 - u) * (1.0 + u);
    case NonlinearityKind::sine:
      return std::sin(kPi * u);
    case NonlinearityKind::custom: {
      const double u2 = u * u;
      double p = 0.0;
      for (std::size_t k = odd_coeffs_.size(); k-- > 0;) p = p * u2 + odd_coeffs_[k];
      return u * p;
    }
  }
  return 0.0;
}

double Nonlinearity::fprime(double u) const {
  switch (kind_) {
    case NonlinearityKind::allen_cahn:
      return 1.0 - 3.0 * u * u;
    case NonlinearityKind::sine:
      return kPi * std::cos(kPi * u);
    case NonlinearityKind::custom: {
      const double u2 = u * u;
      double d = 0.0;  // d/d(u) [u * P(u^2)] = sum (2k+1) c_k u^(2k)
      for (std::size_t k = odd_coeffs_.size(); k-- > 0;)
        d = d * u2 + (2.0 * k + 1.0) * odd_coeffs_[k];
      return d;
    }
  }
  return 0.0;
}

double Nonlinearity::G(double u) const {
  switch (kind_) {
    case NonlinearityKind::allen_cahn: {
      const double q = (1.0 - u) * (1.0 + u);
      return 0.25 * q * q;
    }
    case NonlinearityKind::sine: {
      // (1/pi)(1 + cos(pi u)) evaluated without cancellation near u = +-1.
      const double c = std::cos(0.5 * kPi * u);
      return (2.0 / kPi) * c * c;
    }
    case NonlinearityKind::custom: {
      const double u2 = u * u;
      double F = 0.0;  // antiderivative of f with F(0) = 0
      for (std::size_t k = odd_coeffs_.size(); k-- > 0;)
        F = F * u2 + odd_coeffs_[k] / (2.0 * k + 2.0);
      F *= u2;
      return antideriv_at_well_ - F;
    }
  }
  return 0.0;
}

std::string Nonlinearity::name() const {
  switch (kind_) {
    case NonlinearityKind::allen_cahn:
      return "allen_cahn";
    case NonlinearityKind::sine:
      return "sine";
    case NonlinearityKind::custom:
      return "custom";
  }
  return "?";
}

Nonlinearity Nonlinearity::builtin(NonlinearityKind kind) {
  if (kind == NonlinearityKind::custom)
    throw std::invalid_argument("builtin: custom requires coefficients");
  Nonlinearity nl;
  nl.kind_ = kind;
  nl.well_ = 1.0;
  return nl;
}

Nonlinearity Nonlinearity::odd_polynomial(std::vector<double> odd_coeffs, double well) {
  if (odd_coeffs.empty()) throw std::invalid_argument("odd_polynomial: empty coefficients");
  if (!(well > 0.0)) throw std::invalid_argument("odd_polynomial: well location must be > 0");
  Nonlinearity nl;
  nl.kind_ = NonlinearityKind::custom;
  nl.well_ = well;
  nl.odd_coeffs_ = std::move(odd_coeffs);
  const double M2 = well * well;
  double F = 0.0;
  for (std::size_t k = nl.odd_coeffs_.size(); k-- > 0;)
    F = F * M2 + nl.odd_coeffs_[k] / (2.0 * k + 2.0);
  nl.antideriv_at_well_ = F * M2;
  return nl;
}

Nonlinearity make_builtin(NonlinearityKind kind) { return Nonlinearity::builtin(kind); }

Nonlinearity make_builtin(const std::string& kind_name) {
  if (kind_name == "allen_cahn") return Nonlinearity::builtin(NonlinearityKind::allen_cahn);
  if (kind_name == "sine") return Nonlinearity::builtin(NonlinearityKind::sine);
  throw std::invalid_argument("make_builtin: unknown kind '" + kind_name + "'");
}

HypothesisReport check_hypotheses(const Nonlinearity& nl, int samples,
                                  const HypothesisTolerances& tol) {
  if (samples < 3) throw std::invalid_argument("check_hypotheses: samples >= 3 required");
  const double M = nl.well();
  HypothesisReport rep;

  // H1: oddness of f on (0, M].
  for (int i = 1; i <= samples; ++i) {
    const double u = M * i / samples;
    const double defect = std::abs(nl.f(-u) + nl.f(u));
    if (defect > tol.exact_zero) {
      rep.h1 = {false, u, defect};
      break;
    }
  }

  // H2: G(±M) = 0, f(0) = f(±M) = 0, G >= 0 on [-2M, 2M], G > 0 strictly
  // inside (-M, M). Samples near ±M are exempt from the strictness check.
  auto h2_fail = [&rep](double u, double v) { rep.h2 = {false, u, v}; };
  if (std::abs(nl.G(M)) > tol.exact_zero)
    h2_fail(M, nl.G(M));
  else if (std::abs(nl.G(-M)) > tol.exact_zero)
    h2_fail(-M, nl.G(-M));
  else if (std::abs(nl.f(0.0)) > tol.exact_zero)
    h2_fail(0.0, nl.f(0.0));
  else if (std::abs(nl.f(M)) > tol.exact_zero)
    h2_fail(M, nl.f(M));
  else if (std::abs(nl.f(-M)) > tol.exact_zero)
    h2_fail(-M, nl.f(-M));
  else {
    const double edge = M * 1e-6;
    for (int i = 0; i <= 2 * samples; ++i) {
      const double u = -2.0 * M + 2.0 * M * i / samples;
      const double g = nl.G(u);
      if (g < -tol.sampled) {
        h2_fail(u, g);
        break;
      }
      if (std::abs(u) < M - edge && !(g > 0.0)) {
        h2_fail(u, g);
        break;
      }
    }
  }

  // H3: f'' <= 0 on (0, M) via central second differences at interior samples.
  const double hfd = 1e-4 * M;
  for (int i = 1; i < samples; ++i) {
    const double u = M * i / samples;
    if (u - hfd <= 0.0 || u + hfd >= M) continue;
    const double fdd = (nl.f(u + hfd) - 2.0 * nl.f(u) + nl.f(u - hfd)) / (hfd * hfd);
    if (fdd > tol.sampled + 1e-6 * std::abs(nl.f(u))) {
      rep.h3 = {false, u, fdd};
      break;
    }
  }

  return rep;
}

}  // namespace saddle
