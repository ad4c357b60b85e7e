#pragma once

#include <string>
#include <vector>

namespace saddle {

enum class NonlinearityKind { allen_cahn, sine, custom };

/// Balanced bistable nonlinearity f with double-well potential
/// G(u) = \int_u^M f. Immutable after construction; safe to share
/// across threads.
///
/// Custom nonlinearities are odd polynomials given by the coefficients of
/// u, u^3, u^5, ... so that G is an exact antiderivative (no quadrature
/// error in the potential).
class Nonlinearity {
 public:
  Nonlinearity() = default;  // allen_cahn

  double f(double u) const;
  double fprime(double u) const;
  double G(double u) const;

  double well() const { return well_; }  // M
  NonlinearityKind kind() const { return kind_; }
  const std::vector<double>& odd_coeffs() const { return odd_coeffs_; }
  std::string name() const;

  static Nonlinearity builtin(NonlinearityKind kind);
  static Nonlinearity odd_polynomial(std::vector<double> odd_coeffs, double well);

 private:
  NonlinearityKind kind_ = NonlinearityKind::allen_cahn;
  double well_ = 1.0;
  std::vector<double> odd_coeffs_;  // custom only: f(u) = sum c_k u^(2k+1)
  double antideriv_at_well_ = 0.0;  // custom only: F(M) with F' = f, F(0) = 0
};

/// Builds one of the two closed-form nonlinearities.
Nonlinearity make_builtin(NonlinearityKind kind);
Nonlinearity make_builtin(const std::string& kind_name);

struct HypothesisCheck {
  bool pass = true;
  double witness = 0.0;  // sample point of the worst violation
  double value = 0.0;    // violating quantity at the witness
};

struct HypothesisReport {
  HypothesisCheck h1;  // f odd
  HypothesisCheck h2;  // G >= 0 = G(+-M), G > 0 strictly inside (-M, M)
  HypothesisCheck h3;  // f concave on (0, M)
  bool all() const { return h1.pass && h2.pass && h3.pass; }
};

struct HypothesisTolerances {
  double exact_zero = 1e-10;  // |f(0)|, |f(+-M)|, |G(+-M)|, oddness defect
  double sampled = 1e-8;      // sampled inequality slack (concavity, positivity)
};

/// Samples the three structural hypotheses on a uniform grid; a failing
/// check carries the offending sample point.
HypothesisReport check_hypotheses(const Nonlinearity& nl, int samples,
                                  const HypothesisTolerances& tol = {});

}  // namespace saddle
