#pragma once

// Moment analysis of a coefficient law: the Cramer exponent kappa with
// E A^kappa = 1, the tilted log moment m = E A^kappa ln A, the truncated
// tilted moment h_A, its slow-variation profile, and the normalizing
// function g_A together with the limiting constants built from them.

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "srelab/estimate.hpp"
#include "srelab/laws.hpp"
#include "srelab/rng.hpp"

namespace srelab::analytics {

// E A^p on {A > 0}; +infinity when the defining integral diverges.
// `method` (optional out) records how the value was obtained.
double psi(const laws::CoefficientLaw& law, double p,
           std::string* method = nullptr);

// Solve E A^kappa = 1 by doubling bracket search plus bisection/secant.
// garch_critical returns exactly 1 without iteration.  Throws NoRootError
// naming the bracket side that failed.
double solve_kappa(const laws::CoefficientLaw& law, double rel_tol = 1e-10);

struct TiltedLogMoment {
  double value = 0.0;      // pos_part - neg_part; +infinity if pos diverges
  double pos_part = 0.0;   // E A^kappa ln^+ A
  double neg_part = 0.0;   // E A^kappa ln^- A
  bool pos_infinite = false;
};

TiltedLogMoment tilted_log_moment(const laws::CoefficientLaw& law,
                                  double kappa);

// h_A(x) = E A^kappa ln^+(A ∧ e^x), x >= 0.
double h_A(const laws::CoefficientLaw& law, double kappa, double x);

// H_A(x) = E A^kappa 1{ln A > x}.
double bar_H_A(const laws::CoefficientLaw& law, double kappa, double x);

struct SlowVariationProfile {
  enum class Kind { Finite, RegVar };
  Kind kind = Kind::Finite;
  double m = 0.0;    // Finite: E A^kappa ln A
  double rho = 0.0;  // RegVar: h_A(x) = x^rho ell(x)
  std::function<double(double)> ell;  // RegVar slowly varying factor
};

// Finite profile when E A^kappa ln^+ A < infinity, otherwise a least-squares
// fit of ln h_A against ln x over the upper half of x_grid (which must span
// at least two decades).  rho is clamped to [0,1).
SlowVariationProfile fit_profile(const laws::CoefficientLaw& law, double kappa,
                                 const std::vector<double>& x_grid);

// Normalizing function, t > 1.
double g_A(const SlowVariationProfile& profile, double t);

// D = E[(AU+B)^kappa - (AU)^kappa].  Exact E B when kappa == 1 (linearity);
// Monte Carlo over (perpetuity draw, fresh coefficient pair) otherwise.
Estimate d_constant(const laws::CoefficientLaw& law, double kappa,
                    rng::Stream stream, uint64_t reps);

struct KestenConstants {
  double c_prime = 0.0;                // D / m
  std::optional<double> tail_constant; // c_prime / kappa, only if non-arithmetic
};

KestenConstants kesten_constant(double d_value, double kappa, double m,
                                laws::Verdict nonarithmetic);

// C_{lambda,Z} = 1 / E[(1+lambda(Z^2-1)) ln(1+lambda(Z^2-1))] for the
// critical GARCH CLT.  Throws DomainError when Z^2 == 1 a.s. or the tilted
// log moment diverges (general-branch normalization applies then).
double c_lambda_z(const laws::NoiseLaw& noise, double lambda);

}  // namespace srelab::analytics
