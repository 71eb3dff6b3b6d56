#pragma once

// Noise laws Z and coefficient laws (A,B) for the recursion U_j = A_j U_{j-1} + B_j.

#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "srelab/rng.hpp"

namespace srelab::laws {

enum class Verdict { Pass, Fail, Unknown, NotApplicable };
const char* to_string(Verdict v);

// =========================================================================
// Noise laws: distributions of Z with E Z = 0, E Z^2 = 1.
// =========================================================================

struct DiscretePoint {
  double value;
  double prob;
};

struct NoiseLaw {
  enum class Kind { StandardNormal, Discrete, StudentT, Empirical };

  Kind kind = Kind::StandardNormal;
  std::vector<DiscretePoint> points;  // Discrete
  double df = 0.0;                    // StudentT, scaled to unit variance
  std::vector<double> sample;         // Empirical, studentized on load
  std::string source;                 // Empirical provenance label

  static NoiseLaw standard_normal();
  static NoiseLaw discrete(std::vector<DiscretePoint> pts);
  static NoiseLaw student_t_normalized(double df);
  static NoiseLaw empirical(std::vector<double> values, std::string source);
};

// The canonical three-atom noise: sqrt(2) w.p. 1/4, 0 w.p. 1/2, -sqrt(2) w.p. 1/4.
NoiseLaw three_atom_noise();

double sample_noise(const NoiseLaw& law, rng::Stream& stream);

struct ExpectResult {
  double value = 0.0;
  double abs_err = 0.0;
  bool diverged = false;
  std::string method;  // "enumeration" | "quadrature" | "sample_mean"
};

// E f(Z); exact for discrete/empirical, adaptive quadrature otherwise.
ExpectResult expect_noise(const NoiseLaw& law,
                          const std::function<double(double)>& f);

// =========================================================================
// Coefficient laws.
// =========================================================================

struct CoefficientLaw {
  enum class Kind {
    GarchCritical,    // A = lambda Z^2 + (1-lambda), B = beta
    GarchGeneral,     // A = lambda Z^2 + delta,      B = beta
    LognormalAConstB, // ln A ~ N(mu, sigma^2),       B = b
    FiniteDiscrete,   // finite set of (a,b) atoms
    Kevei             // ln A = V w.p. p (density ~ v^{-alpha-1} e^{-kappa v} on
                      // [v0,inf)), ln A = -w otherwise; B = b
  };

  struct AtomAB {
    double a;
    double b;
    double prob;
  };

  Kind kind = Kind::FiniteDiscrete;

  // garch
  double beta = 0.0, lambda = 0.0, delta = 0.0;
  NoiseLaw noise;

  // lognormal / kevei constant B
  double mu = 0.0, sigma = 0.0, b = 0.0;

  // finite discrete
  std::vector<AtomAB> atoms;

  // kevei parameters and derived quantities
  double alpha = 0.0, kappa = 0.0, v0 = 0.0, p = 0.0;
  double kevei_c = 0.0;         // normalizing constant of the V density
  double kevei_mgf = 0.0;       // E e^{kappa V}
  double kevei_w = 0.0;         // down-jump magnitude, e^{-kappa w} balances E A^kappa to 1
  double kevei_up_mass = 0.0;   // p * E e^{kappa V}, mass of the tilted up-jump
  double kevei_accept = 0.0;    // acceptance rate of the V rejection sampler
};

CoefficientLaw make_garch_critical(double beta, double lambda, NoiseLaw noise);
CoefficientLaw garch_to_sre(double beta, double lambda, double delta,
                            NoiseLaw noise);
CoefficientLaw make_lognormal_A_const_B(double mu, double sigma, double b);
CoefficientLaw make_finite_discrete(std::vector<CoefficientLaw::AtomAB> atoms);
CoefficientLaw build_kevei_law(double alpha, double kappa, double v0, double p,
                               double b);

struct CoeffDraw {
  double a;
  double b;
};

CoeffDraw sample_coeff(const CoefficientLaw& law, rng::Stream& stream);

// One V draw for the Kevei up-jump (Pareto proposal, exponential acceptance).
double kevei_sample_v(const CoefficientLaw& law, rng::Stream& stream);

// E f(A); atom enumeration, quadrature over the noise / log-normal / V
// density, or sample mean for empirical noise.
ExpectResult expect_A(const CoefficientLaw& law,
                      const std::function<double(double)>& f);

// E B^p (B is constant or finite-discrete in every variant).
double expect_B_pow(const CoefficientLaw& law, double p);

// Atoms of A when the support is finite; empty optional otherwise.
std::optional<std::vector<DiscretePoint>> finite_A_atoms(
    const CoefficientLaw& law);

// =========================================================================
// Model condition checks.
// =========================================================================

struct ConditionReport {
  Verdict cond3 = Verdict::Unknown;              // P(A = 1) < 1
  Verdict cond4 = Verdict::Unknown;              // P(B = 0) < 1
  Verdict kappa_exists = Verdict::Unknown;       // E A^kappa = 1 solvable
  Verdict cond6 = Verdict::Unknown;              // E B^kappa finite
  Verdict garch_stationarity = Verdict::NotApplicable;  // E ln(lambda Z^2 + delta) < 0
  Verdict nonarithmetic_logA = Verdict::Unknown;

  double kappa = std::nan("");
  double e_log_a = std::nan("");     // stationarity integral, garch variants
  double e_b_kappa = std::nan("");
  std::string notes;
};

// Defined alongside the kappa solver; declared here because it reports on laws.
ConditionReport check_conditions(const CoefficientLaw& law,
                                 std::optional<double> kappa_hint = {});

}  // namespace srelab::laws
