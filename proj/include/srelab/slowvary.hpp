#pragma once

// Slow-variation toolkit: truncated means of positive laws, tail ratios,
// Bruin conjugate sequences b_n, the a_n schedule, and trend probes for the
// ratio conditions used by the WLLN machinery.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "srelab/rng.hpp"

namespace srelab::slowvary {

struct PositiveLawY {
  enum class Kind { ParetoOne, StPetersburg, Constant, Sampled, Analytic };

  Kind kind = Kind::Constant;
  double c = 0.0;                       // Constant
  std::vector<double> values;           // Sampled, sorted ascending
  std::function<double(double)> ell;    // Analytic: x -> E Y 1{Y <= x}
  std::string label;

  // P(Y > x) = 1/x on [1, inf).
  static PositiveLawY pareto_one();
  // Y = 2^T with P(T = m) = 2^{-m}, m >= 1.
  static PositiveLawY st_petersburg();
  static PositiveLawY constant(double value);
  static PositiveLawY sampled(std::vector<double> values, std::string label);
  // Law known only through its truncated mean; no sampling, no tail.
  static PositiveLawY analytic(std::function<double(double)> ell,
                               std::string label);
};

double sample_y(const PositiveLawY& law, rng::Stream& stream);

// E Y 1{Y <= x}.
double truncated_mean(const PositiveLawY& law, double x);

// P(Y > x).  Analytic variant has no tail information -> DomainError.
double tail_prob(const PositiveLawY& law, double x);

// x P(Y > x) / E Y 1{Y <= x}.  DomainError when the truncated mean is 0.
double tail_ratio(const PositiveLawY& law, double x);

// E (Y ^ x), computed directly (not via the tail decomposition).
double ell1(const PositiveLawY& law, double x);

enum class BruinMode { FixedPoint, FormulaAp3 };

struct BruinResult {
  double b = 0.0;
  double achieved_ratio = 0.0;  // n ell(b) / b
  int iterations = 0;
};

// b_n with n ell(b_n)/b_n -> 1.  FixedPoint iterates b <- n ell(b) from
// b = n ell(n) to relative tolerance 1e-9, halving the step when the
// iteration oscillates; FormulaAp3 returns n ell(n) directly and reports
// the ratio it achieves.
BruinResult bruin_bn(const std::function<double(double)>& ell, double n,
                     BruinMode mode);

struct AnSchedule {
  double exponent = 0.5;  // a_n = (ln n)^{-exponent}
  struct Probe {
    double exponent;
    double n;
    double a_n;
    double value;  // n P(Y > a_n b_n)
  };
  std::vector<Probe> probes;

  double operator()(double n) const;
};

// Default schedule a_n = (ln n)^{-1/2}; the exponent is halved (at most six
// times) whenever the probe values n P(Y > a_n b_n) at n in {1e3, 1e6, 1e9}
// are non-decreasing and the tail has not already vanished.
AnSchedule pick_an(const PositiveLawY& law,
                   const std::function<double(double)>& b);

enum class RatioCondition { TwoA, TwoB };  // ell(x ell(x))/ell(x), ell(x/ln x)/ell(x)

struct TrendReport {
  std::vector<double> x;
  std::vector<double> ratio;
  enum class Verdict { ConvergesTo1, Diverges, Inconclusive } verdict =
      Verdict::Inconclusive;
};

// Evaluates the chosen ratio along x_grid (>= 3 decades) and calls the trend:
// the last `window` ratios within `tol` of 1 -> ConvergesTo1; moving away
// from 1 monotonically and ending outside tol -> Diverges; else Inconclusive.
TrendReport probe_condition(const std::function<double(double)>& ell,
                            RatioCondition which,
                            const std::vector<double>& x_grid,
                            double tol = 0.02, int window = 3);

const char* to_string(TrendReport::Verdict v);

}  // namespace srelab::slowvary
