#pragma once

// Verification harness: truncated-moment asymptotics, weak laws of large
// numbers, the central limit theorem and its functional version for critical
// GARCH, and the covariance-decay probe.  Every experiment returns an
// ExperimentReport whose digest depends only on seed and configuration,
// never on the worker count.

#include <cstdint>
#include <optional>
#include <vector>

#include "srelab/laws.hpp"
#include "srelab/report.hpp"
#include "srelab/rng.hpp"
#include "srelab/slowvary.hpp"

namespace srelab::limitlab {

// ------------------------------------------------------------------ truncmoment

struct TruncMomentConfig {
  std::vector<double> t_grid;  // increasing, spanning >= 4 decades
  uint64_t reps = 100000;
  unsigned threads = 1;
  enum class Estimator { Direct, TiltedRenewal } estimator = Estimator::Direct;

  bool check_ratio = true;     // band test on the ratio at the largest t
  double ratio_lo = 0.85;
  double ratio_hi = 1.05;
  bool check_slope = false;    // growth exponent of ln ell_hat in ln ln t
  double slope_target = 0.5;
  double slope_tol = 0.1;
};

// ell_hat(t) = mean of U^kappa 1{U <= t} over perpetuity draws, compared
// against D g_A(t).  The TiltedRenewal estimator (Kevei laws with kappa = 1
// only) reaches far larger t by solving the renewal form of the truncated
// moment along the exponentially tilted walk.
report::ExperimentReport truncated_moment_experiment(
    const laws::CoefficientLaw& law, double kappa, const TruncMomentConfig& cfg,
    const rng::Stream& stream);

// ------------------------------------------------------------------ wlln

struct WllnConfig {
  std::vector<uint64_t> n_grid;  // increasing
  uint64_t reps = 200;
  unsigned threads = 1;

  double rel_tol = 0.15;       // median band around the target at the largest n
  bool bootstrap_trend = true; // error at n_max <= error at n_min, bootstrap
  int bootstrap_iters = 2000;
  double bootstrap_conf = 0.95;
};

// Dependent-path weak law: sum U_j^kappa / (n g_A(n) D) -> 1, stationary start.
report::ExperimentReport wlln_sre_experiment(const laws::CoefficientLaw& law,
                                             double kappa,
                                             const WllnConfig& cfg,
                                             const rng::Stream& stream);

struct WllnIidConfig : WllnConfig {
  enum class Normalizer { NEll, Bruin } normalizer = Normalizer::NEll;
  bool truncation_probe = false;  // clip at (a_n / ln n) b_n, compare medians
};

// i.i.d. form: (Y_1 + ... + Y_n) / (n ell(n)) -> 1 (or /b_n with the Bruin
// normalizer).
report::ExperimentReport wlln_iid_experiment(const slowvary::PositiveLawY& lawY,
                                             const WllnIidConfig& cfg,
                                             const rng::Stream& stream);

// ------------------------------------------------------------------ clt

struct CltConfig {
  std::vector<uint64_t> n_grid;
  uint64_t reps = 1000;
  unsigned threads = 1;
  enum class Branch { CriticalFinite, CriticalGeneral, Subcritical } branch =
      Branch::CriticalFinite;
  double scale_tol = 0.15;  // quantile-scale band, critical branches
  double var_tol = 0.05;    // sample-variance band, subcritical branch
};

// Normalized partial sums of X_j from stationary GARCH paths:
//   CriticalFinite   S_n / sqrt(n ln n)    vs N(0, beta C)
//   CriticalGeneral  S_n / sqrt(n g_A(n))  vs N(0, beta)
//   Subcritical      S_n / sqrt(n)         vs N(0, beta/(1-lambda-delta))
report::ExperimentReport clt_experiment(double beta, double lambda,
                                        double delta,
                                        const laws::NoiseLaw& noise,
                                        const CltConfig& cfg,
                                        const rng::Stream& stream);

// ------------------------------------------------------------------ fclt

struct FcltConfig {
  uint64_t n = 0;
  std::vector<double> time_grid;  // fractions in (0,1], increasing
  uint64_t reps = 1000;
  unsigned threads = 1;
  double scale_tol = 0.15;  // on the t=1 vs t=0.25 scale ratio
  double corr_tol = 0.1;    // on the disjoint-increment rank correlation
};

// Critical finite branch: snapshots S_n(t)/sqrt(n ln n) against sqrt(beta C t)
// marginals, Brownian scale ratio, and increment independence.
report::ExperimentReport fclt_experiment(double beta, double lambda,
                                         double delta,
                                         const laws::NoiseLaw& noise,
                                         const FcltConfig& cfg,
                                         const rng::Stream& stream);

// ------------------------------------------------------------------ covprobe

struct CovProbeConfig {
  double h = 1000.0;
  double h2 = 100.0;  // second clipping level for the h-scaling check
  uint64_t max_lag = 12;
  uint64_t reps = 100000;
  unsigned threads = 1;

  bool check_eta = false;  // fitted decay rate below eta_max
  double eta_max = 0.8;
  bool check_h_scaling = false;  // lag-1 growth under h2 -> h within (h/h2)^2 (1+tol)
  double h_scaling_tol = 0.5;
  bool check_null = false;  // all lags >= 1 within 3 SE of zero
};

// sigma_j = Cov(chi_h(U_0^kappa), chi_h(U_j^kappa)) from stationary starts;
// fits the decay rate on lags that clear 3 SE.
report::ExperimentReport covariance_decay_probe(const laws::CoefficientLaw& law,
                                                double kappa,
                                                const CovProbeConfig& cfg,
                                                const rng::Stream& stream);

// ------------------------------------------------------------------ gof

struct GofResult {
  double ks_distance = 0.0;
  double scale_ratio = 0.0;  // (IQR / 1.3489795) / sqrt(variance)
};

// Distribution checks against N(0, variance); sample size must be >= 50.
GofResult gof_normal(std::vector<double> sample, double variance);

struct StationaryGof {
  double statistic = 0.0;
  double dof = 0.0;
  double p_value = 0.0;
  uint64_t off_support = 0;  // draws not of the form 2^m - 1
  std::vector<double> observed;  // per m, the last bin pooled
  std::vector<double> expected;
};

// Chi-square fit of perpetuity draws against P(U = 2^m - 1) = 2^{-m}, the
// exact stationary law of the discrete-noise critical GARCH reduction.
// Bins with expected count below 5 are pooled into the tail.
StationaryGof discrete_stationary_gof(const std::vector<double>& draws);

}  // namespace srelab::limitlab
