#pragma once

// Path simulation for U_j = A_j U_{j-1} + B_j and the GARCH(1,1) recursion.

#include <algorithm>
#include <cstdint>
#include <vector>

#include "srelab/laws.hpp"
#include "srelab/rng.hpp"

namespace srelab::sre {

// Clip to [-h, h].
inline double chi_h(double x, double h) { return std::clamp(x, -h, h); }

enum class U0Mode { Stationary, Fixed, Zero };

struct PathConfig {
  uint64_t n = 0;
  U0Mode u0_mode = U0Mode::Stationary;
  double u0_value = 0.0;               // used by U0Mode::Fixed
  double kappa = 1.0;                  // exponent accumulated in sum_u_kappa
  std::vector<double> snapshot_times;  // fractions of n, each in (0,1]
  bool record_path = false;
  double perpetuity_tol = 1e-12;
  uint64_t perpetuity_max_depth = 1000000;
};

struct TruncationDiagnostics {
  uint64_t depth = 0;
  double residual_product = 0.0;
  bool hit_max_depth = false;
};

struct PerpetuityDraw {
  double value = 0.0;
  TruncationDiagnostics diag;
};

// One draw of U = sum_k B_k prod_{j<k} A_j, truncated when the running
// product drops below tol.  Hitting max_depth is flagged, not fatal.
PerpetuityDraw perpetuity_sample(rng::Stream& stream,
                                 const laws::CoefficientLaw& law,
                                 double tol = 1e-12,
                                 uint64_t max_depth = 1000000);

struct PathSummary {
  double sum_u_kappa = 0.0;  // sum of U_j^kappa (SRE) / sigma_j^2 powers (GARCH)
  double sum_x = 0.0;        // GARCH only: sum X_j
  double sum_x2 = 0.0;       // GARCH only: sum X_j^2
  double sum_sigma2 = 0.0;   // GARCH only: sum sigma_j^2
  double final_u = 0.0;
  std::vector<double> snapshots;  // partial sums at floor(n t); sum_x for GARCH,
                                  // sum_u_kappa for plain SRE paths
  std::vector<double> path_u;       // recorded U_j / sigma_j^2
  std::vector<double> path_x;       // recorded X_j (GARCH)
  TruncationDiagnostics init_diag;  // stationary initialisation diagnostics
  bool overflow = false;
};

// n steps of the affine recursion, accumulating sum U_j^kappa over j=1..n.
PathSummary forward_path(rng::Stream& stream, const laws::CoefficientLaw& law,
                         const PathConfig& cfg);

// n steps of sigma_j^2 = beta + lambda X_{j-1}^2 + delta sigma_{j-1}^2,
// X_j = sigma_j Z_j.  Snapshots record the partial sums of X.
PathSummary garch_path(rng::Stream& stream, double beta, double lambda,
                       double delta, const laws::NoiseLaw& noise,
                       const PathConfig& cfg);

}  // namespace srelab::sre
