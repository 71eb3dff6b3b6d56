#include "srelab/sre.hpp"

#include <cmath>

#include "srelab/error.hpp"

namespace srelab::sre {

namespace {

double pow_kappa(double u, double kappa) {
  if (kappa == 1.0) return u;
  if (kappa == 2.0) return u * u;
  return std::pow(u, kappa);
}

std::vector<uint64_t> snapshot_indices(const PathConfig& cfg) {
  std::vector<uint64_t> idx;
  idx.reserve(cfg.snapshot_times.size());
  for (double t : cfg.snapshot_times) {
    if (!(t > 0.0 && t <= 1.0))
      throw DomainError("snapshot time outside (0,1]");
    idx.push_back(static_cast<uint64_t>(
        std::floor(t * static_cast<double>(cfg.n))));
  }
  for (size_t i = 1; i < idx.size(); ++i)
    if (idx[i] < idx[i - 1]) throw DomainError("snapshot times not increasing");
  return idx;
}

}  // namespace

PerpetuityDraw perpetuity_sample(rng::Stream& stream,
                                 const laws::CoefficientLaw& law, double tol,
                                 uint64_t max_depth) {
  if (!(tol > 0.0 && tol < 1.0))
    throw DomainError("perpetuity_sample: tol must lie in (0,1)");
  if (max_depth == 0) throw DomainError("perpetuity_sample: max_depth == 0");

  PerpetuityDraw out;
  double sum = 0.0, prod = 1.0;
  uint64_t depth = 0;
  while (depth < max_depth) {
    const laws::CoeffDraw cd = laws::sample_coeff(law, stream);
    const double next = sum + prod * cd.b;
    if (!(next >= sum))  // requires B >= 0 and finite terms
      throw NumericError("perpetuity_sample: partial sums not monotone");
    sum = next;
    prod *= cd.a;
    ++depth;
    if (prod < tol) break;
  }
  out.value = sum;
  out.diag.depth = depth;
  out.diag.residual_product = prod;
  out.diag.hit_max_depth = depth == max_depth && prod >= tol;
  return out;
}

PathSummary forward_path(rng::Stream& stream, const laws::CoefficientLaw& law,
                         const PathConfig& cfg) {
  if (cfg.n == 0) throw DomainError("forward_path: n == 0");
  PathSummary s;
  double u = 0.0;
  switch (cfg.u0_mode) {
    case U0Mode::Stationary: {
      PerpetuityDraw d = perpetuity_sample(stream, law, cfg.perpetuity_tol,
                                           cfg.perpetuity_max_depth);
      u = d.value;
      s.init_diag = d.diag;
      break;
    }
    case U0Mode::Fixed:
      if (!(cfg.u0_value >= 0.0)) throw DomainError("forward_path: u0 < 0");
      u = cfg.u0_value;
      break;
    case U0Mode::Zero:
      u = 0.0;
      break;
  }

  const std::vector<uint64_t> snap = snapshot_indices(cfg);
  size_t snap_pos = 0;
  while (snap_pos < snap.size() && snap[snap_pos] == 0) {
    s.snapshots.push_back(0.0);
    ++snap_pos;
  }
  if (cfg.record_path) s.path_u.reserve(cfg.n);

  for (uint64_t j = 1; j <= cfg.n; ++j) {
    const laws::CoeffDraw cd = laws::sample_coeff(law, stream);
    u = cd.a * u + cd.b;
    s.sum_u_kappa += pow_kappa(u, cfg.kappa);
    if (!std::isfinite(u) || !std::isfinite(s.sum_u_kappa)) {
      s.overflow = true;
      break;
    }
    if (cfg.record_path) s.path_u.push_back(u);
    while (snap_pos < snap.size() && j == snap[snap_pos]) {
      s.snapshots.push_back(s.sum_u_kappa);
      ++snap_pos;
    }
  }
  s.final_u = u;
  return s;
}

PathSummary garch_path(rng::Stream& stream, double beta, double lambda,
                       double delta, const laws::NoiseLaw& noise,
                       const PathConfig& cfg) {
  if (cfg.n == 0) throw DomainError("garch_path: n == 0");
  laws::CoefficientLaw sre_law = laws::garch_to_sre(beta, lambda, delta, noise);

  PathSummary s;
  double sigma2 = 0.0;
  switch (cfg.u0_mode) {
    case U0Mode::Stationary: {
      PerpetuityDraw d = perpetuity_sample(stream, sre_law, cfg.perpetuity_tol,
                                           cfg.perpetuity_max_depth);
      sigma2 = d.value;
      s.init_diag = d.diag;
      break;
    }
    case U0Mode::Fixed:
      if (!(cfg.u0_value >= 0.0)) throw DomainError("garch_path: sigma2_0 < 0");
      sigma2 = cfg.u0_value;
      break;
    case U0Mode::Zero:
      sigma2 = 0.0;
      break;
  }

  const std::vector<uint64_t> snap = snapshot_indices(cfg);
  size_t snap_pos = 0;
  while (snap_pos < snap.size() && snap[snap_pos] == 0) {
    s.snapshots.push_back(0.0);
    ++snap_pos;
  }
  if (cfg.record_path) {
    s.path_u.reserve(cfg.n);
    s.path_x.reserve(cfg.n);
  }

  double z = laws::sample_noise(noise, stream);  // Z_0
  double x = std::sqrt(sigma2) * z;              // X_0
  for (uint64_t j = 1; j <= cfg.n; ++j) {
    sigma2 = beta + lambda * x * x + delta * sigma2;
    z = laws::sample_noise(noise, stream);
    x = std::sqrt(sigma2) * z;
    s.sum_x += x;
    s.sum_x2 += x * x;
    s.sum_sigma2 += sigma2;
    s.sum_u_kappa += pow_kappa(sigma2, cfg.kappa);
    if (!std::isfinite(sigma2) || !std::isfinite(s.sum_x)) {
      s.overflow = true;
      break;
    }
    if (cfg.record_path) {
      s.path_u.push_back(sigma2);
      s.path_x.push_back(x);
    }
    while (snap_pos < snap.size() && j == snap[snap_pos]) {
      s.snapshots.push_back(s.sum_x);
      ++snap_pos;
    }
  }
  s.final_u = sigma2;
  return s;
}

}  // namespace srelab::sre
