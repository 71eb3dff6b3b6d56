#include "srelab/limitlab.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

#include "srelab/analytics.hpp"
#include "srelab/error.hpp"
#include "srelab/parallel.hpp"
#include "srelab/sre.hpp"
#include "srelab/stats.hpp"

namespace srelab::limitlab {

namespace {

using clock_type = std::chrono::steady_clock;

double seconds_since(clock_type::time_point t0) {
  return std::chrono::duration<double>(clock_type::now() - t0).count();
}

// Child-stream purposes inside one experiment.
constexpr uint64_t kAnalyticsChild = 1;
constexpr uint64_t kBootstrapChild = 2;
constexpr uint64_t kStageOneChild = 3;
constexpr uint64_t kJobsChild = 16;

std::vector<double> default_profile_grid() {
  std::vector<double> g;
  for (int i = 0; i <= 24; ++i) g.push_back(std::pow(10.0, i / 6.0));  // 1..1e4
  return g;
}

size_t resample_index(rng::Stream& s, size_t n) {
  const size_t i = static_cast<size_t>(s.uniform() * static_cast<double>(n));
  return std::min(i, n - 1);
}

double bootstrap_median_se(const std::vector<double>& xs, int iters,
                           rng::Stream& s) {
  std::vector<double> meds(iters);
  std::vector<double> buf(xs.size());
  for (int b = 0; b < iters; ++b) {
    for (auto& v : buf) v = xs[resample_index(s, xs.size())];
    meds[b] = stats::median(buf);
  }
  return std::sqrt(stats::variance(meds));
}

// The error at a level is the median over reps of |stat - target|: the
// concentration the weak law is about, not the bias of the median alone.
double median_abs_error(const std::vector<double>& xs, double target) {
  std::vector<double> errs(xs.size());
  for (size_t i = 0; i < xs.size(); ++i) errs[i] = std::fabs(xs[i] - target);
  return stats::median(errs);
}

// Fraction of bootstrap resamples in which the error at the last level does
// not exceed the error at the first level.
double bootstrap_trend_fraction(const std::vector<double>& first,
                                const std::vector<double>& last, double target,
                                int iters, rng::Stream& s) {
  std::vector<double> buf_f(first.size()), buf_l(last.size());
  int ok = 0;
  for (int b = 0; b < iters; ++b) {
    for (auto& v : buf_f) v = first[resample_index(s, first.size())];
    for (auto& v : buf_l) v = last[resample_index(s, last.size())];
    if (median_abs_error(buf_l, target) <= median_abs_error(buf_f, target))
      ++ok;
  }
  return static_cast<double>(ok) / iters;
}

double ls_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
  const double n = static_cast<double>(xs.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

struct NormalizerInfo {
  analytics::SlowVariationProfile profile;
  double d = 0.0;
};

NormalizerInfo make_normalizer(const laws::CoefficientLaw& law, double kappa,
                               const rng::Stream& stream) {
  NormalizerInfo info;
  info.profile = analytics::fit_profile(law, kappa, default_profile_grid());
  info.d = analytics::d_constant(law, kappa, stream.child(kAnalyticsChild),
                                 200000)
               .value;
  return info;
}

}  // namespace

// ========================================================================
// truncated_moment_experiment
// ========================================================================

namespace {

struct PerpJob {
  double u = 0.0;
  bool flagged = false;
};

// Direct estimator: per-t mean and second moment of U^kappa 1{U <= t},
// assembled through difference arrays over the sorted grid.
void direct_truncmoment(const laws::CoefficientLaw& law, double kappa,
                        const TruncMomentConfig& cfg, const rng::Stream& stream,
                        std::vector<double>& ell, std::vector<double>& se,
                        uint64_t& flagged) {
  const size_t nt = cfg.t_grid.size();
  auto draws = parallel::parallel_map(
      cfg.reps, cfg.threads, [&](uint64_t job) -> PerpJob {
        rng::Stream s = stream.child(kJobsChild).child(job);
        const auto d = sre::perpetuity_sample(s, law);
        return {d.value, d.diag.hit_max_depth};
      });
  std::vector<double> sum(nt + 1, 0.0), sumsq(nt + 1, 0.0);
  flagged = 0;
  for (const auto& d : draws) {
    if (d.flagged) ++flagged;
    // Inclusive threshold with ulp slack: discrete-law draws land a few
    // ulps off their atoms (squared noise values are not exact), and the
    // grid is often chosen to sit exactly on those atoms.
    const auto it = std::lower_bound(cfg.t_grid.begin(), cfg.t_grid.end(),
                                     d.u * (1.0 - 1e-12));
    const size_t idx = static_cast<size_t>(it - cfg.t_grid.begin());
    if (idx == nt) continue;  // above the grid entirely
    const double v = std::pow(d.u, kappa);
    sum[idx] += v;
    sumsq[idx] += v * v;
  }
  ell.assign(nt, 0.0);
  se.assign(nt, 0.0);
  double run = 0.0, run2 = 0.0;
  const double n = static_cast<double>(cfg.reps);
  for (size_t i = 0; i < nt; ++i) {
    run += sum[i];
    run2 += sumsq[i];
    const double m = run / n;
    ell[i] = m;
    se[i] = std::sqrt(std::max(0.0, run2 / n - m * m) / n);
  }
}

// Renewal estimator for the Kevei family at kappa = 1: tabulate
// psi(y) = E[(AU+B) 1{AU+B <= e^y} - AU 1{AU <= e^y}] from perpetuity draws,
// then average occupation sums of psi along the tilted random walk, whose
// increments are Pareto(alpha, v0) up-jumps with the tilted mass and -w
// down-jumps otherwise.
void tilted_truncmoment(const laws::CoefficientLaw& law,
                        const TruncMomentConfig& cfg, const rng::Stream& stream,
                        std::vector<double>& ell, std::vector<double>& se,
                        uint64_t& flagged) {
  const double plateau = law.b;  // lim psi = E B at kappa = 1
  const double y_lo = -law.kevei_w - 0.5;
  const double y_hi = 14.0;
  const double dy = 0.025;
  const size_t ny = static_cast<size_t>((y_hi - y_lo) / dy) + 2;

  struct StageOne {
    double y2 = 0.0, v2 = 0.0, y1 = 0.0, v1 = 0.0;
    bool flagged = false;
  };
  auto s1 = parallel::parallel_map(
      cfg.reps, cfg.threads, [&](uint64_t job) -> StageOne {
        rng::Stream s = stream.child(kStageOneChild).child(job);
        const auto d = sre::perpetuity_sample(s, law);
        const auto cd = laws::sample_coeff(law, s);
        StageOne r;
        r.v1 = cd.a * d.value;
        r.v2 = cd.a * d.value + cd.b;
        r.y1 = std::log(r.v1);
        r.y2 = std::log(r.v2);
        r.flagged = d.diag.hit_max_depth;
        return r;
      });
  std::vector<double> diff(ny + 1, 0.0);
  flagged = 0;
  auto node_at = [&](double y) {
    return static_cast<size_t>(
        std::clamp(std::ceil((y - y_lo) / dy), 0.0,
                   static_cast<double>(ny)));
  };
  for (const auto& r : s1) {
    if (r.flagged) ++flagged;
    if (r.y2 <= y_hi) diff[node_at(r.y2)] += r.v2;
    if (r.y1 <= y_hi) diff[node_at(r.y1)] -= r.v1;
    // contributions whose breakpoints lie beyond y_hi belong to the plateau
  }
  std::vector<double> psi(ny, 0.0);
  double run = 0.0;
  for (size_t i = 0; i < ny; ++i) {
    run += diff[i];
    psi[i] = run / static_cast<double>(cfg.reps);
  }
  auto psi_at = [&](double y) -> double {
    if (y >= y_hi) return plateau;
    if (y < y_lo) return 0.0;
    const double pos = (y - y_lo) / dy;
    const size_t i = static_cast<size_t>(pos);
    if (i + 1 >= ny) return psi[ny - 1];
    const double frac = pos - static_cast<double>(i);
    return psi[i] * (1.0 - frac) + psi[i + 1] * frac;
  };

  const size_t nt = cfg.t_grid.size();
  std::vector<double> xs(nt);
  for (size_t i = 0; i < nt; ++i) xs[i] = std::log(cfg.t_grid[i]);
  const double stop_level = xs.back() + 40.0;
  const double up_mass = law.kevei_up_mass;
  const double inv_alpha = 1.0 / law.alpha;

  auto walks = parallel::parallel_map(
      cfg.reps, cfg.threads, [&](uint64_t job) -> std::vector<double> {
        rng::Stream s = stream.child(kJobsChild).child(job);
        std::vector<double> acc(nt, 0.0);
        double pos = 0.0;
        for (uint64_t step = 0; step < 100000; ++step) {
          for (size_t i = 0; i < nt; ++i) {
            const double y = xs[i] - pos;
            if (y >= y_lo) acc[i] += psi_at(y);
          }
          if (pos > stop_level) break;
          if (s.uniform() < up_mass) {
            pos += law.v0 * std::pow(s.uniform(), -inv_alpha);
          } else {
            pos -= law.kevei_w;
          }
        }
        return acc;
      });
  ell.assign(nt, 0.0);
  se.assign(nt, 0.0);
  for (size_t i = 0; i < nt; ++i) {
    double s = 0.0, s2 = 0.0;
    for (const auto& w : walks) {
      s += w[i];
      s2 += w[i] * w[i];
    }
    const double n = static_cast<double>(cfg.reps);
    const double m = s / n;
    ell[i] = m;
    se[i] = std::sqrt(std::max(0.0, s2 / n - m * m) / n);
  }
}

}  // namespace

report::ExperimentReport truncated_moment_experiment(
    const laws::CoefficientLaw& law, double kappa, const TruncMomentConfig& cfg,
    const rng::Stream& stream) {
  const auto t0 = clock_type::now();
  if (cfg.t_grid.size() < 2) throw ConfigError("truncmoment: need >= 2 grid points");
  for (size_t i = 1; i < cfg.t_grid.size(); ++i)
    if (!(cfg.t_grid[i] > cfg.t_grid[i - 1]))
      throw ConfigError("truncmoment: t_grid must be increasing");
  if (!(cfg.t_grid.front() > 1.0))
    throw ConfigError("truncmoment: t_grid must start above 1");
  if (cfg.t_grid.back() < 1e4 * cfg.t_grid.front())
    throw ConfigError("truncmoment: t_grid must span at least 4 decades");
  if (cfg.estimator == TruncMomentConfig::Estimator::TiltedRenewal &&
      (law.kind != laws::CoefficientLaw::Kind::Kevei ||
       std::fabs(kappa - 1.0) > 1e-9))
    throw ConfigError(
        "truncmoment: the tilted renewal estimator requires a Kevei law with "
        "kappa = 1");

  const NormalizerInfo norm = make_normalizer(law, kappa, stream);

  std::vector<double> ell, se;
  uint64_t flagged = 0;
  if (cfg.estimator == TruncMomentConfig::Estimator::Direct)
    direct_truncmoment(law, kappa, cfg, stream, ell, se, flagged);
  else
    tilted_truncmoment(law, cfg, stream, ell, se, flagged);

  report::ExperimentReport rep;
  rep.scenario = "truncated_moment";
  rep.columns = {"t", "ln_t", "ell_hat", "se", "target", "ratio"};
  std::vector<double> ratios(cfg.t_grid.size());
  for (size_t i = 0; i < cfg.t_grid.size(); ++i) {
    const double target = norm.d * analytics::g_A(norm.profile, cfg.t_grid[i]);
    ratios[i] = ell[i] / target;
    rep.rows.push_back({cfg.t_grid[i], std::log(cfg.t_grid[i]), ell[i], se[i],
                        target, ratios[i]});
  }

  if (cfg.check_ratio) {
    const double r = ratios.back();
    rep.verdicts.push_back({"ratio_final_in_band",
                            r >= cfg.ratio_lo && r <= cfg.ratio_hi, r,
                            cfg.ratio_hi,
                            "band [" + std::to_string(cfg.ratio_lo) + ", " +
                                std::to_string(cfg.ratio_hi) + "]"});
    rep.verdicts.push_back({"ratio_trend_toward_1",
                            std::fabs(ratios.back() - 1.0) <=
                                std::fabs(ratios.front() - 1.0),
                            std::fabs(ratios.back() - 1.0),
                            std::fabs(ratios.front() - 1.0),
                            "|ratio-1| at t_max vs t_min"});
  }
  if (cfg.check_slope) {
    std::vector<double> lx, ly;
    for (size_t i = cfg.t_grid.size() / 2; i < cfg.t_grid.size(); ++i) {
      if (ell[i] > 0.0) {
        lx.push_back(std::log(std::log(cfg.t_grid[i])));
        ly.push_back(std::log(ell[i]));
      }
    }
    if (lx.size() < 2) throw NumericError("truncmoment: slope fit degenerate");
    const double slope = ls_slope(lx, ly);
    rep.verdicts.push_back({"growth_exponent",
                            std::fabs(slope - cfg.slope_target) <=
                                cfg.slope_tol,
                            slope, cfg.slope_tol,
                            "ln ell_hat vs ln ln t, upper half; target " +
                                std::to_string(cfg.slope_target)});
  }
  rep.verdicts.push_back({"no_flagged_draws", flagged == 0,
                          static_cast<double>(flagged), 0.0,
                          "perpetuity draws stopped by max_depth"});

  rep.manifest.reps = cfg.reps;
  rep.manifest.threads = cfg.threads;
  rep.manifest.wall_seconds = seconds_since(t0);
  rep.finalize_digest();
  return rep;
}

// ========================================================================
// wlln
// ========================================================================

namespace {

struct WllnLevels {
  std::vector<std::vector<double>> stats;          // per level, per rep
  std::vector<std::vector<double>> clipped_stats;  // optional, same shape
  uint64_t overflowed = 0;
};

report::ExperimentReport assemble_wlln_report(
    const WllnConfig& cfg, const std::vector<uint64_t>& n_grid,
    WllnLevels&& lv, double target, const rng::Stream& stream,
    bool with_clip) {
  report::ExperimentReport rep;
  rep.scenario = "wlln";
  rep.columns = {"n", "median", "iqr", "se_median", "rel_err", "mad_err"};
  if (with_clip) {
    rep.columns.push_back("median_clipped");
    rep.columns.push_back("median_shift");
  }

  rng::Stream boot = stream.child(kBootstrapChild);
  std::vector<double> medians(n_grid.size());
  for (size_t i = 0; i < n_grid.size(); ++i) {
    auto& xs = lv.stats[i];
    const double med = stats::median(xs);
    const double se = bootstrap_median_se(xs, cfg.bootstrap_iters, boot);
    medians[i] = med;
    std::vector<double> row = {static_cast<double>(n_grid[i]), med,
                               stats::iqr(xs), se,
                               std::fabs(med - target) / target,
                               median_abs_error(xs, target)};
    if (with_clip) {
      const double medc = stats::median(lv.clipped_stats[i]);
      row.push_back(medc);
      row.push_back(med - medc);
    }
    rep.rows.push_back(std::move(row));
  }

  const double med_last = medians.back();
  rep.verdicts.push_back({"median_within_tol",
                          std::fabs(med_last - target) <= cfg.rel_tol * target,
                          med_last, cfg.rel_tol,
                          "relative tolerance around " + std::to_string(target)});
  if (cfg.bootstrap_trend && n_grid.size() >= 2) {
    const double frac =
        bootstrap_trend_fraction(lv.stats.front(), lv.stats.back(), target,
                                 cfg.bootstrap_iters, boot);
    rep.verdicts.push_back({"error_trend", frac >= cfg.bootstrap_conf, frac,
                            cfg.bootstrap_conf,
                            "P*(err at n_max <= err at n_min)"});
  }
  if (with_clip) {
    // median shift of the clipped statistic against the statistic's own
    // Monte Carlo error (its per-path standard deviation) at the largest n
    auto& xs = lv.stats.back();
    auto& cs = lv.clipped_stats.back();
    std::vector<double> diffs(xs.size());
    for (size_t r = 0; r < xs.size(); ++r) diffs[r] = xs[r] - cs[r];
    const double shift = std::fabs(stats::median(diffs));
    const double sd = std::sqrt(stats::variance(xs));
    rep.verdicts.push_back({"truncation_shift_lt_3se", shift <= 3.0 * sd,
                            shift, 3.0 * sd,
                            "clip at (a_n/ln n) b_n, largest n"});
  }
  rep.verdicts.push_back({"no_overflow", lv.overflowed == 0,
                          static_cast<double>(lv.overflowed), 0.0, ""});
  rep.manifest.reps = cfg.reps;
  rep.manifest.threads = cfg.threads;
  return rep;
}

}  // namespace

report::ExperimentReport wlln_sre_experiment(const laws::CoefficientLaw& law,
                                             double kappa,
                                             const WllnConfig& cfg,
                                             const rng::Stream& stream) {
  const auto t0 = clock_type::now();
  if (cfg.n_grid.empty()) throw ConfigError("wlln: empty n_grid");
  const NormalizerInfo norm = make_normalizer(law, kappa, stream);

  const size_t levels = cfg.n_grid.size();
  struct Job {
    double stat = 0.0;
    bool overflow = false;
  };
  auto res = parallel::parallel_map(
      levels * cfg.reps, cfg.threads, [&](uint64_t job) -> Job {
        const size_t level = job / cfg.reps;
        rng::Stream s = stream.child(kJobsChild).child(job);
        sre::PathConfig pc;
        pc.n = cfg.n_grid[level];
        pc.kappa = kappa;
        pc.u0_mode = sre::U0Mode::Stationary;
        const auto ps = sre::forward_path(s, law, pc);
        const double den = static_cast<double>(pc.n) *
                           analytics::g_A(norm.profile,
                                          static_cast<double>(pc.n)) *
                           norm.d;
        return {ps.sum_u_kappa / den, ps.overflow};
      });

  WllnLevels lv;
  lv.stats.resize(levels);
  for (size_t i = 0; i < levels; ++i) lv.stats[i].reserve(cfg.reps);
  for (size_t j = 0; j < res.size(); ++j) {
    if (res[j].overflow) {
      ++lv.overflowed;
      continue;
    }
    lv.stats[j / cfg.reps].push_back(res[j].stat);
  }
  auto rep = assemble_wlln_report(cfg, cfg.n_grid, std::move(lv), 1.0, stream,
                                  false);
  rep.scenario = "wlln_sre";
  rep.manifest.wall_seconds = seconds_since(t0);
  rep.finalize_digest();
  return rep;
}

report::ExperimentReport wlln_iid_experiment(const slowvary::PositiveLawY& lawY,
                                             const WllnIidConfig& cfg,
                                             const rng::Stream& stream) {
  const auto t0 = clock_type::now();
  if (cfg.n_grid.empty()) throw ConfigError("wlln: empty n_grid");
  const size_t levels = cfg.n_grid.size();

  // Normalizers per level.
  std::vector<double> den(levels);
  auto ell = [&](double x) { return slowvary::truncated_mean(lawY, x); };
  for (size_t i = 0; i < levels; ++i) {
    const double n = static_cast<double>(cfg.n_grid[i]);
    if (cfg.normalizer == WllnIidConfig::Normalizer::Bruin)
      den[i] = slowvary::bruin_bn(ell, n, slowvary::BruinMode::FixedPoint).b;
    else
      den[i] = n * ell(n);
    if (!(den[i] > 0.0)) throw ConfigError("wlln: degenerate normalizer");
  }

  // Clipping levels for the truncation probe.
  std::vector<double> clip(levels, 0.0);
  if (cfg.truncation_probe) {
    auto bn = [&](double n) { return n * ell(n); };
    const auto sched = slowvary::pick_an(lawY, bn);
    for (size_t i = 0; i < levels; ++i) {
      const double n = static_cast<double>(cfg.n_grid[i]);
      clip[i] = sched(n) / std::log(n) * bn(n);
    }
  }

  struct Job {
    double stat = 0.0;
    double clipped = 0.0;
  };
  auto res = parallel::parallel_map(
      levels * cfg.reps, cfg.threads, [&](uint64_t job) -> Job {
        const size_t level = job / cfg.reps;
        rng::Stream s = stream.child(kJobsChild).child(job);
        const uint64_t n = cfg.n_grid[level];
        double sum = 0.0, csum = 0.0;
        for (uint64_t j = 0; j < n; ++j) {
          const double y = slowvary::sample_y(lawY, s);
          sum += y;
          if (cfg.truncation_probe) csum += std::min(y, clip[level]);
        }
        return {sum / den[level], csum / den[level]};
      });

  WllnLevels lv;
  lv.stats.resize(levels);
  lv.clipped_stats.resize(levels);
  for (size_t j = 0; j < res.size(); ++j) {
    lv.stats[j / cfg.reps].push_back(res[j].stat);
    lv.clipped_stats[j / cfg.reps].push_back(res[j].clipped);
  }
  auto rep = assemble_wlln_report(cfg, cfg.n_grid, std::move(lv), 1.0, stream,
                                  cfg.truncation_probe);
  rep.scenario = "wlln_iid";
  rep.manifest.wall_seconds = seconds_since(t0);
  rep.finalize_digest();
  return rep;
}

// ========================================================================
// clt
// ========================================================================

report::ExperimentReport clt_experiment(double beta, double lambda,
                                        double delta,
                                        const laws::NoiseLaw& noise,
                                        const CltConfig& cfg,
                                        const rng::Stream& stream) {
  const auto t0 = clock_type::now();
  if (cfg.n_grid.empty()) throw ConfigError("clt: empty n_grid");
  const bool critical = cfg.branch != CltConfig::Branch::Subcritical;
  if (critical && std::fabs(lambda + delta - 1.0) > 1e-12)
    throw ConfigError("clt: critical branches require lambda + delta = 1");
  if (!critical && !(lambda + delta < 1.0))
    throw ConfigError("clt: subcritical branch requires lambda + delta < 1");

  double target_var = 0.0;
  analytics::SlowVariationProfile profile;
  switch (cfg.branch) {
    case CltConfig::Branch::CriticalFinite:
      target_var = beta * analytics::c_lambda_z(noise, lambda);
      break;
    case CltConfig::Branch::CriticalGeneral: {
      const auto law = laws::garch_to_sre(beta, lambda, delta, noise);
      profile = analytics::fit_profile(law, 1.0, default_profile_grid());
      target_var = beta;
      break;
    }
    case CltConfig::Branch::Subcritical:
      target_var = beta / (1.0 - lambda - delta);
      break;
  }

  const size_t levels = cfg.n_grid.size();
  std::vector<double> den(levels);
  for (size_t i = 0; i < levels; ++i) {
    const double n = static_cast<double>(cfg.n_grid[i]);
    switch (cfg.branch) {
      case CltConfig::Branch::CriticalFinite:
        den[i] = std::sqrt(n * std::log(n));
        break;
      case CltConfig::Branch::CriticalGeneral:
        den[i] = std::sqrt(n * analytics::g_A(profile, n));
        break;
      case CltConfig::Branch::Subcritical:
        den[i] = std::sqrt(n);
        break;
    }
  }

  struct Job {
    double stat = 0.0;
    bool overflow = false;
  };
  auto res = parallel::parallel_map(
      levels * cfg.reps, cfg.threads, [&](uint64_t job) -> Job {
        const size_t level = job / cfg.reps;
        rng::Stream s = stream.child(kJobsChild).child(job);
        sre::PathConfig pc;
        pc.n = cfg.n_grid[level];
        pc.u0_mode = sre::U0Mode::Stationary;
        const auto ps = sre::garch_path(s, beta, lambda, delta, noise, pc);
        return {ps.sum_x / den[level], ps.overflow};
      });

  report::ExperimentReport rep;
  rep.scenario = "clt";
  rep.columns = {"n", "scale", "target_scale", "scale_ratio", "ks",
                 "sample_var"};
  uint64_t overflowed = 0;
  std::vector<double> scale_ratios(levels), ks(levels), vars(levels);
  for (size_t i = 0; i < levels; ++i) {
    std::vector<double> xs;
    xs.reserve(cfg.reps);
    for (uint64_t r = 0; r < cfg.reps; ++r) {
      const auto& jb = res[i * cfg.reps + r];
      if (jb.overflow) {
        ++overflowed;
        continue;
      }
      xs.push_back(jb.stat);
    }
    const auto gof = gof_normal(xs, target_var);
    scale_ratios[i] = gof.scale_ratio;
    ks[i] = gof.ks_distance;
    vars[i] = stats::variance(xs);
    rep.rows.push_back({static_cast<double>(cfg.n_grid[i]),
                        gof.scale_ratio * std::sqrt(target_var),
                        std::sqrt(target_var), gof.scale_ratio, ks[i],
                        vars[i]});
  }

  if (critical) {
    rep.verdicts.push_back({"scale_ratio_final",
                            std::fabs(scale_ratios.back() - 1.0) <=
                                cfg.scale_tol,
                            scale_ratios.back(), cfg.scale_tol,
                            "IQR-based scale vs sqrt(target variance)"});
    if (levels >= 2)
      rep.verdicts.push_back({"ks_decreasing", ks.back() < ks.front(),
                              ks.back(), ks.front(),
                              "KS at n_max strictly below KS at n_min"});
  } else {
    rep.verdicts.push_back({"variance_final",
                            std::fabs(vars.back() / target_var - 1.0) <=
                                cfg.var_tol,
                            vars.back(), cfg.var_tol,
                            "sample variance vs " + std::to_string(target_var)});
  }
  rep.verdicts.push_back({"no_overflow", overflowed == 0,
                          static_cast<double>(overflowed), 0.0, ""});
  rep.manifest.reps = cfg.reps;
  rep.manifest.threads = cfg.threads;
  rep.manifest.wall_seconds = seconds_since(t0);
  rep.finalize_digest();
  return rep;
}

// ========================================================================
// fclt
// ========================================================================

report::ExperimentReport fclt_experiment(double beta, double lambda,
                                         double delta,
                                         const laws::NoiseLaw& noise,
                                         const FcltConfig& cfg,
                                         const rng::Stream& stream) {
  const auto t0 = clock_type::now();
  if (cfg.n == 0) throw ConfigError("fclt: n must be positive");
  if (cfg.time_grid.empty()) throw ConfigError("fclt: empty time grid");
  if (std::fabs(lambda + delta - 1.0) > 1e-12)
    throw ConfigError("fclt: requires lambda + delta = 1");
  const double c = analytics::c_lambda_z(noise, lambda);
  const double n_d = static_cast<double>(cfg.n);
  const double den = std::sqrt(n_d * std::log(n_d));

  const size_t nt = cfg.time_grid.size();
  auto res = parallel::parallel_map(
      cfg.reps, cfg.threads, [&](uint64_t job) -> std::vector<double> {
        rng::Stream s = stream.child(kJobsChild).child(job);
        sre::PathConfig pc;
        pc.n = cfg.n;
        pc.u0_mode = sre::U0Mode::Stationary;
        pc.snapshot_times = cfg.time_grid;
        const auto ps = sre::garch_path(s, beta, lambda, delta, noise, pc);
        std::vector<double> out(ps.snapshots.size());
        for (size_t i = 0; i < out.size(); ++i) out[i] = ps.snapshots[i] / den;
        return out;
      });

  report::ExperimentReport rep;
  rep.scenario = "fclt";
  rep.columns = {"t", "scale", "target_scale", "scale_ratio", "ks"};
  std::vector<double> scales(nt);
  auto find_time = [&](double t) -> std::optional<size_t> {
    for (size_t i = 0; i < nt; ++i)
      if (std::fabs(cfg.time_grid[i] - t) < 1e-12) return i;
    return std::nullopt;
  };
  for (size_t i = 0; i < nt; ++i) {
    std::vector<double> xs(cfg.reps);
    for (uint64_t r = 0; r < cfg.reps; ++r) xs[r] = res[r][i];
    const double tv = beta * c * cfg.time_grid[i];
    const auto gof = gof_normal(xs, tv);
    scales[i] = gof.scale_ratio * std::sqrt(tv);
    rep.rows.push_back({cfg.time_grid[i], scales[i], std::sqrt(tv),
                        gof.scale_ratio, gof.ks_distance});
  }

  const auto i025 = find_time(0.25), i05 = find_time(0.5), i1 = find_time(1.0);
  if (i025 && i1) {
    const double ratio = scales[*i1] / scales[*i025];
    rep.verdicts.push_back({"brownian_scale_ratio",
                            std::fabs(ratio / 2.0 - 1.0) <= cfg.scale_tol,
                            ratio, cfg.scale_tol,
                            "scale(t=1)/scale(t=0.25) vs 2"});
  }
  if (i05 && i1) {
    std::vector<double> first(cfg.reps), second(cfg.reps);
    for (uint64_t r = 0; r < cfg.reps; ++r) {
      first[r] = res[r][*i05];
      second[r] = res[r][*i1] - res[r][*i05];
    }
    const double rho = stats::spearman(first, second);
    rep.verdicts.push_back({"increment_rank_corr",
                            std::fabs(rho) <= cfg.corr_tol, rho, cfg.corr_tol,
                            "disjoint increments (0,1/2] and (1/2,1]"});
  }
  double worst = 0.0;
  for (size_t i = 0; i < nt; ++i)
    worst = std::max(worst, std::fabs(rep.rows[i][3] - 1.0));
  rep.verdicts.push_back({"marginal_scale_band", worst <= cfg.scale_tol, worst,
                          cfg.scale_tol,
                          "worst per-t deviation of scale/target"});

  rep.manifest.reps = cfg.reps;
  rep.manifest.threads = cfg.threads;
  rep.manifest.wall_seconds = seconds_since(t0);
  rep.finalize_digest();
  return rep;
}

// ========================================================================
// covariance decay
// ========================================================================

report::ExperimentReport covariance_decay_probe(const laws::CoefficientLaw& law,
                                                double kappa,
                                                const CovProbeConfig& cfg,
                                                const rng::Stream& stream) {
  const auto t0 = clock_type::now();
  if (!(cfg.h >= 1.0) || !(cfg.h2 >= 1.0))
    throw ConfigError("covprobe: clipping levels must be >= 1");
  const size_t nl = static_cast<size_t>(cfg.max_lag) + 1;

  auto res = parallel::parallel_map(
      cfg.reps, cfg.threads, [&](uint64_t job) -> std::vector<double> {
        rng::Stream s = stream.child(kJobsChild).child(job);
        std::vector<double> y(2 * nl);
        double u = sre::perpetuity_sample(s, law).value;
        for (size_t j = 0; j < nl; ++j) {
          const double uk = std::pow(u, kappa);
          y[j] = sre::chi_h(uk, cfg.h);
          y[nl + j] = sre::chi_h(uk, cfg.h2);
          const auto cd = laws::sample_coeff(law, s);
          u = cd.a * u + cd.b;
        }
        return y;
      });

  const double n = static_cast<double>(cfg.reps);
  auto cov_with_se = [&](size_t base, size_t j) -> std::pair<double, double> {
    double m0 = 0.0, mj = 0.0;
    for (const auto& y : res) {
      m0 += y[base];
      mj += y[base + j];
    }
    m0 /= n;
    mj /= n;
    double s = 0.0, s2 = 0.0;
    for (const auto& y : res) {
      const double c = (y[base] - m0) * (y[base + j] - mj);
      s += c;
      s2 += c * c;
    }
    const double cov = s / n;
    const double se = std::sqrt(std::max(0.0, s2 / n - cov * cov) / n);
    return {cov, se};
  };

  report::ExperimentReport rep;
  rep.scenario = "covariance_decay";
  rep.columns = {"lag", "cov_h", "se_h", "cov_h2", "se_h2"};
  std::vector<double> cov(nl), se(nl), cov2(nl), se2(nl);
  for (size_t j = 0; j < nl; ++j) {
    std::tie(cov[j], se[j]) = cov_with_se(0, j);
    std::tie(cov2[j], se2[j]) = cov_with_se(nl, j);
    rep.rows.push_back({static_cast<double>(j), cov[j], se[j], cov2[j],
                        se2[j]});
  }

  if (cfg.check_eta) {
    std::vector<double> lag_x, log_c;
    for (size_t j = 1; j < nl; ++j)
      if (std::fabs(cov[j]) > 3.0 * se[j]) {
        lag_x.push_back(static_cast<double>(j));
        log_c.push_back(std::log(std::fabs(cov[j])));
      }
    if (lag_x.size() >= 2) {
      const double eta = std::exp(ls_slope(lag_x, log_c));
      rep.verdicts.push_back({"eta_below_max", eta < cfg.eta_max, eta,
                              cfg.eta_max,
                              "decay rate fitted on " +
                                  std::to_string(lag_x.size()) + " lags"});
    } else {
      rep.verdicts.push_back({"eta_below_max", false, 0.0, cfg.eta_max,
                              "inconclusive: fewer than 2 lags above 3 SE"});
    }
  }
  if (cfg.check_h_scaling) {
    const double envelope =
        (cfg.h / cfg.h2) * (cfg.h / cfg.h2) * (1.0 + cfg.h_scaling_tol);
    const double value = cov2[1] > 0.0 ? cov[1] / cov2[1] : 0.0;
    rep.verdicts.push_back({"h_scaling_envelope",
                            value > 0.0 && value <= envelope, value, envelope,
                            "lag-1 covariance growth h2 -> h"});
  }
  if (cfg.check_null) {
    double worst = 0.0;
    for (size_t j = 1; j < nl; ++j)
      if (se[j] > 0.0) worst = std::max(worst, std::fabs(cov[j]) / se[j]);
    rep.verdicts.push_back({"null_lags_within_3se", worst <= 3.0, worst, 3.0,
                            "max |cov|/se over lags >= 1"});
  }

  rep.manifest.reps = cfg.reps;
  rep.manifest.threads = cfg.threads;
  rep.manifest.wall_seconds = seconds_since(t0);
  rep.finalize_digest();
  return rep;
}

// ========================================================================
// gof
// ========================================================================

GofResult gof_normal(std::vector<double> sample, double variance) {
  if (sample.size() < 50) throw DomainError("gof_normal: need >= 50 points");
  if (!(variance > 0.0)) throw DomainError("gof_normal: variance must be > 0");
  GofResult g;
  g.scale_ratio =
      stats::iqr(sample) / stats::kNormalIqr / std::sqrt(variance);
  g.ks_distance = stats::ks_distance_normal(std::move(sample), variance);
  return g;
}

StationaryGof discrete_stationary_gof(const std::vector<double>& draws) {
  if (draws.size() < 100)
    throw DomainError("discrete_stationary_gof: need >= 100 draws");
  const double n = static_cast<double>(draws.size());
  // last unpooled bin: largest m with n 2^{-m} >= 5
  int pool_at = 1;
  while (n * std::ldexp(1.0, -(pool_at + 1)) >= 5.0 && pool_at < 60) ++pool_at;

  StationaryGof g;
  g.observed.assign(static_cast<size_t>(pool_at), 0.0);
  g.expected.assign(static_cast<size_t>(pool_at), 0.0);
  for (double u : draws) {
    const double m_real = std::log2(u + 1.0);
    const long m = std::lround(m_real);
    if (m < 1 || std::fabs(u - (std::ldexp(1.0, static_cast<int>(m)) - 1.0)) >
                     1e-6 * (u + 1.0)) {
      ++g.off_support;
      continue;
    }
    const size_t bin = std::min<size_t>(static_cast<size_t>(m),
                                        static_cast<size_t>(pool_at)) -
                       1;
    g.observed[bin] += 1.0;
  }
  for (int m = 1; m < pool_at; ++m)
    g.expected[static_cast<size_t>(m) - 1] = n * std::ldexp(1.0, -m);
  g.expected.back() = n * std::ldexp(1.0, -(pool_at - 1));  // tail mass

  for (size_t i = 0; i < g.observed.size(); ++i) {
    const double d = g.observed[i] - g.expected[i];
    g.statistic += d * d / g.expected[i];
  }
  g.dof = static_cast<double>(g.observed.size()) - 1.0;
  g.p_value = stats::chi_square_upper(g.statistic, g.dof);
  return g;
}

}  // namespace srelab::limitlab
