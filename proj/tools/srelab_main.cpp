// srelab: simulation laboratory for perpetuities, stochastic recurrence
// equations, and critical GARCH(1,1).  One subcommand per experiment; every
// run writes report.json and curves.csv into the output directory and exits
// 0 (all verdicts pass), 2 (a verdict failed), or 1 (usage error).

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "srelab/analytics.hpp"
#include "srelab/config.hpp"
#include "srelab/error.hpp"
#include "srelab/laws.hpp"
#include "srelab/limitlab.hpp"
#include "srelab/parallel.hpp"
#include "srelab/report.hpp"
#include "srelab/rng.hpp"
#include "srelab/slowvary.hpp"
#include "srelab/sre.hpp"
#include "srelab/stats.hpp"

namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using namespace srelab;

struct CommonOpts {
  std::string seed_text = "1";
  uint64_t reps = 0;  // 0 = keep the config/default value
  unsigned threads = 0;
  std::string out;

  uint64_t seed() const { return config::parse_seed(seed_text); }
};

void add_common(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--seed", o.seed_text, "master seed (decimal or 0x hex)");
  cmd->add_option("--reps", o.reps, "replication count override");
  cmd->add_option("--threads", o.threads, "worker threads (0 = all cores)");
  cmd->add_option("--out", o.out, "output directory");
}

fs::path resolve_out(const CommonOpts& o) {
  if (!o.out.empty()) return o.out;
  if (const char* env = std::getenv("SRELAB_OUT"); env && *env) return env;
  return ".";
}

void print_verdicts(const report::ExperimentReport& rep) {
  for (const auto& v : rep.verdicts) {
    std::cout << (v.pass ? "[PASS] " : "[FAIL] ") << v.rule
              << "  value=" << v.value << "  threshold=" << v.threshold;
    if (!v.note.empty()) std::cout << "  (" << v.note << ")";
    std::cout << "\n";
  }
}

int emit(report::ExperimentReport& rep, const std::string& subcommand,
         const json& resolved_config, const CommonOpts& o) {
  rep.manifest.subcommand = subcommand;
  rep.manifest.config_json = resolved_config.dump();
  rep.manifest.seed = o.seed();
  const fs::path dir = resolve_out(o);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create output directory " + dir.string());
  report::write_report_json(rep, dir / "report.json");
  report::write_curves_csv(rep, dir / "curves.csv");
  print_verdicts(rep);
  std::cout << "report: " << (dir / "report.json").string()
            << "  digest: " << rep.manifest.digest << "\n";
  return rep.all_pass() ? 0 : 2;
}

double verdict_code(laws::Verdict v) {
  switch (v) {
    case laws::Verdict::Pass: return 1.0;
    case laws::Verdict::Fail: return 0.0;
    case laws::Verdict::Unknown: return 2.0;
    case laws::Verdict::NotApplicable: return 3.0;
  }
  return 2.0;
}

// ----------------------------------------------------------------- constants

int cmd_constants(const std::string& law_file, const std::string& format,
                  const CommonOpts& o) {
  const auto start = std::chrono::steady_clock::now();
  const auto law = config::parse_law(config::load_json(law_file));
  const auto cond = laws::check_conditions(law);
  if (cond.kappa_exists != laws::Verdict::Pass)
    throw DomainError("constants: no Cramer exponent for this law (" +
                      cond.notes + ")");
  const double kappa = cond.kappa;
  const auto tlm = analytics::tilted_log_moment(law, kappa);
  const double m = tlm.pos_infinite
                       ? std::numeric_limits<double>::infinity()
                       : tlm.value;
  const uint64_t reps = o.reps ? o.reps : 200000;
  const auto d = analytics::d_constant(law, kappa,
                                       rng::make_stream(o.seed()).child(1),
                                       reps);
  double c_prime = std::nan("");
  std::optional<double> tail_c;
  if (std::isfinite(m) && m > 0.0) {
    const auto kc =
        analytics::kesten_constant(d.value, kappa, m, cond.nonarithmetic_logA);
    c_prime = kc.c_prime;
    tail_c = kc.tail_constant;
  }
  double c_lambda = std::nan("");
  std::string c_lambda_note;
  if ((law.kind == laws::CoefficientLaw::Kind::GarchCritical ||
       law.kind == laws::CoefficientLaw::Kind::GarchGeneral) &&
      law.lambda > 0.0) {
    try {
      c_lambda = analytics::c_lambda_z(law.noise, law.lambda);
    } catch (const Error& e) {
      c_lambda_note = e.what();
    }
  }

  report::ExperimentReport rep;
  rep.scenario = "constants";
  rep.columns = {"kappa", "m", "d", "d_se", "c_prime", "c_lambda_z"};
  rep.rows.push_back({kappa, m, d.value, d.std_error, c_prime, c_lambda});
  auto cond_entry = [&](const char* rule, laws::Verdict v) {
    rep.verdicts.push_back({rule, v != laws::Verdict::Fail, verdict_code(v),
                            1.0, laws::to_string(v)});
  };
  cond_entry("nondegenerate_A", cond.cond3);
  cond_entry("nondegenerate_B", cond.cond4);
  cond_entry("kappa_exists", cond.kappa_exists);
  cond_entry("b_moment_finite", cond.cond6);
  cond_entry("garch_stationarity", cond.garch_stationarity);
  // informational: an arithmetic ln A only withholds the tail constant
  rep.verdicts.push_back({"nonarithmetic_log_a", true,
                          verdict_code(cond.nonarithmetic_logA), 1.0,
                          laws::to_string(cond.nonarithmetic_logA)});
  rep.manifest.reps = reps;
  rep.manifest.threads = 1;
  rep.manifest.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  rep.finalize_digest();

  if (format == "json") {
    json out;
    out["kappa"] = kappa;
    out["m"] = std::isfinite(m) ? json(m) : json("inf");
    out["d"] = d.value;
    out["c_prime"] = std::isnan(c_prime) ? json() : json(c_prime);
    out["tail_constant"] = tail_c ? json(*tail_c) : json();
    out["c_lambda_z"] = std::isnan(c_lambda) ? json() : json(c_lambda);
    if (!c_lambda_note.empty()) out["c_lambda_z_note"] = c_lambda_note;
    std::cout << out.dump(2) << "\n";
  } else {
    std::cout << "name,value\n";
    std::cout << "kappa," << kappa << "\n";
    std::cout << "m," << m << "\n";
    std::cout << "d," << d.value << "\n";
    std::cout << "c_prime," << c_prime << "\n";
    std::cout << "tail_constant," << (tail_c ? *tail_c : std::nan("")) << "\n";
    std::cout << "c_lambda_z," << c_lambda << "\n";
  }

  json resolved = {{"law_file", law_file}, {"format", format}};
  return emit(rep, "constants", resolved, o);
}

// ----------------------------------------------------------------- simulate

struct SimulateOpts {
  std::string law_file;
  uint64_t n = 0;
  double kappa = std::nan("");
  std::string u0 = "stationary";
  double u0_value = 0.0;
  std::string record = "sums";
};

int cmd_simulate(const SimulateOpts& so, const CommonOpts& o) {
  const auto start = std::chrono::steady_clock::now();
  const auto law = config::parse_law(config::load_json(so.law_file));
  const uint64_t reps = o.reps ? o.reps : 1;
  if (so.record == "path" && reps != 1)
    throw ConfigError("simulate: --record path requires --reps 1");

  sre::PathConfig pc;
  pc.n = so.n;
  if (so.u0 == "stationary") pc.u0_mode = sre::U0Mode::Stationary;
  else if (so.u0 == "zero") pc.u0_mode = sre::U0Mode::Zero;
  else if (so.u0 == "fixed") {
    pc.u0_mode = sre::U0Mode::Fixed;
    pc.u0_value = so.u0_value;
  } else {
    throw ConfigError("simulate: unknown --u0 mode \"" + so.u0 + "\"");
  }
  pc.record_path = so.record == "path";

  const bool garch = law.kind == laws::CoefficientLaw::Kind::GarchCritical ||
                     law.kind == laws::CoefficientLaw::Kind::GarchGeneral;
  double kappa = so.kappa;
  if (std::isnan(kappa)) kappa = garch ? 1.0 : analytics::solve_kappa(law);
  pc.kappa = kappa;

  const rng::Stream root = rng::make_stream(o.seed());
  const unsigned threads = parallel::resolve_threads(o.threads);
  auto run_one = [&](uint64_t job) -> sre::PathSummary {
    rng::Stream s = root.child(16).child(job);
    return garch ? sre::garch_path(s, law.beta, law.lambda, law.delta,
                                   law.noise, pc)
                 : sre::forward_path(s, law, pc);
  };

  report::ExperimentReport rep;
  rep.scenario = "simulate";
  uint64_t overflowed = 0;
  if (pc.record_path) {
    const auto ps = run_one(0);
    if (ps.overflow) ++overflowed;
    if (garch) {
      rep.columns = {"j", "x", "sigma2"};
      for (uint64_t j = 0; j < pc.n; ++j)
        rep.rows.push_back({static_cast<double>(j + 1), ps.path_x[j],
                            ps.path_u[j]});
    } else {
      rep.columns = {"j", "u"};
      for (uint64_t j = 0; j < pc.n; ++j)
        rep.rows.push_back({static_cast<double>(j + 1), ps.path_u[j]});
    }
  } else {
    auto res = parallel::parallel_map(reps, threads, run_one);
    if (garch) {
      rep.columns = {"rep", "sum_x", "sum_x2", "sum_sigma2"};
      for (uint64_t r = 0; r < reps; ++r) {
        if (res[r].overflow) ++overflowed;
        rep.rows.push_back({static_cast<double>(r), res[r].sum_x,
                            res[r].sum_x2, res[r].sum_sigma2});
      }
    } else {
      rep.columns = {"rep", "sum_u_kappa", "final_u"};
      for (uint64_t r = 0; r < reps; ++r) {
        if (res[r].overflow) ++overflowed;
        rep.rows.push_back({static_cast<double>(r), res[r].sum_u_kappa,
                            res[r].final_u});
      }
    }
  }
  rep.verdicts.push_back({"no_overflow", overflowed == 0,
                          static_cast<double>(overflowed), 0.0, ""});
  rep.manifest.reps = reps;
  rep.manifest.threads = threads;
  rep.manifest.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  rep.finalize_digest();

  json resolved = {{"law_file", so.law_file}, {"n", so.n},
                   {"kappa", kappa},          {"u0", so.u0},
                   {"record", so.record},     {"reps", reps}};
  return emit(rep, "simulate", resolved, o);
}

// ----------------------------------------------------------------- perpetuity

struct PerpetuityOpts {
  std::string law_file;
  double tol = 1e-12;
  uint64_t max_depth = 1000000;
  bool gof_exact = false;
};

int cmd_perpetuity(const PerpetuityOpts& po, const CommonOpts& o) {
  const auto start = std::chrono::steady_clock::now();
  const auto law = config::parse_law(config::load_json(po.law_file));
  const uint64_t reps = o.reps ? o.reps : 100000;
  const unsigned threads = parallel::resolve_threads(o.threads);
  const rng::Stream root = rng::make_stream(o.seed());

  struct Draw {
    double u;
    bool flagged;
  };
  auto res = parallel::parallel_map(reps, threads, [&](uint64_t job) -> Draw {
    rng::Stream s = root.child(16).child(job);
    const auto d = sre::perpetuity_sample(s, law, po.tol, po.max_depth);
    return {d.value, d.diag.hit_max_depth};
  });
  std::vector<double> us(reps);
  uint64_t flagged = 0;
  for (uint64_t r = 0; r < reps; ++r) {
    us[r] = res[r].u;
    if (res[r].flagged) ++flagged;
  }
  std::sort(us.begin(), us.end());

  report::ExperimentReport rep;
  rep.scenario = "perpetuity";
  rep.columns = {"quantile", "value"};
  for (double q : {0.01, 0.05, 0.1, 0.25, 0.5, 0.75, 0.9, 0.95, 0.99, 0.999})
    rep.rows.push_back({q, stats::quantile_sorted(us, q)});
  rep.verdicts.push_back({"no_flagged_draws", flagged == 0,
                          static_cast<double>(flagged), 0.0,
                          "stopped by max_depth"});
  if (po.gof_exact) {
    const auto gof = limitlab::discrete_stationary_gof(us);
    rep.verdicts.push_back({"stationary_gof",
                            gof.off_support == 0 && gof.p_value > 0.001,
                            gof.p_value, 0.001,
                            "chi-square, dof=" + std::to_string(gof.dof) +
                                ", off-support=" +
                                std::to_string(gof.off_support)});
  }
  rep.manifest.reps = reps;
  rep.manifest.threads = threads;
  rep.manifest.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  rep.finalize_digest();

  json resolved = {{"law_file", po.law_file},
                   {"tol", po.tol},
                   {"max_depth", po.max_depth},
                   {"gof_exact", po.gof_exact},
                   {"reps", reps}};
  return emit(rep, "perpetuity", resolved, o);
}

// ----------------------------------------------------------------- experiments

double kappa_from(const json& doc, const laws::CoefficientLaw& law) {
  if (doc.contains("kappa")) return doc.at("kappa").get<double>();
  return analytics::solve_kappa(law);
}

int cmd_truncmoment(const std::string& config_file, const CommonOpts& o) {
  const json doc = config::load_json(config_file);
  const auto law = config::parse_law(doc);
  const double kappa = kappa_from(doc, law);

  limitlab::TruncMomentConfig cfg;
  cfg.t_grid = config::parse_grid(doc.at("t_grid"), "t_grid");
  if (doc.contains("reps")) cfg.reps = doc.at("reps").get<uint64_t>();
  if (o.reps) cfg.reps = o.reps;
  cfg.threads = parallel::resolve_threads(o.threads);
  const std::string est = doc.value("estimator", "direct");
  if (est == "direct")
    cfg.estimator = limitlab::TruncMomentConfig::Estimator::Direct;
  else if (est == "tilted_renewal")
    cfg.estimator = limitlab::TruncMomentConfig::Estimator::TiltedRenewal;
  else
    throw ConfigError("truncmoment: unknown estimator \"" + est + "\"");
  cfg.check_ratio = doc.value("check_ratio", true);
  cfg.ratio_lo = doc.value("ratio_lo", 0.85);
  cfg.ratio_hi = doc.value("ratio_hi", 1.05);
  cfg.check_slope = doc.value("check_slope", false);
  cfg.slope_target = doc.value("slope_target", 0.5);
  cfg.slope_tol = doc.value("slope_tol", 0.1);

  auto rep = limitlab::truncated_moment_experiment(
      law, kappa, cfg, rng::make_stream(o.seed()));
  json resolved = doc;
  resolved["kappa"] = kappa;
  resolved["reps"] = cfg.reps;
  resolved["threads"] = cfg.threads;
  return emit(rep, "truncmoment", resolved, o);
}

void fill_wlln_common(const json& doc, const CommonOpts& o,
                      limitlab::WllnConfig& cfg) {
  cfg.n_grid = config::parse_count_grid(doc.at("n_grid"), "n_grid");
  if (doc.contains("reps")) cfg.reps = doc.at("reps").get<uint64_t>();
  if (o.reps) cfg.reps = o.reps;
  cfg.threads = parallel::resolve_threads(o.threads);
  cfg.rel_tol = doc.value("rel_tol", 0.15);
  cfg.bootstrap_trend = doc.value("bootstrap_trend", true);
  cfg.bootstrap_iters = doc.value("bootstrap_iters", 2000);
  cfg.bootstrap_conf = doc.value("bootstrap_conf", 0.95);
}

int cmd_wlln(const std::string& config_file, const CommonOpts& o) {
  const json doc = config::load_json(config_file);
  const std::string mode = doc.value("mode", "sre");
  report::ExperimentReport rep;
  json resolved = doc;
  if (mode == "sre") {
    const auto law = config::parse_law(doc);
    const double kappa = kappa_from(doc, law);
    limitlab::WllnConfig cfg;
    fill_wlln_common(doc, o, cfg);
    rep = limitlab::wlln_sre_experiment(law, kappa, cfg,
                                        rng::make_stream(o.seed()));
    resolved["kappa"] = kappa;
    resolved["reps"] = cfg.reps;
  } else if (mode == "iid") {
    const auto lawY = config::parse_law_y(doc);
    limitlab::WllnIidConfig cfg;
    fill_wlln_common(doc, o, cfg);
    const std::string nrm = doc.value("normalizer", "n_ell");
    if (nrm == "n_ell")
      cfg.normalizer = limitlab::WllnIidConfig::Normalizer::NEll;
    else if (nrm == "bruin")
      cfg.normalizer = limitlab::WllnIidConfig::Normalizer::Bruin;
    else
      throw ConfigError("wlln: unknown normalizer \"" + nrm + "\"");
    cfg.truncation_probe = doc.value("truncation_probe", false);
    rep = limitlab::wlln_iid_experiment(lawY, cfg, rng::make_stream(o.seed()));
    resolved["reps"] = cfg.reps;
  } else {
    throw ConfigError("wlln: mode must be \"sre\" or \"iid\"");
  }
  return emit(rep, "wlln", resolved, o);
}

int cmd_clt(const std::string& config_file, const CommonOpts& o) {
  const json doc = config::load_json(config_file);
  const double beta = doc.at("beta").get<double>();
  const double lambda = doc.at("lambda").get<double>();
  const double delta = doc.at("delta").get<double>();
  const auto noise = config::parse_noise(doc.at("noise"));

  limitlab::CltConfig cfg;
  cfg.n_grid = config::parse_count_grid(doc.at("n_grid"), "n_grid");
  if (doc.contains("reps")) cfg.reps = doc.at("reps").get<uint64_t>();
  if (o.reps) cfg.reps = o.reps;
  cfg.threads = parallel::resolve_threads(o.threads);
  const std::string branch = doc.value("branch", "critical_finite");
  if (branch == "critical_finite")
    cfg.branch = limitlab::CltConfig::Branch::CriticalFinite;
  else if (branch == "critical_general")
    cfg.branch = limitlab::CltConfig::Branch::CriticalGeneral;
  else if (branch == "subcritical")
    cfg.branch = limitlab::CltConfig::Branch::Subcritical;
  else
    throw ConfigError("clt: unknown branch \"" + branch + "\"");
  cfg.scale_tol = doc.value("scale_tol", 0.15);
  cfg.var_tol = doc.value("var_tol", 0.05);

  auto rep = limitlab::clt_experiment(beta, lambda, delta, noise, cfg,
                                      rng::make_stream(o.seed()));
  json resolved = doc;
  resolved["reps"] = cfg.reps;
  resolved["threads"] = cfg.threads;
  return emit(rep, "clt", resolved, o);
}

int cmd_fclt(const std::string& config_file, const CommonOpts& o) {
  const json doc = config::load_json(config_file);
  const double beta = doc.at("beta").get<double>();
  const double lambda = doc.at("lambda").get<double>();
  const double delta = doc.at("delta").get<double>();
  const auto noise = config::parse_noise(doc.at("noise"));

  limitlab::FcltConfig cfg;
  cfg.n = doc.at("n").get<uint64_t>();
  cfg.time_grid = config::parse_grid(doc.at("time_grid"), "time_grid");
  if (doc.contains("reps")) cfg.reps = doc.at("reps").get<uint64_t>();
  if (o.reps) cfg.reps = o.reps;
  cfg.threads = parallel::resolve_threads(o.threads);
  cfg.scale_tol = doc.value("scale_tol", 0.15);
  cfg.corr_tol = doc.value("corr_tol", 0.1);

  auto rep = limitlab::fclt_experiment(beta, lambda, delta, noise, cfg,
                                       rng::make_stream(o.seed()));
  json resolved = doc;
  resolved["reps"] = cfg.reps;
  resolved["threads"] = cfg.threads;
  return emit(rep, "fclt", resolved, o);
}

int cmd_covprobe(const std::string& config_file, const CommonOpts& o) {
  const json doc = config::load_json(config_file);
  const auto law = config::parse_law(doc);
  const double kappa = kappa_from(doc, law);

  limitlab::CovProbeConfig cfg;
  cfg.h = doc.value("h", 1000.0);
  cfg.h2 = doc.value("h2", 100.0);
  cfg.max_lag = doc.value("max_lag", uint64_t{12});
  if (doc.contains("reps")) cfg.reps = doc.at("reps").get<uint64_t>();
  if (o.reps) cfg.reps = o.reps;
  cfg.threads = parallel::resolve_threads(o.threads);
  cfg.check_eta = doc.value("check_eta", false);
  cfg.eta_max = doc.value("eta_max", 0.8);
  cfg.check_h_scaling = doc.value("check_h_scaling", false);
  cfg.h_scaling_tol = doc.value("h_scaling_tol", 0.5);
  cfg.check_null = doc.value("check_null", false);

  auto rep = limitlab::covariance_decay_probe(law, kappa, cfg,
                                              rng::make_stream(o.seed()));
  json resolved = doc;
  resolved["kappa"] = kappa;
  resolved["reps"] = cfg.reps;
  resolved["threads"] = cfg.threads;
  return emit(rep, "covprobe", resolved, o);
}

// ----------------------------------------------------------------- slowvary

struct SlowvaryOpts {
  std::string ell = "log";
  std::string probe = "2a";
  std::string law = "pareto_one";
  double grid_from = 1e2;
  double grid_to = 1e8;
  int grid_points = 7;
  double tol = 0.02;
  int window = 3;
  std::string expect = "none";
};

std::function<double(double)> make_ell(const std::string& spec) {
  if (spec == "const") return [](double) { return 1.0; };
  if (spec == "log") return [](double x) { return std::log(x); };
  if (spec.rfind("ap4:", 0) == 0) {
    const double beta = std::stod(spec.substr(4));
    if (!(beta > 0.0 && beta < 1.0))
      throw ConfigError("slowvary: ap4 exponent must lie in (0,1)");
    return [beta](double x) { return std::exp(std::pow(std::log(x), beta)); };
  }
  if (spec.rfind("table:", 0) == 0) {
    const std::string file = spec.substr(6);
    auto xs = config::load_numeric_file(file, "0");
    auto ys = config::load_numeric_file(file, "1");
    if (xs.size() != ys.size() || xs.size() < 2)
      throw ConfigError("slowvary: table needs >= 2 rows of x,ell pairs");
    std::vector<double> lx(xs.size()), ly(ys.size());
    for (size_t i = 0; i < xs.size(); ++i) {
      if (!(xs[i] > 0.0) || !(ys[i] > 0.0))
        throw ConfigError("slowvary: table entries must be positive");
      if (i > 0 && !(xs[i] > xs[i - 1]))
        throw ConfigError("slowvary: table x column must be increasing");
      lx[i] = std::log(xs[i]);
      ly[i] = std::log(ys[i]);
    }
    // log-log interpolation, extrapolating from the boundary segments
    return [lx, ly](double x) {
      const double t = std::log(x);
      size_t i = 1;
      while (i + 1 < lx.size() && lx[i] < t) ++i;
      const double f = (t - lx[i - 1]) / (lx[i] - lx[i - 1]);
      return std::exp(ly[i - 1] + f * (ly[i] - ly[i - 1]));
    };
  }
  throw ConfigError("slowvary: unknown --ell \"" + spec + "\"");
}

slowvary::PositiveLawY make_law_y(const std::string& spec) {
  if (spec == "pareto_one") return slowvary::PositiveLawY::pareto_one();
  if (spec == "st_petersburg") return slowvary::PositiveLawY::st_petersburg();
  if (spec.rfind("constant:", 0) == 0)
    return slowvary::PositiveLawY::constant(std::stod(spec.substr(9)));
  if (spec.rfind("sampled:", 0) == 0) {
    const std::string file = spec.substr(8);
    return slowvary::PositiveLawY::sampled(config::load_numeric_file(file),
                                           file);
  }
  throw ConfigError("slowvary: unknown --law \"" + spec + "\"");
}

int cmd_slowvary(const SlowvaryOpts& so, const CommonOpts& o) {
  const auto start = std::chrono::steady_clock::now();
  std::vector<double> grid;
  {
    if (so.grid_points < 2 || !(so.grid_to > so.grid_from) ||
        !(so.grid_from > 0))
      throw ConfigError("slowvary: bad grid flags");
    const double r =
        std::log(so.grid_to / so.grid_from) / (so.grid_points - 1);
    for (int i = 0; i < so.grid_points; ++i)
      grid.push_back(so.grid_from * std::exp(r * i));
    grid.back() = so.grid_to;
  }

  report::ExperimentReport rep;
  rep.scenario = "slowvary_" + so.probe;
  if (so.probe == "2a" || so.probe == "2b") {
    const auto ell = make_ell(so.ell);
    const auto which = so.probe == "2a" ? slowvary::RatioCondition::TwoA
                                        : slowvary::RatioCondition::TwoB;
    const auto trend =
        slowvary::probe_condition(ell, which, grid, so.tol, so.window);
    rep.columns = {"x", "ratio"};
    std::cout << "x,ratio\n";
    for (size_t i = 0; i < trend.x.size(); ++i) {
      rep.rows.push_back({trend.x[i], trend.ratio[i]});
      std::cout << trend.x[i] << "," << trend.ratio[i] << "\n";
    }
    std::cout << "verdict: " << slowvary::to_string(trend.verdict) << "\n";
    bool pass;
    if (so.expect == "converge")
      pass = trend.verdict == slowvary::TrendReport::Verdict::ConvergesTo1;
    else if (so.expect == "diverge")
      pass = trend.verdict == slowvary::TrendReport::Verdict::Diverges;
    else
      pass = trend.verdict != slowvary::TrendReport::Verdict::Inconclusive;
    rep.verdicts.push_back({"probe_" + so.probe, pass,
                            static_cast<double>(trend.verdict), so.tol,
                            std::string(slowvary::to_string(trend.verdict)) +
                                ", expect=" + so.expect});
  } else if (so.probe == "ap5") {
    const auto lawY = make_law_y(so.law);
    rep.columns = {"x", "tail_ratio"};
    std::vector<double> ratios;
    std::cout << "x,tail_ratio\n";
    for (double x : grid) {
      const double r = slowvary::tail_ratio(lawY, x);
      ratios.push_back(r);
      rep.rows.push_back({x, r});
      std::cout << x << "," << r << "\n";
    }
    bool decreasing = true;
    for (size_t i = 1; i < ratios.size(); ++i)
      if (ratios[i] > ratios[i - 1] + 1e-12) decreasing = false;
    const bool halved = ratios.back() < 0.5 * ratios.front() ||
                        ratios.front() == 0.0;
    rep.verdicts.push_back({"tail_ratio_vanishing", decreasing && halved,
                            ratios.back(), 0.5 * ratios.front(),
                            "decreasing across the grid and at least halved"});
  } else {
    throw ConfigError("slowvary: --probe must be 2a, 2b, or ap5");
  }
  rep.manifest.reps = 0;
  rep.manifest.threads = 1;
  rep.manifest.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  rep.finalize_digest();

  json resolved = {{"ell", so.ell},        {"probe", so.probe},
                   {"law", so.law},        {"grid_from", so.grid_from},
                   {"grid_to", so.grid_to}, {"grid_points", so.grid_points},
                   {"tol", so.tol},        {"window", so.window},
                   {"expect", so.expect}};
  return emit(rep, "slowvary", resolved, o);
}

// ----------------------------------------------------------------- selftest

int cmd_selftest(const CommonOpts& o) {
  const auto start = std::chrono::steady_clock::now();
  report::ExperimentReport rep;
  rep.scenario = "selftest";
  auto check = [&](const char* rule, bool pass, double value,
                   double threshold) {
    rep.verdicts.push_back({rule, pass, value, threshold, ""});
  };

  {
    rng::Stream a = rng::make_stream(42), b = rng::make_stream(42);
    bool same = true;
    for (int i = 0; i < 100; ++i)
      if (a.uniform() != b.uniform()) same = false;
    check("rng_determinism", same, same ? 1 : 0, 1);
    const rng::Stream p = rng::make_stream(7);
    rng::Stream c1 = p.child(5);
    (void)p.child(7);
    rng::Stream c2 = p.child(5);
    check("rng_split_order_free", c1.next_u64() == c2.next_u64(), 1, 1);
  }
  check("chi_h_clip_hi", sre::chi_h(3, 2) == 2.0, sre::chi_h(3, 2), 2);
  check("chi_h_clip_lo", sre::chi_h(-3, 2) == -2.0, sre::chi_h(-3, 2), -2);
  check("chi_h_identity", sre::chi_h(1, 2) == 1.0, sre::chi_h(1, 2), 1);
  {
    const auto law = laws::make_finite_discrete({{0.5, 1.0, 1.0}});
    rng::Stream s = rng::make_stream(1);
    const auto d = sre::perpetuity_sample(s, law);
    check("perpetuity_geometric", std::fabs(d.value - 2.0) < 1e-9, d.value, 2);
    const auto zero_law = laws::make_finite_discrete({{0.0, 3.0, 1.0}});
    rng::Stream s2 = rng::make_stream(1);
    const auto d2 = sre::perpetuity_sample(s2, zero_law);
    check("perpetuity_first_term", d2.value == 3.0 && d2.diag.depth == 1,
          d2.value, 3);
  }
  {
    const auto law = laws::make_finite_discrete({{0.5, 1.0, 1.0}});
    sre::PathConfig pc;
    pc.n = 3;
    pc.u0_mode = sre::U0Mode::Zero;
    rng::Stream s = rng::make_stream(1);
    const auto ps = sre::forward_path(s, law, pc);
    check("forward_path_hand", std::fabs(ps.sum_u_kappa - 4.25) < 1e-12 &&
                                   std::fabs(ps.final_u - 1.75) < 1e-12,
          ps.sum_u_kappa, 4.25);
  }
  {
    sre::PathConfig pc;
    pc.n = 3;
    pc.u0_mode = sre::U0Mode::Fixed;
    pc.u0_value = 3.0;
    rng::Stream s = rng::make_stream(1);
    const auto ps = sre::garch_path(s, 1.0, 0.0, 0.5,
                                    laws::NoiseLaw::standard_normal(), pc);
    check("garch_affine_fixed_point",
          std::fabs(ps.sum_sigma2 - (2.5 + 2.25 + 2.125)) < 1e-12,
          ps.sum_sigma2, 6.875);
  }
  {
    const auto law = laws::make_finite_discrete({{2.0, 1.0, 1.0}});
    check("psi_point_mass", std::fabs(analytics::psi(law, 3) - 8.0) < 1e-12,
          analytics::psi(law, 3), 8);
    const auto crit = laws::make_garch_critical(1.0, 1.0,
                                                laws::three_atom_noise());
    check("psi_critical_unit", std::fabs(analytics::psi(crit, 1) - 1.0) < 1e-10,
          analytics::psi(crit, 1), 1);
    check("solve_kappa_garch", analytics::solve_kappa(crit) == 1.0, 1, 1);
    const auto ln = laws::make_lognormal_A_const_B(-0.5, 1.0, 1.0);
    check("solve_kappa_lognormal",
          std::fabs(analytics::solve_kappa(ln) - 1.0) < 1e-9,
          analytics::solve_kappa(ln), 1);
    check("h_a_discrete_below",
          std::fabs(analytics::h_A(crit, 1.0, 0.3) - 0.3) < 1e-12,
          analytics::h_A(crit, 1.0, 0.3), 0.3);
    check("h_a_discrete_saturated",
          std::fabs(analytics::h_A(crit, 1.0, 5.0) - std::log(2.0)) < 1e-12,
          analytics::h_A(crit, 1.0, 5.0), std::log(2.0));
    const auto d = analytics::d_constant(crit, 1.0, rng::make_stream(1), 10000);
    check("d_constant_critical", d.value == 1.0 && d.std_error == 0.0, d.value,
          1);
  }
  {
    analytics::SlowVariationProfile fin;
    fin.kind = analytics::SlowVariationProfile::Kind::Finite;
    fin.m = std::log(2.0);
    check("g_a_finite",
          std::fabs(analytics::g_A(fin, std::exp(10.0)) - 10.0 / std::log(2.0)) <
              1e-9,
          analytics::g_A(fin, std::exp(10.0)), 10.0 / std::log(2.0));
    analytics::SlowVariationProfile rv;
    rv.kind = analytics::SlowVariationProfile::Kind::RegVar;
    rv.rho = 0.0;
    rv.ell = [](double) { return 1.0; };
    check("g_a_regvar_rho0",
          std::fabs(analytics::g_A(rv, std::exp(2.0)) - 2.0) < 1e-9,
          analytics::g_A(rv, std::exp(2.0)), 2);
  }
  {
    const auto stp = slowvary::PositiveLawY::st_petersburg();
    check("stp_truncated_mean", slowvary::truncated_mean(stp, 8.0) == 3.0,
          slowvary::truncated_mean(stp, 8.0), 3);
    const auto par = slowvary::PositiveLawY::pareto_one();
    check("pareto_truncated_mean",
          std::fabs(slowvary::truncated_mean(par, std::exp(10.0)) - 10.0) <
              1e-9,
          slowvary::truncated_mean(par, std::exp(10.0)), 10);
    check("pareto_tail_ratio",
          std::fabs(slowvary::tail_ratio(par, std::exp(10.0)) - 0.1) < 1e-9,
          slowvary::tail_ratio(par, std::exp(10.0)), 0.1);
    const auto five = slowvary::PositiveLawY::constant(5.0);
    check("bounded_truncated_mean", slowvary::truncated_mean(five, 10.0) == 5.0,
          slowvary::truncated_mean(five, 10.0), 5);
    check("bounded_tail", slowvary::tail_prob(five, 10.0) == 0.0,
          slowvary::tail_prob(five, 10.0), 0);
    const auto br = slowvary::bruin_bn([](double) { return 1.0; }, 1e6,
                                       slowvary::BruinMode::FixedPoint);
    check("bruin_const", std::fabs(br.b - 1e6) < 1e-3, br.b, 1e6);
    std::vector<double> g = {1e2, 1e3, 1e4, 1e5, 1e6};
    const auto tr = slowvary::probe_condition([](double) { return 1.0; },
                                              slowvary::RatioCondition::TwoA,
                                              g);
    check("probe_const_converges",
          tr.verdict == slowvary::TrendReport::Verdict::ConvergesTo1, 1, 1);
  }
  {
    check("normal_cdf_center", std::fabs(stats::normal_cdf(0.0) - 0.5) < 1e-12,
          stats::normal_cdf(0.0), 0.5);
    check("median_type7", stats::median({1.0, 2.0, 3.0, 4.0}) == 2.5,
          stats::median({1.0, 2.0, 3.0, 4.0}), 2.5);
    stats::Digest d1, d2;
    d1.add(3.14);
    d1.add(uint64_t{7});
    d2.add(3.14);
    d2.add(uint64_t{7});
    check("digest_stable", d1.hex() == d2.hex(), 1, 1);
    const auto mom = laws::expect_noise(laws::three_atom_noise(),
                                        [](double z) { return z * z; });
    check("three_atom_unit_variance", std::fabs(mom.value - 1.0) < 1e-12,
          mom.value, 1);
  }

  rep.manifest.reps = 0;
  rep.manifest.threads = 1;
  rep.manifest.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  rep.finalize_digest();
  return emit(rep, "selftest", json::object(), o);
}

// ----------------------------------------------------------------- main

int run(int argc, char** argv) {
  CLI::App app{"srelab: perpetuity / SRE / critical-GARCH verification lab"};
  app.require_subcommand(1);

  CommonOpts o_constants, o_simulate, o_perpetuity, o_trunc, o_wlln, o_clt,
      o_fclt, o_cov, o_slow, o_self;

  std::string constants_law, constants_format = "csv";
  auto* c_constants =
      app.add_subcommand("constants", "analytic constants for a law");
  c_constants->add_option("--law", constants_law, "law JSON file")->required();
  c_constants->add_option("--format", constants_format, "csv or json");
  add_common(c_constants, o_constants);

  SimulateOpts so;
  auto* c_simulate = app.add_subcommand("simulate", "forward paths");
  c_simulate->add_option("--law", so.law_file, "law JSON file")->required();
  c_simulate->add_option("--n", so.n, "steps per path")->required();
  c_simulate->add_option("--kappa", so.kappa, "moment exponent");
  c_simulate->add_option("--u0", so.u0, "stationary | zero | fixed");
  c_simulate->add_option("--u0-value", so.u0_value, "value for --u0 fixed");
  c_simulate->add_option("--record", so.record, "sums | path");
  add_common(c_simulate, o_simulate);

  PerpetuityOpts po;
  auto* c_perp = app.add_subcommand("perpetuity", "stationary draws");
  c_perp->add_option("--law", po.law_file, "law JSON file")->required();
  c_perp->add_option("--tol", po.tol, "running-product stop tolerance");
  c_perp->add_option("--max-depth", po.max_depth, "depth cap");
  c_perp->add_flag("--gof-exact", po.gof_exact,
                   "chi-square fit against the exact discrete stationary law");
  add_common(c_perp, o_perpetuity);

  std::string trunc_cfg, wlln_cfg, clt_cfg, fclt_cfg, cov_cfg;
  auto* c_trunc =
      app.add_subcommand("truncmoment", "truncated-moment asymptotics");
  c_trunc->add_option("--config", trunc_cfg, "experiment JSON")->required();
  add_common(c_trunc, o_trunc);
  auto* c_wlln = app.add_subcommand("wlln", "weak law of large numbers");
  c_wlln->add_option("--config", wlln_cfg, "experiment JSON")->required();
  add_common(c_wlln, o_wlln);
  auto* c_clt = app.add_subcommand("clt", "central limit theorem");
  c_clt->add_option("--config", clt_cfg, "experiment JSON")->required();
  add_common(c_clt, o_clt);
  auto* c_fclt = app.add_subcommand("fclt", "functional CLT");
  c_fclt->add_option("--config", fclt_cfg, "experiment JSON")->required();
  add_common(c_fclt, o_fclt);
  auto* c_cov = app.add_subcommand("covprobe", "covariance decay probe");
  c_cov->add_option("--config", cov_cfg, "experiment JSON")->required();
  add_common(c_cov, o_cov);

  SlowvaryOpts svo;
  auto* c_slow = app.add_subcommand("slowvary", "slow-variation probes");
  c_slow->add_option("--ell", svo.ell, "const | log | ap4:beta | table:file");
  c_slow->add_option("--probe", svo.probe, "2a | 2b | ap5");
  c_slow->add_option("--law", svo.law,
                     "ap5 law: pareto_one | st_petersburg | constant:v | "
                     "sampled:file");
  c_slow->add_option("--grid-from", svo.grid_from, "first grid point");
  c_slow->add_option("--grid-to", svo.grid_to, "last grid point");
  c_slow->add_option("--grid-points", svo.grid_points, "grid size");
  c_slow->add_option("--tol", svo.tol, "trend tolerance around 1");
  c_slow->add_option("--window", svo.window, "trailing points for the verdict");
  c_slow->add_option("--expect", svo.expect, "converge | diverge | none");
  add_common(c_slow, o_slow);

  auto* c_self = app.add_subcommand("selftest", "fast exact checks");
  add_common(c_self, o_self);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (c_constants->parsed())
      return cmd_constants(constants_law, constants_format, o_constants);
    if (c_simulate->parsed()) return cmd_simulate(so, o_simulate);
    if (c_perp->parsed()) return cmd_perpetuity(po, o_perpetuity);
    if (c_trunc->parsed()) return cmd_truncmoment(trunc_cfg, o_trunc);
    if (c_wlln->parsed()) return cmd_wlln(wlln_cfg, o_wlln);
    if (c_clt->parsed()) return cmd_clt(clt_cfg, o_clt);
    if (c_fclt->parsed()) return cmd_fclt(fclt_cfg, o_fclt);
    if (c_cov->parsed()) return cmd_covprobe(cov_cfg, o_cov);
    if (c_slow->parsed()) return cmd_slowvary(svo, o_slow);
    if (c_self->parsed()) return cmd_selftest(o_self);
  } catch (const srelab::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}

}  // namespace

int main(int argc, char** argv) { return run(argc, argv); }
