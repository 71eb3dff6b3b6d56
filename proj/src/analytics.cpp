#include "srelab/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "srelab/error.hpp"
#include "srelab/quadrature.hpp"
#include "srelab/sre.hpp"

namespace srelab::analytics {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double pow_pos(double a, double p) { return a > 0.0 ? std::pow(a, p) : 0.0; }

}  // namespace

double psi(const laws::CoefficientLaw& law, double p, std::string* method) {
  if (!(p >= 0.0)) throw DomainError("psi: p must be nonnegative");
  if (law.kind == laws::CoefficientLaw::Kind::LognormalAConstB) {
    if (method) *method = "closed_form";
    return std::exp(p * law.mu + 0.5 * p * p * law.sigma * law.sigma);
  }
  if (law.kind == laws::CoefficientLaw::Kind::Kevei) {
    if (p > law.kappa) {
      // e^{(p-kappa)v} v^{-alpha-1} grows without bound.
      if (method) *method = "closed_form";
      return kInf;
    }
    const double down = (1.0 - law.p) * std::exp(-p * law.kevei_w);
    if (p == law.kappa) {
      if (method) *method = "closed_form";
      return down + law.p * law.kevei_mgf;
    }
    // Combine the tilt with the density before exponentiating; A^p on its
    // own overflows long before the product e^{(p-kappa)v} decays.
    if (method) *method = "quadrature";
    const double al = law.alpha, gap = p - law.kappa;
    auto integrand = [al, gap](double v) {
      return std::pow(v, -al - 1.0) * std::exp(gap * v);
    };
    auto q = quad::integrate_to_inf(integrand, law.v0, 1e-12, 1.0);
    return down + law.p * law.kevei_c * q.value;
  }
  auto r = laws::expect_A(law, [p](double a) { return pow_pos(a, p); });
  if (method) *method = r.method;
  if (r.diverged) return kInf;
  return r.value;
}

double solve_kappa(const laws::CoefficientLaw& law, double rel_tol) {
  if (law.kind == laws::CoefficientLaw::Kind::GarchCritical) return 1.0;
  // The Kevei family is built so that E A^kappa = 1 at its design exponent,
  // where psi has an infinite left derivative; return the parameter directly.
  if (law.kind == laws::CoefficientLaw::Kind::Kevei) return law.kappa;

  auto f = [&law](double p) { return psi(law, p) - 1.0; };

  // Bracket the root starting from p = 1.
  double lo, hi, flo, fhi;
  const double f1 = f(1.0);
  if (std::fabs(f1) < 1e-14) return 1.0;
  if (f1 < 0.0) {
    lo = 1.0;
    flo = f1;
    hi = 2.0;
    for (int k = 0;; ++k) {
      fhi = f(hi);
      if (fhi >= 0.0) break;
      if (k >= 40)
        throw NoRootError(
            "solve_kappa: E A^p stays below 1 while doubling p (no upper "
            "bracket; is A <= 1 a.s.?)",
            "upper");
      lo = hi;
      flo = fhi;
      hi *= 2.0;
    }
  } else {
    hi = 1.0;
    fhi = f1;
    lo = 0.5;
    for (int k = 0;; ++k) {
      flo = f(lo);
      if (flo < 0.0) break;
      if (k >= 60)
        throw NoRootError(
            "solve_kappa: E A^p stays at or above 1 while halving p (no "
            "lower bracket; is E ln A >= 0?)",
            "lower");
      hi = lo;
      fhi = flo;
      lo *= 0.5;
    }
  }

  // Bisection with a secant step whenever it stays inside the bracket.
  for (int it = 0; it < 400 && (hi - lo) > rel_tol * hi; ++it) {
    double mid = 0.5 * (lo + hi);
    if (std::isfinite(fhi) && std::isfinite(flo) && fhi != flo) {
      const double sec = lo - flo * (hi - lo) / (fhi - flo);
      if (sec > lo && sec < hi) mid = sec;
    }
    const double fm = f(mid);
    if (fm < 0.0) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
      fhi = fm;
    }
  }
  return 0.5 * (lo + hi);
}

TiltedLogMoment tilted_log_moment(const laws::CoefficientLaw& law,
                                  double kappa) {
  if (!(kappa > 0.0)) throw DomainError("tilted_log_moment: kappa <= 0");
  TiltedLogMoment out;

  if (law.kind == laws::CoefficientLaw::Kind::Kevei) {
    // Up jump: E A^kappa ln^+ A = p c \int_{v0} v^{-alpha} dv, divergent for
    // alpha < 1; down jump gives the finite negative part.
    if (std::fabs(kappa - law.kappa) < 1e-12) {
      out.pos_infinite = true;
      out.pos_part = kInf;
      out.neg_part = (1.0 - law.p) *
                     std::exp(-kappa * law.kevei_w) * law.kevei_w;
      out.value = kInf;
      return out;
    }
  }

  auto pos = laws::expect_A(law, [kappa](double a) {
    return a > 1.0 ? std::pow(a, kappa) * std::log(a) : 0.0;
  });
  auto neg = laws::expect_A(law, [kappa](double a) {
    return (a > 0.0 && a < 1.0) ? -std::pow(a, kappa) * std::log(a) : 0.0;
  });
  if (neg.diverged)
    throw NumericError("tilted_log_moment: negative part diverged");
  out.pos_part = pos.diverged ? kInf : pos.value;
  out.pos_infinite = pos.diverged;
  out.neg_part = neg.value;
  out.value = out.pos_infinite ? kInf : out.pos_part - out.neg_part;
  return out;
}

double h_A(const laws::CoefficientLaw& law, double kappa, double x) {
  if (!(x >= 0.0)) throw DomainError("h_A: x must be nonnegative");
  if (!(kappa > 0.0)) throw DomainError("h_A: kappa <= 0");
  if (law.kind == laws::CoefficientLaw::Kind::Kevei &&
      std::fabs(kappa - law.kappa) < 1e-12) {
    // Exponential factors cancel against the tilt; pure power integrals.
    const double p = law.p, c = law.kevei_c, al = law.alpha, v0 = law.v0;
    if (x <= v0) return p * law.kevei_mgf * x;
    const double body =
        c * (std::pow(x, 1.0 - al) - std::pow(v0, 1.0 - al)) / (1.0 - al);
    const double tail = c * std::pow(x, -al) / al * x;
    return p * (body + tail);
  }
  auto r = laws::expect_A(law, [kappa, x](double a) {
    if (a <= 1.0) return 0.0;
    return std::pow(a, kappa) * std::min(std::log(a), x);
  });
  if (r.diverged) throw NumericError("h_A: integral diverged");
  return r.value;
}

double bar_H_A(const laws::CoefficientLaw& law, double kappa, double x) {
  if (!(kappa > 0.0)) throw DomainError("bar_H_A: kappa <= 0");
  if (law.kind == laws::CoefficientLaw::Kind::Kevei &&
      std::fabs(kappa - law.kappa) < 1e-12) {
    if (x < -law.kevei_w) return 1.0;  // whole tilted mass sits above x
    if (x < law.v0) return law.kevei_up_mass;  // only the up jump remains
    return law.p * law.kevei_c * std::pow(x, -law.alpha) / law.alpha;
  }
  auto r = laws::expect_A(law, [kappa, x](double a) {
    return (a > 0.0 && std::log(a) > x) ? std::pow(a, kappa) : 0.0;
  });
  if (r.diverged) throw NumericError("bar_H_A: integral diverged");
  return r.value;
}

SlowVariationProfile fit_profile(const laws::CoefficientLaw& law, double kappa,
                                 const std::vector<double>& x_grid) {
  SlowVariationProfile prof;
  TiltedLogMoment tlm = tilted_log_moment(law, kappa);
  if (!tlm.pos_infinite) {
    if (!(tlm.value > 0.0))
      throw NumericError("fit_profile: E A^kappa ln A not positive");
    prof.kind = SlowVariationProfile::Kind::Finite;
    prof.m = tlm.value;
    return prof;
  }

  if (x_grid.size() < 4)
    throw DomainError("fit_profile: need at least 4 grid points");
  for (size_t i = 1; i < x_grid.size(); ++i)
    if (!(x_grid[i] > x_grid[i - 1] && x_grid[i - 1] > 0.0))
      throw DomainError("fit_profile: grid must be positive increasing");
  if (x_grid.back() < 100.0 * x_grid.front())
    throw DomainError("fit_profile: grid must span at least two decades");

  const size_t lo = x_grid.size() / 2;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double npts = static_cast<double>(x_grid.size() - lo);
  for (size_t i = lo; i < x_grid.size(); ++i) {
    const double lx = std::log(x_grid[i]);
    const double ly = std::log(h_A(law, kappa, x_grid[i]));
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  double slope = (npts * sxy - sx * sy) / (npts * sxx - sx * sx);
  slope = std::clamp(slope, 0.0, 1.0 - 1e-9);

  prof.kind = SlowVariationProfile::Kind::RegVar;
  prof.rho = slope;
  const double rho = slope;
  laws::CoefficientLaw law_copy = law;
  prof.ell = [law_copy, kappa, rho](double x) {
    return h_A(law_copy, kappa, x) / std::pow(x, rho);
  };
  return prof;
}

double g_A(const SlowVariationProfile& profile, double t) {
  if (!(t > 1.0)) throw DomainError("g_A: t must exceed 1");
  const double x = std::log(t);
  if (profile.kind == SlowVariationProfile::Kind::Finite)
    return x / profile.m;
  const double rho = profile.rho;
  if (rho < 1e-12) return x / profile.ell(x);
  const double front = std::sin(M_PI * rho) / (M_PI * rho * (1.0 - rho));
  return front * std::pow(x, 1.0 - rho) / profile.ell(x);
}

Estimate d_constant(const laws::CoefficientLaw& law, double kappa,
                    rng::Stream stream, uint64_t reps) {
  if (!(kappa > 0.0)) throw DomainError("d_constant: kappa <= 0");
  if (std::fabs(kappa - 1.0) <= 1e-9) {
    // E[(AU+B) - AU] = E B by linearity.
    Estimate e;
    e.value = laws::expect_B_pow(law, 1.0);
    e.std_error = 0.0;
    e.reps = 0;
    return e;
  }
  if (reps == 0) throw DomainError("d_constant: reps == 0");
  double s1 = 0.0, s2 = 0.0;
  for (uint64_t r = 0; r < reps; ++r) {
    rng::Stream sub = stream.child(r);
    const double u = sre::perpetuity_sample(sub, law).value;
    const laws::CoeffDraw cd = laws::sample_coeff(law, sub);
    const double au = cd.a * u;
    const double v = std::pow(au + cd.b, kappa) - std::pow(au, kappa);
    s1 += v;
    s2 += v * v;
  }
  const double n = static_cast<double>(reps);
  Estimate e;
  e.value = s1 / n;
  e.std_error = std::sqrt(std::max(0.0, s2 / n - e.value * e.value) / n);
  e.reps = reps;
  return e;
}

KestenConstants kesten_constant(double d_value, double kappa, double m,
                                laws::Verdict nonarithmetic) {
  if (!(m > 0.0) || !std::isfinite(m))
    throw DomainError("kesten_constant: m must be positive finite");
  if (!(kappa > 0.0)) throw DomainError("kesten_constant: kappa <= 0");
  KestenConstants k;
  k.c_prime = d_value / m;
  if (nonarithmetic == laws::Verdict::Pass)
    k.tail_constant = k.c_prime / kappa;
  return k;
}

double c_lambda_z(const laws::NoiseLaw& noise, double lambda) {
  if (!(lambda > 0.0 && lambda <= 1.0))
    throw DomainError("c_lambda_z: lambda must lie in (0,1]");
  if (noise.kind == laws::NoiseLaw::Kind::Discrete) {
    double mass_z2_ne_1 = 0.0;
    for (const auto& pt : noise.points)
      if (std::fabs(pt.value * pt.value - 1.0) > 1e-12) mass_z2_ne_1 += pt.prob;
    if (mass_z2_ne_1 <= 0.0)
      throw DomainError("c_lambda_z: Z^2 == 1 a.s.; the CLT scale degenerates");
  }
  auto r = laws::expect_noise(noise, [lambda](double z) {
    const double a = 1.0 + lambda * (z * z - 1.0);
    return a > 0.0 ? a * std::log(a) : 0.0;
  });
  if (r.diverged)
    throw DomainError(
        "c_lambda_z: E A ln^+ A diverges; use the g_A-normalized branch");
  if (!(r.value > 0.0))
    throw NumericError("c_lambda_z: tilted log moment not positive");
  return 1.0 / r.value;
}

// =========================================================================
// Condition report (declared in laws.hpp; needs the kappa solver).
// =========================================================================

namespace {

// Greatest common divisor of real magnitudes, Euclid with tolerance.
double real_gcd(const std::vector<double>& xs, double tol) {
  double g = 0.0;
  for (double x : xs) {
    double a = std::max(g, std::fabs(x)), b = std::min(g, std::fabs(x));
    while (b > tol) {
      const double r = std::fmod(a, b);
      a = b;
      b = r;
    }
    g = a;
  }
  return g;
}

}  // namespace
}  // namespace srelab::analytics

namespace srelab::laws {

ConditionReport check_conditions(const CoefficientLaw& law,
                                 std::optional<double> kappa_hint) {
  ConditionReport rep;
  std::ostringstream notes;

  const auto atoms = finite_A_atoms(law);

  // (3): P(A = 1) < 1
  if (atoms) {
    double mass_one = 0.0;
    for (const auto& pt : *atoms)
      if (std::fabs(pt.value - 1.0) <= 1e-12) mass_one += pt.prob;
    rep.cond3 = mass_one >= 1.0 - 1e-12 ? Verdict::Fail : Verdict::Pass;
    if (rep.cond3 == Verdict::Fail) notes << "A==1 a.s.; ";
  } else {
    rep.cond3 = Verdict::Pass;  // continuous log A component
  }

  // (4): P(B = 0) < 1
  if (law.kind == CoefficientLaw::Kind::FiniteDiscrete) {
    double mass_zero = 0.0;
    for (const auto& at : law.atoms)
      if (at.b <= 0.0) mass_zero += at.prob;
    rep.cond4 = mass_zero >= 1.0 - 1e-12 ? Verdict::Fail : Verdict::Pass;
  } else {
    rep.cond4 = Verdict::Pass;  // beta > 0 / b > 0 enforced at construction
  }

  // kappa
  double kappa = std::nan("");
  if (kappa_hint) {
    kappa = *kappa_hint;
    rep.kappa_exists = Verdict::Pass;
  } else {
    try {
      kappa = analytics::solve_kappa(law);
      rep.kappa_exists = Verdict::Pass;
    } catch (const NoRootError& e) {
      rep.kappa_exists = Verdict::Fail;
      notes << "kappa: " << e.what() << "; ";
    }
  }
  rep.kappa = kappa;

  // (6): E B^kappa finite -- B constant or finitely supported everywhere.
  if (rep.kappa_exists == Verdict::Pass) {
    rep.e_b_kappa = expect_B_pow(law, kappa);
    rep.cond6 = std::isfinite(rep.e_b_kappa) ? Verdict::Pass : Verdict::Fail;
  } else {
    rep.cond6 = Verdict::Unknown;
  }

  // GARCH stationarity: E ln(lambda Z^2 + delta) < 0
  if (law.kind == CoefficientLaw::Kind::GarchCritical ||
      law.kind == CoefficientLaw::Kind::GarchGeneral) {
    const double lam = law.lambda, del = law.delta;
    auto r = expect_noise(law.noise, [lam, del](double z) {
      const double a = lam * z * z + del;
      return a > 0.0 ? std::log(a)
                     : -std::numeric_limits<double>::infinity();
    });
    rep.e_log_a = r.value;
    rep.garch_stationarity = r.value < 0.0 ? Verdict::Pass : Verdict::Fail;
  } else {
    rep.garch_stationarity = Verdict::NotApplicable;
  }

  // Non-arithmetic ln A: decidable only for finite support.
  if (atoms) {
    std::vector<double> logs;
    for (const auto& pt : *atoms)
      if (pt.value > 0.0 && std::fabs(std::log(pt.value)) > 1e-12)
        logs.push_back(std::log(pt.value));
    if (logs.empty()) {
      rep.nonarithmetic_logA = Verdict::Fail;  // support of ln A is {0}
    } else {
      double scale = 0.0;
      for (double x : logs) scale = std::max(scale, std::fabs(x));
      const double tol = 1e-9 * scale;
      const double g = analytics::real_gcd(logs, tol);
      bool lattice = g > tol;
      if (lattice) {
        for (double x : logs) {
          const double q = x / g;
          if (std::fabs(q - std::round(q)) > 1e-6) {
            lattice = false;
            break;
          }
        }
      }
      rep.nonarithmetic_logA = lattice ? Verdict::Fail : Verdict::Pass;
      if (lattice) notes << "ln A lattice span " << g << "; ";
    }
  } else {
    rep.nonarithmetic_logA = Verdict::Unknown;
  }

  rep.notes = notes.str();
  return rep;
}

}  // namespace srelab::laws
