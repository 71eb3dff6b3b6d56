#include "srelab/laws.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

#include "srelab/error.hpp"
#include "srelab/quadrature.hpp"

namespace srelab::laws {

namespace {

constexpr double kProbTol = 1e-12;
constexpr double kMomentTol = 1e-8;

double normal_pdf(double z) {
  return std::exp(-0.5 * z * z) * 0.3989422804014327;
}

// Density of the unit-variance scaled t: Z = sqrt((df-2)/df) * T_df.
double student_t_normalized_pdf(double z, double df) {
  const double s = std::sqrt((df - 2.0) / df);
  const double t = z / s;
  const double log_norm = std::lgamma(0.5 * (df + 1.0)) -
                          std::lgamma(0.5 * df) -
                          0.5 * std::log(df * M_PI);
  return std::exp(log_norm - 0.5 * (df + 1.0) * std::log1p(t * t / df)) / s;
}

// Marsaglia-Tsang; valid for shape >= 1, which covers df/2 with df > 2.
double gamma_sample(double shape, rng::Stream& stream) {
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = stream.normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = stream.uniform();
    if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
    if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
  }
}

void validate_discrete_points(const std::vector<DiscretePoint>& pts) {
  if (pts.empty()) throw ConfigError("discrete noise: no atoms");
  double psum = 0.0, m1 = 0.0, m2 = 0.0;
  for (const auto& pt : pts) {
    if (!std::isfinite(pt.value) || !std::isfinite(pt.prob))
      throw ConfigError("discrete noise: non-finite atom");
    if (pt.prob < 0.0) throw ConfigError("discrete noise: negative probability");
    psum += pt.prob;
    m1 += pt.prob * pt.value;
    m2 += pt.prob * pt.value * pt.value;
  }
  if (std::fabs(psum - 1.0) > kProbTol)
    throw ConfigError("discrete noise: probabilities sum to " +
                      std::to_string(psum));
  if (std::fabs(m1) > kMomentTol)
    throw ConfigError("discrete noise: mean " + std::to_string(m1) +
                      " is not 0");
  if (std::fabs(m2 - 1.0) > kMomentTol)
    throw ConfigError("discrete noise: variance " + std::to_string(m2) +
                      " is not 1");
}

}  // namespace

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Pass: return "pass";
    case Verdict::Fail: return "fail";
    case Verdict::Unknown: return "unknown";
    case Verdict::NotApplicable: return "n/a";
  }
  return "?";
}

// =========================================================================
// NoiseLaw
// =========================================================================

NoiseLaw NoiseLaw::standard_normal() {
  NoiseLaw n;
  n.kind = Kind::StandardNormal;
  return n;
}

NoiseLaw NoiseLaw::discrete(std::vector<DiscretePoint> pts) {
  validate_discrete_points(pts);
  NoiseLaw n;
  n.kind = Kind::Discrete;
  n.points = std::move(pts);
  return n;
}

NoiseLaw NoiseLaw::student_t_normalized(double df) {
  if (!(df > 2.0))
    throw ConfigError("student_t_normalized: df must exceed 2, got " +
                      std::to_string(df));
  NoiseLaw n;
  n.kind = Kind::StudentT;
  n.df = df;
  return n;
}

NoiseLaw NoiseLaw::empirical(std::vector<double> values, std::string source) {
  if (values.size() < 2)
    throw ConfigError("empirical noise: need at least two values");
  double m = 0.0;
  for (double v : values) {
    if (!std::isfinite(v)) throw ConfigError("empirical noise: non-finite value");
    m += v;
  }
  m /= static_cast<double>(values.size());
  double s2 = 0.0;
  for (double v : values) s2 += (v - m) * (v - m);
  s2 /= static_cast<double>(values.size());
  if (s2 <= 0.0) throw ConfigError("empirical noise: zero variance");
  const double sd = std::sqrt(s2);
  for (double& v : values) v = (v - m) / sd;
  NoiseLaw n;
  n.kind = Kind::Empirical;
  n.sample = std::move(values);
  n.source = std::move(source);
  return n;
}

NoiseLaw three_atom_noise() {
  const double r = std::sqrt(2.0);
  return NoiseLaw::discrete({{r, 0.25}, {0.0, 0.5}, {-r, 0.25}});
}

double sample_noise(const NoiseLaw& law, rng::Stream& stream) {
  switch (law.kind) {
    case NoiseLaw::Kind::StandardNormal:
      return stream.normal();
    case NoiseLaw::Kind::Discrete: {
      double u = stream.uniform();
      for (const auto& pt : law.points) {
        if (u < pt.prob) return pt.value;
        u -= pt.prob;
      }
      return law.points.back().value;
    }
    case NoiseLaw::Kind::StudentT: {
      const double z = stream.normal();
      const double chi2 = 2.0 * gamma_sample(0.5 * law.df, stream);
      return z * std::sqrt((law.df - 2.0) / chi2);
    }
    case NoiseLaw::Kind::Empirical: {
      const size_t n = law.sample.size();
      size_t i = static_cast<size_t>(stream.uniform() * static_cast<double>(n));
      if (i >= n) i = n - 1;
      return law.sample[i];
    }
  }
  throw NumericError("sample_noise: bad kind");
}

ExpectResult expect_noise(const NoiseLaw& law,
                          const std::function<double(double)>& f) {
  ExpectResult r;
  switch (law.kind) {
    case NoiseLaw::Kind::Discrete: {
      r.method = "enumeration";
      for (const auto& pt : law.points) {
        if (pt.prob == 0.0) continue;
        const double fv = f(pt.value);
        if (std::isnan(fv)) throw NumericError("expect_noise: NaN at atom");
        r.value += pt.prob * fv;
      }
      return r;
    }
    case NoiseLaw::Kind::Empirical: {
      r.method = "sample_mean";
      for (double v : law.sample) r.value += f(v);
      r.value /= static_cast<double>(law.sample.size());
      return r;
    }
    case NoiseLaw::Kind::StandardNormal:
    case NoiseLaw::Kind::StudentT: {
      r.method = "quadrature";
      const NoiseLaw* lawp = &law;
      auto integrand = [lawp, &f](double z) {
        const double pdf = lawp->kind == NoiseLaw::Kind::StandardNormal
                               ? normal_pdf(z)
                               : student_t_normalized_pdf(z, lawp->df);
        return (f(z) + f(-z)) * pdf;
      };
      auto q = quad::integrate_to_inf(integrand, 0.0, 1e-12, 0.5);
      r.value = q.value;
      r.abs_err = q.abs_err;
      r.diverged = q.diverged;
      return r;
    }
  }
  throw NumericError("expect_noise: bad kind");
}

// =========================================================================
// CoefficientLaw factories
// =========================================================================

namespace {

void require_garch_params(double beta, double lambda, double delta) {
  if (!(beta > 0.0))
    throw ConfigError("garch: beta must be positive, got " +
                      std::to_string(beta));
  if (lambda < 0.0 || delta < 0.0)
    throw ConfigError("garch: lambda and delta must be nonnegative");
}

}  // namespace

CoefficientLaw make_garch_critical(double beta, double lambda, NoiseLaw noise) {
  if (!(lambda > 0.0 && lambda <= 1.0))
    throw ConfigError("garch_critical: lambda must lie in (0,1], got " +
                      std::to_string(lambda));
  require_garch_params(beta, lambda, 1.0 - lambda);
  CoefficientLaw law;
  law.kind = CoefficientLaw::Kind::GarchCritical;
  law.beta = beta;
  law.lambda = lambda;
  law.delta = 1.0 - lambda;
  law.noise = std::move(noise);
  return law;
}

CoefficientLaw garch_to_sre(double beta, double lambda, double delta,
                            NoiseLaw noise) {
  require_garch_params(beta, lambda, delta);
  CoefficientLaw law;
  law.kind = CoefficientLaw::Kind::GarchGeneral;
  law.beta = beta;
  law.lambda = lambda;
  law.delta = delta;
  law.noise = std::move(noise);
  return law;
}

CoefficientLaw make_lognormal_A_const_B(double mu, double sigma, double b) {
  if (!(sigma > 0.0)) throw ConfigError("lognormal_A_const_B: sigma must be positive");
  if (!(b > 0.0)) throw ConfigError("lognormal_A_const_B: b must be positive");
  CoefficientLaw law;
  law.kind = CoefficientLaw::Kind::LognormalAConstB;
  law.mu = mu;
  law.sigma = sigma;
  law.b = b;
  return law;
}

CoefficientLaw make_finite_discrete(
    std::vector<CoefficientLaw::AtomAB> atoms) {
  if (atoms.empty()) throw ConfigError("finite_discrete: no atoms");
  double psum = 0.0;
  for (const auto& at : atoms) {
    if (!std::isfinite(at.a) || !std::isfinite(at.b) || !std::isfinite(at.prob))
      throw ConfigError("finite_discrete: non-finite atom");
    if (at.a < 0.0 || at.b < 0.0)
      throw ConfigError("finite_discrete: negative coefficient atom");
    if (at.prob < 0.0) throw ConfigError("finite_discrete: negative probability");
    psum += at.prob;
  }
  if (std::fabs(psum - 1.0) > kProbTol)
    throw ConfigError("finite_discrete: probabilities sum to " +
                      std::to_string(psum));
  CoefficientLaw law;
  law.kind = CoefficientLaw::Kind::FiniteDiscrete;
  law.atoms = std::move(atoms);
  return law;
}

CoefficientLaw build_kevei_law(double alpha, double kappa, double v0, double p,
                               double b) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw ConfigError("kevei: alpha must lie in (0,1), got " +
                      std::to_string(alpha));
  if (!(kappa > 0.0)) throw ConfigError("kevei: kappa must be positive");
  if (!(v0 > 0.0)) throw ConfigError("kevei: v0 must be positive");
  if (!(p > 0.0 && p < 1.0))
    throw ConfigError("kevei: p must lie in (0,1), got " + std::to_string(p));
  if (!(b > 0.0)) throw ConfigError("kevei: b must be positive");

  CoefficientLaw law;
  law.kind = CoefficientLaw::Kind::Kevei;
  law.alpha = alpha;
  law.kappa = kappa;
  law.v0 = v0;
  law.p = p;
  law.b = b;

  auto density_core = [alpha, kappa](double v) {
    return std::pow(v, -alpha - 1.0) * std::exp(-kappa * v);
  };
  auto norm = quad::integrate_to_inf(density_core, v0, 1e-14, 1.0 / kappa);
  if (norm.diverged || !(norm.value > 0.0))
    throw NumericError("kevei: V density normalizer failed");
  law.kevei_c = 1.0 / norm.value;

  // E e^{kappa V}: the exponential factors cancel, leaving a pure power tail.
  law.kevei_mgf = law.kevei_c * std::pow(v0, -alpha) / alpha;
  law.kevei_up_mass = p * law.kevei_mgf;
  if (law.kevei_up_mass >= 1.0)
    throw ConfigError("kevei: p * E e^{kappa V} = " +
                      std::to_string(law.kevei_up_mass) +
                      " >= 1; no down-jump can balance E A^kappa to 1");
  law.kevei_w = -std::log((1.0 - law.kevei_up_mass) / (1.0 - p)) / kappa;
  law.kevei_accept =
      alpha * std::pow(v0, alpha) * std::exp(kappa * v0) / law.kevei_c;
  return law;
}

// =========================================================================
// Sampling
// =========================================================================

double kevei_sample_v(const CoefficientLaw& law, rng::Stream& stream) {
  for (;;) {
    const double v = law.v0 * std::pow(stream.uniform(), -1.0 / law.alpha);
    if (stream.uniform() < std::exp(-law.kappa * (v - law.v0))) return v;
  }
}

CoeffDraw sample_coeff(const CoefficientLaw& law, rng::Stream& stream) {
  switch (law.kind) {
    case CoefficientLaw::Kind::GarchCritical:
    case CoefficientLaw::Kind::GarchGeneral: {
      const double z = sample_noise(law.noise, stream);
      return {law.lambda * z * z + law.delta, law.beta};
    }
    case CoefficientLaw::Kind::LognormalAConstB:
      return {std::exp(law.mu + law.sigma * stream.normal()), law.b};
    case CoefficientLaw::Kind::FiniteDiscrete: {
      double u = stream.uniform();
      for (const auto& at : law.atoms) {
        if (u < at.prob) return {at.a, at.b};
        u -= at.prob;
      }
      return {law.atoms.back().a, law.atoms.back().b};
    }
    case CoefficientLaw::Kind::Kevei: {
      if (stream.uniform() < law.p)
        return {std::exp(kevei_sample_v(law, stream)), law.b};
      return {std::exp(-law.kevei_w), law.b};
    }
  }
  throw NumericError("sample_coeff: bad kind");
}

// =========================================================================
// Expectations
// =========================================================================

ExpectResult expect_A(const CoefficientLaw& law,
                      const std::function<double(double)>& f) {
  switch (law.kind) {
    case CoefficientLaw::Kind::GarchCritical:
    case CoefficientLaw::Kind::GarchGeneral: {
      const double lam = law.lambda, del = law.delta;
      return expect_noise(law.noise,
                          [lam, del, &f](double z) { return f(lam * z * z + del); });
    }
    case CoefficientLaw::Kind::LognormalAConstB: {
      ExpectResult r;
      r.method = "quadrature";
      const double mu = law.mu, sg = law.sigma;
      auto integrand = [mu, sg, &f](double u) {
        return (f(std::exp(mu + sg * u)) + f(std::exp(mu - sg * u))) *
               normal_pdf(u);
      };
      auto q = quad::integrate_to_inf(integrand, 0.0, 1e-12, 0.5);
      r.value = q.value;
      r.abs_err = q.abs_err;
      r.diverged = q.diverged;
      return r;
    }
    case CoefficientLaw::Kind::FiniteDiscrete: {
      ExpectResult r;
      r.method = "enumeration";
      for (const auto& at : law.atoms) {
        if (at.prob == 0.0) continue;
        const double fv = f(at.a);
        if (std::isnan(fv)) throw NumericError("expect_A: NaN at atom");
        r.value += at.prob * fv;
      }
      return r;
    }
    case CoefficientLaw::Kind::Kevei: {
      ExpectResult r;
      r.method = "quadrature";
      r.value = (1.0 - law.p) * f(std::exp(-law.kevei_w));
      const double c = law.kevei_c, al = law.alpha, ka = law.kappa;
      auto integrand = [c, al, ka, &f](double v) {
        return f(std::exp(v)) * std::pow(v, -al - 1.0) * std::exp(-ka * v);
      };
      auto q = quad::integrate_to_inf(integrand, law.v0, 1e-12, 1.0 / ka);
      r.value += law.p * c * q.value;
      r.abs_err = c * q.abs_err;
      r.diverged = q.diverged;
      return r;
    }
  }
  throw NumericError("expect_A: bad kind");
}

double expect_B_pow(const CoefficientLaw& law, double pow_) {
  switch (law.kind) {
    case CoefficientLaw::Kind::GarchCritical:
    case CoefficientLaw::Kind::GarchGeneral:
      return std::pow(law.beta, pow_);
    case CoefficientLaw::Kind::LognormalAConstB:
    case CoefficientLaw::Kind::Kevei:
      return std::pow(law.b, pow_);
    case CoefficientLaw::Kind::FiniteDiscrete: {
      double s = 0.0;
      for (const auto& at : law.atoms)
        if (at.prob > 0.0 && at.b > 0.0) s += at.prob * std::pow(at.b, pow_);
      return s;
    }
  }
  throw NumericError("expect_B_pow: bad kind");
}

std::optional<std::vector<DiscretePoint>> finite_A_atoms(
    const CoefficientLaw& law) {
  std::map<double, double> acc;
  switch (law.kind) {
    case CoefficientLaw::Kind::FiniteDiscrete:
      for (const auto& at : law.atoms) acc[at.a] += at.prob;
      break;
    case CoefficientLaw::Kind::GarchCritical:
    case CoefficientLaw::Kind::GarchGeneral: {
      if (law.noise.kind == NoiseLaw::Kind::Discrete) {
        for (const auto& pt : law.noise.points)
          acc[law.lambda * pt.value * pt.value + law.delta] += pt.prob;
      } else if (law.noise.kind == NoiseLaw::Kind::Empirical) {
        const double w = 1.0 / static_cast<double>(law.noise.sample.size());
        for (double z : law.noise.sample)
          acc[law.lambda * z * z + law.delta] += w;
      } else {
        return std::nullopt;
      }
      break;
    }
    default:
      return std::nullopt;
  }
  std::vector<DiscretePoint> out;
  out.reserve(acc.size());
  for (const auto& [a, p] : acc)
    if (p > 0.0) out.push_back({a, p});
  return out;
}

}  // namespace srelab::laws
