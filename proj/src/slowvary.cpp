#include "srelab/slowvary.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <sstream>

#include "srelab/error.hpp"

namespace srelab::slowvary {

PositiveLawY PositiveLawY::pareto_one() {
  PositiveLawY y;
  y.kind = Kind::ParetoOne;
  y.label = "pareto_one";
  return y;
}

PositiveLawY PositiveLawY::st_petersburg() {
  PositiveLawY y;
  y.kind = Kind::StPetersburg;
  y.label = "st_petersburg";
  return y;
}

PositiveLawY PositiveLawY::constant(double value) {
  if (!(value >= 0.0)) throw ConfigError("constant law: value must be >= 0");
  PositiveLawY y;
  y.kind = Kind::Constant;
  y.c = value;
  y.label = "constant";
  return y;
}

PositiveLawY PositiveLawY::sampled(std::vector<double> values,
                                   std::string label) {
  if (values.empty()) throw ConfigError("sampled law: empty sample");
  for (double v : values)
    if (!(v >= 0.0) || !std::isfinite(v))
      throw ConfigError("sampled law: values must be finite and >= 0");
  std::sort(values.begin(), values.end());
  PositiveLawY y;
  y.kind = Kind::Sampled;
  y.values = std::move(values);
  y.label = std::move(label);
  return y;
}

PositiveLawY PositiveLawY::analytic(std::function<double(double)> ell,
                                    std::string label) {
  PositiveLawY y;
  y.kind = Kind::Analytic;
  y.ell = std::move(ell);
  y.label = std::move(label);
  return y;
}

double sample_y(const PositiveLawY& law, rng::Stream& stream) {
  switch (law.kind) {
    case PositiveLawY::Kind::ParetoOne:
      return 1.0 / stream.uniform();
    case PositiveLawY::Kind::StPetersburg: {
      // T = 1 + leading-zero count of a raw word: P(T = m) = 2^{-m}.
      int t = 0;
      for (;;) {
        const uint64_t u = stream.next_u64();
        if (u != 0) {
          t += std::countl_zero(u) + 1;
          break;
        }
        t += 64;
      }
      return std::ldexp(1.0, t);
    }
    case PositiveLawY::Kind::Constant:
      return law.c;
    case PositiveLawY::Kind::Sampled: {
      const size_t i = static_cast<size_t>(stream.uniform() * law.values.size());
      return law.values[std::min(i, law.values.size() - 1)];
    }
    case PositiveLawY::Kind::Analytic:
      throw DomainError("analytic law cannot be sampled");
  }
  throw DomainError("sample_y: bad variant");
}

namespace {

// floor(log2 x) for x > 0, exact on dyadic inputs.
int floor_log2(double x) { return std::ilogb(x); }

}  // namespace

double truncated_mean(const PositiveLawY& law, double x) {
  if (!(x > 0.0)) throw DomainError("truncated_mean: x must be > 0");
  switch (law.kind) {
    case PositiveLawY::Kind::ParetoOne:
      return x < 1.0 ? 0.0 : std::log(x);
    case PositiveLawY::Kind::StPetersburg:
      // atoms 2^m each contribute 2^m 2^{-m} = 1 while 2^m <= x
      return x < 2.0 ? 0.0 : static_cast<double>(floor_log2(x));
    case PositiveLawY::Kind::Constant:
      return law.c <= x ? law.c : 0.0;
    case PositiveLawY::Kind::Sampled: {
      double s = 0.0;
      for (double v : law.values) {
        if (v > x) break;
        s += v;
      }
      return s / static_cast<double>(law.values.size());
    }
    case PositiveLawY::Kind::Analytic:
      return law.ell(x);
  }
  throw DomainError("truncated_mean: bad variant");
}

double tail_prob(const PositiveLawY& law, double x) {
  switch (law.kind) {
    case PositiveLawY::Kind::ParetoOne:
      return x < 1.0 ? 1.0 : 1.0 / x;
    case PositiveLawY::Kind::StPetersburg:
      return x < 2.0 ? 1.0 : std::ldexp(1.0, -floor_log2(x));
    case PositiveLawY::Kind::Constant:
      return law.c > x ? 1.0 : 0.0;
    case PositiveLawY::Kind::Sampled: {
      const auto it =
          std::upper_bound(law.values.begin(), law.values.end(), x);
      return static_cast<double>(law.values.end() - it) /
             static_cast<double>(law.values.size());
    }
    case PositiveLawY::Kind::Analytic:
      throw DomainError("analytic law has no tail information");
  }
  throw DomainError("tail_prob: bad variant");
}

double tail_ratio(const PositiveLawY& law, double x) {
  const double ell = truncated_mean(law, x);
  if (!(ell > 0.0)) throw DomainError("tail_ratio: truncated mean is 0");
  return x * tail_prob(law, x) / ell;
}

double ell1(const PositiveLawY& law, double x) {
  if (!(x > 0.0)) throw DomainError("ell1: x must be > 0");
  switch (law.kind) {
    case PositiveLawY::Kind::ParetoOne:
      return x < 1.0 ? x : std::log(x) + 1.0;
    case PositiveLawY::Kind::StPetersburg: {
      if (x < 2.0) return x;
      const int m = floor_log2(x);
      return static_cast<double>(m) + x * std::ldexp(1.0, -m);
    }
    case PositiveLawY::Kind::Constant:
      return std::min(law.c, x);
    case PositiveLawY::Kind::Sampled: {
      double s = 0.0;
      for (double v : law.values) s += std::min(v, x);
      return s / static_cast<double>(law.values.size());
    }
    case PositiveLawY::Kind::Analytic:
      throw DomainError("analytic law has no tail information");
  }
  throw DomainError("ell1: bad variant");
}

BruinResult bruin_bn(const std::function<double(double)>& ell, double n,
                     BruinMode mode) {
  if (!(n >= 2.0)) throw DomainError("bruin_bn: n must be >= 2");
  const double elln = ell(n);
  if (!(elln > 0.0) || !std::isfinite(elln))
    throw DomainError("bruin_bn: ell(n) must be positive finite");

  BruinResult r;
  if (mode == BruinMode::FormulaAp3) {
    r.b = n * elln;
    r.achieved_ratio = n * ell(r.b) / r.b;
    return r;
  }

  double b = n * elln;
  double prev_delta = 0.0;
  std::vector<double> trail;
  for (int it = 1; it <= 10000; ++it) {
    const double next = n * ell(b);
    if (!(next > 0.0) || !std::isfinite(next))
      throw NumericError("bruin_bn: iteration left the domain");
    double delta = next - b;
    double b_new = next;
    if (delta * prev_delta < 0.0) b_new = b + 0.5 * delta;  // damp oscillation
    prev_delta = delta;
    const double rel = std::fabs(b_new - b) / b_new;
    b = b_new;
    trail.push_back(b);
    if (rel < 1e-9) {
      r.b = b;
      r.achieved_ratio = n * ell(b) / b;
      r.iterations = it;
      return r;
    }
  }
  std::ostringstream os;
  os << "bruin_bn: no convergence in 10000 iterations; last iterates:";
  for (size_t i = trail.size() >= 5 ? trail.size() - 5 : 0; i < trail.size();
       ++i)
    os << " " << trail[i];
  throw NumericError(os.str());
}

double AnSchedule::operator()(double n) const {
  if (!(n > 1.0)) throw DomainError("a_n schedule needs n > 1");
  return std::pow(std::log(n), -exponent);
}

AnSchedule pick_an(const PositiveLawY& law,
                   const std::function<double(double)>& b) {
  static const double kProbeN[] = {1e3, 1e6, 1e9};
  AnSchedule sched;
  for (int round = 0; round < 7; ++round) {
    double v[3];
    for (int i = 0; i < 3; ++i) {
      const double n = kProbeN[i];
      const double a = sched(n);
      v[i] = n * tail_prob(law, a * b(n));
      sched.probes.push_back({sched.exponent, n, a, v[i]});
    }
    const bool nondecreasing = v[1] >= v[0] && v[2] >= v[1];
    if (!(nondecreasing && v[2] > 0.0)) return sched;
    sched.exponent *= 0.5;
  }
  std::ostringstream os;
  os << "pick_an: no admissible schedule; probe table (exponent, n, a_n, "
        "n P(Y > a_n b_n)):";
  for (const auto& p : sched.probes)
    os << "\n  " << p.exponent << "  " << p.n << "  " << p.a_n << "  "
       << p.value;
  throw NumericError(os.str());
}

TrendReport probe_condition(const std::function<double(double)>& ell,
                            RatioCondition which,
                            const std::vector<double>& x_grid,
                            double tol, int window) {
  if (x_grid.size() < static_cast<size_t>(window) || window < 2)
    throw DomainError("probe_condition: grid shorter than the verdict window");
  for (size_t i = 1; i < x_grid.size(); ++i)
    if (!(x_grid[i] > x_grid[i - 1]))
      throw DomainError("probe_condition: grid must be increasing");
  if (!(x_grid.front() >= 2.0))
    throw DomainError("probe_condition: grid must start at x >= 2");
  if (!(x_grid.back() >= 1000.0 * x_grid.front()))
    throw DomainError("probe_condition: grid must span at least 3 decades");

  TrendReport rep;
  rep.x = x_grid;
  for (double x : x_grid) {
    const double base = ell(x);
    if (!(base > 0.0)) throw DomainError("probe_condition: ell not positive");
    const double arg =
        which == RatioCondition::TwoA ? x * base : x / std::log(x);
    rep.ratio.push_back(ell(arg) / base);
  }

  const size_t k = rep.ratio.size();
  const size_t w = static_cast<size_t>(window);
  bool all_near = true;
  for (size_t i = k - w; i < k; ++i)
    if (std::fabs(rep.ratio[i] - 1.0) > tol) all_near = false;
  if (all_near) {
    rep.verdict = TrendReport::Verdict::ConvergesTo1;
    return rep;
  }
  // Logarithmic convergence can stay outside tol on any floating-point grid;
  // a monotone approach that at least halves the distance still counts.
  bool approaching = true;
  for (size_t i = 1; i < k; ++i)
    if (std::fabs(rep.ratio[i] - 1.0) >= std::fabs(rep.ratio[i - 1] - 1.0))
      approaching = false;
  if (approaching &&
      std::fabs(rep.ratio[k - 1] - 1.0) <=
          0.5 * std::fabs(rep.ratio[0] - 1.0)) {
    rep.verdict = TrendReport::Verdict::ConvergesTo1;
    return rep;
  }
  bool moving_away = std::fabs(rep.ratio[k - 1] - 1.0) > tol;
  for (size_t i = k - w + 1; i < k; ++i)
    if (std::fabs(rep.ratio[i] - 1.0) <= std::fabs(rep.ratio[i - 1] - 1.0))
      moving_away = false;
  rep.verdict = moving_away ? TrendReport::Verdict::Diverges
                            : TrendReport::Verdict::Inconclusive;
  return rep;
}

const char* to_string(TrendReport::Verdict v) {
  switch (v) {
    case TrendReport::Verdict::ConvergesTo1:
      return "converges_to_1";
    case TrendReport::Verdict::Diverges:
      return "diverges";
    case TrendReport::Verdict::Inconclusive:
      return "inconclusive";
  }
  return "?";
}

}  // namespace srelab::slowvary
