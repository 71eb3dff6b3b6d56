#include "doctest.h"

#include <cmath>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "srelab/error.hpp"
#include "srelab/rng.hpp"
#include "srelab/slowvary.hpp"

using namespace srelab;
namespace sv = srelab::slowvary;
using sv::PositiveLawY;

TEST_CASE("truncated means of the built-in laws") {
  const auto par = PositiveLawY::pareto_one();
  CHECK(sv::truncated_mean(par, std::exp(10.0)) == doctest::Approx(10.0));
  CHECK(sv::truncated_mean(par, 0.5) == 0.0);

  const auto stp = PositiveLawY::st_petersburg();
  CHECK(sv::truncated_mean(stp, 8.0) == doctest::Approx(3.0));
  CHECK(sv::truncated_mean(stp, 7.99) == doctest::Approx(2.0));
  CHECK(sv::truncated_mean(stp, std::pow(2.0, 20)) == doctest::Approx(20.0));
  CHECK(sv::truncated_mean(stp, 1.5) == 0.0);

  const auto c5 = PositiveLawY::constant(5.0);
  CHECK(sv::truncated_mean(c5, 4.0) == 0.0);
  CHECK(sv::truncated_mean(c5, 5.0) == 5.0);

  const auto smp = PositiveLawY::sampled({4.0, 2.0, 1.0, 3.0}, "hand");
  CHECK(sv::truncated_mean(smp, 2.5) == doctest::Approx(0.75));
  CHECK_THROWS_AS(sv::truncated_mean(par, 0.0), DomainError);
}

TEST_CASE("tail probabilities") {
  const auto par = PositiveLawY::pareto_one();
  CHECK(sv::tail_prob(par, 100.0) == doctest::Approx(0.01));
  CHECK(sv::tail_prob(par, 0.5) == doctest::Approx(1.0));

  const auto stp = PositiveLawY::st_petersburg();
  CHECK(sv::tail_prob(stp, 8.0) == doctest::Approx(0.125));
  CHECK(sv::tail_prob(stp, 7.9) == doctest::Approx(0.25));
  CHECK(sv::tail_prob(stp, 1.0) == doctest::Approx(1.0));

  const auto smp = PositiveLawY::sampled({1.0, 2.0, 3.0, 4.0}, "hand");
  CHECK(sv::tail_prob(smp, 2.5) == doctest::Approx(0.5));
  CHECK(sv::tail_prob(smp, 4.0) == doctest::Approx(0.0));
}

TEST_CASE("tail ratio of the pareto law is 1 over ln x") {
  const auto par = PositiveLawY::pareto_one();
  CHECK(sv::tail_ratio(par, std::exp(10.0)) == doctest::Approx(0.1).epsilon(1e-12));
  CHECK_THROWS_AS(sv::tail_ratio(par, 1.0), DomainError);
}

TEST_CASE("tail ratio decays along the grid for slowly varying targets") {
  const auto par = PositiveLawY::pareto_one();
  const double p2 = sv::tail_ratio(par, 1e2);
  const double p4 = sv::tail_ratio(par, 1e4);
  const double p6 = sv::tail_ratio(par, 1e6);
  CHECK(p4 < p2);
  CHECK(p6 < p4);
  CHECK(p6 < 0.5 * p2);

  // The dyadic staircase oscillates between decades, so probe it at powers
  // of two, where x P(Y > x) / ell(x) collapses to exactly 1/k.
  const auto stp = PositiveLawY::st_petersburg();
  for (int k : {7, 14, 20})
    CHECK(sv::tail_ratio(stp, std::ldexp(1.0, k)) ==
          doctest::Approx(1.0 / k).epsilon(1e-12));
}

TEST_CASE("ell1 equals the tail decomposition") {
  const auto par = PositiveLawY::pareto_one();
  for (double x : {2.0, 10.0, 1e4})
    CHECK(sv::ell1(par, x) ==
          doctest::Approx(sv::truncated_mean(par, x) + x * sv::tail_prob(par, x))
              .epsilon(1e-12));
  const auto smp = PositiveLawY::sampled({1.0, 2.0, 3.0, 4.0}, "hand");
  CHECK(sv::ell1(smp, 2.5) == doctest::Approx(2.0));
}

TEST_CASE("ell1 matches a Monte Carlo mean of min(Y, x)") {
  const auto stp = PositiveLawY::st_petersburg();
  rng::Stream s(61);
  const int n = 200000;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) sum += std::min(sv::sample_y(stp, s), 64.0);
  CHECK(sv::ell1(stp, 64.0) == doctest::Approx(7.0));
  CHECK(std::fabs(sum / n - 7.0) < 4.0 * std::sqrt(141.0 / n));
}

TEST_CASE("st petersburg sampler frequencies") {
  const auto stp = PositiveLawY::st_petersburg();
  rng::Stream s(62);
  const int n = 100000;
  int twos = 0;
  for (int i = 0; i < n; ++i) {
    const double y = sv::sample_y(stp, s);
    const double m = std::round(std::log2(y));
    REQUIRE(y == std::pow(2.0, m));
    REQUIRE(m >= 1.0);
    if (y == 2.0) ++twos;
  }
  CHECK(std::fabs(double(twos) / n - 0.5) < 4.0 * 0.5 / std::sqrt(double(n)));
}

TEST_CASE("analytic laws expose only the truncated mean") {
  const auto law = PositiveLawY::analytic([](double x) { return std::log(x); },
                                          "log-law");
  CHECK(sv::truncated_mean(law, std::exp(3.0)) == doctest::Approx(3.0));
  rng::Stream s(1);
  CHECK_THROWS_AS(sv::sample_y(law, s), DomainError);
  CHECK_THROWS_AS(sv::tail_prob(law, 10.0), DomainError);
  CHECK_THROWS_AS(sv::ell1(law, 10.0), DomainError);
}

TEST_CASE("law construction validation") {
  CHECK_THROWS_AS(PositiveLawY::constant(-1.0), ConfigError);
  CHECK_THROWS_AS(PositiveLawY::sampled({}, "empty"), ConfigError);
  CHECK_THROWS_AS(PositiveLawY::sampled({1.0, -2.0}, "neg"), ConfigError);
}

TEST_CASE("bruin sequence for constant ell") {
  auto one = [](double) { return 1.0; };
  const auto r = sv::bruin_bn(one, 1e6, sv::BruinMode::FixedPoint);
  CHECK(r.b == doctest::Approx(1e6));
  CHECK(r.achieved_ratio == doctest::Approx(1.0));
}

TEST_CASE("bruin sequence for logarithmic ell") {
  auto lg = [](double x) { return std::log(x); };
  const auto fp = sv::bruin_bn(lg, 1e6, sv::BruinMode::FixedPoint);
  CHECK(fp.b == doctest::Approx(oracle::kBruinLog1e6FixedPoint).epsilon(1e-9));
  CHECK(std::fabs(fp.achieved_ratio - 1.0) < 1e-9);
  CHECK(fp.iterations > 0);

  const auto ap3 = sv::bruin_bn(lg, 1e6, sv::BruinMode::FormulaAp3);
  CHECK(ap3.b == doctest::Approx(oracle::kBruinLog1e6Formula).epsilon(1e-12));
  CHECK(ap3.achieved_ratio ==
        doctest::Approx(oracle::kBruinLog1e6FormulaRatio).epsilon(1e-12));
}

TEST_CASE("bruin sequence against the st petersburg truncated mean") {
  const auto stp = PositiveLawY::st_petersburg();
  auto ell = [&stp](double x) { return sv::truncated_mean(stp, x); };
  const auto r = sv::bruin_bn(ell, 1e6, sv::BruinMode::FixedPoint);
  CHECK(std::fabs(r.achieved_ratio - 1.0) < 1e-9);
  CHECK(r.b > 1e6);
}

TEST_CASE("bruin domain checks") {
  auto lg = [](double x) { return std::log(x); };
  CHECK_THROWS_AS(sv::bruin_bn(lg, 1.0, sv::BruinMode::FixedPoint), DomainError);
  auto zero = [](double) { return 0.0; };
  CHECK_THROWS_AS(sv::bruin_bn(zero, 1e6, sv::BruinMode::FixedPoint),
                  DomainError);
  auto linear = [](double x) { return x; };
  CHECK_THROWS_AS(sv::bruin_bn(linear, 1e6, sv::BruinMode::FixedPoint),
                  NumericError);
}

TEST_CASE("a_n schedule for the st petersburg law") {
  const auto stp = PositiveLawY::st_petersburg();
  auto b = [&stp](double n) { return n * sv::truncated_mean(stp, n); };
  const auto sched = sv::pick_an(stp, b);
  CHECK(sched.exponent == doctest::Approx(0.5));
  REQUIRE(sched.probes.size() == 3);
  CHECK(sched.probes[2].value < sched.probes[0].value);
  CHECK(sched(std::pow(2.0, 20)) ==
        doctest::Approx(oracle::kStpAnAt2p20).epsilon(1e-12));
  // n P(Y > a_n b_n) at n = 2^20 lands on the dyadic staircase.
  const double n = std::pow(2.0, 20);
  CHECK(n * sv::tail_prob(stp, sched(n) * b(n)) ==
        doctest::Approx(oracle::kStpProbeValue2p20));
}

TEST_CASE("a_n schedule exhausts its halvings on an unsuitable normalizer") {
  const auto par = PositiveLawY::pareto_one();
  auto b = [](double n) { return n; };
  try {
    sv::pick_an(par, b);
    FAIL("expected NumericError");
  } catch (const NumericError& e) {
    CHECK(std::string(e.what()).find("probe table") != std::string::npos);
  }
}

TEST_CASE("ratio probe on a constant ell converges trivially") {
  auto one = [](double) { return 1.0; };
  const auto rep = sv::probe_condition(one, sv::RatioCondition::TwoA,
                                       {1e2, 1e3, 1e4, 1e5, 1e6});
  CHECK(rep.verdict == sv::TrendReport::Verdict::ConvergesTo1);
  for (double r : rep.ratio) CHECK(r == doctest::Approx(1.0));
}

TEST_CASE("ratio probes on the logarithmic ell converge") {
  auto lg = [](double x) { return std::log(x); };
  const std::vector<double> grid{1e2, 1e4, 1e6, 1e8, 1e10, 1e12};
  CHECK(sv::probe_condition(lg, sv::RatioCondition::TwoA, grid).verdict ==
        sv::TrendReport::Verdict::ConvergesTo1);
  CHECK(sv::probe_condition(lg, sv::RatioCondition::TwoB, grid).verdict ==
        sv::TrendReport::Verdict::ConvergesTo1);
}

TEST_CASE("stretched-exponential ell fails the first ratio condition") {
  auto ell = [](double x) { return std::exp(std::pow(std::log(x), 0.75)); };
  const std::vector<double> grid{1e3, 1e6, 1e9, 1e12};
  const auto rep = sv::probe_condition(ell, sv::RatioCondition::TwoA, grid);
  CHECK(rep.verdict == sv::TrendReport::Verdict::Diverges);
  CHECK(rep.ratio[1] == doctest::Approx(oracle::kAp4Ratio1e6).epsilon(1e-12));
  CHECK(rep.ratio[2] == doctest::Approx(oracle::kAp4Ratio1e9).epsilon(1e-12));
  CHECK(rep.ratio[3] == doctest::Approx(oracle::kAp4Ratio1e12).epsilon(1e-12));
}

TEST_CASE("ratio probe grid validation") {
  auto one = [](double) { return 1.0; };
  CHECK_THROWS_AS(sv::probe_condition(one, sv::RatioCondition::TwoA, {1e2, 1e3}),
                  DomainError);
  CHECK_THROWS_AS(
      sv::probe_condition(one, sv::RatioCondition::TwoA, {1e2, 1e3, 1e4}),
      DomainError);
  CHECK_THROWS_AS(
      sv::probe_condition(one, sv::RatioCondition::TwoA, {1.0, 1e3, 1e4, 1e5}),
      DomainError);
}
