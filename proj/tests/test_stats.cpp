#include "doctest.h"

#include <cmath>
#include <vector>

#include "srelab/quadrature.hpp"
#include "srelab/rng.hpp"
#include "srelab/stats.hpp"

namespace stats = srelab::stats;

TEST_CASE("mean and variance") {
  std::vector<double> xs{1, 2, 3, 4};
  CHECK(stats::mean(xs) == doctest::Approx(2.5));
  CHECK(stats::variance(xs) == doctest::Approx(5.0 / 3.0));
}

TEST_CASE("mean_estimate carries the standard error") {
  std::vector<double> xs{1, 2, 3, 4};
  const auto est = stats::mean_estimate(xs);
  CHECK(est.value == doctest::Approx(2.5));
  CHECK(est.std_error == doctest::Approx(std::sqrt(5.0 / 3.0 / 4.0)));
  CHECK(est.reps == 4);
  const auto [lo, hi] = est.ci95();
  CHECK(lo < 2.5);
  CHECK(hi > 2.5);
}

TEST_CASE("quantile interpolates between order statistics") {
  std::vector<double> xs{1, 2, 3, 4};
  CHECK(stats::quantile(xs, 0.25) == doctest::Approx(1.75));
  CHECK(stats::quantile(xs, 0.5) == doctest::Approx(2.5));
  CHECK(stats::quantile(xs, 0.0) == doctest::Approx(1.0));
  CHECK(stats::quantile(xs, 1.0) == doctest::Approx(4.0));
  CHECK(stats::median({3, 1, 2}) == doctest::Approx(2.0));
  CHECK(stats::iqr({1, 2, 3, 4, 5}) == doctest::Approx(2.0));
}

TEST_CASE("normal cdf reference points") {
  CHECK(stats::normal_cdf(0.0) == doctest::Approx(0.5));
  CHECK(stats::normal_cdf(1.959963984540054) == doctest::Approx(0.975).epsilon(1e-9));
  CHECK(stats::normal_cdf(-1.959963984540054) == doctest::Approx(0.025).epsilon(1e-7));
  // Closes the loop on the IQR constant: half of it is the 75% quantile.
  CHECK(stats::normal_cdf(stats::kNormalIqr / 2.0) == doctest::Approx(0.75).epsilon(1e-12));
}

TEST_CASE("chi-square upper tail") {
  CHECK(stats::chi_square_upper(3.841458820694124, 1) == doctest::Approx(0.05).epsilon(1e-8));
  // dof 2 has the closed form exp(-x/2).
  CHECK(stats::chi_square_upper(2.0, 2) == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
  CHECK(stats::chi_square_upper(0.0, 5) == doctest::Approx(1.0));
}

TEST_CASE("ks distance separates the right and wrong variance") {
  srelab::rng::Stream s(404);
  std::vector<double> xs(2000);
  for (auto& x : xs) x = 2.0 * s.normal();
  CHECK(stats::ks_distance_normal(xs, 4.0) < 0.04);
  CHECK(stats::ks_distance_normal(xs, 1.0) > 0.15);
}

TEST_CASE("pearson correlation") {
  CHECK(stats::correlation({1, 2, 3}, {2, 4, 6}) == doctest::Approx(1.0));
  CHECK(stats::correlation({1, 2, 3}, {6, 4, 2}) == doctest::Approx(-1.0));
}

TEST_CASE("spearman uses average ranks on ties") {
  CHECK(stats::spearman({1, 2, 3, 4}, {1, 3, 2, 4}) == doctest::Approx(0.8));
  CHECK(stats::spearman({1, 2, 2, 3}, {10, 20, 20, 30}) == doctest::Approx(1.0));
}

TEST_CASE("digest is order sensitive and replayable") {
  stats::Digest d1, d2, d3;
  d1.add(1.0);
  d1.add(0.1);
  d2.add(1.0);
  d2.add(0.1);
  d3.add(0.1);
  d3.add(1.0);
  CHECK(d1.value() == d2.value());
  CHECK(d1.value() != d3.value());
  CHECK(d1.hex().size() == 16);
}

TEST_CASE("quadrature on finite and infinite ranges") {
  auto sq = [](double x) { return x * x; };
  CHECK(srelab::quad::integrate(sq, 0.0, 1.0).value == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  auto decay = [](double x) { return std::exp(-x); };
  const auto inf = srelab::quad::integrate_to_inf(decay, 0.0);
  CHECK(!inf.diverged);
  CHECK(inf.value == doctest::Approx(1.0).epsilon(1e-10));
  auto slow = [](double x) { return 1.0 / (1.0 + x); };
  CHECK(srelab::quad::integrate_to_inf(slow, 0.0).diverged);
}
