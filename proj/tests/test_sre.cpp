#include "doctest.h"

#include <cmath>
#include <vector>

#include "srelab/error.hpp"
#include "srelab/laws.hpp"
#include "srelab/rng.hpp"
#include "srelab/sre.hpp"

using namespace srelab;
using laws::CoefficientLaw;
using sre::PathConfig;
using sre::U0Mode;

namespace {

CoefficientLaw constant_law(double a, double b) {
  return laws::make_finite_discrete({{a, b, 1.0}});
}

}  // namespace

TEST_CASE("chi_h clips symmetrically") {
  CHECK(sre::chi_h(5.0, 3.0) == 3.0);
  CHECK(sre::chi_h(-5.0, 3.0) == -3.0);
  CHECK(sre::chi_h(2.0, 3.0) == 2.0);
}

TEST_CASE("perpetuity of the deterministic geometric law") {
  const auto law = constant_law(0.5, 1.0);
  rng::Stream s(1);
  const auto d = sre::perpetuity_sample(s, law, 1e-12);
  CHECK(d.value == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(d.diag.depth == 40);
  CHECK(d.diag.residual_product < 1e-12);
  CHECK(!d.diag.hit_max_depth);
}

TEST_CASE("perpetuity terminates after one term when A = 0") {
  const auto law = constant_law(0.0, 3.0);
  rng::Stream s(1);
  const auto d = sre::perpetuity_sample(s, law);
  CHECK(d.value == 3.0);
  CHECK(d.diag.depth == 1);
  CHECK(d.diag.residual_product == 0.0);
}

TEST_CASE("expanding product hits max depth and is flagged") {
  const auto law = constant_law(2.0, 1.0);
  rng::Stream s(1);
  const auto d = sre::perpetuity_sample(s, law, 1e-12, 50);
  CHECK(d.diag.hit_max_depth);
  CHECK(d.diag.depth == 50);
  CHECK(d.value == doctest::Approx(std::pow(2.0, 50) - 1.0));
}

TEST_CASE("perpetuity argument validation") {
  const auto law = constant_law(0.5, 1.0);
  rng::Stream s(1);
  CHECK_THROWS_AS(sre::perpetuity_sample(s, law, 0.0), DomainError);
  CHECK_THROWS_AS(sre::perpetuity_sample(s, law, 1e-12, 0), DomainError);
}

TEST_CASE("critical garch perpetuity lands on the 2^m - 1 lattice") {
  const auto law = laws::make_garch_critical(1.0, 1.0, laws::three_atom_noise());
  rng::Stream root(17);
  const int n = 20000;
  int ones = 0;
  for (int i = 0; i < n; ++i) {
    rng::Stream s = root.child(uint64_t(i));
    const double u = sre::perpetuity_sample(s, law).value;
    const double m = std::round(std::log2(u + 1.0));
    REQUIRE(std::fabs(u - (std::pow(2.0, m) - 1.0)) < 1e-9 * (u + 1.0));
    if (u == 1.0) ++ones;
  }
  // P(U = 1) = 1/2 exactly.
  CHECK(std::fabs(double(ones) / n - 0.5) < 4.0 * 0.5 / std::sqrt(double(n)));
}

TEST_CASE("forward path of the affine contraction") {
  const auto law = constant_law(0.5, 1.0);
  PathConfig cfg;
  cfg.n = 3;
  cfg.u0_mode = U0Mode::Zero;
  rng::Stream s(1);
  const auto ps = sre::forward_path(s, law, cfg);
  CHECK(ps.sum_u_kappa == doctest::Approx(4.25));
  CHECK(ps.final_u == doctest::Approx(1.75));
  CHECK(!ps.overflow);

  cfg.kappa = 2.0;
  rng::Stream s2(1);
  CHECK(sre::forward_path(s2, law, cfg).sum_u_kappa == doctest::Approx(6.3125));
}

TEST_CASE("forward path replays the coefficient stream exactly") {
  const auto law = laws::make_garch_critical(1.0, 1.0, laws::three_atom_noise());
  PathConfig cfg;
  cfg.n = 50;
  cfg.u0_mode = U0Mode::Fixed;
  cfg.u0_value = 3.0;
  rng::Stream s1(88);
  const auto ps = sre::forward_path(s1, law, cfg);

  rng::Stream s2(88);
  double u = 3.0, sum = 0.0;
  for (int j = 0; j < 50; ++j) {
    const auto cd = laws::sample_coeff(law, s2);
    u = cd.a * u + cd.b;
    sum += u;
  }
  CHECK(ps.final_u == u);
  CHECK(ps.sum_u_kappa == sum);
}

TEST_CASE("snapshots are the partial sums at floor(n t)") {
  const auto law = constant_law(0.5, 1.0);
  PathConfig cfg;
  cfg.n = 4;
  cfg.u0_mode = U0Mode::Zero;
  cfg.snapshot_times = {0.5, 1.0};
  rng::Stream s(1);
  const auto ps = sre::forward_path(s, law, cfg);
  REQUIRE(ps.snapshots.size() == 2);
  CHECK(ps.snapshots[0] == doctest::Approx(2.5));
  CHECK(ps.snapshots[1] == ps.sum_u_kappa);
}

TEST_CASE("snapshot time validation") {
  const auto law = constant_law(0.5, 1.0);
  PathConfig cfg;
  cfg.n = 4;
  cfg.u0_mode = U0Mode::Zero;
  cfg.snapshot_times = {0.0};
  rng::Stream s(1);
  CHECK_THROWS_AS(sre::forward_path(s, law, cfg), DomainError);
  cfg.snapshot_times = {1.5};
  rng::Stream s2(1);
  CHECK_THROWS_AS(sre::forward_path(s2, law, cfg), DomainError);
}

TEST_CASE("explosive recursion is flagged as overflow") {
  const auto law = constant_law(2.0, 1.0);
  PathConfig cfg;
  cfg.n = 1200;
  cfg.u0_mode = U0Mode::Fixed;
  cfg.u0_value = 1.0;
  cfg.kappa = 2.0;
  rng::Stream s(1);
  const auto ps = sre::forward_path(s, law, cfg);
  CHECK(ps.overflow);
}

TEST_CASE("garch path with lambda = 0 reduces to the deterministic recursion") {
  PathConfig cfg;
  cfg.n = 4;
  cfg.u0_mode = U0Mode::Zero;
  rng::Stream s(1);
  const auto ps =
      sre::garch_path(s, 1.0, 0.0, 0.5, laws::three_atom_noise(), cfg);
  CHECK(ps.sum_sigma2 == doctest::Approx(6.125));
  CHECK(ps.final_u == doctest::Approx(1.875));
}

TEST_CASE("recorded garch path satisfies the recursion identically") {
  PathConfig cfg;
  cfg.n = 500;
  cfg.u0_mode = U0Mode::Stationary;
  cfg.record_path = true;
  rng::Stream s(23);
  const double beta = 1.0, lambda = 0.6, delta = 0.4;
  const auto ps =
      sre::garch_path(s, beta, lambda, delta, laws::three_atom_noise(), cfg);
  REQUIRE(ps.path_u.size() == 500);
  REQUIRE(ps.path_x.size() == 500);
  for (size_t j = 1; j < ps.path_u.size(); ++j) {
    const double expect = beta + lambda * ps.path_x[j - 1] * ps.path_x[j - 1] +
                          delta * ps.path_u[j - 1];
    REQUIRE(ps.path_u[j] == expect);
  }
  // X_j = sigma_j Z_j with Z in {0, +-sqrt(2)}.
  for (size_t j = 0; j < ps.path_x.size(); ++j) {
    const double z2 = ps.path_x[j] * ps.path_x[j] / ps.path_u[j];
    REQUIRE((z2 == 0.0 || z2 == doctest::Approx(2.0)));
  }
}

TEST_CASE("garch increments are conditionally centered") {
  PathConfig cfg;
  cfg.n = 20000;
  cfg.u0_mode = U0Mode::Stationary;
  rng::Stream s(29);
  const auto ps =
      sre::garch_path(s, 1.0, 0.5, 0.5, laws::three_atom_noise(), cfg);
  CHECK(!ps.overflow);
  CHECK(std::fabs(ps.sum_x) < 5.0 * std::sqrt(ps.sum_x2));
}
