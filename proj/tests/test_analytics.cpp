#include "doctest.h"

#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "srelab/analytics.hpp"
#include "srelab/error.hpp"
#include "srelab/laws.hpp"
#include "srelab/rng.hpp"

using namespace srelab;
namespace an = srelab::analytics;
using laws::CoefficientLaw;
using laws::NoiseLaw;

namespace {

const double kLn2 = std::log(2.0);

CoefficientLaw two_atom() {
  return laws::make_finite_discrete({{0.5, 1.0, 0.6}, {1.5, 1.0, 0.4}});
}

CoefficientLaw disc_critical() {
  return laws::make_garch_critical(1.0, 1.0, laws::three_atom_noise());
}

std::vector<double> log_grid(double lo, double hi, int n) {
  std::vector<double> g(n);
  for (int i = 0; i < n; ++i)
    g[i] = lo * std::pow(hi / lo, double(i) / (n - 1));
  return g;
}

}  // namespace

TEST_CASE("psi on discrete laws enumerates exactly") {
  const auto law = disc_critical();
  CHECK(an::psi(law, 1.0) == doctest::Approx(1.0));
  CHECK(an::psi(law, 2.0) == doctest::Approx(2.0));
  // The zero atom carries no mass: psi(p) = 0.5 * 2^p.
  CHECK(an::psi(law, 3.0) == doctest::Approx(4.0));
}

TEST_CASE("psi closed form for lognormal A") {
  const auto law = laws::make_lognormal_A_const_B(-0.5, 1.0, 1.0);
  std::string method;
  CHECK(an::psi(law, 1.0, &method) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(method == "closed_form");
  CHECK(an::psi(law, 2.0) == doctest::Approx(std::exp(1.0)).epsilon(1e-12));
}

TEST_CASE("psi of the kevei law blows up past its design exponent") {
  const auto law = laws::build_kevei_law(0.5, 1.0, 1.0, 0.05, 1.0);
  CHECK(std::isinf(an::psi(law, 1.5)));
  CHECK(an::psi(law, 1.0) == doctest::Approx(1.0).epsilon(1e-8));
  // Strict convexity with psi(0) = psi(kappa) = 1 pins the interior below 1.
  std::string method;
  const double mid = an::psi(law, 0.5, &method);
  CHECK(method == "quadrature");
  CHECK(mid < 1.0);
  CHECK(mid > 0.5);
}

TEST_CASE("psi is strictly convex where finite") {
  const auto law = two_atom();
  for (double p : {0.2, 0.7, 1.3, 2.1}) {
    const double d = 0.1;
    const double mid = an::psi(law, p);
    CHECK(an::psi(law, p - d) + an::psi(law, p + d) > 2.0 * mid);
  }
}

TEST_CASE("kappa solver") {
  CHECK(an::solve_kappa(disc_critical()) == 1.0);
  const double k2 = an::solve_kappa(two_atom());
  CHECK(k2 == doctest::Approx(oracle::kTwoAtomKappa).epsilon(1e-9));
  CHECK(std::fabs(an::psi(two_atom(), k2) - 1.0) < 1e-9);
  CHECK(an::solve_kappa(laws::make_lognormal_A_const_B(-0.5, 1.0, 1.0)) ==
        doctest::Approx(1.0).epsilon(1e-9));
  // The kevei family carries its exponent by construction.
  CHECK(an::solve_kappa(laws::build_kevei_law(0.5, 1.0, 1.0, 0.05, 1.0)) == 1.0);
}

TEST_CASE("kappa solver names the failing bracket side") {
  const auto contracting = laws::make_finite_discrete({{0.5, 1.0, 1.0}});
  try {
    an::solve_kappa(contracting);
    FAIL("expected NoRootError");
  } catch (const NoRootError& e) {
    CHECK(e.side == "upper");
  }
  const auto balanced =
      laws::make_finite_discrete({{2.0, 1.0, 0.5}, {0.5, 1.0, 0.5}});
  try {
    an::solve_kappa(balanced);
    FAIL("expected NoRootError");
  } catch (const NoRootError& e) {
    CHECK(e.side == "lower");
  }
}

TEST_CASE("tilted log moment") {
  const auto tlm = an::tilted_log_moment(disc_critical(), 1.0);
  CHECK(tlm.value == doctest::Approx(kLn2).epsilon(1e-12));
  CHECK(tlm.neg_part == doctest::Approx(0.0));
  CHECK(!tlm.pos_infinite);

  const auto garch =
      laws::make_garch_critical(1.0, 1.0, NoiseLaw::standard_normal());
  CHECK(an::tilted_log_moment(garch, 1.0).value ==
        doctest::Approx(oracle::kNormalZ2LnZ2).epsilon(1e-9));

  const auto kevei = laws::build_kevei_law(0.5, 1.0, 1.0, 0.05, 1.0);
  const auto kv = an::tilted_log_moment(kevei, 1.0);
  CHECK(kv.pos_infinite);
  CHECK(std::isinf(kv.value));
  CHECK(kv.neg_part ==
        doctest::Approx(0.95 * std::exp(-kevei.kevei_w) * kevei.kevei_w));
}

TEST_CASE("h_A of the discrete critical law is x capped at ln 2") {
  const auto law = disc_critical();
  CHECK(an::h_A(law, 1.0, 0.3) == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(an::h_A(law, 1.0, 5.0) == doctest::Approx(kLn2).epsilon(1e-12));
  CHECK(an::h_A(law, 1.0, 0.0) == doctest::Approx(0.0));
}

TEST_CASE("kevei h_A matches the tabulated closed form") {
  const auto law = laws::build_kevei_law(0.5, 1.0, 1.0, 0.05, 1.0);
  CHECK(an::h_A(law, 1.0, 1.0) == doctest::Approx(oracle::kKeveiHAt1).epsilon(1e-9));
  CHECK(an::h_A(law, 1.0, 100.0) ==
        doctest::Approx(oracle::kKeveiHAt100).epsilon(1e-9));
  // Linear below the support point v0.
  CHECK(an::h_A(law, 1.0, 0.5) ==
        doctest::Approx(0.5 * oracle::kKeveiHAt1).epsilon(1e-9));
  CHECK_THROWS_AS(an::h_A(law, 1.0, -1.0), DomainError);
}

TEST_CASE("kevei tilted tail function") {
  const auto law = laws::build_kevei_law(0.5, 1.0, 1.0, 0.05, 1.0);
  CHECK(an::bar_H_A(law, 1.0, 2.0) ==
        doctest::Approx(oracle::kKeveiTailAt2).epsilon(1e-9));
  CHECK(an::bar_H_A(law, 1.0, 5.0) ==
        doctest::Approx(oracle::kKeveiTailAt5).epsilon(1e-9));
  CHECK(an::bar_H_A(law, 1.0, 10.0) ==
        doctest::Approx(oracle::kKeveiTailAt10).epsilon(1e-9));
  CHECK(an::bar_H_A(law, 1.0, 0.5) ==
        doctest::Approx(oracle::kKeveiUpMass).epsilon(1e-9));
  CHECK(an::bar_H_A(law, 1.0, -law.kevei_w - 0.1) == doctest::Approx(1.0));
}

TEST_CASE("profile of a law with finite tilted log moment") {
  const auto prof = an::fit_profile(disc_critical(), 1.0, {});
  REQUIRE(prof.kind == an::SlowVariationProfile::Kind::Finite);
  CHECK(prof.m == doctest::Approx(kLn2).epsilon(1e-12));

  const auto prof2 = an::fit_profile(two_atom(), oracle::kTwoAtomKappa, {});
  CHECK(prof2.kind == an::SlowVariationProfile::Kind::Finite);
}

TEST_CASE("kevei profile is regularly varying with index near one half") {
  const auto law = laws::build_kevei_law(0.5, 1.0, 1.0, 0.05, 1.0);
  const auto prof = an::fit_profile(law, 1.0, log_grid(1.0, 1e4, 25));
  REQUIRE(prof.kind == an::SlowVariationProfile::Kind::RegVar);
  CHECK(prof.rho == doctest::Approx(0.5).epsilon(0.1));
  CHECK(prof.ell(100.0) > 0.0);
  // Grid validation for the regularly varying branch.
  CHECK_THROWS_AS(an::fit_profile(law, 1.0, {1.0, 2.0, 3.0}), DomainError);
  CHECK_THROWS_AS(an::fit_profile(law, 1.0, {1.0, 2.0, 4.0, 8.0, 16.0}),
                  DomainError);
}

TEST_CASE("normalizer g_A on both branches") {
  an::SlowVariationProfile fin;
  fin.kind = an::SlowVariationProfile::Kind::Finite;
  fin.m = kLn2;
  CHECK(an::g_A(fin, std::exp(10.0)) == doctest::Approx(10.0 / kLn2).epsilon(1e-12));
  CHECK_THROWS_AS(an::g_A(fin, 1.0), DomainError);

  an::SlowVariationProfile rho0;
  rho0.kind = an::SlowVariationProfile::Kind::RegVar;
  rho0.rho = 0.0;
  rho0.ell = [](double) { return 2.0; };
  CHECK(an::g_A(rho0, std::exp(2.0)) == doctest::Approx(1.0).epsilon(1e-12));

  an::SlowVariationProfile rho_half;
  rho_half.kind = an::SlowVariationProfile::Kind::RegVar;
  rho_half.rho = 0.5;
  rho_half.ell = [](double) { return 1.0; };
  CHECK(an::g_A(rho_half, std::exp(4.0)) ==
        doctest::Approx(oracle::kGaRhoHalfAtE4).epsilon(1e-12));
  CHECK(an::g_A(rho_half, std::exp(1.0)) ==
        doctest::Approx(oracle::kGaRhoHalfPrefactor).epsilon(1e-12));
}

TEST_CASE("g_A is continuous across the rho -> 0 branch") {
  an::SlowVariationProfile fin;
  fin.kind = an::SlowVariationProfile::Kind::Finite;
  fin.m = kLn2;
  an::SlowVariationProfile rv;
  rv.kind = an::SlowVariationProfile::Kind::RegVar;
  rv.rho = 0.0;
  rv.ell = [](double) { return kLn2; };
  for (double t : {5.0, 100.0, 1e6})
    CHECK(an::g_A(fin, t) == doctest::Approx(an::g_A(rv, t)).epsilon(1e-12));
}

TEST_CASE("D at kappa = 1 is E B with zero error") {
  const auto est = an::d_constant(disc_critical(), 1.0, rng::Stream(3), 1000);
  CHECK(est.value == 1.0);
  CHECK(est.std_error == 0.0);
  CHECK(est.reps == 0);
}

TEST_CASE("D away from kappa = 1 is stream-stable Monte Carlo") {
  const auto law = two_atom();
  const double k = oracle::kTwoAtomKappa;
  const auto e1 = an::d_constant(law, k, rng::Stream(5), 40000);
  const auto e2 = an::d_constant(law, k, rng::Stream(6), 160000);
  CHECK(e1.std_error > 0.0);
  const double joint = std::sqrt(e1.std_error * e1.std_error +
                                 e2.std_error * e2.std_error);
  CHECK(std::fabs(e1.value - e2.value) < 3.0 * joint);
  // Same stream, same answer.
  const auto e3 = an::d_constant(law, k, rng::Stream(5), 40000);
  CHECK(e1.value == e3.value);
  CHECK_THROWS_AS(an::d_constant(law, k, rng::Stream(5), 0), DomainError);
}

TEST_CASE("kesten constants") {
  const auto k = an::kesten_constant(1.0, 1.0, kLn2, laws::Verdict::Fail);
  CHECK(k.c_prime == doctest::Approx(oracle::kCDiscLambda1).epsilon(1e-12));
  CHECK(!k.tail_constant.has_value());
  const auto k2 = an::kesten_constant(2.0, 2.0, 0.5, laws::Verdict::Pass);
  CHECK(k2.c_prime == doctest::Approx(4.0));
  REQUIRE(k2.tail_constant.has_value());
  CHECK(*k2.tail_constant == doctest::Approx(2.0));
  CHECK_THROWS_AS(an::kesten_constant(1.0, 1.0, 0.0, laws::Verdict::Pass),
                  DomainError);
}

TEST_CASE("garch clt constant") {
  CHECK(an::c_lambda_z(laws::three_atom_noise(), 1.0) ==
        doctest::Approx(oracle::kCDiscLambda1).epsilon(1e-12));
  CHECK(an::c_lambda_z(laws::three_atom_noise(), 0.5) ==
        doctest::Approx(oracle::kCDiscLambda05).epsilon(1e-9));
  CHECK(an::c_lambda_z(NoiseLaw::standard_normal(), 1.0) ==
        doctest::Approx(oracle::kCGauss).epsilon(1e-6));
}

TEST_CASE("garch clt constant rejects degenerate noise") {
  const auto pm1 = NoiseLaw::discrete({{1.0, 0.5}, {-1.0, 0.5}});
  CHECK_THROWS_AS(an::c_lambda_z(pm1, 0.5), DomainError);
  CHECK_THROWS_AS(an::c_lambda_z(laws::three_atom_noise(), 0.0), DomainError);
}

TEST_CASE("clt constant agrees with the tilted log moment route") {
  for (double lambda : {0.3, 0.7, 1.0}) {
    const auto law =
        laws::garch_to_sre(1.0, lambda, 1.0 - lambda, laws::three_atom_noise());
    const double m = an::tilted_log_moment(law, 1.0).value;
    CHECK(an::c_lambda_z(laws::three_atom_noise(), lambda) ==
          doctest::Approx(1.0 / m).epsilon(1e-12));
  }
}
