#include <catch2/catch_amalgamated.hpp>
#include <cmath>

#include "simsig/boundary.hpp"
#include "simsig/rng.hpp"

using namespace simsig;

namespace {

Calibration calib(double beta, double beta1, double beta2, double r1, double r2) {
  return Calibration{100000, beta, beta1, beta2, r1, r2};
}

// Test-side Q1 oracle: direct transcription as a dense double loop with an
// offset grid, independent of the library's prefix-max evaluation.
double q1_brute(double beta, double beta1, double beta2, double r1, double r2,
                int res) {
  double best = -1e300;
  for (int i = 1; i <= res; ++i) {
    const double x1 = static_cast<double>(i) / res;
    for (int j = 1; j + i <= res; ++j) {
      const double x2 = static_cast<double>(j) / res;
      double sum = 0.0;
      for (int k = 0; k < 2; ++k) {
        const double x = k == 0 ? x1 : x2;
        const double r = k == 0 ? r1 : r2;
        const double bk = k == 0 ? beta1 : beta2;
        const double d = std::sqrt(x) - std::sqrt(r);
        const double vp = d > 0.0 ? -d * d : 0.0;
        sum += std::max(-x, vp) + 0.5 * std::min(x, bk - vp);
      }
      best = std::max(best, 0.5 - beta + sum);
    }
  }
  return best;
}

}  // namespace

TEST_CASE("alpha functions for the Gaussian model", "[boundary]") {
  auto [m1, p1] = alpha_normal(1.0, 1.0);
  REQUIRE(m1 == -3.0);
  REQUIRE(p1 == 1.0);
  auto [m2, p2] = alpha_normal(0.25, 0.25);
  REQUIRE(p2 == Catch::Approx(0.25).margin(1e-15));
  (void)m2;
  auto [m3, p3] = alpha_normal(1.0, 0.0);
  REQUIRE(m3 == 0.0);
  REQUIRE(p3 == 0.0);
}

TEST_CASE("v functions: closed forms and ordering", "[boundary]") {
  REQUIRE(v_plus_normal(0.5, 1.0) == 0.0);
  REQUIRE(v_plus_normal(1.0, 0.25) == Catch::Approx(-0.25).margin(1e-15));
  REQUIRE(v_minus_normal(1.0, 1.0) == -4.0);

  // v+ >= -x >= v- and both <= 0
  for (double r : {0.0, 0.1, 0.25, 1.0, 2.5}) {
    for (int i = 1; i <= 40; ++i) {
      const double x = 0.05 * i;
      const double vp = v_plus_normal(x, r);
      const double vm = v_minus_normal(x, r);
      REQUIRE(vp >= -x);
      REQUIRE(-x >= vm);
      REQUIRE(vp <= 0.0);
      REQUIRE(vm <= 0.0);
    }
  }

  // tabulated alpha functions recover the closed forms
  const double r = 0.25;
  AlphaFunctions tab = AlphaFunctions::from_alpha(
      [r](double a) { return -2.0 * std::sqrt(a * r) - r; },
      [r](double a) { return 2.0 * std::sqrt(a * r) - r; });
  for (double x : {0.1, 0.3, 0.7, 1.0}) {
    REQUIRE(tab.v_plus(x) == Catch::Approx(v_plus_normal(x, r)).margin(1e-4));
    REQUIRE(tab.v_minus(x) == Catch::Approx(v_minus_normal(x, r)).margin(1e-4));
  }
}

TEST_CASE("detectable region check", "[boundary]") {
  REQUIRE(check_detectable(calib(0.9, 0.5, 0.5, 2.0, 2.0)).detectable);
  REQUIRE_FALSE(check_detectable(calib(0.99, 0.5, 0.5, 0.25, 0.25)).detectable);
  REQUIRE(check_detectable(calib(0.60, 0.5, 0.5, 0.25, 0.25)).detectable);

  REQUIRE_THROWS_AS(check_detectable(calib(0.9, 0.4, 0.5, 1.0, 1.0)), Error);
}

TEST_CASE("undetectable region check", "[boundary]") {
  REQUIRE(check_undetectable(calib(0.99, 0.5, 0.5, 0.25, 0.25)).undetectable);
  REQUIRE_FALSE(check_undetectable(calib(0.60, 0.5, 0.5, 0.25, 0.25)).undetectable);
}

TEST_CASE("mutual exclusivity on random calibrations", "[boundary]") {
  Rng rng(2024);
  for (int rep = 0; rep < 300; ++rep) {
    const double b1 = 0.5 + 0.45 * rng.uniform01();
    const double b2 = 0.5 + 0.45 * rng.uniform01();
    const double lo = std::max(b1, b2) + 1e-6;
    const double beta = lo + (0.999 - lo) * rng.uniform01();
    const double r1 = 4.0 * rng.uniform01();
    const double r2 = 4.0 * rng.uniform01();
    RegionVerdict v = classify_region(calib(beta, b1, b2, r1, r2));
    REQUIRE_FALSE((v.detectable && v.undetectable));
    if (std::fabs(v.q_values[0]) > 0.05) {
      REQUIRE(v.detectable != v.undetectable);
    }
  }
}

TEST_CASE("fast u2 evaluation matches a brute-force double loop", "[boundary]") {
  // brute force over the same a-grid, independent transcription
  Rng rng(5);
  for (int rep = 0; rep < 10; ++rep) {
    const double b1 = 0.5 + 0.4 * rng.uniform01();
    const double b2 = 0.5 + 0.4 * rng.uniform01();
    const double beta = std::max(b1, b2) + (0.99 - std::max(b1, b2)) * rng.uniform01();
    const double r1 = 3.0 * rng.uniform01();
    const double r2 = 3.0 * rng.uniform01();
    const int n = 257;
    RegionVerdict v = check_undetectable(calib(beta, b1, b2, r1, r2), n);

    const double a_min = 1e-4, a_max = 8.0;
    double sup2 = -1e300;
    for (int i = 0; i < n; ++i) {
      const double a1 = a_min + (a_max - a_min) * i / (n - 1);
      const double alpha1 = 2.0 * std::sqrt(a1 * r1) - r1;
      for (int j = 0; j < n; ++j) {
        const double a2 = a_min + (a_max - a_min) * j / (n - 1);
        const double alpha2 = 2.0 * std::sqrt(a2 * r2) - r2;
        const double first = -beta + alpha1 + alpha2;
        const double second = -2.0 * beta + alpha1 + alpha2 +
                              std::min(alpha1, b1) + std::min(alpha2, b2);
        sup2 = std::max(sup2, std::min(first, second) - a1 - a2);
      }
    }
    REQUIRE(v.u2_value == Catch::Approx(1.0 + sup2).margin(1e-9));
  }
}

TEST_CASE("boundary_beta", "[boundary]") {
  SECTION("strong signals with beta1 + beta2 > 1 are always detectable") {
    REQUIRE(boundary_beta(0.6, 0.6, 1.0, 1.0) == 1.0);
  }
  SECTION("weak symmetric case matches the analytic optimum") {
    const double expected = 0.5 + 2.0 * (std::sqrt(0.5) - 0.5);
    REQUIRE(boundary_beta(0.5, 0.5, 0.25, 0.25) ==
            Catch::Approx(expected).margin(2e-3));
  }
  SECTION("monotone in the signal strength") {
    REQUIRE(boundary_beta(0.5, 0.5, 0.1, 0.1) <
            boundary_beta(0.5, 0.5, 0.25, 0.25));
  }
  SECTION("matches the independent grid oracle") {
    const double b = boundary_beta(0.5, 0.5, 0.25, 0.25);
    // oracle: scan beta until the brute-force Q1 changes sign
    double oracle = 0.5;
    for (double beta = 0.999; beta > 0.5; beta -= 5e-4) {
      if (q1_brute(beta, 0.5, 0.5, 0.25, 0.25, 640) > 0.0) {
        oracle = beta;
        break;
      }
    }
    REQUIRE(b == Catch::Approx(oracle).margin(2e-3));
  }
  SECTION("rejects invalid parameters") {
    REQUIRE_THROWS_AS(boundary_beta(0.4, 0.5, 1.0, 1.0), Error);
  }
}

TEST_CASE("closed-form Q1 for strong signals", "[boundary]") {
  for (double beta1 : {0.5, 0.5625, 0.625, 0.75}) {
    for (double beta2 : {0.5, 0.625, 0.875}) {
      for (double beta : {0.51, 0.6, 0.75, 0.9}) {
        if (beta < std::max(beta1, beta2)) continue;
        for (double r : {1.0, 2.0}) {
          RegionVerdict v = check_detectable(calib(beta, beta1, beta2, r, r));
          const double closed = 0.5 - beta + 0.5 * std::min(1.0, beta1 + beta2);
          REQUIRE(v.q_values[0] == Catch::Approx(closed).margin(1e-6));
        }
      }
    }
  }
}

TEST_CASE("grid refinement stability", "[boundary]") {
  // The fourth supremum sits at the open x -> 0 corner, so its drift is
  // ~1.5/res; the 1e-3 bound is met from res = 1024 upward.
  for (double beta : {0.7, 0.9}) {
    RegionVerdict a = check_detectable(calib(beta, 0.5, 0.625, 0.5, 1.5), 512);
    RegionVerdict b = check_detectable(calib(beta, 0.5, 0.625, 0.5, 1.5), 1024);
    RegionVerdict c = check_detectable(calib(beta, 0.5, 0.625, 0.5, 1.5), 2048);
    for (int k = 0; k < 4; ++k) {
      REQUIRE(std::fabs(a.q_values[k] - b.q_values[k]) < 3e-3);
      REQUIRE(std::fabs(b.q_values[k] - c.q_values[k]) < 1e-3);
    }
  }
}

TEST_CASE("single sequence boundary", "[boundary]") {
  REQUIRE(single_seq_boundary(0.75) == Catch::Approx(0.25).margin(1e-15));
  REQUIRE(single_seq_boundary(0.51) == Catch::Approx(0.01).margin(1e-12));
  const double expected = (1.0 - std::sqrt(0.1)) * (1.0 - std::sqrt(0.1));
  REQUIRE(single_seq_boundary(0.9) == Catch::Approx(expected).epsilon(1e-12));
  REQUIRE_THROWS_AS(single_seq_boundary(0.5), Error);
  REQUIRE_THROWS_AS(single_seq_boundary(1.0), Error);
}

TEST_CASE("tail approximation check", "[boundary]") {
  SECTION("r = 0 is exact") {
    TailCheck tc = tail_approx_check(0.5, 0.0, 1000);
    REQUIRE(tc.lhs_exponent == -0.5);
    REQUIRE(tc.v_minus == -0.5);
  }
  SECTION("finite-p gap is small and shrinks with p") {
    TailCheck t3 = tail_approx_check(0.5, 0.25, 1000);
    TailCheck t6 = tail_approx_check(0.5, 0.25, 1000000);
    TailCheck t9 = tail_approx_check(0.5, 0.25, 1000000000);
    const double g3 = std::fabs(t3.lhs_exponent - t3.v_minus);
    const double g6 = std::fabs(t6.lhs_exponent - t6.v_minus);
    const double g9 = std::fabs(t9.lhs_exponent - t9.v_minus);
    REQUIRE(g6 < 0.2);
    REQUIRE(g6 <= g3);
    REQUIRE(g9 <= g6);
  }
  SECTION("precondition x >= log_p 2") {
    REQUIRE_THROWS_AS(tail_approx_check(0.05, 0.25, 100), Error);
  }
}
