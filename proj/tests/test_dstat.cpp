#include <catch2/catch_amalgamated.hpp>
#include <cmath>

#include "simsig/dstat.hpp"
#include "simsig/rng.hpp"

using namespace simsig;

namespace {

PairedStats random_pairs(Rng& rng, std::size_t p, bool with_ties) {
  PairedStats pairs;
  for (std::size_t j = 0; j < p; ++j) {
    if (with_ties) {
      pairs.t1.push_back(static_cast<double>(rng.below(8)));
      pairs.t2.push_back(static_cast<double>(rng.below(8)));
    } else {
      pairs.t1.push_back(rng.normal());
      pairs.t2.push_back(rng.normal());
    }
  }
  return pairs;
}

void require_same_result(const DetectionResult& a, const DetectionResult& b) {
  REQUIRE(a.statistic == b.statistic);  // bit-identical, not approximate
  REQUIRE(a.argmax_cell == b.argmax_cell);
  REQUIRE(a.t1_star == b.t1_star);
  REQUIRE(a.t2_star == b.t2_star);
  REQUIRE(a.cells_evaluated == b.cells_evaluated);
}

}  // namespace

TEST_CASE("dstat: hand-enumerated values", "[dstat]") {
  SECTION("p=2 concordant pair") {
    RankedPairs r = preprocess(PairedStats{{1, 2}, {1, 2}});
    DetectionResult res = dstat_naive(r, Truncation::full(2));
    REQUIRE(res.statistic == Catch::Approx(std::sqrt(2.0 / 3.0)).epsilon(1e-12));
    REQUIRE(res.t1_star == 2.0);
    REQUIRE(res.t2_star == 2.0);
    REQUIRE(res.cells_evaluated == 3);  // 4 cells minus the excluded corner
  }
  SECTION("p=4 identical ranks") {
    RankedPairs r = preprocess(PairedStats{{1, 2, 3, 4}, {1, 2, 3, 4}});
    DetectionResult res = dstat_naive(r, Truncation::full(4));
    REQUIRE(res.statistic == Catch::Approx(6.0 / std::sqrt(15.0)).epsilon(1e-12));
    REQUIRE(res.argmax_cell == GridCell{4, 4});
    REQUIRE(res.cells_evaluated == 15);
  }
  SECTION("anti-concordant case is symmetric under the absolute value") {
    RankedPairs r = preprocess(PairedStats{{1, 2}, {2, 1}});
    DetectionResult res = dstat_naive(r, Truncation::full(2));
    REQUIRE(res.statistic == Catch::Approx(std::sqrt(2.0 / 3.0)).epsilon(1e-12));
  }
  SECTION("m1=m2=1 keeps only the top cell") {
    RankedPairs r = preprocess(PairedStats{{1, 2, 3, 4}, {1, 2, 3, 4}});
    DetectionResult res = dstat_fast(r, Truncation{1, 1});
    REQUIRE(res.statistic == Catch::Approx(6.0 / std::sqrt(15.0)).epsilon(1e-12));
    REQUIRE(res.cells_evaluated == 1);
  }
}

TEST_CASE("dstat: fast equals naive bit-for-bit", "[dstat]") {
  Rng rng(7);
  for (int rep = 0; rep < 30; ++rep) {
    const std::size_t p = 2 + rng.below(60);
    PairedStats pairs = random_pairs(rng, p, rep % 3 == 0);
    RankedPairs ranked = preprocess(pairs);
    if (ranked.seq1.distinct_count() == 1 && ranked.seq2.distinct_count() == 1) {
      continue;
    }
    const std::vector<Truncation> truncations = {
        Truncation::full(p),
        Truncation{1, 1},
        Truncation{static_cast<std::int32_t>(1 + rng.below(p)),
                   static_cast<std::int32_t>(1 + rng.below(p))},
    };
    for (const Truncation& t : truncations) {
      require_same_result(dstat_naive(ranked, t), dstat_fast(ranked, t));
    }
  }
}

TEST_CASE("dstat: exchange symmetry", "[dstat]") {
  Rng rng(11);
  for (int rep = 0; rep < 10; ++rep) {
    const std::size_t p = 3 + rng.below(40);
    PairedStats pairs = random_pairs(rng, p, rep % 2 == 0);
    PairedStats swapped{pairs.t2, pairs.t1};
    const Truncation t{static_cast<std::int32_t>(1 + rng.below(p)),
                       static_cast<std::int32_t>(1 + rng.below(p))};
    const Truncation ts{t.m2, t.m1};
    RankedPairs r1 = preprocess(pairs);
    RankedPairs r2 = preprocess(swapped);
    if (r1.seq1.distinct_count() == 1 && r1.seq2.distinct_count() == 1) continue;
    DetectionResult a = dstat_fast(r1, t);
    DetectionResult b = dstat_fast(r2, ts);
    REQUIRE(a.statistic == b.statistic);
    REQUIRE(a.argmax_cell.l == b.argmax_cell.m);
    REQUIRE(a.argmax_cell.m == b.argmax_cell.l);
  }
}

TEST_CASE("dstat: rank invariance under strictly increasing transforms", "[dstat]") {
  Rng rng(13);
  const std::size_t p = 50;
  PairedStats pairs = random_pairs(rng, p, false);
  RankedPairs base = preprocess(pairs);
  const Truncation t = Truncation::defaults(p);
  DetectionResult ref = dstat_fast(base, t);

  auto cube = [](double x) { return x * x * x + 2.0 * x; };
  PairedStats transformed;
  for (std::size_t j = 0; j < p; ++j) {
    transformed.t1.push_back(cube(pairs.t1[j]));
    transformed.t2.push_back(std::exp(pairs.t2[j]));
  }
  DetectionResult res = dstat_fast(preprocess(transformed), t);
  REQUIRE(res.statistic == ref.statistic);
  REQUIRE(res.argmax_cell == ref.argmax_cell);
  REQUIRE(res.cells_evaluated == ref.cells_evaluated);
}

TEST_CASE("dstat: truncation is monotone and conservative", "[dstat]") {
  Rng rng(17);
  const std::size_t p = 80;
  PairedStats pairs = random_pairs(rng, p, false);
  RankedPairs ranked = preprocess(pairs);

  const double full = dstat_fast(ranked, Truncation::full(p)).statistic;
  double prev = 0.0;
  for (std::int32_t m = 1; m <= static_cast<std::int32_t>(p); m += 7) {
    const double v = dstat_fast(ranked, Truncation{m, m}).statistic;
    REQUIRE(v >= prev);
    REQUIRE(v <= full);
    prev = v;
  }

  // monotone in each axis separately
  double prev1 = 0.0;
  for (std::int32_t m1 = 1; m1 <= static_cast<std::int32_t>(p); m1 += 11) {
    const double v = dstat_fast(ranked, Truncation{m1, 20}).statistic;
    REQUIRE(v >= prev1);
    prev1 = v;
  }
}

TEST_CASE("dstat: degenerate and near-degenerate inputs", "[dstat]") {
  RankedPairs both_constant = preprocess(PairedStats{{2, 2, 2}, {5, 5, 5}});
  REQUIRE_THROWS_AS(dstat_naive(both_constant, Truncation::full(3)), Error);
  REQUIRE_THROWS_AS(dstat_fast(both_constant, Truncation::full(3)), Error);

  // one constant sequence: definable grid, statistic is exactly zero
  RankedPairs one_constant = preprocess(PairedStats{{1, 2, 3}, {4, 4, 4}});
  DetectionResult res = dstat_fast(one_constant, Truncation::full(3));
  REQUIRE(res.statistic == 0.0);
  REQUIRE(std::isfinite(res.statistic));
}

TEST_CASE("dstat: denominator positivity on every evaluated cell", "[dstat]") {
  // After excluding the corner, S1*S2 lies in [1/p^2, 1) so the denominator
  // S1*S2*(1 - S1*S2) is strictly positive.
  Rng rng(41);
  for (int rep = 0; rep < 15; ++rep) {
    const std::size_t p = 2 + rng.below(40);
    PairedStats pairs = random_pairs(rng, p, rep % 2 == 0);
    RankedPairs r = preprocess(pairs);
    const std::int32_t d1 = r.seq1.distinct_count();
    const std::int32_t d2 = r.seq2.distinct_count();
    if (d1 == 1 && d2 == 1) continue;
    const double inv_p = 1.0 / static_cast<double>(p);
    const double lower = inv_p * inv_p;
    for (std::int32_t l0 = 0; l0 < d1; ++l0) {
      for (std::int32_t m0 = 0; m0 < d2; ++m0) {
        if (l0 == 0 && m0 == 0) continue;  // the excluded corner
        const double g = (r.seq1.count_ge(l0) * inv_p) * (r.seq2.count_ge(m0) * inv_p);
        REQUIRE(g >= lower);
        REQUIRE(g < 1.0);
        REQUIRE(g - g * g > 0.0);
      }
    }
  }
}

TEST_CASE("dstat: statistic stays finite on tie-heavy inputs", "[dstat]") {
  Rng rng(23);
  for (int rep = 0; rep < 20; ++rep) {
    const std::size_t p = 2 + rng.below(30);
    PairedStats pairs = random_pairs(rng, p, true);
    RankedPairs ranked = preprocess(pairs);
    if (ranked.seq1.distinct_count() == 1 && ranked.seq2.distinct_count() == 1) {
      continue;
    }
    DetectionResult res = dstat_fast(ranked, Truncation::full(p));
    REQUIRE(std::isfinite(res.statistic));
    REQUIRE(res.statistic >= 0.0);
  }
}

TEST_CASE("dstat_oracle: single-point cases against hand evaluation", "[dstat]") {
  auto uniform_surv = [](double t) {
    if (t <= 0.0) return 1.0;
    if (t >= 1.0) return 0.0;
    return 1.0 - t;
  };

  SECTION("point at the median") {
    PairedStats pairs{{0.5}, {0.5}};
    DetectionResult res = dstat_oracle(pairs, uniform_surv, uniform_surv);
    REQUIRE(res.statistic == Catch::Approx(std::sqrt(3.0)).epsilon(1e-12));
    REQUIRE(res.t1_star == 0.5);
    REQUIRE(res.t2_star == 0.5);
  }
  SECTION("point in the upper tail") {
    PairedStats pairs{{0.9}, {0.9}};
    DetectionResult res = dstat_oracle(pairs, uniform_surv, uniform_surv);
    REQUIRE(res.statistic == Catch::Approx(std::sqrt(99.0)).epsilon(1e-9));
  }
  SECTION("invalid survival value") {
    PairedStats pairs{{0.5}, {0.5}};
    auto bad = [](double) { return 1.5; };
    REQUIRE_THROWS_AS(dstat_oracle(pairs, bad, uniform_surv), Error);
  }
}

TEST_CASE("dstat_oracle: agrees with empirical statistic shape on larger input",
          "[dstat]") {
  // With the true marginals supplied, the oracle value at a cell uses the
  // same numerator counts; sanity check it is finite and nonnegative.
  Rng rng(31);
  PairedStats pairs;
  for (int j = 0; j < 40; ++j) {
    pairs.t1.push_back(rng.uniform01());
    pairs.t2.push_back(rng.uniform01());
  }
  auto surv = [](double t) {
    if (t <= 0.0) return 1.0;
    if (t >= 1.0) return 0.0;
    return 1.0 - t;
  };
  DetectionResult res = dstat_oracle(pairs, surv, surv);
  REQUIRE(std::isfinite(res.statistic));
  REQUIRE(res.statistic >= 0.0);
  REQUIRE(res.cells_evaluated > 0);
}
