#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "simsig/errors.hpp"
#include "simsig/normal.hpp"
#include "simsig/pairs.hpp"

// Baseline statistics the dependence test is compared against: the max-min
// test, Spearman rank correlation, and the single-sequence higher criticism
// statistic.

namespace simsig {

/// max_j min(t1_j, t2_j).
inline double max_min_stat(const PairedStats& pairs) {
  validate_pairs(pairs, 1);
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < pairs.size(); ++j) {
    best = std::max(best, std::min(pairs.t1[j], pairs.t2[j]));
  }
  return best;
}

/// Midranks (1-based, ties averaged). Mean is always (p+1)/2.
inline std::vector<double> midranks(const std::vector<double>& values) {
  const SequenceRanks r = rank_sequence(values);
  std::vector<double> mid(values.size());
  for (std::int32_t i = 0; i < r.distinct_count(); ++i) {
    // positions start[i]..start[i+1]-1 (0-based); average 1-based position
    const double avg = 0.5 * static_cast<double>(r.start[i] + r.start[i + 1] + 1);
    for (std::int32_t s = r.start[i]; s < r.start[i + 1]; ++s) {
      mid[r.order[s]] = avg;
    }
  }
  return mid;
}

struct SpearmanResult {
  double rho = 0.0;
  double p_one_sided = 1.0;  // for the alternative rho > 0
};

/// Rank correlation with the large-sample normal approximation
/// z = rho * sqrt(p - 1) for the one-sided p-value.
inline SpearmanResult spearman_test(const PairedStats& pairs) {
  validate_pairs(pairs, 3);
  const std::size_t p = pairs.size();
  const std::vector<double> a = midranks(pairs.t1);
  const std::vector<double> b = midranks(pairs.t2);
  const double mean = 0.5 * static_cast<double>(p + 1);
  double saa = 0.0, sbb = 0.0, sab = 0.0;
  for (std::size_t j = 0; j < p; ++j) {
    const double da = a[j] - mean;
    const double db = b[j] - mean;
    saa += da * da;
    sbb += db * db;
    sab += da * db;
  }
  if (saa == 0.0 || sbb == 0.0) {
    throw_error(ErrorKind::degenerate_input,
                "spearman_test: a sequence is constant");
  }
  SpearmanResult res;
  res.rho = sab / std::sqrt(saa * sbb);
  res.p_one_sided = norm_sf(res.rho * std::sqrt(static_cast<double>(p - 1)));
  return res;
}

struct HcResult {
  double value = 0.0;
  bool restricted_empty = false;  // no ordered p-value was <= 1/2
};

/// Higher criticism over ordered p-values restricted to p_(j) <= 1/2.
/// Inputs are clamped to [1e-15, 1 - 1e-15] first. If the restriction is
/// empty the j = 1 term is returned with the flag set.
inline HcResult hc_stat(std::vector<double> pvalues) {
  if (pvalues.empty()) {
    throw_error(ErrorKind::invalid_config, "hc_stat: empty p-value array");
  }
  const std::size_t n = pvalues.size();
  for (double& q : pvalues) q = std::clamp(q, 1e-15, 1.0 - 1e-15);
  std::sort(pvalues.begin(), pvalues.end());

  const double sqrt_n = std::sqrt(static_cast<double>(n));
  auto term = [&](std::size_t j) {  // j is 1-based
    const double q = pvalues[j - 1];
    return sqrt_n * (static_cast<double>(j) / static_cast<double>(n) - q) /
           std::sqrt(q * (1.0 - q));
  };

  HcResult res;
  bool any = false;
  for (std::size_t j = 1; j <= n && pvalues[j - 1] <= 0.5; ++j) {
    const double v = term(j);
    if (!any || v > res.value) res.value = v;
    any = true;
  }
  if (!any) {
    res.value = term(1);
    res.restricted_empty = true;
  }
  return res;
}

}  // namespace simsig
