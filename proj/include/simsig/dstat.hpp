#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "simsig/errors.hpp"
#include "simsig/pairs.hpp"

// Supremum-type dependence statistic over the grid of paired order
// statistics. The empirical survival functions are step functions with the
// >= convention, constant between consecutive distinct values, so the
// supremum over the continuous threshold rectangle is attained on the grid
// of distinct value pairs; the single cell where S1*S2 = 1 (both thresholds
// at their sequence minima) is excluded. Three routes are provided:
//
//   dstat_naive  - direct double loop over the grid, recounting dominated
//                  points per cell; the correctness oracle.
//   dstat_fast   - one descending sweep over t1 order statistics maintaining
//                  dominance counts over t2 ranks; bit-identical to the
//                  naive route on every input.
//   dstat_oracle - known-marginals variant evaluated at data thresholds and
//                  one-sided right limits.

namespace simsig {

/// Restricts the grid to the top m1 x m2 distinct order statistics.
/// At worst this yields a conservative statistic (max over a subset).
struct Truncation {
  std::int32_t m1 = 0;
  std::int32_t m2 = 0;

  static Truncation full(std::size_t p) {
    return {static_cast<std::int32_t>(p), static_cast<std::int32_t>(p)};
  }
  /// m1 = m2 = min(p, 1000).
  static Truncation defaults(std::size_t p) {
    auto m = static_cast<std::int32_t>(std::min<std::size_t>(p, 1000));
    return {m, m};
  }
};

inline void validate_truncation(const Truncation& t, std::size_t p) {
  if (t.m1 < 1 || t.m2 < 1 || static_cast<std::size_t>(t.m1) > p ||
      static_cast<std::size_t>(t.m2) > p) {
    throw_error(ErrorKind::invalid_config,
                "truncation (" + std::to_string(t.m1) + ", " +
                    std::to_string(t.m2) + ") out of range [1, " +
                    std::to_string(p) + "]");
  }
}

struct GridCell {
  std::int32_t l = 0;  // 1-based index into distinct t1 order statistics
  std::int32_t m = 0;  // 1-based index into distinct t2 order statistics

  bool operator==(const GridCell& o) const { return l == o.l && m == o.m; }
};

struct DetectionResult {
  double statistic = 0.0;
  GridCell argmax_cell;
  double t1_star = 0.0;
  double t2_star = 0.0;
  Truncation truncation;
  std::uint64_t cells_evaluated = 0;
};

namespace detail {

// All grid routes funnel through these two helpers so their floating-point
// results agree bit-for-bit.
inline double cell_key(std::int64_t n12, double s1, double s2, double inv_p) {
  const double s12 = static_cast<double>(n12) * inv_p;
  const double g = s1 * s2;
  const double num = s12 - g;
  const double den = g - g * g;
  return (num * num) / den;
}

inline double statistic_from_key(std::size_t p, double key) {
  return std::sqrt(static_cast<double>(p) * key);
}

// Argmax tie-break: smallest l, then smallest m, on exact key equality.
// Order-independent, so sweep direction (and any internal parallelism over
// l-slices) cannot change the result.
inline bool cell_beats(double key, std::int32_t l0, std::int32_t m0, double best_key,
                       std::int32_t best_l0, std::int32_t best_m0) {
  if (key != best_key) return key > best_key;
  if (l0 != best_l0) return l0 < best_l0;
  return m0 < best_m0;
}

}  // namespace detail

/// Reference implementation: O(p * m1 * m2), recounting the joint survival
/// per cell directly from the raw values.
inline DetectionResult dstat_naive(const RankedPairs& ranked, Truncation trunc) {
  const std::size_t p = ranked.size();
  validate_truncation(trunc, p);
  const double inv_p = 1.0 / static_cast<double>(p);
  const std::int32_t d1 = ranked.seq1.distinct_count();
  const std::int32_t d2 = ranked.seq2.distinct_count();
  const std::int32_t lo1 = d1 - std::min(trunc.m1, d1);
  const std::int32_t lo2 = d2 - std::min(trunc.m2, d2);

  double best_key = -1.0;
  std::int32_t best_l0 = -1, best_m0 = -1;
  std::uint64_t cells = 0;

  for (std::int32_t l0 = lo1; l0 < d1; ++l0) {
    const double u = ranked.seq1.distinct[l0];
    const double s1 = static_cast<double>(ranked.seq1.count_ge(l0)) * inv_p;
    for (std::int32_t m0 = lo2; m0 < d2; ++m0) {
      if (l0 == 0 && m0 == 0) continue;  // S1*S2 = 1, the excluded corner
      const double w = ranked.seq2.distinct[m0];
      std::int64_t n12 = 0;
      for (std::size_t j = 0; j < p; ++j) {
        if (ranked.source.t1[j] >= u && ranked.source.t2[j] >= w) ++n12;
      }
      const double s2 = static_cast<double>(ranked.seq2.count_ge(m0)) * inv_p;
      const double key = detail::cell_key(n12, s1, s2, inv_p);
      ++cells;
      if (detail::cell_beats(key, l0, m0, best_key, best_l0, best_m0)) {
        best_key = key;
        best_l0 = l0;
        best_m0 = m0;
      }
    }
  }

  if (cells == 0) {
    throw_error(ErrorKind::degenerate_input,
                "every grid cell is excluded (all values identical in both sequences)");
  }

  DetectionResult res;
  res.statistic = detail::statistic_from_key(p, best_key);
  res.argmax_cell = {best_l0 + 1, best_m0 + 1};
  res.t1_star = ranked.seq1.distinct[best_l0];
  res.t2_star = ranked.seq2.distinct[best_m0];
  res.truncation = trunc;
  res.cells_evaluated = cells;
  return res;
}

/// Sweep engine for the fast route. Precomputes the per-axis survival
/// structure once; each call to `compute` evaluates the statistic for one
/// pairing of the (fixed) t1 multiset against the (fixed) t2 multiset, which
/// is what permutation replicates vary. Per-thread scratch lives in
/// Workspace so concurrent replicates can share one engine.
class DhatEngine {
 public:
  struct Workspace {
    std::vector<std::int32_t> count2;    // dominance counts per t2 distinct rank
    std::vector<std::int32_t> touched;   // ranks inserted this round, for cheap reset
  };

  struct Outcome {
    double key = -1.0;
    std::int32_t l0 = -1;
    std::int32_t m0 = -1;
    std::uint64_t cells = 0;
    bool stopped_early = false;
  };

  DhatEngine(const RankedPairs& ranked, Truncation trunc)
      : ranked_(ranked), trunc_(trunc) {
    const std::size_t p = ranked.size();
    validate_truncation(trunc, p);
    inv_p_ = 1.0 / static_cast<double>(p);
    d1_ = ranked.seq1.distinct_count();
    d2_ = ranked.seq2.distinct_count();
    lo1_ = d1_ - std::min(trunc.m1, d1_);
    lo2_ = d2_ - std::min(trunc.m2, d2_);
    surv1_.resize(d1_ - lo1_);
    for (std::int32_t l0 = lo1_; l0 < d1_; ++l0) {
      surv1_[l0 - lo1_] = static_cast<double>(ranked.seq1.count_ge(l0)) * inv_p_;
    }
    surv2_.resize(d2_ - lo2_);
    for (std::int32_t m0 = lo2_; m0 < d2_; ++m0) {
      surv2_[m0 - lo2_] = static_cast<double>(ranked.seq2.count_ge(m0)) * inv_p_;
    }
    cells_total_ = static_cast<std::uint64_t>(d1_ - lo1_) *
                   static_cast<std::uint64_t>(d2_ - lo2_);
    if (lo1_ == 0 && lo2_ == 0) --cells_total_;  // excluded corner
    first_slot_ = ranked.seq1.start[lo1_];
  }

  /// First t1-sorted slot inside the evaluation window; `slot_r2` in
  /// `compute` is only consulted for slots in [first_slot(), p).
  std::int32_t first_slot() const { return first_slot_; }
  std::uint64_t cells_total() const { return cells_total_; }
  const Truncation& truncation() const { return trunc_; }

  void init_workspace(Workspace& ws) const {
    ws.count2.assign(d2_, 0);
    ws.touched.clear();
    ws.touched.reserve(static_cast<std::size_t>(ranked_.size()) - first_slot_);
  }

  /// slot_r2(s) must return the 0-based distinct-t2 index paired with the
  /// point occupying t1-sorted slot s under the current pairing.
  /// If `stop_key` is finite, returns as soon as a cell reaches it (the
  /// caller only needs the exceedance indicator, not the full maximum).
  template <typename SlotR2>
  Outcome compute(Workspace& ws, SlotR2&& slot_r2,
                  double stop_key = std::numeric_limits<double>::infinity()) const {
    if (ws.count2.size() != static_cast<std::size_t>(d2_)) init_workspace(ws);

    Outcome out;
    const std::int32_t* start1 = ranked_.seq1.start.data();
    std::int32_t* count2 = ws.count2.data();
    const double* surv2 = surv2_.data();

    for (std::int32_t l0 = d1_ - 1; l0 >= lo1_; --l0) {
      for (std::int32_t s = start1[l0]; s < start1[l0 + 1]; ++s) {
        const std::int32_t r2 = slot_r2(s);
        if (r2 >= lo2_) {
          ++count2[r2];
          ws.touched.push_back(r2);
        }
      }
      const double s1 = surv1_[l0 - lo1_];
      const std::int32_t m_stop = (l0 == 0 && lo2_ == 0) ? 1 : lo2_;
      std::int64_t suffix = 0;
      double row_best = -1.0;
      std::int32_t row_best_m0 = -1;
      for (std::int32_t m0 = d2_ - 1; m0 >= m_stop; --m0) {
        suffix += count2[m0];
        const double key = detail::cell_key(suffix, s1, surv2[m0 - lo2_], inv_p_);
        // Within a row the tie-break wants the smallest m, so >= replaces.
        if (key >= row_best) {
          row_best = key;
          row_best_m0 = m0;
        }
      }
      if (row_best_m0 >= 0 &&
          detail::cell_beats(row_best, l0, row_best_m0, out.key, out.l0, out.m0)) {
        out.key = row_best;
        out.l0 = l0;
        out.m0 = row_best_m0;
        if (out.key >= stop_key) {
          out.stopped_early = true;
          break;
        }
      }
    }

    // Reset only the touched entries so repeated calls stay O(window).
    for (std::int32_t r : ws.touched) count2[r] = 0;
    ws.touched.clear();

    out.cells = cells_total_;
    return out;
  }

  DetectionResult to_result(const Outcome& out) const {
    if (out.l0 < 0) {
      throw_error(ErrorKind::degenerate_input,
                  "every grid cell is excluded (all values identical in both sequences)");
    }
    DetectionResult res;
    res.statistic = detail::statistic_from_key(ranked_.size(), out.key);
    res.argmax_cell = {out.l0 + 1, out.m0 + 1};
    res.t1_star = ranked_.seq1.distinct[out.l0];
    res.t2_star = ranked_.seq2.distinct[out.m0];
    res.truncation = trunc_;
    res.cells_evaluated = out.cells;
    return res;
  }

  /// Pairing of the observed data: slot s holds the point order1[s].
  Outcome compute_observed(Workspace& ws) const {
    const std::int32_t* order1 = ranked_.seq1.order.data();
    const std::int32_t* dindex2 = ranked_.seq2.dindex.data();
    return compute(ws, [=](std::int32_t s) { return dindex2[order1[s]]; });
  }

 private:
  const RankedPairs& ranked_;
  Truncation trunc_;
  double inv_p_ = 0.0;
  std::int32_t d1_ = 0, d2_ = 0, lo1_ = 0, lo2_ = 0;
  std::int32_t first_slot_ = 0;
  std::uint64_t cells_total_ = 0;
  std::vector<double> surv1_;
  std::vector<double> surv2_;
};

/// O(p log p + m1*m2) route; agrees with dstat_naive bit-for-bit
/// (statistic, argmax cell, cell count) on every input.
inline DetectionResult dstat_fast(const RankedPairs& ranked, Truncation trunc) {
  DhatEngine engine(ranked, trunc);
  DhatEngine::Workspace ws;
  engine.init_workspace(ws);
  return engine.to_result(engine.compute_observed(ws));
}

inline DetectionResult dstat_fast(const PairedStats& pairs, Truncation trunc) {
  return dstat_fast(preprocess(pairs), trunc);
}

/// Known-marginals statistic: the numerator keeps the empirical joint
/// survival, the marginals come from user-supplied survival callables. The
/// supremum is approximated on the grid of data thresholds plus one-sided
/// limits just above each data point (nextafter); cells with S1*S2 in
/// {0, 1} are skipped. Accepts p >= 1.
inline DetectionResult dstat_oracle(const PairedStats& pairs,
                                    const std::function<double(double)>& s1,
                                    const std::function<double(double)>& s2) {
  validate_pairs(pairs, 1);
  const std::size_t p = pairs.size();
  const double inv_p = 1.0 / static_cast<double>(p);

  struct Threshold {
    double tau;          // evaluation point (value or nextafter(value))
    std::int32_t index;  // 0-based distinct index of the base value
    double surv;         // marginal survival at tau
  };

  auto build_axis = [](const std::vector<double>& values,
                       const std::function<double(double)>& surv,
                       int axis) {
    std::vector<double> distinct(values);
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    std::vector<Threshold> ts;
    ts.reserve(2 * distinct.size());
    for (std::size_t i = 0; i < distinct.size(); ++i) {
      const double v = distinct[i];
      const double above = std::nextafter(v, std::numeric_limits<double>::infinity());
      for (double tau : {v, above}) {
        const double sv = surv(tau);
        if (!(sv >= 0.0 && sv <= 1.0)) {
          throw_error(ErrorKind::invalid_survival,
                      "survival function " + std::to_string(axis) +
                          " returned " + std::to_string(sv) + " at t=" +
                          std::to_string(tau));
        }
        ts.push_back({tau, static_cast<std::int32_t>(i), sv});
      }
    }
    return std::make_pair(std::move(distinct), std::move(ts));
  };

  auto [distinct1, th1] = build_axis(pairs.t1, s1, 1);
  auto [distinct2, th2] = build_axis(pairs.t2, s2, 2);
  const std::int32_t d2 = static_cast<std::int32_t>(distinct2.size());

  // Points sorted descending by t1, carrying their t2 distinct index.
  std::vector<std::pair<double, std::int32_t>> points(p);
  for (std::size_t j = 0; j < p; ++j) {
    const auto r2 = static_cast<std::int32_t>(
        std::lower_bound(distinct2.begin(), distinct2.end(), pairs.t2[j]) -
        distinct2.begin());
    points[j] = {pairs.t1[j], r2};
  }
  std::sort(points.begin(), points.end(),
            [](const auto& a, const auto& b) { return a.first > b.first; });

  std::vector<std::int64_t> count2(d2, 0);
  std::size_t inserted = 0;

  double best_key = -1.0;
  double best_t1 = 0.0, best_t2 = 0.0;
  std::int32_t best_i1 = -1, best_i2 = -1;
  std::uint64_t cells = 0;

  // th1 descending in tau: for each base value, the above-limit first.
  for (auto i1 = static_cast<std::int64_t>(th1.size()) - 1; i1 >= 0; --i1) {
    const Threshold& a = th1[i1];
    while (inserted < p && points[inserted].first >= a.tau) {
      ++count2[points[inserted].second];
      ++inserted;
    }
    // Walk t2 thresholds descending, keeping the suffix dominance count.
    std::int64_t suffix = 0;
    for (std::int32_t i = d2 - 1; i >= 0; --i) {
      const Threshold& above = th2[2 * i + 1];
      const Threshold& at = th2[2 * i];
      for (const Threshold* b : {&above, &at}) {
        if (b == &at) suffix += count2[i];
        const double u = a.surv * b->surv;
        if (u == 0.0 || u == 1.0) continue;
        const double s12 = static_cast<double>(suffix) * inv_p;
        const double num = s12 - u;
        const double key = (num * num) / (u - u * u);
        ++cells;
        const bool better =
            (key > best_key) ||
            (key == best_key &&
             (a.tau < best_t1 || (a.tau == best_t1 && b->tau < best_t2)));
        if (better) {
          best_key = key;
          best_t1 = a.tau;
          best_t2 = b->tau;
          best_i1 = a.index;
          best_i2 = b->index;
        }
      }
    }
  }

  if (cells == 0) {
    throw_error(ErrorKind::degenerate_input,
                "every oracle evaluation point has S1*S2 in {0, 1}");
  }

  DetectionResult res;
  res.statistic = detail::statistic_from_key(p, best_key);
  res.argmax_cell = {best_i1 + 1, best_i2 + 1};
  res.t1_star = best_t1;
  res.t2_star = best_t2;
  res.truncation = Truncation::full(p);
  res.cells_evaluated = cells;
  return res;
}

}  // namespace simsig
