#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "simsig/errors.hpp"

namespace simsig {

/// Two index-paired sequences of test statistics of equal length p.
struct PairedStats {
  std::vector<double> t1;
  std::vector<double> t2;

  std::size_t size() const { return t1.size(); }
};

inline void validate_pairs(const PairedStats& pairs, std::size_t min_points = 2) {
  if (pairs.t1.size() != pairs.t2.size()) {
    throw_error(ErrorKind::invalid_config,
                "paired sequences have different lengths (" +
                    std::to_string(pairs.t1.size()) + " vs " +
                    std::to_string(pairs.t2.size()) + ")");
  }
  if (pairs.size() < min_points) {
    throw_error(ErrorKind::too_few_points,
                "need at least " + std::to_string(min_points) +
                    " paired points, got " + std::to_string(pairs.size()));
  }
  for (int k = 0; k < 2; ++k) {
    const auto& t = (k == 0) ? pairs.t1 : pairs.t2;
    for (std::size_t j = 0; j < t.size(); ++j) {
      if (!std::isfinite(t[j])) {
        throw_error(ErrorKind::non_finite_value,
                    "non-finite value in t" + std::to_string(k + 1) +
                        " at index " + std::to_string(j));
      }
    }
  }
}

/// Rank preprocessing of one sequence: sorting permutation, max-ranks,
/// deduplicated order statistics and the run structure over the sorted order.
struct SequenceRanks {
  std::vector<std::int32_t> order;    // 0-based indices, ascending by value (ties by index)
  std::vector<std::int32_t> rank;     // 1-based, max-rank convention under ties
  std::vector<double> distinct;       // deduplicated ascending values
  std::vector<std::int32_t> dindex;   // per point: 0-based index into `distinct`
  std::vector<std::int32_t> start;    // first sorted position of each distinct value; start[d] = p

  std::int32_t distinct_count() const {
    return static_cast<std::int32_t>(distinct.size());
  }

  /// #\{j : value_j >= distinct[i]\}; survival counts use the >= convention.
  std::int32_t count_ge(std::int32_t i) const {
    return static_cast<std::int32_t>(dindex.size()) - start[i];
  }
};

inline SequenceRanks rank_sequence(const std::vector<double>& values) {
  const std::size_t p = values.size();
  SequenceRanks r;
  r.order.resize(p);
  for (std::size_t i = 0; i < p; ++i) r.order[i] = static_cast<std::int32_t>(i);
  std::sort(r.order.begin(), r.order.end(), [&](std::int32_t a, std::int32_t b) {
    if (values[a] != values[b]) return values[a] < values[b];
    return a < b;
  });

  r.rank.resize(p);
  r.dindex.resize(p);
  r.distinct.reserve(p);
  r.start.reserve(p + 1);
  std::size_t i = 0;
  while (i < p) {
    std::size_t j = i;
    const double v = values[r.order[i]];
    while (j < p && values[r.order[j]] == v) ++j;
    r.start.push_back(static_cast<std::int32_t>(i));
    const auto didx = static_cast<std::int32_t>(r.distinct.size());
    r.distinct.push_back(v);
    for (std::size_t s = i; s < j; ++s) {
      r.rank[r.order[s]] = static_cast<std::int32_t>(j);  // max rank within the tie run
      r.dindex[r.order[s]] = didx;
    }
    i = j;
  }
  r.start.push_back(static_cast<std::int32_t>(p));
  return r;
}

/// Ranked view of a pair of sequences; owns a copy of the source data.
struct RankedPairs {
  PairedStats source;
  SequenceRanks seq1;
  SequenceRanks seq2;

  std::size_t size() const { return source.size(); }
};

inline RankedPairs preprocess(PairedStats pairs) {
  validate_pairs(pairs);
  RankedPairs ranked;
  ranked.seq1 = rank_sequence(pairs.t1);
  ranked.seq2 = rank_sequence(pairs.t2);
  ranked.source = std::move(pairs);
  return ranked;
}

}  // namespace simsig
