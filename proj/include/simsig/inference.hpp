#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "simsig/baselines.hpp"
#include "simsig/dstat.hpp"
#include "simsig/errors.hpp"
#include "simsig/pairs.hpp"
#include "simsig/parallel.hpp"
#include "simsig/rng.hpp"

// Inference for H0: eps = pi1*pi2 against the one-sided alternative of
// excess simultaneous signal. Permutation inference is the default; the
// asymptotic tail and the theoretical adaptive threshold are advisory.

namespace simsig {

enum class Scheme {
  full_shuffle,  // independent uniform permutation of t1 indices, t2 fixed
  cyclic_shift,  // random rotation of t1, preserves within-sequence order
};

enum class StatKind { dhat, max_min, spearman };

struct PermutationConfig {
  std::int64_t replicates = 200;  // B
  Scheme scheme = Scheme::full_shuffle;
  std::uint64_t seed = 0;
  Truncation truncation{0, 0};  // {0,0} resolves to Truncation::defaults(p)
  bool keep_replicates = true;
  int threads = 0;  // 0 = hardware concurrency
};

struct PermutationResult {
  DetectionResult observed;
  std::int64_t exceed_count = 0;
  double p_value = 1.0;  // (1 + exceed_count) / (B + 1), exactly
  std::optional<std::vector<double>> replicate_statistics;
  std::uint64_t seed = 0;
  Scheme scheme = Scheme::full_shuffle;
};

namespace detail {

inline Truncation resolve_truncation(Truncation t, std::size_t p) {
  if (t.m1 == 0 && t.m2 == 0) return Truncation::defaults(p);
  return t;
}

inline void validate_permutation_config(const PermutationConfig& cfg, std::size_t p) {
  if (cfg.replicates < 1) {
    throw_error(ErrorKind::invalid_config, "permutation replicates must be >= 1");
  }
  if (cfg.scheme == Scheme::cyclic_shift && p < 3) {
    throw_error(ErrorKind::invalid_config, "cyclic_shift requires p >= 3");
  }
}

}  // namespace detail

/// Permutation p-value for the selected statistic. Replicate l derives its
/// randomness from (seed, l), so replicates run concurrently and the result
/// is identical for identical (pairs, cfg) regardless of thread count.
inline PermutationResult permutation_pvalue(const PairedStats& pairs,
                                            const PermutationConfig& cfg,
                                            StatKind kind = StatKind::dhat) {
  validate_pairs(pairs, kind == StatKind::spearman ? 3 : 2);
  const std::size_t p = pairs.size();
  detail::validate_permutation_config(cfg, p);
  const Truncation trunc = detail::resolve_truncation(cfg.truncation, p);
  const auto B = static_cast<std::size_t>(cfg.replicates);

  PermutationResult result;
  result.seed = cfg.seed;
  result.scheme = cfg.scheme;

  std::vector<std::uint8_t> exceed(B, 0);
  std::vector<double> reps(cfg.keep_replicates ? B : 0);
  const bool cyclic = cfg.scheme == Scheme::cyclic_shift;

  if (kind == StatKind::dhat) {
    const RankedPairs ranked = preprocess(pairs);
    const DhatEngine engine(ranked, trunc);
    DhatEngine::Workspace obs_ws;
    engine.init_workspace(obs_ws);
    const DhatEngine::Outcome obs = engine.compute_observed(obs_ws);
    result.observed = engine.to_result(obs);
    const double obs_stat = result.observed.statistic;
    const std::int32_t* order1 = ranked.seq1.order.data();
    const std::int32_t* dindex2 = ranked.seq2.dindex.data();
    const auto ip = static_cast<std::int32_t>(p);
    const double stop_key =
        cfg.keep_replicates ? std::numeric_limits<double>::infinity() : obs.key;

    struct Scratch {
      DhatEngine::Workspace ws;
      std::vector<std::int32_t> perm;
      bool ready = false;
    };
    std::vector<Scratch> scratch(resolve_threads(cfg.threads));

    parallel_for(
        B,
        [&](std::size_t l, unsigned worker) {
          Scratch& sc = scratch[worker];
          if (!sc.ready) {
            engine.init_workspace(sc.ws);
            sc.ready = true;
          }
          Rng rng(substream(cfg.seed, l));
          DhatEngine::Outcome out;
          if (cyclic) {
            const auto shift = static_cast<std::int32_t>(1 + rng.below(p - 1));
            out = engine.compute(
                sc.ws,
                [=](std::int32_t s) {
                  std::int32_t idx = order1[s] - shift;
                  if (idx < 0) idx += ip;
                  return dindex2[idx];
                },
                stop_key);
          } else {
            rng.permutation(sc.perm, p);
            const std::int32_t* perm = sc.perm.data();
            out = engine.compute(
                sc.ws, [=](std::int32_t s) { return dindex2[perm[order1[s]]]; },
                stop_key);
          }
          if (out.stopped_early) {
            exceed[l] = 1;
          } else {
            const double stat = detail::statistic_from_key(p, out.key);
            exceed[l] = stat >= obs_stat ? 1 : 0;
            if (cfg.keep_replicates) reps[l] = stat;
          }
        },
        cfg.threads);
  } else if (kind == StatKind::max_min) {
    const double obs_stat = max_min_stat(pairs);
    result.observed.statistic = obs_stat;
    result.observed.truncation = trunc;
    const double* t1 = pairs.t1.data();
    const double* t2 = pairs.t2.data();

    std::vector<std::vector<std::int32_t>> perms(resolve_threads(cfg.threads));
    parallel_for(
        B,
        [&](std::size_t l, unsigned worker) {
          Rng rng(substream(cfg.seed, l));
          double stat = -std::numeric_limits<double>::infinity();
          if (cyclic) {
            const std::size_t shift = 1 + rng.below(p - 1);
            for (std::size_t j = 0; j < p; ++j) {
              std::size_t src = j + shift;
              if (src >= p) src -= p;
              stat = std::max(stat, std::min(t1[src], t2[j]));
            }
          } else {
            rng.permutation(perms[worker], p);
            const std::int32_t* perm = perms[worker].data();
            for (std::size_t j = 0; j < p; ++j) {
              stat = std::max(stat, std::min(t1[perm[j]], t2[j]));
            }
          }
          exceed[l] = stat >= obs_stat ? 1 : 0;
          if (cfg.keep_replicates) reps[l] = stat;
        },
        cfg.threads);
  } else {  // spearman
    const std::vector<double> a = midranks(pairs.t1);
    const std::vector<double> b = midranks(pairs.t2);
    const double mean = 0.5 * static_cast<double>(p + 1);
    double saa = 0.0, sbb = 0.0;
    std::vector<double> ac(p), bc(p);
    for (std::size_t j = 0; j < p; ++j) {
      ac[j] = a[j] - mean;
      bc[j] = b[j] - mean;
      saa += ac[j] * ac[j];
      sbb += bc[j] * bc[j];
    }
    if (saa == 0.0 || sbb == 0.0) {
      throw_error(ErrorKind::degenerate_input, "spearman: a sequence is constant");
    }
    const double denom = std::sqrt(saa * sbb);
    double sab = 0.0;
    for (std::size_t j = 0; j < p; ++j) sab += ac[j] * bc[j];
    const double obs_stat = sab / denom;
    result.observed.statistic = obs_stat;
    result.observed.truncation = trunc;
    const double* acp = ac.data();
    const double* bcp = bc.data();

    std::vector<std::vector<std::int32_t>> perms(resolve_threads(cfg.threads));
    parallel_for(
        B,
        [&](std::size_t l, unsigned worker) {
          Rng rng(substream(cfg.seed, l));
          double s = 0.0;
          if (cyclic) {
            const std::size_t shift = 1 + rng.below(p - 1);
            for (std::size_t j = 0; j < p; ++j) {
              std::size_t src = j + shift;
              if (src >= p) src -= p;
              s += acp[src] * bcp[j];
            }
          } else {
            rng.permutation(perms[worker], p);
            const std::int32_t* perm = perms[worker].data();
            for (std::size_t j = 0; j < p; ++j) s += acp[perm[j]] * bcp[j];
          }
          const double stat = s / denom;
          exceed[l] = stat >= obs_stat ? 1 : 0;
          if (cfg.keep_replicates) reps[l] = stat;
        },
        cfg.threads);
  }

  std::int64_t count = 0;
  for (std::uint8_t e : exceed) count += e;
  result.exceed_count = count;
  result.p_value = static_cast<double>(1 + count) / static_cast<double>(B + 1);
  if (cfg.keep_replicates) result.replicate_statistics = std::move(reps);
  return result;
}

/// Asymptotic tail approximation exp(-dhat^2 / log p) for the oracle limit.
/// Known to converge slowly; advisory output only, permutation inference is
/// the default everywhere.
inline double asymptotic_pvalue(double dhat, std::int64_t p) {
  if (p < 3) {
    throw_error(ErrorKind::invalid_config, "asymptotic_pvalue requires p >= 3");
  }
  if (dhat < 0.0) {
    throw_error(ErrorKind::invalid_config, "asymptotic_pvalue requires dhat >= 0");
  }
  return std::exp(-dhat * dhat / std::log(static_cast<double>(p)));
}

/// Critical value log p * (log log p)^2 + 3 (log log p)^2 (natural logs).
inline double adaptive_threshold(std::int64_t p) {
  if (p < 16) {
    throw_error(ErrorKind::invalid_config, "adaptive test requires p >= 16");
  }
  const double lp = std::log(static_cast<double>(p));
  const double llp2 = std::log(lp) * std::log(lp);
  return lp * llp2 + 3.0 * llp2;
}

inline bool adaptive_reject(double dhat, std::int64_t p) {
  return dhat > adaptive_threshold(p);
}

}  // namespace simsig
