#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "simsig/baselines.hpp"
#include "simsig/boundary.hpp"
#include "simsig/errors.hpp"
#include "simsig/inference.hpp"
#include "simsig/pairs.hpp"
#include "simsig/parallel.hpp"
#include "simsig/rng.hpp"

// Data generation under the two-group mixture model with fixed-effect latent
// assignment, plus experiment runners that estimate type I error and power
// for the dependence statistic and its baselines.

namespace simsig {

enum class Hypothesis { h0, ha };

struct CalibrationCounts {
  double pi1 = 0.0;
  double pi2 = 0.0;
  double eps = 0.0;
  std::int64_t n1 = 0;
  std::int64_t n2 = 0;
  std::int64_t n12 = 0;
};

/// pi_k = p^-beta_k, eps = pi1*pi2 + p^-beta, with nearest-integer counts
/// n_k = round(p^(1-beta_k)) and n12 = round(p^(1-beta)).
inline CalibrationCounts calibrate(std::int64_t p, double beta, double beta1,
                                   double beta2) {
  Calibration c{p, beta, beta1, beta2, 0.0, 0.0};
  validate_calibration(c);
  const auto dp = static_cast<double>(p);
  CalibrationCounts out;
  out.pi1 = std::pow(dp, -beta1);
  out.pi2 = std::pow(dp, -beta2);
  out.eps = out.pi1 * out.pi2 + std::pow(dp, -beta);
  out.n1 = std::llround(std::pow(dp, 1.0 - beta1));
  out.n2 = std::llround(std::pow(dp, 1.0 - beta2));
  out.n12 = std::llround(std::pow(dp, 1.0 - beta));
  return out;
}

/// Latent non-null indicators, drawn once per experiment and then fixed.
struct LatentAssignment {
  std::vector<std::uint8_t> i1;
  std::vector<std::uint8_t> i2;
  std::int64_t n1 = 0;
  std::int64_t n2 = 0;
  std::int64_t n12 = 0;
  std::uint64_t seed = 0;
};

namespace detail {

// First k entries of a partial Fisher-Yates shuffle of `pool`.
inline void draw_prefix(std::vector<std::int32_t>& pool, std::int64_t k, Rng& rng) {
  const auto n = static_cast<std::int64_t>(pool.size());
  for (std::int64_t i = 0; i < k; ++i) {
    const auto j = i + static_cast<std::int64_t>(rng.below(n - i));
    std::swap(pool[i], pool[j]);
  }
}

}  // namespace detail

/// Under H_A, n12 designated indices are simultaneously non-null and the
/// remaining non-nulls are placed uniformly and independently per sequence
/// (chance overlap allowed). Under H0 the two sequences are assigned
/// independently and n12 is ignored.
inline LatentAssignment assign_latent(std::int64_t p, std::int64_t n1,
                                      std::int64_t n2, std::int64_t n12,
                                      Hypothesis hypothesis, std::uint64_t seed) {
  if (p < 1 || n1 < 0 || n2 < 0 || n1 > p || n2 > p) {
    throw_error(ErrorKind::count_overflow,
                "signal counts out of range: n1=" + std::to_string(n1) +
                    " n2=" + std::to_string(n2) + " p=" + std::to_string(p));
  }
  if (hypothesis == Hypothesis::ha && (n12 < 0 || n12 > std::min(n1, n2))) {
    throw_error(ErrorKind::count_overflow,
                "n12=" + std::to_string(n12) + " exceeds min(n1, n2)");
  }

  LatentAssignment a;
  a.n1 = n1;
  a.n2 = n2;
  a.n12 = (hypothesis == Hypothesis::ha) ? n12 : 0;
  a.seed = seed;
  a.i1.assign(p, 0);
  a.i2.assign(p, 0);

  Rng rng(substream(seed, 0, 0xA551u));
  std::vector<std::int32_t> pool(p);
  for (std::int64_t j = 0; j < p; ++j) pool[j] = static_cast<std::int32_t>(j);

  if (hypothesis == Hypothesis::ha) {
    detail::draw_prefix(pool, n12, rng);
    for (std::int64_t i = 0; i < n12; ++i) {
      a.i1[pool[i]] = 1;
      a.i2[pool[i]] = 1;
    }
    std::vector<std::int32_t> rest(pool.begin() + n12, pool.end());
    std::vector<std::int32_t> rest2 = rest;
    detail::draw_prefix(rest, n1 - n12, rng);
    for (std::int64_t i = 0; i < n1 - n12; ++i) a.i1[rest[i]] = 1;
    detail::draw_prefix(rest2, n2 - n12, rng);
    for (std::int64_t i = 0; i < n2 - n12; ++i) a.i2[rest2[i]] = 1;
  } else {
    detail::draw_prefix(pool, n1, rng);
    for (std::int64_t i = 0; i < n1; ++i) a.i1[pool[i]] = 1;
    std::vector<std::int32_t> pool2(p);
    for (std::int64_t j = 0; j < p; ++j) pool2[j] = static_cast<std::int32_t>(j);
    detail::draw_prefix(pool2, n2, rng);
    for (std::int64_t i = 0; i < n2; ++i) a.i2[pool2[i]] = 1;
  }
  return a;
}

/// Realized number of features non-null in both sequences.
inline std::int64_t assignment_overlap(const LatentAssignment& a) {
  std::int64_t s = 0;
  for (std::size_t j = 0; j < a.i1.size(); ++j) s += a.i1[j] & a.i2[j];
  return s;
}

struct Dist {
  enum class Kind { normal, folded_normal };
  Kind kind = Kind::folded_normal;
  double mu = 0.0;
  double sigma = 1.0;

  double sample(Rng& rng) const {
    const double z = mu + sigma * rng.normal();
    return kind == Kind::folded_normal ? std::fabs(z) : z;
  }
};

/// Mixture for one sequence. Empty per-feature arrays mean the homogeneous
/// alternative `alt_dist`; otherwise feature j uses (alt_mu[j], alt_sigma[j])
/// with alt_dist's kind.
struct SeqMixture {
  Dist null_dist;
  Dist alt_dist;
  std::vector<double> alt_mu;
  std::vector<double> alt_sigma;
};

struct MixtureSpec {
  SeqMixture seq1;
  SeqMixture seq2;
};

namespace detail {

inline void validate_dist(const Dist& d, const char* what) {
  if (!std::isfinite(d.mu) || !std::isfinite(d.sigma) || d.sigma <= 0.0) {
    throw_error(ErrorKind::invalid_config,
                std::string(what) + ": distribution parameters must be finite with sigma > 0");
  }
}

inline void validate_seq_mixture(const SeqMixture& m, std::size_t p, const char* what) {
  validate_dist(m.null_dist, what);
  validate_dist(m.alt_dist, what);
  if (m.alt_mu.size() != m.alt_sigma.size()) {
    throw_error(ErrorKind::invalid_config,
                std::string(what) + ": per-feature mu/sigma arrays differ in length");
  }
  if (!m.alt_mu.empty() && m.alt_mu.size() != p) {
    throw_error(ErrorKind::invalid_config,
                std::string(what) + ": per-feature arrays must have length p");
  }
  for (std::size_t j = 0; j < m.alt_mu.size(); ++j) {
    if (!std::isfinite(m.alt_mu[j]) || !std::isfinite(m.alt_sigma[j]) ||
        m.alt_sigma[j] <= 0.0) {
      throw_error(ErrorKind::invalid_config,
                  std::string(what) + ": bad per-feature parameters at index " +
                      std::to_string(j));
    }
  }
}

inline void sample_sequence(const SeqMixture& m, const std::vector<std::uint8_t>& ind,
                            Rng& rng, std::vector<double>& out) {
  const std::size_t p = ind.size();
  out.resize(p);
  const bool per_feature = !m.alt_mu.empty();
  for (std::size_t j = 0; j < p; ++j) {
    if (!ind[j]) {
      out[j] = m.null_dist.sample(rng);
    } else if (per_feature) {
      Dist d{m.alt_dist.kind, m.alt_mu[j], m.alt_sigma[j]};
      out[j] = d.sample(rng);
    } else {
      out[j] = m.alt_dist.sample(rng);
    }
  }
}

}  // namespace detail

/// Conditional on the indicators, the two sequences are drawn independently.
inline PairedStats sample_pairs(const LatentAssignment& assign,
                                const MixtureSpec& spec, std::uint64_t seed) {
  const std::size_t p = assign.i1.size();
  if (assign.i2.size() != p) {
    throw_error(ErrorKind::invalid_config, "assignment indicator arrays differ in length");
  }
  detail::validate_seq_mixture(spec.seq1, p, "seq1 mixture");
  detail::validate_seq_mixture(spec.seq2, p, "seq2 mixture");
  PairedStats pairs;
  Rng rng1(substream(seed, 1, 0x5EEDu));
  Rng rng2(substream(seed, 2, 0x5EEDu));
  detail::sample_sequence(spec.seq1, assign.i1, rng1, pairs.t1);
  detail::sample_sequence(spec.seq2, assign.i2, rng2, pairs.t2);
  return pairs;
}

/// Stationary AR(1) latent normals, lag-1 correlation `rho`.
inline std::vector<double> ar1_latent(std::size_t p, double rho, Rng& rng) {
  if (!(rho >= 0.0 && rho < 1.0)) {
    throw_error(ErrorKind::invalid_config, "ar1 correlation must lie in [0, 1)");
  }
  std::vector<double> z(p);
  if (p == 0) return z;
  const double innov = std::sqrt(1.0 - rho * rho);
  z[0] = rng.normal();
  for (std::size_t j = 1; j < p; ++j) z[j] = rho * z[j - 1] + innov * rng.normal();
  return z;
}

/// Serially correlated null statistics: folded stationary AR(1) normals,
/// independently per sequence. Synthetic stand-in for dependent-test
/// robustness runs.
inline PairedStats correlated_null_pairs(std::size_t p, double rho,
                                         std::uint64_t seed) {
  PairedStats pairs;
  Rng rng1(substream(seed, 1, 0xA21Du));
  Rng rng2(substream(seed, 2, 0xA21Du));
  pairs.t1 = ar1_latent(p, rho, rng1);
  pairs.t2 = ar1_latent(p, rho, rng2);
  for (double& v : pairs.t1) v = std::fabs(v);
  for (double& v : pairs.t2) v = std::fabs(v);
  return pairs;
}

/// Heterogeneous alternative of the independent-test experiments:
/// mu_kj ~ N(2.5, 1), sigma_kj^2 ~ Gamma(shape 2, scale 1), folded normals.
/// Drawn once here so they stay fixed across replicates.
inline MixtureSpec heterogeneous_mixture(std::size_t p, std::uint64_t seed) {
  MixtureSpec spec;
  for (int k = 1; k <= 2; ++k) {
    SeqMixture& m = (k == 1) ? spec.seq1 : spec.seq2;
    m.null_dist = {Dist::Kind::folded_normal, 0.0, 1.0};
    m.alt_dist = {Dist::Kind::folded_normal, 2.5, 1.0};
    Rng rng(substream(seed, static_cast<std::uint64_t>(k), 0x9A7Au));
    m.alt_mu.resize(p);
    m.alt_sigma.resize(p);
    for (std::size_t j = 0; j < p; ++j) m.alt_mu[j] = 2.5 + rng.normal();
    for (std::size_t j = 0; j < p; ++j) m.alt_sigma[j] = std::sqrt(rng.gamma_int_shape(2));
  }
  return spec;
}

enum class Method { dhat, max_min, spearman, hc };

inline const char* method_name(Method m) {
  switch (m) {
    case Method::dhat: return "dhat";
    case Method::max_min: return "max";
    case Method::spearman: return "spearman";
    case Method::hc: return "hc";
  }
  return "?";
}

struct ExperimentConfig {
  std::int64_t p = 1000;
  int replicates = 400;  // R
  double alpha = 0.05;
  Hypothesis hypothesis = Hypothesis::h0;
  std::int64_t n1 = 0;
  std::int64_t n2 = 0;
  std::int64_t n12 = 0;
  MixtureSpec mixture;
  std::vector<Method> methods{Method::dhat};
  PermutationConfig perm;              // B, scheme, truncation; seed is derived per replicate
  std::uint64_t seed = 1;
  std::optional<double> ar1_rho;       // replaces the mixture with correlated nulls
  int threads = 0;
  int hc_null_reps = 200;
};

struct MethodOutcome {
  Method method = Method::dhat;
  std::int64_t rejections = 0;
  double rate = 0.0;
  double mc_se = 0.0;
};

struct ExperimentReport {
  std::int64_t p = 0;
  int replicates = 0;
  double alpha = 0.0;
  Hypothesis hypothesis = Hypothesis::h0;
  std::int64_t n1 = 0, n2 = 0, n12 = 0;
  std::int64_t indicator_overlap = 0;  // realized sum(i1 * i2) of the fixed draw
  std::uint64_t seed = 0;
  std::int64_t perm_replicates = 0;
  Scheme scheme = Scheme::full_shuffle;
  std::vector<MethodOutcome> methods;
  double ms_per_replicate = 0.0;  // filled by callers that time the run
};

/// Fixed-effect experiment: indicators (and any per-feature alternative
/// parameters baked into the mixture) are drawn once; statistics are
/// resampled per replicate; each method is applied at level alpha.
/// Deterministic given the master seed, independent of thread count.
inline ExperimentReport run_experiment(const ExperimentConfig& cfg) {
  if (cfg.replicates < 1) {
    throw_error(ErrorKind::invalid_config, "experiment needs replicates >= 1");
  }
  if (!(cfg.alpha > 0.0 && cfg.alpha < 1.0)) {
    throw_error(ErrorKind::invalid_config, "alpha must lie in (0, 1)");
  }
  if (cfg.methods.empty()) {
    throw_error(ErrorKind::invalid_config, "experiment needs at least one method");
  }
  const auto R = static_cast<std::size_t>(cfg.replicates);
  const std::size_t n_methods = cfg.methods.size();

  LatentAssignment assign;
  if (!cfg.ar1_rho) {
    assign = assign_latent(cfg.p, cfg.n1, cfg.n2, cfg.n12, cfg.hypothesis,
                           substream(cfg.seed, 0, 0x45516Eu));
  }

  // Null reference sample for higher criticism: HC statistics of p-values
  // from standard normal realizations, shared across replicates.
  std::vector<double> hc_null;
  const bool want_hc =
      std::find(cfg.methods.begin(), cfg.methods.end(), Method::hc) != cfg.methods.end();
  if (want_hc) {
    hc_null.resize(cfg.hc_null_reps);
    parallel_for(
        static_cast<std::size_t>(cfg.hc_null_reps),
        [&](std::size_t i) {
          Rng rng(substream(cfg.seed, i, 0x4C6E11u));
          std::vector<double> q(cfg.p);
          for (auto& v : q) v = two_sided_pvalue(std::fabs(rng.normal()));
          hc_null[i] = hc_stat(std::move(q)).value;
        },
        cfg.threads);
  }

  std::vector<std::uint8_t> reject(R * n_methods, 0);
  parallel_for(
      R,
      [&](std::size_t r) {
        const std::uint64_t rep_seed = substream(cfg.seed, r, 0x2E9u);
        PairedStats pairs =
            cfg.ar1_rho
                ? correlated_null_pairs(cfg.p, *cfg.ar1_rho, rep_seed)
                : sample_pairs(assign, cfg.mixture, rep_seed);
        for (std::size_t mi = 0; mi < n_methods; ++mi) {
          const Method method = cfg.methods[mi];
          double pvalue = 1.0;
          switch (method) {
            case Method::dhat:
            case Method::max_min: {
              PermutationConfig pc = cfg.perm;
              pc.seed = substream(rep_seed, mi, 0x9E12u);
              pc.keep_replicates = false;
              pc.threads = 1;
              const StatKind kind =
                  method == Method::dhat ? StatKind::dhat : StatKind::max_min;
              pvalue = permutation_pvalue(pairs, pc, kind).p_value;
              break;
            }
            case Method::spearman:
              pvalue = spearman_test(pairs).p_one_sided;
              break;
            case Method::hc: {
              std::vector<double> q(pairs.t1.size());
              for (std::size_t j = 0; j < q.size(); ++j) {
                q[j] = two_sided_pvalue(pairs.t1[j]);
              }
              const double obs = hc_stat(std::move(q)).value;
              std::int64_t ge = 0;
              for (double v : hc_null) ge += (v >= obs) ? 1 : 0;
              pvalue = static_cast<double>(1 + ge) /
                       static_cast<double>(hc_null.size() + 1);
              break;
            }
          }
          reject[r * n_methods + mi] = pvalue <= cfg.alpha ? 1 : 0;
        }
      },
      cfg.threads);

  ExperimentReport report;
  report.p = cfg.p;
  report.replicates = cfg.replicates;
  report.alpha = cfg.alpha;
  report.hypothesis = cfg.hypothesis;
  report.n1 = cfg.ar1_rho ? 0 : cfg.n1;
  report.n2 = cfg.ar1_rho ? 0 : cfg.n2;
  report.n12 = cfg.ar1_rho ? 0 : (cfg.hypothesis == Hypothesis::ha ? cfg.n12 : 0);
  if (!cfg.ar1_rho) report.indicator_overlap = assignment_overlap(assign);
  report.seed = cfg.seed;
  report.perm_replicates = cfg.perm.replicates;
  report.scheme = cfg.perm.scheme;
  for (std::size_t mi = 0; mi < n_methods; ++mi) {
    MethodOutcome mo;
    mo.method = cfg.methods[mi];
    for (std::size_t r = 0; r < R; ++r) mo.rejections += reject[r * n_methods + mi];
    mo.rate = static_cast<double>(mo.rejections) / static_cast<double>(R);
    mo.mc_se = std::sqrt(mo.rate * (1.0 - mo.rate) / static_cast<double>(R));
    report.methods.push_back(mo);
  }
  return report;
}

// ---------------------------------------------------------------------------
// Desk-scale presets mirroring the published experiments.

/// Independent-test setting: p = 1000, folded normals with the heterogeneous
/// alternative, (n1, n2) signals, H0 by default (type I error row).
inline ExperimentConfig table1_config(std::int64_t n1, std::int64_t n2,
                                      std::uint64_t seed, int replicates = 400,
                                      std::int64_t B = 200,
                                      Hypothesis hypothesis = Hypothesis::h0,
                                      std::int64_t n12 = 0) {
  ExperimentConfig cfg;
  cfg.p = 1000;
  cfg.replicates = replicates;
  cfg.hypothesis = hypothesis;
  cfg.n1 = n1;
  cfg.n2 = n2;
  cfg.n12 = n12;
  cfg.seed = seed;
  cfg.mixture = heterogeneous_mixture(cfg.p, substream(seed, 0, 0x7A3A95u));
  cfg.methods = {Method::spearman, Method::max_min, Method::dhat};
  cfg.perm.replicates = B;
  cfg.perm.scheme = Scheme::full_shuffle;
  return cfg;
}

/// Single-sequence-detection setting: p = 1e5, beta2 = 0.5 with strong
/// second-sequence signals, beta = max(beta1, beta2) + 0.01, first-sequence
/// strength on the single-sequence boundary r1 = beta1 - 1/2.
inline ExperimentConfig table3_config(double beta1, std::uint64_t seed,
                                      int replicates = 400, std::int64_t B = 200,
                                      Hypothesis hypothesis = Hypothesis::ha) {
  ExperimentConfig cfg;
  cfg.p = 100000;
  cfg.replicates = replicates;
  cfg.hypothesis = hypothesis;
  cfg.seed = seed;
  const double beta2 = 0.5;
  const double beta = std::max(beta1, beta2) + 0.01;
  const CalibrationCounts counts = calibrate(cfg.p, beta, beta1, beta2);
  cfg.n1 = counts.n1;
  cfg.n2 = counts.n2;
  cfg.n12 = counts.n12;
  const double logp = std::log(static_cast<double>(cfg.p));
  cfg.mixture.seq1.null_dist = {Dist::Kind::folded_normal, 0.0, 1.0};
  cfg.mixture.seq1.alt_dist = {Dist::Kind::folded_normal,
                               std::sqrt((2.0 * beta1 - 1.0) * logp), 1.0};
  cfg.mixture.seq2.null_dist = {Dist::Kind::folded_normal, 0.0, 1.0};
  cfg.mixture.seq2.alt_dist = {Dist::Kind::folded_normal, std::sqrt(2.0 * logp), 1.0};
  cfg.methods = {Method::hc, Method::spearman, Method::max_min, Method::dhat};
  cfg.perm.replicates = B;
  cfg.perm.scheme = Scheme::full_shuffle;
  return cfg;
}

/// Serially correlated null robustness run (synthetic stand-in for the
/// dependent-test experiments).
inline ExperimentConfig corrnull_config(double rho, std::uint64_t seed,
                                        int replicates = 400, std::int64_t B = 200) {
  ExperimentConfig cfg;
  cfg.p = 1000;
  cfg.replicates = replicates;
  cfg.hypothesis = Hypothesis::h0;
  cfg.seed = seed;
  cfg.ar1_rho = rho;
  cfg.methods = {Method::dhat};
  cfg.perm.replicates = B;
  cfg.perm.scheme = Scheme::full_shuffle;
  return cfg;
}

}  // namespace simsig
