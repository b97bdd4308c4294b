// Command-line surface for the simsig library.
//
// Subcommands:
//   detect    - dependence test on a two-column TSV of paired statistics
//   simulate  - type I error / power experiments (presets or custom)
//   boundary  - detection-boundary curve export as CSV
//   bench     - timing run of the fast statistic on synthetic input
//
// Exit codes: 0 success, 2 usage error, 65 malformed input, 66 missing
// input file, 70 internal error.
//
// Timing fields (elapsed_ms, ms_per_replicate) are reported as 0 unless
// --timing is given, so identical invocations produce byte-identical output.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "simsig/simsig.hpp"

namespace {

using json = nlohmann::ordered_json;
using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

void write_output(const std::string& out_path, const std::string& content) {
  if (out_path.empty()) {
    std::cout << content;
    return;
  }
  std::ofstream out(out_path);
  if (!out) {
    simsig::throw_error(simsig::ErrorKind::file_not_found,
                        "cannot open output file: " + out_path);
  }
  out << content;
}

// Accepts "0.6", "0.5,0.6,0.7", or "0.5:1.0:0.05".
std::vector<double> parse_value_list(const std::string& text) {
  std::vector<double> values;
  auto parse_one = [](const std::string& s) {
    try {
      std::size_t pos = 0;
      const double v = std::stod(s, &pos);
      if (pos != s.size()) throw std::invalid_argument(s);
      return v;
    } catch (const std::exception&) {
      throw CLI::ValidationError("expected a number, got '" + s + "'");
    }
  };
  if (text.find(':') != std::string::npos) {
    std::vector<double> parts;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ':')) parts.push_back(parse_one(item));
    if (parts.size() != 3 || parts[2] <= 0.0) {
      throw CLI::ValidationError("range must be start:stop:step with step > 0");
    }
    for (double v = parts[0]; v <= parts[1] + 1e-12; v += parts[2]) {
      values.push_back(v);
    }
  } else {
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) values.push_back(parse_one(item));
  }
  if (values.empty()) throw CLI::ValidationError("empty value list");
  return values;
}

std::string format_double(double v, const char* fmt) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), fmt, v);
  return buf;
}

simsig::Truncation resolve_m(std::int64_t m1, std::int64_t m2, std::size_t p) {
  auto clamp = [&](std::int64_t m) {
    return static_cast<std::int32_t>(
        std::min<std::int64_t>(m, static_cast<std::int64_t>(p)));
  };
  return {clamp(m1), clamp(m2)};
}

// ---------------------------------------------------------------------------
// detect

struct DetectArgs {
  std::string input;
  std::string transform = "none";
  std::int64_t perms = 10000;
  std::string scheme = "shuffle";
  std::uint64_t seed = 1;
  std::int64_t m1 = 1000;
  std::int64_t m2 = 1000;
  std::string out;
  int threads = 0;
  bool timing = false;
};

int run_detect(const DetectArgs& args) {
  const auto start = Clock::now();
  const simsig::Transform tr = args.transform == "neglog10"
                                   ? simsig::Transform::neglog10
                                   : simsig::Transform::none;
  const simsig::PairedStats pairs = simsig::read_pairs_tsv_file(args.input, tr);
  const std::size_t p = pairs.size();

  simsig::PermutationConfig cfg;
  cfg.replicates = args.perms;
  cfg.scheme = args.scheme == "cyclic" ? simsig::Scheme::cyclic_shift
                                       : simsig::Scheme::full_shuffle;
  cfg.seed = args.seed;
  cfg.truncation = resolve_m(args.m1, args.m2, p);
  cfg.keep_replicates = false;
  cfg.threads = args.threads;

  const simsig::PermutationResult res =
      simsig::permutation_pvalue(pairs, cfg, simsig::StatKind::dhat);

  json report;
  report["statistic"] = res.observed.statistic;
  report["t1_star"] = res.observed.t1_star;
  report["t2_star"] = res.observed.t2_star;
  report["p_value"] = res.p_value;
  if (p >= 3) {
    report["p_value_asymptotic"] =
        simsig::asymptotic_pvalue(res.observed.statistic, static_cast<std::int64_t>(p));
  } else {
    report["p_value_asymptotic"] = nullptr;
  }
  if (p >= 16) {
    report["adaptive_reject"] =
        simsig::adaptive_reject(res.observed.statistic, static_cast<std::int64_t>(p));
  } else {
    report["adaptive_reject"] = nullptr;
  }
  report["perms"] = args.perms;
  report["scheme"] = args.scheme;
  report["seed"] = args.seed;
  report["m1"] = cfg.truncation.m1;
  report["m2"] = cfg.truncation.m2;
  report["p"] = p;
  report["elapsed_ms"] =
      args.timing ? static_cast<std::int64_t>(ms_since(start)) : 0;

  write_output(args.out, report.dump(2) + "\n");
  return 0;
}

// ---------------------------------------------------------------------------
// simulate

struct SimulateArgs {
  std::string preset;
  std::int64_t p = 1000;
  int reps = 400;
  double alpha = 0.05;
  std::int64_t perms = 200;
  std::string scheme = "shuffle";
  std::int64_t m1 = 0;  // 0 = min(p, 1000)
  std::int64_t m2 = 0;
  std::uint64_t seed = 1;
  std::string hypothesis = "null";
  bool hypothesis_given = false;
  std::vector<double> beta1;  // empty = preset defaults
  double beta2 = 0.5;
  double beta = 0.0;  // 0 = derive as max(beta1, beta2) + 0.01
  std::int64_t n1 = -1;
  std::int64_t n2 = -1;
  std::int64_t n12 = 0;
  std::string methods = "";
  double mu1 = 2.5;
  double mu2 = 2.5;
  double sigma1 = 1.0;
  double sigma2 = 1.0;
  std::string dist = "folded";
  bool hetero = false;
  double rho = 0.5;
  bool use_rho = false;
  std::string format = "json";
  std::string out;
  int threads = 0;
  bool timing = false;
};

struct SettingRun {
  std::string label;
  simsig::ExperimentConfig cfg;
  simsig::ExperimentReport report;
};

std::vector<simsig::Method> parse_methods(const std::string& text) {
  std::vector<simsig::Method> methods;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item == "dhat") {
      methods.push_back(simsig::Method::dhat);
    } else if (item == "max") {
      methods.push_back(simsig::Method::max_min);
    } else if (item == "spearman") {
      methods.push_back(simsig::Method::spearman);
    } else if (item == "hc") {
      methods.push_back(simsig::Method::hc);
    } else {
      throw CLI::ValidationError("unknown method '" + item +
                                 "' (expected dhat, max, spearman, hc)");
    }
  }
  if (methods.empty()) throw CLI::ValidationError("empty method list");
  return methods;
}

int run_simulate(const SimulateArgs& args) {
  const auto start = Clock::now();
  using namespace simsig;
  const Hypothesis hyp = args.hypothesis == "alt" ? Hypothesis::ha : Hypothesis::h0;
  const Scheme scheme =
      args.scheme == "cyclic" ? Scheme::cyclic_shift : Scheme::full_shuffle;

  std::vector<SettingRun> runs;
  if (args.preset == "table1") {
    const std::vector<std::pair<int, int>> settings = {
        {5, 5}, {10, 5}, {15, 5}, {10, 10}, {15, 10}, {15, 15}};
    for (std::size_t i = 0; i < settings.size(); ++i) {
      SettingRun run;
      run.cfg = table1_config(settings[i].first, settings[i].second,
                              substream(args.seed, i, 0x7AB1Eu), args.reps,
                              args.perms, hyp, args.n12);
      run.label = "(" + std::to_string(settings[i].first) + ";" +
                  std::to_string(settings[i].second) + ")";
      runs.push_back(std::move(run));
    }
  } else if (args.preset == "table3") {
    std::vector<double> beta1s = args.beta1;
    if (beta1s.empty()) beta1s = {0.51, 0.6, 0.7};
    // power run unless the user explicitly asks for the null variant
    const Hypothesis h =
        args.hypothesis_given ? hyp : Hypothesis::ha;
    for (std::size_t i = 0; i < beta1s.size(); ++i) {
      SettingRun run;
      run.cfg = table3_config(beta1s[i], substream(args.seed, i, 0x7AB3Eu),
                              args.reps, args.perms, h);
      run.label = "beta1=" + format_double(beta1s[i], "%.4g");
      runs.push_back(std::move(run));
    }
  } else if (args.preset == "corrnull") {
    SettingRun run;
    run.cfg = corrnull_config(args.rho, args.seed, args.reps, args.perms);
    run.label = "rho=" + format_double(args.rho, "%.4g");
    runs.push_back(std::move(run));
  } else if (args.preset.empty()) {
    SettingRun run;
    ExperimentConfig cfg;
    cfg.p = args.p;
    cfg.replicates = args.reps;
    cfg.alpha = args.alpha;
    cfg.hypothesis = hyp;
    cfg.seed = args.seed;
    cfg.perm.replicates = args.perms;
    cfg.perm.scheme = scheme;
    if (args.use_rho) {
      cfg.ar1_rho = args.rho;
      run.label = "rho=" + format_double(args.rho, "%.4g");
    } else {
      if (!args.beta1.empty()) {
        const double b1 = args.beta1.front();
        const double b = args.beta > 0.0 ? args.beta
                                         : std::max(b1, args.beta2) + 0.01;
        const CalibrationCounts counts = calibrate(args.p, b, b1, args.beta2);
        cfg.n1 = counts.n1;
        cfg.n2 = counts.n2;
        cfg.n12 = counts.n12;
        run.label = "beta1=" + format_double(b1, "%.4g");
      } else if (args.n1 >= 0 && args.n2 >= 0) {
        cfg.n1 = args.n1;
        cfg.n2 = args.n2;
        cfg.n12 = args.n12;
        run.label = "(" + std::to_string(args.n1) + ";" +
                    std::to_string(args.n2) + ")";
      } else {
        throw CLI::ValidationError(
            "custom simulate needs either --beta1 [--beta2 --beta] or --n1/--n2");
      }
      const Dist::Kind kind =
          args.dist == "normal" ? Dist::Kind::normal : Dist::Kind::folded_normal;
      if (args.hetero) {
        cfg.mixture = heterogeneous_mixture(args.p, substream(args.seed, 0, 0x7A3A95u));
      } else {
        cfg.mixture.seq1.null_dist = {kind, 0.0, 1.0};
        cfg.mixture.seq1.alt_dist = {kind, args.mu1, args.sigma1};
        cfg.mixture.seq2.null_dist = {kind, 0.0, 1.0};
        cfg.mixture.seq2.alt_dist = {kind, args.mu2, args.sigma2};
      }
    }
    cfg.methods = parse_methods(args.methods.empty() ? "dhat" : args.methods);
    run.cfg = std::move(cfg);
    runs.push_back(std::move(run));
  } else {
    throw CLI::ValidationError("unknown preset '" + args.preset + "'");
  }

  for (SettingRun& run : runs) {
    if (!args.methods.empty()) run.cfg.methods = parse_methods(args.methods);
    if (args.m1 > 0 || args.m2 > 0) {
      run.cfg.perm.truncation =
          resolve_m(args.m1 > 0 ? args.m1 : 1000, args.m2 > 0 ? args.m2 : 1000,
                    static_cast<std::size_t>(run.cfg.p));
    }
    run.cfg.alpha = args.alpha;
    run.cfg.threads = args.threads;
    const auto setting_start = Clock::now();
    run.report = run_experiment(run.cfg);
    if (args.timing) {
      run.report.ms_per_replicate = ms_since(setting_start) / run.cfg.replicates;
    }
  }

  std::string content;
  if (args.format == "csv") {
    std::ostringstream csv;
    csv << "# preset=" << (args.preset.empty() ? "custom" : args.preset)
        << " p=" << runs.front().cfg.p << " reps=" << runs.front().cfg.replicates
        << " perms=" << runs.front().cfg.perm.replicates << " alpha="
        << format_double(runs.front().cfg.alpha, "%.4g") << " scheme="
        << (runs.front().cfg.perm.scheme == Scheme::cyclic_shift ? "cyclic" : "shuffle")
        << " seed=" << args.seed << " hypothesis="
        << (runs.front().cfg.hypothesis == Hypothesis::ha ? "alt" : "null") << "\n";
    csv << "method";
    for (const SettingRun& run : runs) csv << "," << run.label;
    csv << "\n";
    const auto& methods = runs.front().cfg.methods;
    for (std::size_t mi = 0; mi < methods.size(); ++mi) {
      csv << method_name(methods[mi]);
      for (const SettingRun& run : runs) {
        csv << "," << format_double(run.report.methods[mi].rate, "%.4f");
      }
      csv << "\n";
    }
    content = csv.str();
  } else {
    json doc;
    doc["preset"] = args.preset.empty() ? "custom" : args.preset;
    doc["p"] = runs.front().cfg.p;
    doc["replicates"] = runs.front().cfg.replicates;
    doc["alpha"] = runs.front().cfg.alpha;
    doc["perms"] = runs.front().cfg.perm.replicates;
    doc["scheme"] =
        runs.front().cfg.perm.scheme == Scheme::cyclic_shift ? "cyclic" : "shuffle";
    doc["seed"] = args.seed;
    doc["hypothesis"] =
        runs.front().cfg.hypothesis == Hypothesis::ha ? "alt" : "null";
    doc["settings"] = json::array();
    for (const SettingRun& run : runs) {
      json setting;
      setting["label"] = run.label;
      setting["n1"] = run.report.n1;
      setting["n2"] = run.report.n2;
      setting["n12"] = run.report.n12;
      setting["indicator_overlap"] = run.report.indicator_overlap;
      setting["seed"] = run.cfg.seed;
      setting["methods"] = json::array();
      for (const MethodOutcome& mo : run.report.methods) {
        json m;
        m["method"] = method_name(mo.method);
        m["rejections"] = mo.rejections;
        m["rate"] = mo.rate;
        m["mc_se"] = mo.mc_se;
        setting["methods"].push_back(std::move(m));
      }
      setting["ms_per_replicate"] =
          args.timing ? run.report.ms_per_replicate : 0.0;
      doc["settings"].push_back(std::move(setting));
    }
    content = doc.dump(2) + "\n";
  }
  write_output(args.out, content);
  (void)start;
  return 0;
}

// ---------------------------------------------------------------------------
// boundary

struct BoundaryArgs {
  std::string beta1 = "0.5";
  std::string beta2 = "0.5";
  std::string r1 = "0.25";
  std::string r2 = "0.25";
  int res = 512;
  double tol = 1e-4;
  bool single_seq = false;
  std::string beta = "0.51:0.99:0.01";
  std::string out;
};

int run_boundary(const BoundaryArgs& args) {
  std::ostringstream csv;
  if (args.single_seq) {
    csv << "# single-sequence detection boundary\n";
    csv << "beta,r_star\n";
    for (double b : parse_value_list(args.beta)) {
      csv << format_double(b, "%.10g") << ","
          << format_double(simsig::single_seq_boundary(b), "%.6f") << "\n";
    }
  } else {
    csv << "# res=" << args.res << " tol=" << format_double(args.tol, "%g") << "\n";
    csv << "beta1,beta2,r1,r2,beta_star\n";
    for (double b1 : parse_value_list(args.beta1)) {
      for (double b2 : parse_value_list(args.beta2)) {
        for (double r1 : parse_value_list(args.r1)) {
          for (double r2 : parse_value_list(args.r2)) {
            const double bstar =
                simsig::boundary_beta(b1, b2, r1, r2, args.tol, args.res);
            csv << format_double(b1, "%.10g") << "," << format_double(b2, "%.10g")
                << "," << format_double(r1, "%.10g") << ","
                << format_double(r2, "%.10g") << ","
                << format_double(bstar, "%.6f") << "\n";
          }
        }
      }
    }
  }
  write_output(args.out, csv.str());
  return 0;
}

// ---------------------------------------------------------------------------
// bench

struct BenchArgs {
  std::int64_t p = 1000000;
  std::int64_t m1 = 10000;
  std::int64_t m2 = 10000;
  std::uint64_t seed = 1;
};

int run_bench(const BenchArgs& args) {
  using namespace simsig;
  PairedStats pairs;
  pairs.t1.resize(args.p);
  pairs.t2.resize(args.p);
  {
    Rng rng1(substream(args.seed, 1, 0xBE7C4u));
    Rng rng2(substream(args.seed, 2, 0xBE7C4u));
    for (auto& v : pairs.t1) v = std::fabs(rng1.normal());
    for (auto& v : pairs.t2) v = std::fabs(rng2.normal());
  }

  const auto t0 = Clock::now();
  const RankedPairs ranked = preprocess(std::move(pairs));
  const double preprocess_ms = ms_since(t0);

  const Truncation trunc =
      resolve_m(args.m1, args.m2, static_cast<std::size_t>(args.p));
  const auto t1 = Clock::now();
  const DetectionResult res = dstat_fast(ranked, trunc);
  const double dstat_ms = ms_since(t1);

  json doc;
  doc["p"] = args.p;
  doc["m1"] = trunc.m1;
  doc["m2"] = trunc.m2;
  doc["seed"] = args.seed;
  doc["statistic"] = res.statistic;
  doc["t1_star"] = res.t1_star;
  doc["t2_star"] = res.t2_star;
  doc["cells_evaluated"] = res.cells_evaluated;
  std::cout << doc.dump(2) << "\n";
  std::fprintf(stderr, "preprocess_ms=%.1f dstat_ms=%.1f total_ms=%.1f\n",
               preprocess_ms, dstat_ms, preprocess_ms + dstat_ms);
  return 0;
}

int map_error_exit(const simsig::Error& e) {
  switch (e.kind()) {
    case simsig::ErrorKind::malformed_input:
      return 65;
    case simsig::ErrorKind::file_not_found:
      return 66;
    default:
      return 70;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Detection of weak positive latent dependence between two "
               "paired sequences of test statistics"};
  app.require_subcommand(1);

  DetectArgs detect_args;
  CLI::App* detect = app.add_subcommand(
      "detect", "Dependence test on a TSV file with columns t1<TAB>t2");
  detect->add_option("--input", detect_args.input, "Input TSV path")->required();
  detect->add_option("--transform", detect_args.transform,
                     "Input transform: none | neglog10 (for p-value input)")
      ->check(CLI::IsMember({"none", "neglog10"}));
  detect->add_option("--perms", detect_args.perms, "Permutation replicates B")
      ->check(CLI::Range(std::int64_t(1), std::int64_t(100000000)));
  detect->add_option("--scheme", detect_args.scheme, "shuffle | cyclic")
      ->check(CLI::IsMember({"shuffle", "cyclic"}));
  detect->add_option("--seed", detect_args.seed, "RNG seed");
  detect->add_option("--m1", detect_args.m1, "Grid truncation for t1 (clamped to p)")
      ->check(CLI::Range(std::int64_t(1), std::int64_t(1) << 31));
  detect->add_option("--m2", detect_args.m2, "Grid truncation for t2 (clamped to p)")
      ->check(CLI::Range(std::int64_t(1), std::int64_t(1) << 31));
  detect->add_option("--out", detect_args.out, "Write the JSON report here");
  detect->add_option("--threads", detect_args.threads, "Worker threads (0 = auto)");
  detect->add_flag("--timing", detect_args.timing, "Report real elapsed_ms");

  SimulateArgs sim_args;
  std::string sim_beta1_text;
  CLI::App* simulate = app.add_subcommand(
      "simulate", "Monte Carlo type I error / power experiments");
  simulate->add_option("--preset", sim_args.preset, "table1 | table3 | corrnull")
      ->check(CLI::IsMember({"table1", "table3", "corrnull"}));
  simulate->add_option("--p", sim_args.p, "Number of paired tests (custom mode; presets fix p)")
      ->check(CLI::Range(std::int64_t(2), std::int64_t(100000000)));
  simulate->add_option("--reps", sim_args.reps, "Monte Carlo replicates R")
      ->check(CLI::Range(1, 1000000));
  simulate->add_option("--alpha", sim_args.alpha, "Nominal level")
      ->check(CLI::Range(1e-6, 0.5));
  simulate->add_option("--perms", sim_args.perms, "Permutation replicates B")
      ->check(CLI::Range(std::int64_t(1), std::int64_t(100000000)));
  simulate->add_option("--scheme", sim_args.scheme, "shuffle | cyclic")
      ->check(CLI::IsMember({"shuffle", "cyclic"}));
  simulate->add_option("--m1", sim_args.m1, "Grid truncation for t1");
  simulate->add_option("--m2", sim_args.m2, "Grid truncation for t2");
  simulate->add_option("--seed", sim_args.seed, "Master seed");
  CLI::Option* hyp_opt =
      simulate->add_option("--hypothesis", sim_args.hypothesis,
                           "null | alt (preset table3 defaults to alt)")
          ->check(CLI::IsMember({"null", "alt"}));
  simulate->add_option("--beta1", sim_beta1_text,
                       "Sequence-1 sparsity (list allowed with preset table3)");
  simulate->add_option("--beta2", sim_args.beta2, "Sequence-2 sparsity")
      ->check(CLI::Range(0.5, 1.0));
  simulate->add_option("--beta", sim_args.beta,
                       "Dependence exponent (default max(beta1,beta2)+0.01)");
  simulate->add_option("--n1", sim_args.n1, "Signals in sequence 1 (counts mode)");
  simulate->add_option("--n2", sim_args.n2, "Signals in sequence 2 (counts mode)");
  simulate->add_option("--n12", sim_args.n12, "Simultaneous signals under alt");
  simulate->add_option("--methods", sim_args.methods,
                       "Comma list: dhat,max,spearman,hc");
  simulate->add_option("--mu1", sim_args.mu1, "Alt mean, sequence 1");
  simulate->add_option("--mu2", sim_args.mu2, "Alt mean, sequence 2");
  simulate->add_option("--sigma1", sim_args.sigma1, "Alt sd, sequence 1");
  simulate->add_option("--sigma2", sim_args.sigma2, "Alt sd, sequence 2");
  simulate->add_option("--dist", sim_args.dist, "folded | normal")
      ->check(CLI::IsMember({"folded", "normal"}));
  simulate->add_flag("--hetero", sim_args.hetero,
                     "Random per-feature alt parameters (fixed across replicates)");
  CLI::Option* rho_opt =
      simulate->add_option("--rho", sim_args.rho, "AR(1) correlated-null generator")
          ->check(CLI::Range(0.0, 0.999));
  simulate->add_option("--format", sim_args.format, "json | csv")
      ->check(CLI::IsMember({"json", "csv"}));
  simulate->add_option("--out", sim_args.out, "Write the report here");
  simulate->add_option("--threads", sim_args.threads, "Worker threads (0 = auto)");
  simulate->add_flag("--timing", sim_args.timing, "Report real per-replicate time");

  BoundaryArgs boundary_args;
  CLI::App* boundary = app.add_subcommand(
      "boundary", "Detection-boundary curve beta*(beta1, beta2, r1, r2) as CSV");
  boundary->add_option("--beta1", boundary_args.beta1,
                       "Value, comma list, or start:stop:step (each in [0.5, 1])");
  boundary->add_option("--beta2", boundary_args.beta2, "As --beta1");
  boundary->add_option("--r1", boundary_args.r1, "Signal strength values (>= 0)");
  boundary->add_option("--r2", boundary_args.r2, "As --r1");
  boundary->add_option("--res", boundary_args.res, "Grid points per axis")
      ->check(CLI::Range(8, 100000));
  boundary->add_option("--tol", boundary_args.tol, "Bisection tolerance")
      ->check(CLI::Range(1e-10, 0.1));
  boundary->add_flag("--single-seq", boundary_args.single_seq,
                     "Export the single-sequence boundary r*(beta) instead");
  boundary->add_option("--beta", boundary_args.beta,
                       "Beta grid for --single-seq");
  boundary->add_option("--out", boundary_args.out, "Write the CSV here");

  BenchArgs bench_args;
  CLI::App* bench = app.add_subcommand(
      "bench", "Time the fast statistic on synthetic folded-normal input");
  bench->add_option("--p", bench_args.p, "Input size")
      ->check(CLI::Range(std::int64_t(2), std::int64_t(200000000)));
  bench->add_option("--m", bench_args.m1, "Truncation for both axes");
  bench->add_option("--m1", bench_args.m1, "Truncation for t1");
  bench->add_option("--m2", bench_args.m2, "Truncation for t2");
  bench->add_option("--seed", bench_args.seed, "RNG seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (*detect) return run_detect(detect_args);
    if (*simulate) {
      if (!sim_beta1_text.empty()) sim_args.beta1 = parse_value_list(sim_beta1_text);
      for (double b : sim_args.beta1) {
        if (!(b >= 0.5 && b <= 1.0)) {
          std::cerr << "usage error: --beta1 values must lie in [0.5, 1]\n";
          return 2;
        }
      }
      sim_args.use_rho = rho_opt->count() > 0 || sim_args.preset == "corrnull";
      sim_args.hypothesis_given = hyp_opt->count() > 0;
      return run_simulate(sim_args);
    }
    if (*boundary) {
      if (!boundary_args.single_seq) {
        for (const std::string* text : {&boundary_args.beta1, &boundary_args.beta2}) {
          for (double b : parse_value_list(*text)) {
            if (!(b >= 0.5 && b <= 1.0)) {
              std::cerr << "usage error: --beta1/--beta2 values must lie in [0.5, 1]\n";
              return 2;
            }
          }
        }
        for (const std::string* text : {&boundary_args.r1, &boundary_args.r2}) {
          for (double r : parse_value_list(*text)) {
            if (!(r >= 0.0)) {
              std::cerr << "usage error: --r1/--r2 values must be >= 0\n";
              return 2;
            }
          }
        }
      }
      return run_boundary(boundary_args);
    }
    if (*bench) {
      if (bench->count("--m") > 0 && bench->count("--m2") == 0) {
        bench_args.m2 = bench_args.m1;
      }
      return run_bench(bench_args);
    }
  } catch (const CLI::ValidationError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const simsig::Error& e) {
    std::cerr << "error (" << simsig::error_kind_name(e.kind()) << "): "
              << e.what() << "\n";
    return map_error_exit(e);
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 70;
  }
  return 70;
}
