#include <catch2/catch_amalgamated.hpp>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"
#include "simsig/rng.hpp"

// End-to-end checks of the installed CLI binary (path injected by CMake).

namespace {

struct CmdResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

CmdResult run_cli(const std::string& args) {
  static int counter = 0;
  const std::string base = "/tmp/simsig_cli_test_" + std::to_string(::getpid()) +
                           "_" + std::to_string(counter++);
  const std::string out_path = base + ".out";
  const std::string err_path = base + ".err";
  const std::string cmd = std::string(SIMSIG_CLI_PATH) + " " + args + " > " +
                          out_path + " 2> " + err_path;
  const int rc = std::system(cmd.c_str());
  CmdResult res;
  res.exit_code = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
  res.out = slurp(out_path);
  res.err = slurp(err_path);
  std::remove(out_path.c_str());
  std::remove(err_path.c_str());
  return res;
}

std::string write_tsv_fixture(bool header, int rows, unsigned seed) {
  static int counter = 0;
  const std::string path = "/tmp/simsig_fixture_" + std::to_string(::getpid()) +
                           "_" + std::to_string(counter++) + ".tsv";
  std::ofstream out(path);
  if (header) out << "t1\tt2\n";
  simsig::Rng rng(seed);
  for (int j = 0; j < rows; ++j) {
    const double shared = (j % 10 == 0) ? 2.5 : 0.0;
    out << std::fabs(shared + rng.normal()) << "\t"
        << std::fabs(shared + rng.normal()) << "\n";
  }
  return path;
}

}  // namespace

TEST_CASE("cli detect: JSON report with stable keys", "[cli]") {
  const std::string tsv = write_tsv_fixture(true, 80, 7);
  CmdResult res = run_cli("detect --input " + tsv + " --perms 99 --seed 7");
  REQUIRE(res.exit_code == 0);

  const auto doc = nlohmann::json::parse(res.out);
  const char* keys[] = {"statistic", "t1_star",  "t2_star", "p_value",
                        "p_value_asymptotic",    "adaptive_reject",
                        "perms",     "scheme",   "seed",    "m1",
                        "m2",        "p",        "elapsed_ms"};
  std::size_t prev = 0;
  for (const char* key : keys) {
    REQUIRE(doc.contains(key));
    const std::size_t pos = res.out.find(std::string("\"") + key + "\"");
    REQUIRE(pos != std::string::npos);
    REQUIRE(pos >= prev);  // spec order preserved
    prev = pos;
  }
  REQUIRE(doc["p"] == 80);
  REQUIRE(doc["m1"] == 80);  // clamped to p
  REQUIRE(doc["statistic"].get<double>() > 0.0);
  REQUIRE(doc["p_value"].get<double>() <= 1.0);
  REQUIRE(doc["elapsed_ms"] == 0);  // deterministic default

  // byte-identical rerun
  CmdResult res2 = run_cli("detect --input " + tsv + " --perms 99 --seed 7");
  REQUIRE(res2.exit_code == 0);
  REQUIRE(res2.out == res.out);

  std::remove(tsv.c_str());
}

TEST_CASE("cli detect: cyclic scheme and transform", "[cli]") {
  // p-value-style input for the neglog10 transform
  static int counter = 0;
  const std::string path = "/tmp/simsig_pvals_" + std::to_string(::getpid()) +
                           "_" + std::to_string(counter++) + ".tsv";
  {
    std::ofstream out(path);
    out << "p1\tp2\n";
    simsig::Rng rng(13);
    for (int j = 0; j < 50; ++j) {
      out << rng.uniform01() << "\t" << rng.uniform01() << "\n";
    }
  }
  CmdResult res = run_cli("detect --input " + path +
                          " --transform neglog10 --perms 49 --scheme cyclic --seed 3");
  REQUIRE(res.exit_code == 0);
  const auto doc = nlohmann::json::parse(res.out);
  REQUIRE(doc["scheme"] == "cyclic");
  std::remove(path.c_str());
}

TEST_CASE("cli detect: error exit codes", "[cli]") {
  SECTION("missing file is exit 66") {
    CmdResult res = run_cli("detect --input /nonexistent/file.tsv");
    REQUIRE(res.exit_code == 66);
  }
  SECTION("malformed row reports its 1-based line number with exit 65") {
    static int counter = 0;
    const std::string path = "/tmp/simsig_bad_" + std::to_string(::getpid()) +
                             "_" + std::to_string(counter++) + ".tsv";
    {
      std::ofstream out(path);
      out << "t1\tt2\n";        // line 1
      out << "1.0\t2.0\n";      // line 2
      out << "0.5\t1.5\n";      // line 3
      out << "oops\t1.0\n";     // line 4
      out << "1.0\t1.0\n";
    }
    CmdResult res = run_cli("detect --input " + path);
    REQUIRE(res.exit_code == 65);
    REQUIRE(res.err.find("line 4") != std::string::npos);
    std::remove(path.c_str());
  }
  SECTION("out-of-domain values under neglog10 are exit 65") {
    static int counter = 0;
    const std::string path = "/tmp/simsig_dom_" + std::to_string(::getpid()) +
                             "_" + std::to_string(counter++) + ".tsv";
    {
      std::ofstream out(path);
      out << "0.5\t0.2\n";
      out << "1.5\t0.2\n";  // > 1, invalid p-value
    }
    CmdResult res = run_cli("detect --input " + path + " --transform neglog10");
    REQUIRE(res.exit_code == 65);
    REQUIRE(res.err.find("line 2") != std::string::npos);
    std::remove(path.c_str());
  }
  SECTION("usage errors are exit 2") {
    const std::string tsv = write_tsv_fixture(false, 10, 1);
    REQUIRE(run_cli("detect --input " + tsv + " --perms 0").exit_code == 2);
    REQUIRE(run_cli("boundary --beta1 0.4").exit_code == 2);
    REQUIRE(run_cli("nonsense").exit_code == 2);
    std::remove(tsv.c_str());
  }
}

TEST_CASE("cli simulate: deterministic reports", "[cli]") {
  const std::string args =
      "simulate --p 150 --reps 4 --n1 8 --n2 8 --n12 4 --hypothesis alt "
      "--methods dhat,max,spearman --perms 39 --seed 5 --mu1 3 --mu2 3";
  CmdResult a = run_cli(args);
  REQUIRE(a.exit_code == 0);
  CmdResult b = run_cli(args);
  REQUIRE(a.out == b.out);

  const auto doc = nlohmann::json::parse(a.out);
  REQUIRE(doc["settings"].size() == 1);
  REQUIRE(doc["settings"][0]["methods"].size() == 3);
  for (const auto& m : doc["settings"][0]["methods"]) {
    const double rate = m["rate"].get<double>();
    REQUIRE(rate >= 0.0);
    REQUIRE(rate <= 1.0);
  }

  CmdResult csv = run_cli(args + " --format csv");
  REQUIRE(csv.exit_code == 0);
  REQUIRE(csv.out.rfind("# preset=custom", 0) == 0);
  REQUIRE(csv.out.find("method,(8;8)") != std::string::npos);
  REQUIRE(csv.out.find("dhat,") != std::string::npos);
}

TEST_CASE("cli simulate: table3 preset defaults to the power run", "[cli]") {
  CmdResult res = run_cli(
      "simulate --preset table3 --beta1 0.6 --reps 2 --perms 19 --seed 1 "
      "--methods max");
  REQUIRE(res.exit_code == 0);
  const auto doc = nlohmann::json::parse(res.out);
  REQUIRE(doc["hypothesis"] == "alt");
  REQUIRE(doc["settings"][0]["n1"] == 100);
  REQUIRE(doc["settings"][0]["n2"] == 316);
  REQUIRE(doc["settings"][0]["n12"] == 89);  // simultaneous signals present

  CmdResult null_res = run_cli(
      "simulate --preset table3 --beta1 0.6 --reps 2 --perms 19 --seed 1 "
      "--methods max --hypothesis null");
  REQUIRE(null_res.exit_code == 0);
  const auto null_doc = nlohmann::json::parse(null_res.out);
  REQUIRE(null_doc["settings"][0]["n12"] == 0);
}

TEST_CASE("cli boundary: CSV export", "[cli]") {
  const std::string args =
      "boundary --beta1 0.5,0.6 --beta2 0.5 --r1 0.25 --r2 0.25 --res 256";
  CmdResult a = run_cli(args);
  REQUIRE(a.exit_code == 0);
  REQUIRE(a.out.rfind("# res=256", 0) == 0);
  REQUIRE(a.out.find("beta1,beta2,r1,r2,beta_star") != std::string::npos);
  // two data rows (one per beta1 value)
  int lines = 0;
  for (char c : a.out) lines += (c == '\n');
  REQUIRE(lines == 4);
  CmdResult b = run_cli(args);
  REQUIRE(a.out == b.out);

  CmdResult ss = run_cli("boundary --single-seq --beta 0.6:0.9:0.1");
  REQUIRE(ss.exit_code == 0);
  REQUIRE(ss.out.find("beta,r_star") != std::string::npos);
}

TEST_CASE("cli bench: runs and reports deterministic statistic", "[cli]") {
  CmdResult a = run_cli("bench --p 5000 --m 100 --seed 2");
  REQUIRE(a.exit_code == 0);
  const auto doc = nlohmann::json::parse(a.out);
  REQUIRE(doc["p"] == 5000);
  REQUIRE(doc["m1"] == 100);
  REQUIRE(doc["statistic"].get<double>() > 0.0);
  REQUIRE(a.err.find("total_ms=") != std::string::npos);
  CmdResult b = run_cli("bench --p 5000 --m 100 --seed 2");
  REQUIRE(a.out == b.out);  // stdout deterministic; timing goes to stderr
}
