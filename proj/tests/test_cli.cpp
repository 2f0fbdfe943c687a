// End-to-end checks of the command-line front end: exit codes, byte-identical
// reruns, report contents. Drives the real binary.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace {

const std::string cli = SOBREC_CLI_PATH;

int run(const std::string& args) {
  const std::string cmd = cli + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

std::string slurp(const std::string& path) {
  std::ifstream f(path);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

std::string tmp(const std::string& name) { return "/tmp/sobrec_cli_test_" + name; }

}  // namespace

TEST_CASE("usage errors exit with code 2") {
  CHECK(run("recover --d 1") == 2);              // missing --n
  CHECK(run("unknown-subcommand") == 2);
  CHECK(run("verify nosuchsuite") == 2);
  CHECK(run("integrate --n 64 --method bogus") == 2);
  CHECK(run("testbed explode") == 2);
  CHECK(run("rates /nonexistent.cfg") == 2);
}

TEST_CASE("infeasible configs exit with code 3") {
  // default r = 1/4 in d = 1 requires n >= 4
  CHECK(run("recover --d 1 --n 3 --function const1 --out " + tmp("r3.csv")) == 3);
  CHECK(run("integrate --d 1 --method cv --n 2 --r 0.49 --c1 1.0 --function const1 --out " +
            tmp("i3.csv")) == 3);
}

TEST_CASE("recover writes deterministic CSV with reproduced constants") {
  const std::string out1 = tmp("rec1.csv"), out2 = tmp("rec2.csv");
  const std::string flags =
      "recover --d 1 --s 1 --n 512 --seed 5 --function const1 --probes 64 --r 0.49 --c1 1.0 --out ";
  REQUIRE(run(flags + out1) == 0);
  REQUIRE(run(flags + out2) == 0);
  const std::string a = slurp(out1);
  CHECK(a == slurp(out2));  // byte-identical rerun
  CHECK(a.find("# config_hash = ") == 0);

  // every probe value within 1e-8 of 1
  std::stringstream ss(a);
  std::string line;
  std::getline(ss, line);  // hash
  std::getline(ss, line);  // header
  int rows = 0;
  while (std::getline(ss, line)) {
    const std::size_t comma = line.rfind(',');
    const double v = std::stod(line.substr(comma + 1));
    CHECK(std::abs(v - 1.0) < 1e-8);
    ++rows;
  }
  CHECK(rows == 64);
}

TEST_CASE("integrate writes the documented CSV schema") {
  const std::string out = tmp("int.csv");
  REQUIRE(run("integrate --d 1 --s 1 --method mc --n 128 --seed 9 --function mono-1 --out " + out) ==
          0);
  const std::string text = slurp(out);
  CHECK(text.find("method,n,seed,estimate,reference,abs_error") != std::string::npos);
  CHECK(text.find("plain-mc,128,9,") != std::string::npos);
  REQUIRE(run("integrate --d 1 --s 1 --method mc --n 128 --seed 9 --function mono-1 --out " +
              tmp("int2.csv")) == 0);
  CHECK(slurp(tmp("int2.csv")) == text);
}

TEST_CASE("rates on a small config") {
  const std::string cfg = tmp("small.cfg");
  {
    std::ofstream f(cfg);
    f << "domain = cube\nd = 1\ns = 1\np = 2\nq = 2\nn = 64,128,256\nreps = 1\nseed = 3\n"
      << "criterion = monte-carlo\ntask = approximation\ndictionary = smooth\n"
      << "r = 0.49\nc1 = 1.0\nerror_grid = 2048\nout = " << tmp("small") << "\n";
  }
  REQUIRE(run("rates " + cfg) == 0);
  const std::string report = slurp(tmp("small") + ".report.txt");
  // three rows and one fit
  CHECK(report.find("\n64,") != std::string::npos);
  CHECK(report.find("\n128,") != std::string::npos);
  CHECK(report.find("\n256,") != std::string::npos);
  CHECK(report.find("fit_vs_n: slope = ") != std::string::npos);
  // theoretical exponent for (p,q,s,d) = (2,2,1,1) reads -1
  CHECK(report.find("theoretical_exponent = -1 (abscissa n)") != std::string::npos);

  const std::string csv1 = slurp(tmp("small") + ".csv");
  REQUIRE(run("rates " + cfg) == 0);
  CHECK(slurp(tmp("small") + ".csv") == csv1);  // byte-identical rerun
  CHECK(csv1.find("config_hash,task,criterion,") == 0);

  // malformed config
  const std::string bad = tmp("bad.cfg");
  {
    std::ofstream f(bad);
    f << "this is not a key value line\n";
  }
  CHECK(run("rates " + bad) == 2);
}

TEST_CASE("rates with p = q = inf reports the n over log n abscissa") {
  const std::string cfg = tmp("inf.cfg");
  {
    std::ofstream f(cfg);
    f << "domain = cube\nd = 1\ns = 1\np = inf\nq = inf\nn = 64,128,256\nreps = 1\nseed = 3\n"
      << "criterion = monte-carlo\ntask = approximation\ndictionary = smooth\n"
      << "r = 0.49\nc1 = 1.0\nerror_grid = 2048\nout = " << tmp("inf") << "\n";
  }
  REQUIRE(run("rates " + cfg) == 0);
  const std::string report = slurp(tmp("inf") + ".report.txt");
  CHECK(report.find("(abscissa n/log n)") != std::string::npos);
}

TEST_CASE("radius-stats is deterministic") {
  const std::string flags =
      "radius-stats --d 1 --s 1 --n 64,256 --tail-n 256 --reps 40 --seed 4 --r 0.49 --c1 1.0 --out ";
  REQUIRE(run(flags + tmp("ra")) == 0);
  REQUIRE(run(flags + tmp("rb")) == 0);
  CHECK(slurp(tmp("ra") + ".moments.csv") == slurp(tmp("rb") + ".moments.csv"));
  CHECK(slurp(tmp("ra") + ".tails.csv") == slurp(tmp("rb") + ".tails.csv"));
}

TEST_CASE("verify suite exit codes and the injected-defect fixture") {
  CHECK(run("verify fast") == 0);
  // a sign error in the reproduction constraints must be caught
  CHECK(run("verify fast --inject-mls-sign-error") == 1);
}

TEST_CASE("testbed list") {
  const std::string out = tmp("list.txt");
  const int status = std::system((cli + " testbed list --d 1 > " + out + " 2>&1").c_str());
  CHECK(WEXITSTATUS(status) == 0);
  const std::string text = slurp(out);
  CHECK(text.find("const1") != std::string::npos);
  CHECK(text.find("family-m") != std::string::npos);
}
