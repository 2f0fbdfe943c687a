// Acceptance suite: one pass/fail line per criterion, every tolerance pinned
// in code. Exit 0 iff all criteria pass. An optional argv filter selects
// criteria by number, e.g. `sobrec_acceptance 2 5`.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "sobrec/experiments.hpp"
#include "sobrec/geometry.hpp"
#include "sobrec/integration.hpp"
#include "sobrec/recovery.hpp"
#include "sobrec/rng.hpp"
#include "sobrec/sampling.hpp"
#include "sobrec/testbed.hpp"

using namespace sobrec;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

ExperimentConfig base_config(int d, int s, double p, double q) {
  ExperimentConfig cfg;
  cfg.domain_kind = "cube";
  cfg.d = d;
  cfg.s = s;
  cfg.p = p;
  cfg.q = q;
  cfg.r_override = 0.49;
  cfg.c1_override = 1.0;
  cfg.criterion = Criterion::monte_carlo;
  cfg.task = Task::approximation;
  cfg.dictionary = "multiscale";
  return cfg;
}

// 1. polynomial reproduction through the full operator
Outcome criterion_reproduction() {
  const RngStream seeds = RngStream::from_seed(1001);
  double worst = 0.0;
  for (int d = 1; d <= 2; ++d) {
    const Domain dom = Domain::unit_cube(d);
    const std::size_t n = d == 1 ? 512 : 4096;
    for (int s = 1; s <= 3; ++s) {
      const AlgoConstants c = AlgoConstants::make(dom, s, 0.49, std::nullopt, 1.0);
      const PolyBasis basis = PolyBasis::make(d, s);
      const PointSet probes = quasi_uniform_points(dom, 100);
      for (int set = 0; set < 20; ++set) {
        const std::uint64_t seed = seeds.bits(static_cast<std::uint64_t>(100 * d + 10 * s + set));
        const PointSet P = sample_iid_uniform(dom, n, seed, 0);
        const RecoveryOperator op(dom, P, std::vector<double>(n, 0.0), c);
        if (op.scenario() != 2) return {false, "seeded set landed in scenario 1"};
        const auto rules = op.rules_on_grid(probes.coords);
        std::vector<double> mono(static_cast<std::size_t>(basis.size()));
        for (int k = 0; k < basis.size(); ++k) {
          std::vector<double> samples(n);
          for (std::size_t j = 0; j < n; ++j) {
            basis.eval(P.point(j), mono);
            samples[j] = mono[static_cast<std::size_t>(k)];
          }
          for (std::size_t i = 0; i < probes.size(); ++i) {
            basis.eval(probes.point(i), mono);
            const double err = std::abs(op.apply_rule(rules[i], samples) -
                                        mono[static_cast<std::size_t>(k)]);
            const double tol = 1e-8 * (1.0 + rules[i].lebesgue_sum);
            worst = std::max(worst, err / tol);
            if (err > tol) return {false, "monomial defect " + fmt(err) + " above tolerance"};
          }
        }
      }
    }
  }
  return {true, "max defect/tolerance ratio " + fmt(worst)};
}

Outcome slope_criterion(ExperimentConfig cfg, double lo, double hi, double r2_min, bool use_mc) {
  const SweepResult sweep = run_error_sweep(cfg);
  const RateReport& rep = use_mc ? sweep.monte_carlo : sweep.uniform;
  const FitResult& fit = rep.fit_n;
  std::string detail = "slope " + fmt(fit.slope) + " in [" + fmt(lo) + ", " + fmt(hi) + "], r2 " +
                       fmt(fit.r2);
  const bool pass = fit.slope >= lo && fit.slope <= hi && fit.r2 >= r2_min;
  return {pass, detail};
}

// 2. approximation rate p = q = 2, d = 1, s = 1
Outcome criterion_rate_l2() {
  ExperimentConfig cfg = base_config(1, 1, 2.0, 2.0);
  cfg.ns = parse_count_list("2^6..2^12");
  cfg.replications = 20;
  cfg.seed = 42;
  cfg.error_grid = 32768;
  return slope_criterion(cfg, -1.25, -0.75, 0.97, true);
}

// 3. approximation rate p = 2, q = inf, d = 1, s = 2
Outcome criterion_rate_sup() {
  ExperimentConfig cfg = base_config(1, 2, 2.0, std::numeric_limits<double>::infinity());
  cfg.ns = parse_count_list("2^6..2^12");
  cfg.replications = 20;
  cfg.seed = 43;
  cfg.error_grid = 32768;
  return slope_criterion(cfg, -1.9, -1.1, 0.0, true);
}

// 4. approximation rate d = 2, s = 2, p = q = 2
Outcome criterion_rate_2d() {
  ExperimentConfig cfg = base_config(2, 2, 2.0, 2.0);
  cfg.ns = parse_count_list("2^8..2^13");
  cfg.replications = 10;
  cfg.seed = 44;
  cfg.c1_override = 1.4;  // covering threshold above typical h at n = 2^8
  cfg.error_grid = 256;
  return slope_criterion(cfg, -1.35, -0.65, 0.0, true);
}

// 5. p = q = inf: error tracks (log n / n) within a narrow band
Outcome criterion_log_factor() {
  ExperimentConfig cfg = base_config(1, 1, std::numeric_limits<double>::infinity(),
                                     std::numeric_limits<double>::infinity());
  cfg.ns = parse_count_list("2^6..2^13");
  cfg.replications = 30;
  cfg.seed = 45;
  cfg.error_grid = 32768;
  const SweepResult sweep = run_error_sweep(cfg);
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (const auto& row : sweep.monte_carlo.rows) {
    const double ratio = row.mean / (std::log(static_cast<double>(row.n)) / row.n);
    lo = std::min(lo, ratio);
    hi = std::max(hi, ratio);
  }
  const double band = hi / lo;
  return {band <= 4.0, "error/(log n / n) band ratio " + fmt(band) + " (<= 4 required)"};
}

// 6. control-variates integration rate plus the plain Monte Carlo baseline
Outcome criterion_integration_cv() {
  ExperimentConfig cfg = base_config(1, 1, 2.0, 2.0);
  cfg.task = Task::integration_cv;
  cfg.dictionary = "multiscale-int";
  cfg.ns = parse_count_list("2^6..2^12");
  cfg.replications = 20;
  cfg.seed = 46;
  cfg.quad_grid = 16384;
  const Outcome cv = slope_criterion(cfg, -1.8, -1.2, 0.0, true);
  cfg.task = Task::integration_mc;
  const Outcome mc = slope_criterion(cfg, -0.6, -0.4, 0.0, true);
  return {cv.pass && mc.pass, "cv " + cv.detail + "; plain-mc " + mc.detail};
}

// 7. integral-of-approximant rate (uniform criterion)
Outcome criterion_integration_approx() {
  ExperimentConfig cfg = base_config(1, 2, 2.0, 2.0);
  cfg.task = Task::integration_approx;
  cfg.criterion = Criterion::uniform;
  cfg.dictionary = "multiscale-int";
  cfg.ns = parse_count_list("2^6..2^12");
  cfg.replications = 20;
  cfg.seed = 47;
  cfg.quad_grid = 16384;
  return slope_criterion(cfg, -2.5, -1.5, 0.0, false);
}

// 8. covering-radius law E h ~ (log n / n)^(1/d)
Outcome criterion_covering_law() {
  std::string detail;
  bool pass = true;
  for (int d = 1; d <= 2; ++d) {
    const Domain dom = Domain::unit_cube(d);
    const int res = d == 1 ? 2048 : 128;
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (const std::size_t n : parse_count_list("2^6..2^13")) {
      double mean_h = 0.0;
      const int R = 30;
      for (int rep = 0; rep < R; ++rep) {
        const PointSet P =
            sample_iid_uniform(dom, n, 4800 + static_cast<std::uint64_t>(rep), static_cast<std::uint64_t>(d));
        mean_h += covering_radius(P, dom, res);
      }
      mean_h /= R;
      const double ratio =
          mean_h / std::pow(std::log(static_cast<double>(n)) / static_cast<double>(n), 1.0 / d);
      lo = std::min(lo, ratio);
      hi = std::max(hi, ratio);
    }
    detail += (d == 1 ? "d=1 band " : "; d=2 band ") + fmt(hi / lo);
    pass = pass && hi / lo <= 3.0;
  }
  return {pass, detail + " (<= 3 required)"};
}

// 9. moments of the adaptive radius: E r_n(y)^alpha * n^(alpha/d) in a band
Outcome criterion_radius_moments() {
  const Domain dom = Domain::unit_cube(1);
  const int s = 2;
  const AlgoConstants c = AlgoConstants::make(dom, s, 0.49, std::nullopt, 1.0);
  const std::vector<std::size_t> ns = parse_count_list("2^6..2^12");
  bool pass = true;
  double worst_band = 0.0;
  for (const double yv : {0.21, 0.52, 0.77}) {
    const std::vector<double> y = {yv};
    for (const double alpha : {1.0, static_cast<double>(s)}) {
      const auto rows = radius_moment_check(dom, y, alpha, ns, 50, 49, c);
      double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
      for (const auto& row : rows) {
        lo = std::min(lo, row.normalized);
        hi = std::max(hi, row.normalized);
      }
      worst_band = std::max(worst_band, hi / lo);
      pass = pass && hi / lo <= 10.0;
    }
  }
  return {pass, "worst normalized-moment band ratio " + fmt(worst_band) + " (<= 10 required)"};
}

// 10. tail bound P(r_n(y) > t) dominated by C exp(-c t^d n) with c > 0
Outcome criterion_tail_bound() {
  const Domain dom = Domain::unit_cube(1);
  const AlgoConstants c = AlgoConstants::make(dom, 1, 0.49, std::nullopt, 1.0);
  std::vector<double> ts;
  for (int i = 8; i >= 1; --i) ts.push_back(0.75 * std::ldexp(c.r, -i));
  const std::vector<double> y = {0.37};
  const TailReport tail = tail_check(dom, y, ts, 1 << 10, 200, 50, c);
  const bool pass = tail.c > 0.0 && tail.dominated;
  return {pass, "fitted exponent c " + fmt(tail.c) + ", dominated " + (tail.dominated ? "yes" : "no")};
}

// 11. scenario-1 frequency at the defaults, against exact coverage oracles
Outcome criterion_scenario_frequency() {
  const Domain dom = Domain::unit_cube(1);
  const AlgoConstants c = AlgoConstants::defaults(dom, 1);
  // exact oracle at n = 16: sixteen balls of radius c0 r cover at most
  // 16 * 2 * c0 * r < 1, so the covering threshold cannot be met: frequency 1
  const double coverage = 16.0 * 2.0 * c.c0 * c.r;
  if (coverage >= 1.0) return {false, "oracle broken: coverage " + fmt(coverage)};
  const CouponResult small = coupon_check(dom, 16, 51, 200, c);
  // union-bound oracle at n = 2^12: P(scenario 1) <= n exp(-n c0 r) ~ 1e-20
  const CouponResult large = coupon_check(dom, 1 << 12, 52, 200, c);
  const bool pass = small.scenario1_frequency >= 0.9 && small.scenario1_frequency == 1.0 &&
                    large.scenario1_frequency == 0.0;
  return {pass, "freq(n=16) " + fmt(small.scenario1_frequency) + " (exact oracle 1), freq(n=4096) " +
                    fmt(large.scenario1_frequency) + " (oracle ~0)"};
}

// 12. coupon-collector fixture against exact inclusion-exclusion
Outcome criterion_coupon() {
  const Domain dom = Domain::unit_cube(1);
  const AlgoConstants c = AlgoConstants::defaults(dom, 1);
  bool pass = true;
  std::string detail;
  for (const std::size_t n : {static_cast<std::size_t>(1) << 8, static_cast<std::size_t>(1) << 10}) {
    const int R = 300;
    const CouponResult res = coupon_check(dom, n, 53, R, c);
    const double p_exact = coupon_miss_probability(res.m, res.support_volume_fraction, n);
    const double sigma = std::sqrt(std::max(p_exact * (1.0 - p_exact), 1e-12) / R);
    const double dev = std::abs(res.missed_bump_frequency - p_exact);
    pass = pass && dev <= 3.0 * sigma && res.missed_bump_frequency >= 0.2;
    detail += "n=" + std::to_string(n) + ": freq " + fmt(res.missed_bump_frequency) + " vs exact " +
              fmt(p_exact) + " (3s " + fmt(3.0 * sigma) + "); ";
  }
  return {pass, detail};
}

// 13. criterion ordering: uniform >= monte-carlo on the same error matrix
Outcome criterion_ordering() {
  ExperimentConfig cfg = base_config(1, 1, 2.0, 2.0);
  cfg.ns = parse_count_list("2^6..2^9");
  cfg.replications = 5;
  cfg.seed = 54;
  cfg.error_grid = 8192;
  const SweepResult sweep = run_error_sweep(cfg);  // also asserted inside every sweep
  for (std::size_t i = 0; i < sweep.monte_carlo.rows.size(); ++i)
    if (!(sweep.uniform.rows[i].mean >= sweep.monte_carlo.rows[i].mean))
      return {false, "ordering violated at n index " + std::to_string(i)};
  return {true, "uniform >= monte-carlo at every n (exact)"};
}

// 14. CLI determinism: identical flags give byte-identical CSV
Outcome criterion_cli_determinism() {
  const std::string cli = SOBREC_CLI_PATH;
  auto slurp = [](const std::string& path) {
    std::ifstream f(path);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
  };
  auto run = [&](const std::string& args) {
    return std::system((cli + " " + args + " >/dev/null 2>&1").c_str()) == 0;
  };
  const std::string dir = "/tmp/sobrec_acceptance";
  if (std::system(("mkdir -p " + dir).c_str()) != 0) return {false, "cannot create temp dir"};

  const std::string recover =
      "recover --d 1 --s 2 --n 512 --seed 7 --function gauss-s0.2 --probes 64 --r 0.49 --c1 1.0 --out ";
  if (!run(recover + dir + "/a.csv") || !run(recover + dir + "/b.csv"))
    return {false, "recover failed"};
  if (slurp(dir + "/a.csv") != slurp(dir + "/b.csv")) return {false, "recover CSV differs"};

  const std::string integrate =
      "integrate --d 1 --s 1 --method cv --n 256 --seed 8 --function sine-k1 --r 0.49 --c1 1.0 --quad-grid 4096 --out ";
  if (!run(integrate + dir + "/ia.csv") || !run(integrate + dir + "/ib.csv"))
    return {false, "integrate failed"};
  if (slurp(dir + "/ia.csv") != slurp(dir + "/ib.csv")) return {false, "integrate CSV differs"};

  {
    std::ofstream f(dir + "/r.cfg");
    f << "domain = cube\nd = 1\ns = 1\nn = 64,128,256\nreps = 2\nseed = 3\ndictionary = smooth\n"
      << "r = 0.49\nc1 = 1.0\nerror_grid = 2048\nout = " << dir << "/r\n";
  }
  if (!run("rates " + dir + "/r.cfg")) return {false, "rates failed"};
  const std::string csv1 = slurp(dir + "/r.csv");
  if (!run("rates " + dir + "/r.cfg")) return {false, "rates rerun failed"};
  if (slurp(dir + "/r.csv") != csv1) return {false, "rates CSV differs"};

  const std::string radius =
      "radius-stats --d 1 --s 1 --n 64,256 --tail-n 256 --reps 30 --seed 4 --r 0.49 --c1 1.0 --out ";
  if (!run(radius + dir + "/s1") || !run(radius + dir + "/s2")) return {false, "radius-stats failed"};
  if (slurp(dir + "/s1.moments.csv") != slurp(dir + "/s2.moments.csv"))
    return {false, "moments CSV differs"};
  if (slurp(dir + "/s1.tails.csv") != slurp(dir + "/s2.tails.csv"))
    return {false, "tails CSV differs"};
  return {true, "recover, integrate, rates and radius-stats are byte-stable"};
}

// extra: quasi-uniform points reach the optimal-points rate without the log
Outcome criterion_quasi_uniform() {
  ExperimentConfig cfg = base_config(1, 1, std::numeric_limits<double>::infinity(),
                                     std::numeric_limits<double>::infinity());
  cfg.source = PointSource::quasi_uniform;
  cfg.ns = parse_count_list("2^6..2^13");
  cfg.replications = 1;  // the point sets are deterministic
  cfg.seed = 55;
  cfg.error_grid = 32768;
  return slope_criterion(cfg, -1.3, -0.7, 0.0, true);
}

struct Entry {
  int id;
  const char* name;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  std::vector<int> filter;
  for (int i = 1; i < argc; ++i) filter.push_back(std::atoi(argv[i]));

  const std::vector<Entry> entries = {
      {1, "polynomial reproduction", criterion_reproduction},
      {2, "approximation rate p=q=2, d=1, s=1", criterion_rate_l2},
      {3, "approximation rate p=2, q=inf, d=1, s=2", criterion_rate_sup},
      {4, "approximation rate d=2, s=2, p=q=2", criterion_rate_2d},
      {5, "p=q=inf log factor band", criterion_log_factor},
      {6, "integration cv rate + plain-mc baseline", criterion_integration_cv},
      {7, "integration approx-only rate", criterion_integration_approx},
      {8, "covering-radius law", criterion_covering_law},
      {9, "adaptive radius moments", criterion_radius_moments},
      {10, "adaptive radius tail bound", criterion_tail_bound},
      {11, "scenario-1 frequency vs exact oracles", criterion_scenario_frequency},
      {12, "coupon-collector fixture vs inclusion-exclusion", criterion_coupon},
      {13, "criterion ordering", criterion_ordering},
      {14, "CLI byte determinism", criterion_cli_determinism},
      {15, "quasi-uniform comparison (extra)", criterion_quasi_uniform},
  };

  int failures = 0;
  for (const auto& entry : entries) {
    if (!filter.empty() && std::find(filter.begin(), filter.end(), entry.id) == filter.end())
      continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome outcome;
    try {
      outcome = entry.run();
    } catch (const std::exception& e) {
      outcome = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s %2d %s: %s [%.1fs]\n", outcome.pass ? "PASS" : "FAIL", entry.id, entry.name,
                outcome.detail.c_str(), secs);
    std::fflush(stdout);
    if (!outcome.pass) ++failures;
  }
  if (failures == 0)
    std::printf("acceptance: all criteria passed\n");
  else
    std::printf("acceptance: %d criteria FAILED\n", failures);
  return failures == 0 ? 0 : 1;
}
