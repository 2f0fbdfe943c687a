#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sobrec/config.hpp"
#include "sobrec/geometry.hpp"
#include "sobrec/recovery.hpp"
#include "sobrec/testbed.hpp"

namespace sobrec {

enum class Criterion { monte_carlo, uniform };
enum class Task { approximation, integration_cv, integration_approx, integration_mc };
enum class PointSource { iid, quasi_uniform };

std::string to_string(Criterion c);
std::string to_string(Task t);
std::string to_string(PointSource s);

struct ExperimentConfig {
  std::string domain_kind = "cube";
  int d = 1;
  int s = 1;
  double p = 2.0;
  double q = 2.0;
  std::vector<std::size_t> ns;
  int replications = 1;
  std::uint64_t seed = 1;
  Criterion criterion = Criterion::monte_carlo;
  Task task = Task::approximation;
  PointSource source = PointSource::iid;
  std::optional<double> r_override, theta_override, c1_override;
  int error_grid = 0;  // 0 = per-dimension default
  int quad_grid = 0;
  int h_probes = 0;
  std::string dictionary = "multiscale";

  static ExperimentConfig from_keyvalues(const KeyValues& kv);
  Domain make_domain() const;
  AlgoConstants make_constants(const Domain& domain) const;
  int effective_error_grid() const;
  int effective_quad_grid() const;

  void validate() const;
  std::string canonical() const;  // full effective-settings echo
  std::uint64_t hash() const { return fnv1a64(canonical()); }
};

// Dictionary member pre-scaled to unit estimated W_p^s norm.
struct Dictionary {
  std::vector<TestFunction> members;
  std::vector<double> scale;
  std::string description;
  // bump-family calibration cache rows (id, m, grid, radii, height, norms)
  std::vector<std::string> family_cache_rows;
};

Dictionary make_dictionary(const Domain& domain, const ExperimentConfig& cfg);

enum class Abscissa { n, n_over_log_n };

struct FitResult {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  int used_points = 0;
  int dropped_points = 0;
};

// OLS on (log abscissa, log error); nonpositive errors are dropped with a
// warning recorded in dropped_points. Requires >= 3 usable points.
FitResult fit_rate(std::span<const std::size_t> ns, std::span<const double> errors,
                   Abscissa abscissa);

struct RateRow {
  std::size_t n = 0;
  double mean = 0.0, stddev = 0.0, min = 0.0, max = 0.0;
};

struct RateReport {
  Criterion criterion = Criterion::monte_carlo;
  Task task = Task::approximation;
  std::vector<RateRow> rows;
  FitResult fit_n;
  FitResult fit_n_over_log_n;
  double theoretical_exponent = 0.0;
  bool theory_uses_log_abscissa = false;
  std::uint64_t config_hash = 0;
  std::string config_echo;
  std::string dictionary_desc;
  std::vector<int> scenario1_per_n;
  std::uint64_t nearest_fallbacks = 0;  // retries + nearest-sample fallbacks

  const FitResult& preferred_fit() const { return theory_uses_log_abscissa ? fit_n_over_log_n : fit_n; }
  std::string render() const;  // deterministic, no timestamps
};

struct CsvRow {
  std::size_t n = 0;
  int rep = 0;
  std::string function_id;
  double error = 0.0;
  int scenario = 0;
  std::uint64_t fallback_count = 0;
};

// One pass over the (n, replication, function) grid; both criteria are
// aggregated from the same error matrix and the exact ordering
// uniform >= monte-carlo is asserted on every sweep.
struct SweepResult {
  ExperimentConfig cfg;
  RateReport monte_carlo;
  RateReport uniform;
  std::vector<CsvRow> rows;
  std::vector<std::string> family_cache_rows;

  const RateReport& report() const {
    return cfg.criterion == Criterion::uniform ? uniform : monte_carlo;
  }
};

// per_n_sink, when given, receives each n's CSV rows as soon as that n
// completes (the rates command uses it to flush partial results).
using PerNSink = std::function<void(std::size_t n, std::span<const CsvRow> rows)>;

SweepResult run_error_sweep(const ExperimentConfig& cfg, const PerNSink& per_n_sink = {});
RateReport mc_error_curve(const ExperimentConfig& cfg);
RateReport uniform_error_curve(const ExperimentConfig& cfg);

// (task, criterion) -> theoretical exponent and abscissa of the known rate
std::pair<double, bool> theoretical_rate(const ExperimentConfig& cfg);

struct MomentRow {
  std::size_t n = 0;
  double mean_pow = 0.0;    // E r_n(y)^alpha
  double normalized = 0.0;  // E r_n(y)^alpha * n^(alpha/d)
};

std::vector<MomentRow> radius_moment_check(const Domain& domain, std::span<const double> y,
                                           double alpha, std::span<const std::size_t> ns, int R,
                                           std::uint64_t seed, const AlgoConstants& constants);

struct TailRow {
  double t = 0.0;
  double frequency = 0.0;  // empirical P(r_n(y) > t)
  double envelope = 0.0;   // C * exp(-c * t^d * n)
};

struct TailReport {
  std::vector<TailRow> rows;
  double c = 0.0;  // fitted exponent (positive on pass)
  double C = 0.0;  // smallest dominating constant
  bool dominated = true;
};

TailReport tail_check(const Domain& domain, std::span<const double> y, std::span<const double> ts,
                      std::size_t n, int R, std::uint64_t seed, const AlgoConstants& constants);

struct CouponResult {
  int m = 0;
  double support_volume_fraction = 0.0;
  double scenario1_frequency = 0.0;
  double missed_bump_frequency = 0.0;
};

CouponResult coupon_check(const Domain& domain, std::size_t n, std::uint64_t seed, int R,
                          const AlgoConstants& constants);

// P(at least one of m disjoint supports of volume fraction v is empty of n
// iid uniform points), by inclusion-exclusion.
double coupon_miss_probability(int m, double v, std::size_t n);

void write_sweep_csv(std::ostream& os, const SweepResult& sweep);

}  // namespace sobrec
