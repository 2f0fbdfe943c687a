#pragma once

#include <atomic>
#include <cstdint>
#include <optional>
#include <vector>

#include "sobrec/geometry.hpp"
#include "sobrec/mls.hpp"
#include "sobrec/pointset.hpp"
#include "sobrec/sampling.hpp"

namespace sobrec {

// Constants driving the adaptive recovery: cone parameters (r, theta), the
// local-covering constant c1, the scenario threshold constant c0 = c_theta*c1/2
// and the reproduction degree. c1 values up to (3/4)*c_theta match the theory
// that guarantees solvability; larger values are accepted as an explicit
// calibration choice and flagged via solvability_capped = false in config echoes.
struct AlgoConstants {
  double r = 0.25;
  double theta = 0.0;
  double c1 = 0.0;
  double c0 = 0.0;  // always c_theta(theta) * c1 / 2
  int degree = 1;
  int probe_resolution = 64;          // global covering-radius probes per axis
  double local_probe_spacing = 0.25;  // cone probe spacing = c1 * rho * this

  static AlgoConstants defaults(const Domain& domain, int degree);
  static AlgoConstants make(const Domain& domain, int degree, std::optional<double> r_override,
                            std::optional<double> theta_override, std::optional<double> c1_override);

  double c1_cap() const { return 0.75 * c_theta(theta); }
  bool solvability_capped() const { return c1 <= c1_cap() + 1e-12; }
};

// Per-point adaptive choice: the largest dyadic level m in {0,...,m0} whose
// cone K(x, 2^-m r) is covered by the local samples at scale c1 * 2^-m r,
// level 0 as fallback when no level qualifies.
struct LocalSelection {
  std::vector<double> x;
  int level = 0;
  double radius = 0.0;  // 2^-level * r
  bool condition_met = false;
  Cone cone;
  std::vector<std::uint32_t> inside;  // indices of P in the cone
};

// Weighted stencil ready to apply to any sample vector on P.
struct EvalRule {
  bool scenario_zero = false;    // global dichotomy fired: value is 0
  bool nearest_fallback = false; // every solve failed: nearest sample value
  int level = 0;
  double radius = 0.0;
  int retries = 0;
  double delta = 0.0;
  double lebesgue_sum = 0.0;
  std::vector<std::uint32_t> idx;  // indices into P
  std::vector<double> w;           // matching nonzero weights
};

// Prepared recovery operator over (domain, P, samples, constants). Immutable
// after construction; evaluation is pure and safe to run with any degree of
// parallelism (fallback counters are atomics).
class RecoveryOperator {
 public:
  RecoveryOperator(const Domain& domain, PointSet points, std::vector<double> samples,
                   AlgoConstants constants);

  int scenario() const { return scenario_; }
  int m0() const { return m0_; }
  double global_covering_radius() const { return h_global_; }
  const AlgoConstants& constants() const { return constants_; }
  const PointSet& points() const { return points_; }
  const Domain& domain() const { return domain_; }
  const std::vector<double>& samples() const { return samples_; }

  LocalSelection select_level(std::span<const double> x) const;

  // Weights at x (independent of the sample values).
  EvalRule rule_at(std::span<const double> x) const;
  double apply_rule(const EvalRule& rule, std::span<const double> samples) const;

  double evaluate(std::span<const double> x) const;
  std::vector<double> evaluate_on_grid(std::span<const double> probes_flat) const;
  std::vector<double> evaluate_on_grid_serial(std::span<const double> probes_flat) const;
  std::vector<EvalRule> rules_on_grid(std::span<const double> probes_flat) const;

  std::uint64_t retry_count() const { return retry_count_.load(); }
  std::uint64_t nearest_fallback_count() const { return nn_fallback_count_.load(); }

 private:
  struct Candidate {
    std::uint32_t idx;
    double dist;
  };
  struct Prepared {
    Cone cone;  // full-radius cone at x
    std::vector<Candidate> cands;  // inside the full cone, sorted by distance
  };

  Prepared prepare(std::span<const double> x) const;
  // Probe estimate of the covering radius of the first `count` candidates
  // inside the cone of radius rho; +inf when count == 0.
  double local_cover_estimate(const Prepared& prep, double rho, std::size_t count) const;
  std::size_t prefix_within(const Prepared& prep, double rho) const;
  std::uint32_t nearest_point(std::span<const double> x) const;

  Domain domain_;
  PointSet points_;
  std::vector<double> samples_;
  AlgoConstants constants_;
  double h_global_ = 0.0;
  int scenario_ = 2;
  int m0_ = 0;
  std::vector<std::uint32_t> sorted_;  // d = 1: points sorted by coordinate
  PolyBasis basis_;
  mutable std::atomic<std::uint64_t> retry_count_{0};
  mutable std::atomic<std::uint64_t> nn_fallback_count_{0};
};

}  // namespace sobrec
