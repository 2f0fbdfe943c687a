#include "sobrec/recovery.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "sobrec/errors.hpp"

namespace sobrec {

AlgoConstants AlgoConstants::defaults(const Domain& domain, int degree) {
  return make(domain, degree, std::nullopt, std::nullopt, std::nullopt);
}

AlgoConstants AlgoConstants::make(const Domain& domain, int degree, std::optional<double> r_override,
                                  std::optional<double> theta_override,
                                  std::optional<double> c1_override) {
  if (degree < 0) throw std::invalid_argument("AlgoConstants: degree must be >= 0");
  AlgoConstants c;
  c.degree = degree;
  c.theta = theta_override.value_or(domain.cone_half_angle);
  if (!(c.theta > 0.0) || c.theta > std::numbers::pi / 5.0 + 1e-15)
    throw std::invalid_argument("AlgoConstants: theta must lie in (0, pi/5]");
  c.r = r_override.value_or(domain.cone_radius);
  if (!(c.r > 0.0)) throw std::invalid_argument("AlgoConstants: r must be positive");
  c.c1 = c1_override.value_or(0.5 * 0.75 * c_theta(c.theta));
  if (!(c.c1 > 0.0)) throw std::invalid_argument("AlgoConstants: c1 must be positive");
  c.c0 = c_theta(c.theta) * c.c1 / 2.0;
  c.probe_resolution = domain.dim <= 2 ? 64 : 24;
  return c;
}

RecoveryOperator::RecoveryOperator(const Domain& domain, PointSet points,
                                   std::vector<double> samples, AlgoConstants constants)
    : domain_(domain.with_cone_parameters(constants.r, constants.theta)),
      points_(std::move(points)),
      samples_(std::move(samples)),
      constants_(constants),
      basis_(PolyBasis::make(domain.dim, constants.degree)) {
  if (points_.dim != domain_.dim)
    throw std::invalid_argument("RecoveryOperator: point set / domain dimension mismatch");
  if (samples_.size() != points_.size())
    throw std::invalid_argument("RecoveryOperator: sample / point count mismatch");
  const double n = static_cast<double>(points_.size());
  const double n_min = std::pow(constants_.r, -domain_.dim);
  if (n + 1e-9 < n_min)
    throw InfeasibleError("RecoveryOperator: n < r^-d, the adaptive levels are empty");

  h_global_ = covering_radius(points_, domain_, constants_.probe_resolution);
  scenario_ = h_global_ >= constants_.c0 * constants_.r ? 1 : 2;
  m0_ = static_cast<int>(std::floor(std::log2(constants_.r) + std::log2(n) / domain_.dim + 1e-12));

  if (domain_.dim == 1) {
    sorted_.resize(points_.size());
    for (std::size_t i = 0; i < sorted_.size(); ++i) sorted_[i] = static_cast<std::uint32_t>(i);
    const auto& c = points_.coords;
    std::sort(sorted_.begin(), sorted_.end(),
              [&c](std::uint32_t a, std::uint32_t b) { return c[a] < c[b]; });
  }
}

RecoveryOperator::Prepared RecoveryOperator::prepare(std::span<const double> x) const {
  Prepared prep;
  prep.cone = domain_.cone_at(x, constants_.r);
  const int d = domain_.dim;
  const double r = constants_.r;

  if (d == 1) {
    const double a = std::min(x[0], x[0] + r * prep.cone.direction[0]);
    const double b = std::max(x[0], x[0] + r * prep.cone.direction[0]);
    const auto& c = points_.coords;
    auto lo = std::lower_bound(sorted_.begin(), sorted_.end(), a,
                               [&c](std::uint32_t i, double v) { return c[i] < v; });
    for (auto it = lo; it != sorted_.end() && c[*it] <= b; ++it)
      prep.cands.push_back({*it, std::abs(c[*it] - x[0])});
  } else {
    const double cos_th = std::cos(constants_.theta) - 1e-12;
    for (std::size_t j = 0; j < points_.size(); ++j) {
      const double* p = points_.coords.data() + j * static_cast<std::size_t>(d);
      double n2 = 0.0, dot = 0.0;
      for (int k = 0; k < d; ++k) {
        const double t = p[k] - x[static_cast<std::size_t>(k)];
        n2 += t * t;
        dot += t * prep.cone.direction[static_cast<std::size_t>(k)];
      }
      if (n2 > r * r) continue;
      const double dist = std::sqrt(n2);
      if (dist > 0.0 && dot / dist < cos_th) continue;
      prep.cands.push_back({static_cast<std::uint32_t>(j), dist});
    }
  }
  std::sort(prep.cands.begin(), prep.cands.end(),
            [](const Candidate& a, const Candidate& b) { return a.dist < b.dist; });
  return prep;
}

std::size_t RecoveryOperator::prefix_within(const Prepared& prep, double rho) const {
  const auto it = std::upper_bound(prep.cands.begin(), prep.cands.end(), rho,
                                   [](double v, const Candidate& c) { return v < c.dist; });
  return static_cast<std::size_t>(it - prep.cands.begin());
}

double RecoveryOperator::local_cover_estimate(const Prepared& prep, double rho,
                                              std::size_t count) const {
  if (count == 0) return std::numeric_limits<double>::infinity();
  const int d = domain_.dim;
  const double spacing = std::max(constants_.c1 * rho * constants_.local_probe_spacing, 1e-9 * rho);
  double worst = 0.0;

  auto min_dist2_to = [&](std::span<const double> probe) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < count; ++j) {
      const double* q = points_.coords.data() + prep.cands[j].idx * static_cast<std::size_t>(d);
      double s = 0.0;
      for (int k = 0; k < d; ++k) {
        const double t = probe[static_cast<std::size_t>(k)] - q[k];
        s += t * t;
      }
      best = std::min(best, s);
    }
    return best;
  };

  if (d == 1) {
    const int steps = std::min(400, static_cast<int>(std::ceil(rho / spacing)));
    for (int i = 0; i <= steps; ++i) {
      const double probe = prep.cone.apex[0] + prep.cone.direction[0] * rho * i / steps;
      worst = std::max(worst, min_dist2_to(std::span<const double>(&probe, 1)));
    }
    return std::sqrt(worst);
  }

  const int per_dim = std::min(120, static_cast<int>(std::ceil(2.0 * rho / spacing)) + 1);
  worst = min_dist2_to(prep.cone.apex);
  std::vector<int> idx(static_cast<std::size_t>(d), 0);
  std::vector<double> probe(static_cast<std::size_t>(d));
  Cone cone = prep.cone;
  cone.radius = rho;
  while (true) {
    for (int k = 0; k < d; ++k)
      probe[static_cast<std::size_t>(k)] = cone.apex[static_cast<std::size_t>(k)] - rho +
                                           2.0 * rho * idx[static_cast<std::size_t>(k)] / (per_dim - 1);
    if (cone.contains(probe)) worst = std::max(worst, min_dist2_to(probe));
    int k = 0;
    while (k < d && ++idx[static_cast<std::size_t>(k)] == per_dim) {
      idx[static_cast<std::size_t>(k)] = 0;
      ++k;
    }
    if (k == d) break;
  }
  return std::sqrt(worst);
}

LocalSelection RecoveryOperator::select_level(std::span<const double> x) const {
  const Prepared prep = prepare(x);
  LocalSelection sel;
  sel.x.assign(x.begin(), x.end());

  for (int m = m0_; m >= 0; --m) {
    const double rho = std::ldexp(constants_.r, -m);
    const std::size_t count = prefix_within(prep, rho);
    if (count == 0) continue;
    const double h = local_cover_estimate(prep, rho, count);
    if (h <= constants_.c1 * rho) {
      sel.level = m;
      sel.radius = rho;
      sel.condition_met = true;
      sel.cone = prep.cone;
      sel.cone.radius = rho;
      sel.inside.reserve(count);
      for (std::size_t j = 0; j < count; ++j) sel.inside.push_back(prep.cands[j].idx);
      return sel;
    }
  }

  // no level qualifies: fall back to level 0 with the full cone
  sel.level = 0;
  sel.radius = constants_.r;
  sel.condition_met = false;
  sel.cone = prep.cone;
  const std::size_t count = prefix_within(prep, constants_.r);
  sel.inside.reserve(count);
  for (std::size_t j = 0; j < count; ++j) sel.inside.push_back(prep.cands[j].idx);
  return sel;
}

std::uint32_t RecoveryOperator::nearest_point(std::span<const double> x) const {
  const int d = domain_.dim;
  double best = std::numeric_limits<double>::infinity();
  std::uint32_t arg = 0;
  for (std::size_t j = 0; j < points_.size(); ++j) {
    const double* p = points_.coords.data() + j * static_cast<std::size_t>(d);
    double s = 0.0;
    for (int k = 0; k < d; ++k) {
      const double t = p[k] - x[static_cast<std::size_t>(k)];
      s += t * t;
    }
    if (s < best) {
      best = s;
      arg = static_cast<std::uint32_t>(j);
    }
  }
  return arg;
}

EvalRule RecoveryOperator::rule_at(std::span<const double> x) const {
  EvalRule rule;
  if (scenario_ == 1) {
    rule.scenario_zero = true;
    return rule;
  }

  const Prepared prep = prepare(x);
  const int d = domain_.dim;
  const int N = basis_.size();

  // starting level: maximal m whose cone passes the covering test
  int start = 0;
  {
    for (int m = m0_; m >= 0; --m) {
      const double rho = std::ldexp(constants_.r, -m);
      const std::size_t count = prefix_within(prep, rho);
      if (count == 0) continue;
      if (local_cover_estimate(prep, rho, count) <= constants_.c1 * rho) {
        start = m;
        break;
      }
    }
  }

  std::vector<double> qpts;
  for (int m = start; m >= 0; --m) {
    const double rho = std::ldexp(constants_.r, -m);
    const std::size_t count = prefix_within(prep, rho);
    if (static_cast<int>(count) < N) {
      ++rule.retries;
      continue;
    }
    // exact hit on a sample point: interpolate it directly
    if (prep.cands[0].dist == 0.0) {
      rule.idx = {prep.cands[0].idx};
      rule.w = {1.0};
      rule.level = m;
      rule.radius = rho;
      rule.lebesgue_sum = 1.0;
      retry_count_.fetch_add(static_cast<std::uint64_t>(rule.retries), std::memory_order_relaxed);
      return rule;
    }
    const double h_loc = local_cover_estimate(prep, rho, count);
    // support scale: a multiple of the covering radius, floored so at least N
    // points lie strictly inside the weight support even across one-sided gaps
    double delta = std::max(2.0 * h_loc, 1.05 * prep.cands[static_cast<std::size_t>(N - 1)].dist);
    qpts.resize(count * static_cast<std::size_t>(d));
    for (std::size_t j = 0; j < count; ++j) {
      const double* p = points_.coords.data() + prep.cands[j].idx * static_cast<std::size_t>(d);
      for (int k = 0; k < d; ++k) qpts[j * static_cast<std::size_t>(d) + static_cast<std::size_t>(k)] = p[k];
    }
    for (int attempt = 0; attempt < 3; ++attempt) {
      const MlsSolveResult res = solve_mls(x, qpts, basis_, delta);
      if (res.status == MlsStatus::ok) {
        rule.level = m;
        rule.radius = rho;
        rule.delta = delta;
        rule.lebesgue_sum = res.w.lebesgue_sum;
        for (std::size_t j = 0; j < count; ++j) {
          if (res.w.weights[j] != 0.0) {
            rule.idx.push_back(prep.cands[j].idx);
            rule.w.push_back(res.w.weights[j]);
          }
        }
        retry_count_.fetch_add(static_cast<std::uint64_t>(rule.retries), std::memory_order_relaxed);
        return rule;
      }
      ++rule.retries;
      delta *= 2.0;  // a wider support often fixes clustered configurations
      if (delta > 4.0 * rho) break;
    }
  }

  // all levels failed: nearest sample value
  rule.nearest_fallback = true;
  rule.idx = {nearest_point(x)};
  rule.w = {1.0};
  rule.lebesgue_sum = 1.0;
  rule.level = 0;
  rule.radius = constants_.r;
  retry_count_.fetch_add(static_cast<std::uint64_t>(rule.retries), std::memory_order_relaxed);
  nn_fallback_count_.fetch_add(1, std::memory_order_relaxed);
  return rule;
}

double RecoveryOperator::apply_rule(const EvalRule& rule, std::span<const double> samples) const {
  if (rule.scenario_zero) return 0.0;
  double s = 0.0;
  for (std::size_t j = 0; j < rule.idx.size(); ++j) s += rule.w[j] * samples[rule.idx[j]];
  return s;
}

double RecoveryOperator::evaluate(std::span<const double> x) const {
  if (scenario_ == 1) return 0.0;
  return apply_rule(rule_at(x), samples_);
}

std::vector<double> RecoveryOperator::evaluate_on_grid(std::span<const double> probes_flat) const {
  const int d = domain_.dim;
  const std::size_t np = probes_flat.size() / static_cast<std::size_t>(d);
  std::vector<double> out(np);
#pragma omp parallel for schedule(dynamic, 16)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(np); ++i) {
    const std::span<const double> x{probes_flat.data() + static_cast<std::size_t>(i) * static_cast<std::size_t>(d),
                                    static_cast<std::size_t>(d)};
    out[static_cast<std::size_t>(i)] = evaluate(x);
  }
  return out;
}

std::vector<double> RecoveryOperator::evaluate_on_grid_serial(std::span<const double> probes_flat) const {
  const int d = domain_.dim;
  const std::size_t np = probes_flat.size() / static_cast<std::size_t>(d);
  std::vector<double> out(np);
  for (std::size_t i = 0; i < np; ++i) {
    const std::span<const double> x{probes_flat.data() + i * static_cast<std::size_t>(d),
                                    static_cast<std::size_t>(d)};
    out[i] = evaluate(x);
  }
  return out;
}

std::vector<EvalRule> RecoveryOperator::rules_on_grid(std::span<const double> probes_flat) const {
  const int d = domain_.dim;
  const std::size_t np = probes_flat.size() / static_cast<std::size_t>(d);
  std::vector<EvalRule> out(np);
#pragma omp parallel for schedule(dynamic, 16)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(np); ++i) {
    const std::span<const double> x{probes_flat.data() + static_cast<std::size_t>(i) * static_cast<std::size_t>(d),
                                    static_cast<std::size_t>(d)};
    out[static_cast<std::size_t>(i)] = rule_at(x);
  }
  return out;
}

}  // namespace sobrec
