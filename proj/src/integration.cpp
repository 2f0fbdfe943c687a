#include "sobrec/integration.hpp"

#include <cmath>

#include "sobrec/errors.hpp"
#include "sobrec/sampling.hpp"

namespace sobrec {

int default_quad_resolution(int dim) { return dim == 1 ? 16384 : (dim == 2 ? 512 : 64); }

static double quadrature_mean(const RecoveryOperator& op, const ReferenceGrid& grid) {
  const std::vector<double> vals = op.evaluate_on_grid(grid.pts);
  double acc = 0.0;
  for (const double v : vals) acc += v;
  return acc / static_cast<double>(vals.size());
}

IntegralEstimate integrate_cv(const RealFn& f, const Domain& domain, const AlgoConstants& constants,
                              std::size_t n, std::uint64_t seed, int quad_resolution) {
  const std::size_t n1 = n / 2;
  const std::size_t n2 = n - n1;
  const double n_min = std::pow(constants.r, -domain.dim);
  if (static_cast<double>(n1) + 1e-9 < n_min)
    throw InfeasibleError("integrate_cv: budget too small, each half must satisfy n/2 >= r^-d");
  if (quad_resolution <= 0) quad_resolution = default_quad_resolution(domain.dim);

  PointSet P1 = sample_iid_uniform(domain, n1, seed, 1);
  std::vector<double> samples(n1);
  for (std::size_t j = 0; j < n1; ++j) samples[j] = f(P1.point(j));
  const RecoveryOperator op(domain, std::move(P1), std::move(samples), constants);

  const auto grid = reference_grid(domain, quad_resolution);
  const double integral_fn = domain.volume * quadrature_mean(op, *grid);

  const PointSet P2 = sample_iid_uniform(domain, n2, seed, 2);
  double resid = 0.0;
  for (std::size_t j = 0; j < n2; ++j) resid += f(P2.point(j)) - op.evaluate(P2.point(j));
  resid /= static_cast<double>(n2);

  IntegralEstimate est;
  est.value = integral_fn + domain.volume * resid;
  est.method = "cv";
  est.n_approx = n1;
  est.n_mc = n2;
  est.seed = seed;
  est.scenario = op.scenario();
  est.retries = op.retry_count();
  est.nearest_fallbacks = op.nearest_fallback_count();
  return est;
}

IntegralEstimate integrate_approx_only(const RealFn& f, const Domain& domain,
                                       const AlgoConstants& constants, std::size_t n,
                                       std::uint64_t seed, int quad_resolution) {
  const double n_min = std::pow(constants.r, -domain.dim);
  if (static_cast<double>(n) + 1e-9 < n_min)
    throw InfeasibleError("integrate_approx_only: budget too small, n >= r^-d required");
  if (quad_resolution <= 0) quad_resolution = default_quad_resolution(domain.dim);

  PointSet P = sample_iid_uniform(domain, n, seed, 1);
  std::vector<double> samples(n);
  for (std::size_t j = 0; j < n; ++j) samples[j] = f(P.point(j));
  const RecoveryOperator op(domain, std::move(P), std::move(samples), constants);

  const auto grid = reference_grid(domain, quad_resolution);

  IntegralEstimate est;
  est.value = domain.volume * quadrature_mean(op, *grid);
  est.method = "approx-only";
  est.n_approx = n;
  est.n_mc = 0;
  est.seed = seed;
  est.scenario = op.scenario();
  est.retries = op.retry_count();
  est.nearest_fallbacks = op.nearest_fallback_count();
  return est;
}

IntegralEstimate integrate_plain_mc(const RealFn& f, const Domain& domain, std::size_t n,
                                    std::uint64_t seed) {
  if (n < 1) throw InfeasibleError("integrate_plain_mc: n must be >= 1");
  const PointSet P = sample_iid_uniform(domain, n, seed, 0);
  double acc = 0.0;
  for (std::size_t j = 0; j < n; ++j) acc += f(P.point(j));

  IntegralEstimate est;
  est.value = domain.volume * acc / static_cast<double>(n);
  est.method = "plain-mc";
  est.n_approx = 0;
  est.n_mc = n;
  est.seed = seed;
  return est;
}

}  // namespace sobrec
