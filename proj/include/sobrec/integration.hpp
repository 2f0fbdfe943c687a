#pragma once

#include <cstdint>
#include <string>

#include "sobrec/recovery.hpp"
#include "sobrec/testbed.hpp"

namespace sobrec {

struct IntegralEstimate {
  double value = 0.0;
  std::string method;  // cv | approx-only | plain-mc
  std::size_t n_approx = 0;
  std::size_t n_mc = 0;
  std::uint64_t seed = 0;
  int scenario = 0;  // 0 when no recovery operator is involved
  std::uint64_t retries = 0;
  std::uint64_t nearest_fallbacks = 0;
};

// Control variates: build the recovery approximant f_n from the first n/2 iid
// points, integrate it by fixed midpoint quadrature, and correct with plain
// Monte Carlo on the residual over n - n/2 fresh points from a disjoint
// stream. Requires n/2 >= r^-d.
IntegralEstimate integrate_cv(const RealFn& f, const Domain& domain, const AlgoConstants& constants,
                              std::size_t n, std::uint64_t seed, int quad_resolution = 0);

// Quadrature of the approximant built from all n points; no fresh points.
IntegralEstimate integrate_approx_only(const RealFn& f, const Domain& domain,
                                       const AlgoConstants& constants, std::size_t n,
                                       std::uint64_t seed, int quad_resolution = 0);

// vol(domain) * mean of f over n iid points.
IntegralEstimate integrate_plain_mc(const RealFn& f, const Domain& domain, std::size_t n,
                                    std::uint64_t seed);

int default_quad_resolution(int dim);

}  // namespace sobrec
