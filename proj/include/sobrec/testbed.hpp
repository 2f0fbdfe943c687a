#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sobrec/geometry.hpp"

namespace sobrec {

using RealFn = std::function<double(std::span<const double>)>;

// Point-wise evaluable function with partial-derivative oracles D^alpha for
// all |alpha| <= max_order and the analytic integral over its home domain
// when known.
struct TestFunction {
  std::string id;
  int dim = 1;
  int max_order = 0;
  RealFn f;
  std::function<double(std::span<const int>, std::span<const double>)> deriv;
  std::optional<double> integral;
  std::string smoothness;

  double operator()(std::span<const double> x) const { return f(x); }
};

// Cached deterministic midpoint tensor grid intersected with the open domain.
// Quadrature on it is vol(domain) * mean over kept nodes.
struct ReferenceGrid {
  int dim = 1;
  int resolution = 0;
  std::vector<double> pts;  // count * dim
  double volume = 0.0;
  std::size_t count() const { return dim == 0 ? 0 : pts.size() / static_cast<std::size_t>(dim); }
};

std::shared_ptr<const ReferenceGrid> reference_grid(const Domain& domain, int resolution);

// Grid L_q distance between two point-wise evaluable functions:
// q < inf: (vol * mean |f-g|^q)^(1/q); q = inf: grid max (an under-estimate).
double lq_error(const RealFn& f, const RealFn& g, const Domain& domain, double q, int resolution);
double lq_error_on_values(std::span<const double> fv, std::span<const double> gv, double q,
                          double volume);

// Quadrature estimate of the W_p^s norm and of the order-s seminorm.
struct SobolevEstimate {
  double norm = 0.0;
  double seminorm = 0.0;
};
SobolevEstimate sobolev_norm_estimate(const TestFunction& f, const Domain& domain, double p, int s,
                                      int resolution = 0);

// m smooth bumps with disjoint supports on a regular sub-grid, radius
// proportional to m^(-1/d), scaled so the estimated W_inf^s norm of each bump
// is 1. Each bump is a tensor product of the standard profile
// t -> exp(-1/(1-t^2)); its support is the cube of half width
// ball_radius/sqrt(d), contained in the ball of radius ball_radius around the
// center.
struct BumpFamily {
  int dim = 1;
  int m = 0;
  int degree = 0;          // s used for the normalization
  int grid_k = 0;          // sub-grid subdivisions per axis
  double pitch = 0.0;
  double ball_radius = 0.0;
  double halfwidth = 0.0;  // tensor half width
  double height = 0.0;     // common scale H
  std::vector<double> centers;  // m * dim
  std::vector<int> signs;
  std::vector<int> cell_to_bump;  // grid cell -> bump index or -1
  std::vector<double> box_lo;
  double bump_sup_norm = 0.0;       // sup |bump_i|
  double bump_integral = 0.0;       // integral of one (unsigned) bump
  double support_volume = 0.0;      // volume of one support cube

  int bump_at(std::span<const double> x) const;  // -1 when outside all supports
  bool support_contains(int i, std::span<const double> x) const;
  double value(std::span<const double> x) const;
  double derivative(std::span<const int> alpha, std::span<const double> x) const;
  TestFunction to_test_function() const;
};

BumpFamily make_bump_family(const Domain& domain, int m, std::span<const int> signs, int s,
                            double width_fraction = 0.25);

// Fixed dictionary: constant, coordinate monomials up to degree s_max, a
// Gaussian, a separable sine product and one bump family per entry of ms.
std::vector<TestFunction> builtin_suite(const Domain& domain, int s_max,
                                        std::span<const int> ms = {});

// Named members used by the CLI (const1, mono-..., gauss-s<sigma>, sine-k<k>,
// family-m<m>).
TestFunction testbed_function(const Domain& domain, const std::string& id, int s_max);

// Standard profile exp(-1/(1-t^2)) and its derivatives (order <= 3).
double bump_profile(int order, double t);
// sup_t |bump_profile(order, t)|, order <= 3
double bump_profile_sup(int order);
// integral of the profile over (-1, 1)
inline constexpr double kBumpProfileIntegral = 0.44399381616807865;

}  // namespace sobrec
