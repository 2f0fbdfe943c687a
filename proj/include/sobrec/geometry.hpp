#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sobrec/pointset.hpp"

namespace sobrec {

// Cone with apex x, unit direction xi, half angle theta and radius rho:
//   K = { x + t*u : u unit, <u, xi> >= cos(theta), 0 <= t <= rho }.
// In d = 1 this degenerates to the interval [x, x + rho*xi] with xi in {-1,+1}.
struct Cone {
  std::vector<double> apex;
  std::vector<double> direction;
  double half_angle = 0.0;
  double radius = 0.0;

  // Closed membership test.
  bool contains(std::span<const double> y) const;
  void bounding_box(std::vector<double>& lo, std::vector<double>& hi) const;
};

struct StarPiece {
  std::vector<double> center;
  double ball_radius = 0.0;
};

enum class DomainKind { unit_cube, ball, l_shape_2d };

// Bounded open region with interior-cone parameters (cone_radius, cone_half_angle)
// and an explicit star-center direction field. All values are immutable after
// construction; every operation is pure and safe to call concurrently.
class Domain {
 public:
  static Domain unit_cube(int d);
  static Domain ball(int d, double radius = 1.0);
  static Domain l_shape_2d();
  // kind is "cube", "ball" or "lshape"
  static Domain by_name(const std::string& kind, int d);

  DomainKind kind = DomainKind::unit_cube;
  int dim = 1;
  double cone_radius = 0.25;      // r
  double cone_half_angle = 0.0;   // theta, in (0, pi/5]
  double volume = 1.0;
  double ball_radius = 1.0;  // ball kind only
  std::vector<double> box_lo, box_hi;
  std::vector<StarPiece> star_centers;

  std::string id() const;
  std::string kind_name() const;

  Domain with_cone_parameters(double r, double theta) const;

  bool contains(std::span<const double> x) const;          // open region
  bool contains_closure(std::span<const double> x) const;  // closure

  // Index of the first star piece containing x (lowest index wins at overlaps).
  int star_piece_index(std::span<const double> x) const;

  // Cone with apex x, the domain's half angle, radius rho, directed from x
  // toward the star center of the first piece containing x. If x coincides
  // with that center the direction is the first canonical basis vector.
  Cone cone_at(std::span<const double> x, double rho) const;
};

// sin(theta) / (1 + sin(theta)), theta in (0, pi]
double c_theta(double theta);

// ceil(8*sqrt(d) / (c_theta(theta) * c1)), the default cube subdivision count
int default_grid_subdivision(int dim, double theta, double c1);

// Closed sub-cubes of Q(y, rho) (side 2*rho/ell) fully contained in the domain,
// kept when all 2^d corners and the center lie in the closure.
struct GridCells {
  std::vector<double> origin;  // y
  double half_width = 0.0;     // rho
  int subdivisions = 0;        // ell
  // cell i occupies [lo[i*d+k], hi[i*d+k]] per coordinate k
  std::vector<double> lo, hi;
  std::size_t count() const { return origin.empty() ? 0 : lo.size() / origin.size(); }
};

GridCells grid_cells(const Domain& domain, std::span<const double> y, double rho, int ell);

// Probe-grid estimate of sup_{x in region} dist(x, P): max over a deterministic
// inclusive tensor grid (resolution points per axis over the region's bounding
// box, filtered to the region's closure) of the distance to the nearest point.
// Always a lower estimate of the true supremum, with error at most
// sqrt(d) * (box side) / resolution. Returns +inf when no point of P lies in
// the region; throws when the probe set is empty.
double covering_radius(const PointSet& P, const Domain& domain, int resolution);
double covering_radius_serial(const PointSet& P, const Domain& domain, int resolution);

// Same estimate inside a cone; only P restricted to the cone counts.
double covering_radius(const PointSet& P, const Cone& cone, int resolution);

// Shared low-level kernel: max over probes of min distance to pts (flat, n*dim).
double max_min_distance(std::span<const double> probes, std::span<const double> pts, int dim);
double max_min_distance_serial(std::span<const double> probes, std::span<const double> pts, int dim);

namespace geom_detail {
double dist2(std::span<const double> a, std::span<const double> b);
}

}  // namespace sobrec
