#include "sobrec/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace sobrec {

namespace geom_detail {

double dist2(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

}  // namespace geom_detail

using geom_detail::dist2;

bool Cone::contains(std::span<const double> y) const {
  const std::size_t d = apex.size();
  double n2 = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    const double t = y[i] - apex[i];
    n2 += t * t;
  }
  if (n2 > radius * radius) return false;
  if (n2 == 0.0) return true;
  const double n = std::sqrt(n2);
  double dot = 0.0;
  for (std::size_t i = 0; i < d; ++i) dot += (y[i] - apex[i]) * direction[i];
  return dot / n >= std::cos(half_angle) - 1e-12;
}

void Cone::bounding_box(std::vector<double>& lo, std::vector<double>& hi) const {
  const std::size_t d = apex.size();
  lo.assign(d, 0.0);
  hi.assign(d, 0.0);
  if (d == 1) {
    // exact interval
    const double a = apex[0];
    const double b = apex[0] + radius * direction[0];
    lo[0] = std::min(a, b);
    hi[0] = std::max(a, b);
    return;
  }
  // conservative box around the full ball of the cone
  for (std::size_t i = 0; i < d; ++i) {
    lo[i] = apex[i] - radius;
    hi[i] = apex[i] + radius;
  }
}

static void check_dim(const Domain& dom, std::span<const double> x) {
  if (static_cast<int>(x.size()) != dom.dim)
    throw std::invalid_argument("point dimension does not match domain dimension");
}

Domain Domain::unit_cube(int d) {
  if (d < 1 || d > 3) throw std::invalid_argument("unit_cube: d must be 1, 2 or 3");
  Domain dom;
  dom.kind = DomainKind::unit_cube;
  dom.dim = d;
  dom.cone_radius = 0.25;
  dom.cone_half_angle = std::numbers::pi / 5.0;
  dom.volume = 1.0;
  dom.box_lo.assign(d, 0.0);
  dom.box_hi.assign(d, 1.0);
  dom.star_centers = {{std::vector<double>(d, 0.5), 0.25}};
  return dom;
}

Domain Domain::ball(int d, double radius) {
  if (d < 1 || d > 3) throw std::invalid_argument("ball: d must be 1, 2 or 3");
  if (radius <= 0.0) throw std::invalid_argument("ball: radius must be positive");
  Domain dom;
  dom.kind = DomainKind::ball;
  dom.dim = d;
  dom.cone_radius = 0.5 * radius;
  dom.cone_half_angle = std::numbers::pi / 5.0;
  const double omega = d == 1 ? 2.0 : (d == 2 ? std::numbers::pi : 4.0 * std::numbers::pi / 3.0);
  dom.volume = omega * std::pow(radius, d);
  dom.ball_radius = radius;
  dom.box_lo.assign(d, -radius);
  dom.box_hi.assign(d, radius);
  dom.star_centers = {{std::vector<double>(d, 0.0), 0.5 * radius}};
  return dom;
}

Domain Domain::l_shape_2d() {
  // (0,1)^2 minus the closed upper-right quadrant [1/2,1]x[1/2,1]
  Domain dom;
  dom.kind = DomainKind::l_shape_2d;
  dom.dim = 2;
  dom.cone_radius = 0.2;
  dom.cone_half_angle = 0.18;  // narrow enough to clear the reentrant corner
  dom.volume = 0.75;
  dom.box_lo = {0.0, 0.0};
  dom.box_hi = {1.0, 1.0};
  dom.star_centers = {{{0.25, 0.5}, 0.2},   // left column (0,1/2)x(0,1)
                      {{0.5, 0.25}, 0.2}};  // bottom row (0,1)x(0,1/2)
  return dom;
}

Domain Domain::by_name(const std::string& kind, int d) {
  if (kind == "cube") return unit_cube(d);
  if (kind == "ball") return ball(d);
  if (kind == "lshape") {
    if (d != 2) throw std::invalid_argument("lshape domain requires d = 2");
    return l_shape_2d();
  }
  throw std::invalid_argument("unknown domain kind: " + kind);
}

std::string Domain::kind_name() const {
  switch (kind) {
    case DomainKind::unit_cube: return "cube";
    case DomainKind::ball: return "ball";
    case DomainKind::l_shape_2d: return "lshape";
  }
  return "?";
}

std::string Domain::id() const { return kind_name() + "-d" + std::to_string(dim); }

Domain Domain::with_cone_parameters(double r, double theta) const {
  if (r <= 0.0) throw std::invalid_argument("cone radius must be positive");
  if (!(theta > 0.0) || theta > std::numbers::pi / 5.0 + 1e-15)
    throw std::invalid_argument("cone half angle must lie in (0, pi/5]");
  Domain dom = *this;
  dom.cone_radius = r;
  dom.cone_half_angle = theta;
  return dom;
}

bool Domain::contains(std::span<const double> x) const {
  check_dim(*this, x);
  for (const double c : x)
    if (!std::isfinite(c)) return false;
  switch (kind) {
    case DomainKind::unit_cube:
      for (const double c : x)
        if (!(c > 0.0 && c < 1.0)) return false;
      return true;
    case DomainKind::ball: {
      double n2 = 0.0;
      for (const double c : x) n2 += c * c;
      return n2 < ball_radius * ball_radius;
    }
    case DomainKind::l_shape_2d:
      if (!(x[0] > 0.0 && x[0] < 1.0 && x[1] > 0.0 && x[1] < 1.0)) return false;
      return !(x[0] >= 0.5 && x[1] >= 0.5);
  }
  return false;
}

bool Domain::contains_closure(std::span<const double> x) const {
  check_dim(*this, x);
  switch (kind) {
    case DomainKind::unit_cube:
      for (const double c : x)
        if (!(c >= 0.0 && c <= 1.0)) return false;
      return true;
    case DomainKind::ball: {
      double n2 = 0.0;
      for (const double c : x) n2 += c * c;
      return n2 <= ball_radius * ball_radius;
    }
    case DomainKind::l_shape_2d:
      if (!(x[0] >= 0.0 && x[0] <= 1.0 && x[1] >= 0.0 && x[1] <= 1.0)) return false;
      return !(x[0] > 0.5 && x[1] > 0.5);
  }
  return false;
}

int Domain::star_piece_index(std::span<const double> x) const {
  if (kind == DomainKind::l_shape_2d) return x[0] < 0.5 ? 0 : 1;
  return 0;
}

Cone Domain::cone_at(std::span<const double> x, double rho) const {
  check_dim(*this, x);
  if (!contains(x)) throw std::invalid_argument("cone_at: point not in the domain");
  if (!(rho > 0.0) || rho > cone_radius + 1e-15)
    throw std::invalid_argument("cone_at: rho must lie in (0, r]");
  Cone cone;
  cone.apex.assign(x.begin(), x.end());
  cone.half_angle = cone_half_angle;
  cone.radius = rho;
  const auto& z = star_centers[static_cast<std::size_t>(star_piece_index(x))].center;
  std::vector<double> dir(x.size(), 0.0);
  double n2 = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    dir[i] = z[i] - x[i];
    n2 += dir[i] * dir[i];
  }
  if (n2 < 1e-28) {
    dir.assign(x.size(), 0.0);
    dir[0] = 1.0;  // apex is the star center: declared tie-break
  } else {
    const double n = std::sqrt(n2);
    for (double& c : dir) c /= n;
  }
  cone.direction = std::move(dir);
  return cone;
}

double c_theta(double theta) {
  if (!(theta > 0.0) || theta > std::numbers::pi + 1e-15)
    throw std::invalid_argument("c_theta: theta must lie in (0, pi]");
  const double s = std::sin(theta);
  return s / (1.0 + s);
}

int default_grid_subdivision(int dim, double theta, double c1) {
  if (c1 <= 0.0) throw std::invalid_argument("default_grid_subdivision: c1 must be positive");
  return static_cast<int>(std::ceil(8.0 * std::sqrt(static_cast<double>(dim)) / (c_theta(theta) * c1)));
}

GridCells grid_cells(const Domain& domain, std::span<const double> y, double rho, int ell) {
  check_dim(domain, y);
  if (ell < 1) throw std::invalid_argument("grid_cells: ell must be >= 1");
  const int d = domain.dim;
  GridCells out;
  out.origin.assign(y.begin(), y.end());
  out.half_width = rho;
  out.subdivisions = ell;
  const double side = 2.0 * rho / ell;

  std::vector<int> idx(static_cast<std::size_t>(d), 0);
  std::vector<double> lo(static_cast<std::size_t>(d)), hi(static_cast<std::size_t>(d)),
      corner(static_cast<std::size_t>(d)), center(static_cast<std::size_t>(d));
  while (true) {
    for (int k = 0; k < d; ++k) {
      lo[static_cast<std::size_t>(k)] = y[static_cast<std::size_t>(k)] - rho + idx[static_cast<std::size_t>(k)] * side;
      hi[static_cast<std::size_t>(k)] = lo[static_cast<std::size_t>(k)] + side;
      center[static_cast<std::size_t>(k)] = 0.5 * (lo[static_cast<std::size_t>(k)] + hi[static_cast<std::size_t>(k)]);
    }
    bool ok = domain.contains_closure(center);
    for (int mask = 0; ok && mask < (1 << d); ++mask) {
      for (int k = 0; k < d; ++k)
        corner[static_cast<std::size_t>(k)] =
            (mask >> k) & 1 ? hi[static_cast<std::size_t>(k)] : lo[static_cast<std::size_t>(k)];
      ok = domain.contains_closure(corner);
    }
    if (ok) {
      out.lo.insert(out.lo.end(), lo.begin(), lo.end());
      out.hi.insert(out.hi.end(), hi.begin(), hi.end());
    }
    int k = 0;
    while (k < d && ++idx[static_cast<std::size_t>(k)] == ell) {
      idx[static_cast<std::size_t>(k)] = 0;
      ++k;
    }
    if (k == d) break;
  }
  return out;
}

// Inclusive tensor grid over [lo, hi], resolution points per axis.
static std::vector<double> tensor_probes(std::span<const double> lo, std::span<const double> hi,
                                         int resolution) {
  const int d = static_cast<int>(lo.size());
  std::vector<double> probes;
  std::vector<int> idx(static_cast<std::size_t>(d), 0);
  std::vector<double> x(static_cast<std::size_t>(d));
  while (true) {
    for (int k = 0; k < d; ++k) {
      const double t = resolution == 1 ? 0.5 : static_cast<double>(idx[static_cast<std::size_t>(k)]) / (resolution - 1);
      x[static_cast<std::size_t>(k)] = lo[static_cast<std::size_t>(k)] + t * (hi[static_cast<std::size_t>(k)] - lo[static_cast<std::size_t>(k)]);
    }
    probes.insert(probes.end(), x.begin(), x.end());
    int k = 0;
    while (k < d && ++idx[static_cast<std::size_t>(k)] == resolution) {
      idx[static_cast<std::size_t>(k)] = 0;
      ++k;
    }
    if (k == d) break;
  }
  return probes;
}

double max_min_distance_serial(std::span<const double> probes, std::span<const double> pts, int dim) {
  const std::size_t np = probes.size() / static_cast<std::size_t>(dim);
  const std::size_t n = pts.size() / static_cast<std::size_t>(dim);
  double worst = 0.0;
  for (std::size_t i = 0; i < np; ++i) {
    const double* p = probes.data() + i * static_cast<std::size_t>(dim);
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < n; ++j) {
      const double* q = pts.data() + j * static_cast<std::size_t>(dim);
      double s = 0.0;
      for (int k = 0; k < dim; ++k) {
        const double t = p[k] - q[k];
        s += t * t;
      }
      best = std::min(best, s);
    }
    worst = std::max(worst, best);
  }
  return std::sqrt(worst);
}

double max_min_distance(std::span<const double> probes, std::span<const double> pts, int dim) {
  const std::size_t np = probes.size() / static_cast<std::size_t>(dim);
  const std::size_t n = pts.size() / static_cast<std::size_t>(dim);
  double worst = 0.0;
#pragma omp parallel for schedule(static) reduction(max : worst)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(np); ++i) {
    const double* p = probes.data() + static_cast<std::size_t>(i) * static_cast<std::size_t>(dim);
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < n; ++j) {
      const double* q = pts.data() + j * static_cast<std::size_t>(dim);
      double s = 0.0;
      for (int k = 0; k < dim; ++k) {
        const double t = p[k] - q[k];
        s += t * t;
      }
      best = std::min(best, s);
    }
    worst = std::max(worst, best);
  }
  return std::sqrt(worst);
}

static std::vector<double> domain_probes(const Domain& domain, int resolution) {
  if (resolution < 8) throw std::invalid_argument("covering_radius: resolution must be >= 8");
  std::vector<double> raw = tensor_probes(domain.box_lo, domain.box_hi, resolution);
  std::vector<double> kept;
  const int d = domain.dim;
  const std::size_t np = raw.size() / static_cast<std::size_t>(d);
  for (std::size_t i = 0; i < np; ++i) {
    std::span<const double> x{raw.data() + i * static_cast<std::size_t>(d), static_cast<std::size_t>(d)};
    if (domain.contains_closure(x)) kept.insert(kept.end(), x.begin(), x.end());
  }
  if (kept.empty()) throw std::runtime_error("covering_radius: empty probe set for the region");
  return kept;
}

template <typename Kernel>
static double covering_radius_impl(const PointSet& P, const Domain& domain, int resolution, Kernel kernel) {
  if (P.dim != domain.dim) throw std::invalid_argument("covering_radius: point set / domain dimension mismatch");
  const std::vector<double> probes = domain_probes(domain, resolution);
  if (P.size() == 0) return std::numeric_limits<double>::infinity();
  return kernel(probes, P.coords, domain.dim);
}

double covering_radius(const PointSet& P, const Domain& domain, int resolution) {
  return covering_radius_impl(P, domain, resolution, max_min_distance);
}

double covering_radius_serial(const PointSet& P, const Domain& domain, int resolution) {
  return covering_radius_impl(P, domain, resolution, max_min_distance_serial);
}

double covering_radius(const PointSet& P, const Cone& cone, int resolution) {
  if (resolution < 8) throw std::invalid_argument("covering_radius: resolution must be >= 8");
  const int d = static_cast<int>(cone.apex.size());
  if (P.dim != d) throw std::invalid_argument("covering_radius: point set / cone dimension mismatch");

  std::vector<double> lo, hi;
  cone.bounding_box(lo, hi);
  std::vector<double> raw = tensor_probes(lo, hi, resolution);
  std::vector<double> probes(cone.apex.begin(), cone.apex.end());
  const std::size_t np = raw.size() / static_cast<std::size_t>(d);
  for (std::size_t i = 0; i < np; ++i) {
    std::span<const double> x{raw.data() + i * static_cast<std::size_t>(d), static_cast<std::size_t>(d)};
    if (cone.contains(x)) probes.insert(probes.end(), x.begin(), x.end());
  }

  std::vector<double> inside;
  for (std::size_t j = 0; j < P.size(); ++j) {
    const auto q = P.point(j);
    if (cone.contains(q)) inside.insert(inside.end(), q.begin(), q.end());
  }
  if (inside.empty()) return std::numeric_limits<double>::infinity();
  return max_min_distance(probes, inside, d);
}

}  // namespace sobrec
