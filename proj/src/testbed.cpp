#include "sobrec/testbed.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>

#include "sobrec/mls.hpp"

namespace sobrec {

std::shared_ptr<const ReferenceGrid> reference_grid(const Domain& domain, int resolution) {
  if (resolution < 2) throw std::invalid_argument("reference_grid: resolution must be >= 2");
  static std::mutex mu;
  static std::map<std::tuple<std::string, int>, std::shared_ptr<const ReferenceGrid>> cache;
  const std::tuple<std::string, int> key{domain.id(), resolution};
  {
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
  }

  auto grid = std::make_shared<ReferenceGrid>();
  grid->dim = domain.dim;
  grid->resolution = resolution;
  grid->volume = domain.volume;
  const int d = domain.dim;
  std::vector<std::size_t> idx(static_cast<std::size_t>(d), 0);
  std::vector<double> x(static_cast<std::size_t>(d));
  while (true) {
    for (int c = 0; c < d; ++c) {
      const double t = (static_cast<double>(idx[static_cast<std::size_t>(c)]) + 0.5) / resolution;
      x[static_cast<std::size_t>(c)] =
          domain.box_lo[static_cast<std::size_t>(c)] +
          t * (domain.box_hi[static_cast<std::size_t>(c)] - domain.box_lo[static_cast<std::size_t>(c)]);
    }
    if (domain.contains(x)) grid->pts.insert(grid->pts.end(), x.begin(), x.end());
    int c = 0;
    while (c < d && ++idx[static_cast<std::size_t>(c)] == static_cast<std::size_t>(resolution)) {
      idx[static_cast<std::size_t>(c)] = 0;
      ++c;
    }
    if (c == d) break;
  }

  std::lock_guard<std::mutex> lock(mu);
  cache[key] = grid;
  return grid;
}

double lq_error_on_values(std::span<const double> fv, std::span<const double> gv, double q,
                          double volume) {
  if (q < 1.0) throw std::invalid_argument("lq_error: q must be >= 1");
  if (fv.size() != gv.size()) throw std::invalid_argument("lq_error: value length mismatch");
  if (std::isinf(q)) {
    double worst = 0.0;
    for (std::size_t i = 0; i < fv.size(); ++i) worst = std::max(worst, std::abs(fv[i] - gv[i]));
    return worst;
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < fv.size(); ++i) acc += std::pow(std::abs(fv[i] - gv[i]), q);
  return std::pow(volume * acc / static_cast<double>(fv.size()), 1.0 / q);
}

double lq_error(const RealFn& f, const RealFn& g, const Domain& domain, double q, int resolution) {
  if (resolution <= 0) resolution = domain.dim == 1 ? 4096 : (domain.dim == 2 ? 128 : 32);
  const auto grid = reference_grid(domain, resolution);
  const std::size_t n = grid->count();
  std::vector<double> fv(n), gv(n);
  const int d = domain.dim;
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) {
    const std::span<const double> x{grid->pts.data() + static_cast<std::size_t>(i) * static_cast<std::size_t>(d),
                                    static_cast<std::size_t>(d)};
    fv[static_cast<std::size_t>(i)] = f(x);
    gv[static_cast<std::size_t>(i)] = g(x);
  }
  return lq_error_on_values(fv, gv, q, domain.volume);
}

SobolevEstimate sobolev_norm_estimate(const TestFunction& f, const Domain& domain, double p, int s,
                                      int resolution) {
  if (f.max_order < s) throw std::invalid_argument("sobolev_norm_estimate: derivative oracles missing");
  if (resolution <= 0) resolution = domain.dim == 1 ? 4096 : (domain.dim == 2 ? 128 : 32);
  const auto grid = reference_grid(domain, resolution);
  const std::size_t n = grid->count();
  const int d = domain.dim;
  const PolyBasis multi = PolyBasis::make(d, s);  // reuse its multi-index enumeration

  SobolevEstimate est;
  double acc_norm = 0.0, acc_semi = 0.0;
  for (int k = 0; k < multi.size(); ++k) {
    const std::span<const int> alpha{multi.exponents.data() + static_cast<std::size_t>(k * d),
                                     static_cast<std::size_t>(d)};
    int order = 0;
    for (const int e : alpha) order += e;
    double acc = 0.0, sup = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const std::span<const double> x{grid->pts.data() + i * static_cast<std::size_t>(d),
                                      static_cast<std::size_t>(d)};
      const double v = std::abs(order == 0 ? f.f(x) : f.deriv(alpha, x));
      if (std::isinf(p))
        sup = std::max(sup, v);
      else
        acc += std::pow(v, p);
    }
    if (std::isinf(p)) {
      acc_norm = std::max(acc_norm, sup);
      if (order == s) acc_semi = std::max(acc_semi, sup);
    } else {
      const double term = domain.volume * acc / static_cast<double>(n);
      acc_norm += term;
      if (order == s) acc_semi += term;
    }
  }
  if (std::isinf(p)) {
    est.norm = acc_norm;
    est.seminorm = acc_semi;
  } else {
    est.norm = std::pow(acc_norm, 1.0 / p);
    est.seminorm = std::pow(acc_semi, 1.0 / p);
  }
  return est;
}

double bump_profile(int order, double t) {
  const double q = 1.0 - t * t;
  if (q <= 0.0) return 0.0;
  const double b = std::exp(-1.0 / q);
  switch (order) {
    case 0: return b;
    case 1: return -2.0 * t / (q * q) * b;
    case 2: {
      const double u1 = -2.0 * t / (q * q);
      const double u2 = -2.0 / (q * q) - 8.0 * t * t / (q * q * q);
      return (u2 + u1 * u1) * b;
    }
    case 3: {
      const double u1 = -2.0 * t / (q * q);
      const double u2 = -2.0 / (q * q) - 8.0 * t * t / (q * q * q);
      const double u3 = -24.0 * t / (q * q * q) - 48.0 * t * t * t / (q * q * q * q);
      return (u3 + 3.0 * u1 * u2 + u1 * u1 * u1) * b;
    }
    default: throw std::invalid_argument("bump_profile: order must be <= 3");
  }
}

double bump_profile_sup(int order) {
  static std::once_flag once;
  static double sup[4];
  std::call_once(once, [] {
    for (int k = 0; k <= 3; ++k) {
      double best = 0.0;
      const int steps = 200000;
      for (int i = 0; i <= steps; ++i) {
        const double t = -1.0 + 2.0 * i / steps;
        best = std::max(best, std::abs(bump_profile(k, t)));
      }
      sup[k] = best;
    }
  });
  if (order < 0 || order > 3) throw std::invalid_argument("bump_profile_sup: order must be <= 3");
  return sup[order];
}

int BumpFamily::bump_at(std::span<const double> x) const {
  long cell = 0;
  for (int c = 0; c < dim; ++c) {
    const double rel = (x[static_cast<std::size_t>(c)] - box_lo[static_cast<std::size_t>(c)]) / pitch;
    const long i = static_cast<long>(std::floor(rel));
    if (i < 0 || i >= grid_k) return -1;
    cell = cell * grid_k + i;
  }
  const int b = cell_to_bump[static_cast<std::size_t>(cell)];
  if (b < 0) return -1;
  return support_contains(b, x) ? b : -1;
}

bool BumpFamily::support_contains(int i, std::span<const double> x) const {
  const double* c = centers.data() + static_cast<std::size_t>(i) * static_cast<std::size_t>(dim);
  for (int k = 0; k < dim; ++k)
    if (std::abs(x[static_cast<std::size_t>(k)] - c[k]) >= halfwidth) return false;
  return true;
}

double BumpFamily::value(std::span<const double> x) const {
  const int b = bump_at(x);
  if (b < 0) return 0.0;
  const double* c = centers.data() + static_cast<std::size_t>(b) * static_cast<std::size_t>(dim);
  double v = height * signs[static_cast<std::size_t>(b)];
  for (int k = 0; k < dim; ++k) v *= bump_profile(0, (x[static_cast<std::size_t>(k)] - c[k]) / halfwidth);
  return v;
}

double BumpFamily::derivative(std::span<const int> alpha, std::span<const double> x) const {
  const int b = bump_at(x);
  if (b < 0) return 0.0;
  const double* c = centers.data() + static_cast<std::size_t>(b) * static_cast<std::size_t>(dim);
  double v = height * signs[static_cast<std::size_t>(b)];
  for (int k = 0; k < dim; ++k) {
    const int o = alpha[static_cast<std::size_t>(k)];
    v *= bump_profile(o, (x[static_cast<std::size_t>(k)] - c[k]) / halfwidth) / std::pow(halfwidth, o);
  }
  return v;
}

TestFunction BumpFamily::to_test_function() const {
  TestFunction tf;
  tf.id = "family-m" + std::to_string(m);
  tf.dim = dim;
  tf.max_order = 3;
  tf.smoothness = "C-infinity, multi-scale";
  auto fam = std::make_shared<BumpFamily>(*this);
  tf.f = [fam](std::span<const double> x) { return fam->value(x); };
  tf.deriv = [fam](std::span<const int> a, std::span<const double> x) { return fam->derivative(a, x); };
  long sign_sum = 0;
  for (const int s : signs) sign_sum += s;
  tf.integral = static_cast<double>(sign_sum) * bump_integral;
  return tf;
}

BumpFamily make_bump_family(const Domain& domain, int m, std::span<const int> signs, int s,
                            double width_fraction) {
  if (m < 1) throw std::invalid_argument("make_bump_family: m must be >= 1");
  if (static_cast<int>(signs.size()) != m)
    throw std::invalid_argument("make_bump_family: sign vector length must equal m");
  if (s < 0 || s > 3) throw std::invalid_argument("make_bump_family: s must be in 0..3");
  if (!(width_fraction > 0.0 && width_fraction < 1.0))
    throw std::invalid_argument("make_bump_family: width_fraction must lie in (0,1)");

  const int d = domain.dim;
  BumpFamily fam;
  fam.dim = d;
  fam.m = m;
  fam.degree = s;
  fam.signs.assign(signs.begin(), signs.end());
  fam.box_lo = domain.box_lo;

  // smallest sub-grid whose interior cells admit m disjoint supports
  int k = std::max(1, static_cast<int>(std::floor(std::pow(static_cast<double>(m), 1.0 / d))));
  std::vector<double> centers;
  std::vector<long> cells;
  for (;; ++k) {
    if (std::pow(static_cast<double>(k), d) > 16.0 * m + 1e6)
      throw std::invalid_argument("make_bump_family: infeasible packing on this domain");
    const double pitch = (domain.box_hi[0] - domain.box_lo[0]) / k;
    const double ball_radius = 0.5 * width_fraction * pitch;
    centers.clear();
    cells.clear();
    std::vector<std::size_t> idx(static_cast<std::size_t>(d), 0);
    std::vector<double> x(static_cast<std::size_t>(d)), probe(static_cast<std::size_t>(d));
    while (static_cast<int>(cells.size()) < m) {
      long cell = 0;
      for (int c = 0; c < d; ++c) {
        x[static_cast<std::size_t>(c)] = domain.box_lo[static_cast<std::size_t>(c)] +
                                         (static_cast<double>(idx[static_cast<std::size_t>(c)]) + 0.5) * pitch;
        cell = cell * k + static_cast<long>(idx[static_cast<std::size_t>(c)]);
      }
      // keep centers whose surrounding ball stays inside the domain
      bool ok = domain.contains(x);
      for (int c = 0; ok && c < d; ++c) {
        for (int sgn = -1; ok && sgn <= 1; sgn += 2) {
          probe = x;
          probe[static_cast<std::size_t>(c)] += sgn * ball_radius;
          ok = domain.contains(probe);
        }
      }
      if (ok && domain.kind == DomainKind::l_shape_2d) {
        // corner probe against the reentrant corner
        for (int mask = 0; ok && mask < (1 << d); ++mask) {
          for (int c = 0; c < d; ++c)
            probe[static_cast<std::size_t>(c)] =
                x[static_cast<std::size_t>(c)] + (((mask >> c) & 1) ? ball_radius : -ball_radius);
          ok = domain.contains(probe);
        }
      }
      if (ok) {
        centers.insert(centers.end(), x.begin(), x.end());
        cells.push_back(cell);
      }
      int c = 0;
      while (c < d && ++idx[static_cast<std::size_t>(c)] == static_cast<std::size_t>(k)) {
        idx[static_cast<std::size_t>(c)] = 0;
        ++c;
      }
      if (c == d) break;
    }
    if (static_cast<int>(cells.size()) >= m) {
      fam.grid_k = k;
      fam.pitch = pitch;
      fam.ball_radius = ball_radius;
      break;
    }
  }
  fam.centers = std::move(centers);
  fam.halfwidth = fam.ball_radius / std::sqrt(static_cast<double>(d));
  fam.cell_to_bump.assign(static_cast<std::size_t>(std::llround(std::pow(fam.grid_k, d))), -1);
  for (int i = 0; i < m; ++i) fam.cell_to_bump[static_cast<std::size_t>(cells[static_cast<std::size_t>(i)])] = i;

  // H so the estimated W_inf^s norm of each bump is 1; the estimate is the
  // max over |alpha| <= s of the separable sup of the tensor derivative.
  const PolyBasis multi = PolyBasis::make(d, s);
  double worst = 0.0;
  for (int kk = 0; kk < multi.size(); ++kk) {
    double v = 1.0;
    for (int c = 0; c < d; ++c) {
      const int o = multi.exponents[static_cast<std::size_t>(kk * d + c)];
      v *= bump_profile_sup(o) / std::pow(fam.halfwidth, o);
    }
    worst = std::max(worst, v);
  }
  fam.height = 1.0 / worst;
  fam.bump_sup_norm = fam.height * std::pow(bump_profile_sup(0), d);
  fam.bump_integral = fam.height * std::pow(fam.halfwidth * kBumpProfileIntegral, d);
  fam.support_volume = std::pow(2.0 * fam.halfwidth, d);
  return fam;
}

static TestFunction make_constant(const Domain& domain, double c) {
  TestFunction tf;
  tf.id = "const1";
  tf.dim = domain.dim;
  tf.max_order = 3;
  tf.smoothness = "constant";
  tf.f = [c](std::span<const double>) { return c; };
  tf.deriv = [c](std::span<const int> a, std::span<const double>) {
    for (const int e : a)
      if (e > 0) return 0.0;
    return c;
  };
  tf.integral = c * domain.volume;
  return tf;
}

static TestFunction make_monomial(const Domain& domain, std::vector<int> alpha) {
  TestFunction tf;
  tf.dim = domain.dim;
  tf.max_order = 3;
  tf.smoothness = "polynomial";
  std::string id = "mono";
  for (const int e : alpha) id += "-" + std::to_string(e);
  tf.id = id;
  auto a = std::make_shared<std::vector<int>>(std::move(alpha));
  tf.f = [a](std::span<const double> x) {
    double v = 1.0;
    for (std::size_t c = 0; c < x.size(); ++c)
      for (int rep = 0; rep < (*a)[c]; ++rep) v *= x[c];
    return v;
  };
  tf.deriv = [a](std::span<const int> b, std::span<const double> x) {
    double v = 1.0;
    for (std::size_t c = 0; c < x.size(); ++c) {
      const int e = (*a)[c], o = b[c];
      if (o > e) return 0.0;
      for (int j = 0; j < o; ++j) v *= (e - j);
      for (int rep = 0; rep < e - o; ++rep) v *= x[c];
    }
    return v;
  };
  if (domain.kind == DomainKind::unit_cube) {
    double integral = 1.0;
    for (const int e : *a) integral /= (e + 1);
    tf.integral = integral;
  }
  return tf;
}

static TestFunction make_gaussian(const Domain& domain, double sigma) {
  TestFunction tf;
  tf.dim = domain.dim;
  tf.max_order = 3;
  tf.smoothness = "C-infinity";
  char buf[48];
  std::snprintf(buf, sizeof buf, "gauss-s%g", sigma);
  tf.id = buf;
  const std::vector<double> center = domain.star_centers[0].center;
  auto c = std::make_shared<std::vector<double>>(center);
  auto g1 = [sigma](int order, double t) {
    const double e = std::exp(-t * t / (sigma * sigma));
    const double s2 = sigma * sigma;
    switch (order) {
      case 0: return e;
      case 1: return -2.0 * t / s2 * e;
      case 2: return (4.0 * t * t / (s2 * s2) - 2.0 / s2) * e;
      case 3: return (-8.0 * t * t * t / (s2 * s2 * s2) + 12.0 * t / (s2 * s2)) * e;
      default: return 0.0;
    }
  };
  tf.f = [c, g1](std::span<const double> x) {
    double v = 1.0;
    for (std::size_t k = 0; k < x.size(); ++k) v *= g1(0, x[k] - (*c)[k]);
    return v;
  };
  tf.deriv = [c, g1](std::span<const int> a, std::span<const double> x) {
    double v = 1.0;
    for (std::size_t k = 0; k < x.size(); ++k) v *= g1(a[k], x[k] - (*c)[k]);
    return v;
  };
  if (domain.kind == DomainKind::unit_cube) {
    double integral = 1.0;
    for (int k = 0; k < domain.dim; ++k) {
      const double ck = center[static_cast<std::size_t>(k)];
      integral *= sigma * std::sqrt(std::numbers::pi) / 2.0 *
                  (std::erf((1.0 - ck) / sigma) + std::erf(ck / sigma));
    }
    tf.integral = integral;
  } else if (domain.kind == DomainKind::ball && domain.dim == 1) {
    tf.integral = sigma * std::sqrt(std::numbers::pi) * std::erf(domain.ball_radius / sigma);
  }
  return tf;
}

static TestFunction make_sine_product(const Domain& domain, int k) {
  TestFunction tf;
  tf.dim = domain.dim;
  tf.max_order = 3;
  tf.smoothness = "C-infinity";
  tf.id = "sine-k" + std::to_string(k);
  const double w = 2.0 * std::numbers::pi * k;
  tf.f = [w](std::span<const double> x) {
    double v = 1.0;
    for (const double t : x) v *= std::sin(w * t);
    return v;
  };
  tf.deriv = [w](std::span<const int> a, std::span<const double> x) {
    double v = 1.0;
    for (std::size_t c = 0; c < x.size(); ++c) {
      const int o = a[c];
      v *= std::pow(w, o) * std::sin(w * x[c] + o * std::numbers::pi / 2.0);
    }
    return v;
  };
  if (domain.kind == DomainKind::unit_cube) tf.integral = 0.0;  // whole periods
  return tf;
}

std::vector<TestFunction> builtin_suite(const Domain& domain, int s_max, std::span<const int> ms) {
  std::vector<TestFunction> suite;
  suite.push_back(make_constant(domain, 1.0));
  for (int c = 0; c < domain.dim; ++c)
    for (int e = 1; e <= s_max; ++e) {
      std::vector<int> alpha(static_cast<std::size_t>(domain.dim), 0);
      alpha[static_cast<std::size_t>(c)] = e;
      suite.push_back(make_monomial(domain, std::move(alpha)));
    }
  suite.push_back(make_gaussian(domain, 0.2));
  suite.push_back(make_sine_product(domain, 1));
  static const int default_ms[] = {4, 16};
  std::span<const int> use_ms = ms.empty() ? std::span<const int>(default_ms) : ms;
  for (const int m : use_ms) {
    std::vector<int> signs(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) signs[static_cast<std::size_t>(i)] = i % 2 == 0 ? 1 : -1;
    suite.push_back(make_bump_family(domain, m, signs, std::min(s_max, 3)).to_test_function());
  }
  return suite;
}

TestFunction testbed_function(const Domain& domain, const std::string& id, int s_max) {
  if (id.rfind("gauss-s", 0) == 0) return make_gaussian(domain, std::stod(id.substr(7)));
  if (id.rfind("sine-k", 0) == 0) return make_sine_product(domain, std::stoi(id.substr(6)));
  if (id.rfind("family-m", 0) == 0) {
    const int m = std::stoi(id.substr(8));
    std::vector<int> signs(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) signs[static_cast<std::size_t>(i)] = i % 2 == 0 ? 1 : -1;
    return make_bump_family(domain, m, signs, std::min(s_max, 3)).to_test_function();
  }
  for (auto& tf : builtin_suite(domain, s_max))
    if (tf.id == id) return tf;
  throw std::invalid_argument("unknown test function: " + id);
}

}  // namespace sobrec
