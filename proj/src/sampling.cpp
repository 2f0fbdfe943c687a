#include "sobrec/sampling.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "sobrec/rng.hpp"

namespace sobrec {

void PointSet::to_csv(std::ostream& os) const {
  char buf[64];
  for (std::size_t i = 0; i < size(); ++i) {
    const auto x = point(i);
    for (int k = 0; k < dim; ++k) {
      std::snprintf(buf, sizeof buf, "%.17g", x[static_cast<std::size_t>(k)]);
      os << buf << (k + 1 == dim ? '\n' : ',');
    }
  }
}

PointSet PointSet::from_csv(std::istream& is, int dim) {
  PointSet ps;
  ps.dim = dim;
  ps.generator_id = "csv";
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::stringstream row(line);
    std::string cell;
    int k = 0;
    while (std::getline(row, cell, ',')) {
      ps.coords.push_back(std::stod(cell));
      ++k;
    }
    if (k != dim) throw std::runtime_error("PointSet::from_csv: wrong column count");
  }
  return ps;
}

PointSet sample_iid_uniform(const Domain& domain, std::size_t n, std::uint64_t seed,
                            std::uint64_t stream_tag) {
  constexpr std::uint64_t kMaxAttempts = 100000;
  const int d = domain.dim;
  PointSet ps;
  ps.dim = d;
  ps.seed = seed;
  ps.generator_id = "iid-uniform";
  ps.domain_id = domain.id();
  ps.coords.reserve(n * static_cast<std::size_t>(d));

  const RngStream master = RngStream::from_seed(seed).derive(stream_tag);
  std::vector<double> x(static_cast<std::size_t>(d));
  for (std::size_t j = 0; j < n; ++j) {
    const RngStream stream = master.derive(j);
    bool accepted = false;
    for (std::uint64_t attempt = 0; attempt < kMaxAttempts; ++attempt) {
      for (int k = 0; k < d; ++k) {
        const double u = stream.u01(attempt * static_cast<std::uint64_t>(d) + static_cast<std::uint64_t>(k));
        x[static_cast<std::size_t>(k)] =
            domain.box_lo[static_cast<std::size_t>(k)] +
            u * (domain.box_hi[static_cast<std::size_t>(k)] - domain.box_lo[static_cast<std::size_t>(k)]);
      }
      if (domain.contains(x)) {
        ps.push_back(x);
        accepted = true;
        break;
      }
    }
    if (!accepted)
      throw std::runtime_error("sample_iid_uniform: rejection cap exceeded (domain volume fraction too small)");
  }
  return ps;
}

PointSet quasi_uniform_points(const Domain& domain, std::size_t n) {
  if (n < 1) throw std::invalid_argument("quasi_uniform_points: n must be >= 1");
  const int d = domain.dim;
  PointSet ps;
  ps.dim = d;
  ps.seed = 0;
  ps.generator_id = "quasi-uniform";
  ps.domain_id = domain.id();

  // smallest midpoint grid with at least n surviving points
  std::size_t k = static_cast<std::size_t>(std::max(1.0, std::floor(std::pow(static_cast<double>(n), 1.0 / d))));
  std::vector<double> survivors;
  std::vector<double> x(static_cast<std::size_t>(d));
  while (true) {
    survivors.clear();
    std::vector<std::size_t> idx(static_cast<std::size_t>(d), 0);
    while (true) {
      for (int c = 0; c < d; ++c) {
        const double t = (static_cast<double>(idx[static_cast<std::size_t>(c)]) + 0.5) / static_cast<double>(k);
        x[static_cast<std::size_t>(c)] =
            domain.box_lo[static_cast<std::size_t>(c)] +
            t * (domain.box_hi[static_cast<std::size_t>(c)] - domain.box_lo[static_cast<std::size_t>(c)]);
      }
      if (domain.contains(x)) survivors.insert(survivors.end(), x.begin(), x.end());
      int c = 0;
      while (c < d && ++idx[static_cast<std::size_t>(c)] == k) {
        idx[static_cast<std::size_t>(c)] = 0;
        ++c;
      }
      if (c == d) break;
    }
    if (survivors.size() / static_cast<std::size_t>(d) >= n) break;
    ++k;
  }

  // thin evenly so no region of the grid is dropped wholesale
  const std::size_t total = survivors.size() / static_cast<std::size_t>(d);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t pick = (i * total) / n;
    for (int c = 0; c < d; ++c)
      ps.coords.push_back(survivors[pick * static_cast<std::size_t>(d) + static_cast<std::size_t>(c)]);
  }
  return ps;
}

}  // namespace sobrec
