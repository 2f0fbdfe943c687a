#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace sobrec {

// Ordered sample points with seed provenance. Coordinates are stored flat
// (row-major, size() * dim doubles) so hot loops can run on raw spans.
struct PointSet {
  int dim = 0;
  std::vector<double> coords;
  std::uint64_t seed = 0;
  std::string generator_id;
  std::string domain_id;

  std::size_t size() const { return dim == 0 ? 0 : coords.size() / static_cast<std::size_t>(dim); }

  std::span<const double> point(std::size_t i) const {
    return {coords.data() + i * static_cast<std::size_t>(dim), static_cast<std::size_t>(dim)};
  }

  void push_back(std::span<const double> x) { coords.insert(coords.end(), x.begin(), x.end()); }

  // One point per row, coordinates with 17 significant digits (round-trip safe).
  void to_csv(std::ostream& os) const;
  static PointSet from_csv(std::istream& is, int dim);
};

}  // namespace sobrec
