#pragma once

#include <cstdint>

namespace sobrec {

// Counter-based generator: every draw is a pure hash of (key, counter), so any
// (replication, point, attempt) coordinate can be produced independently and in
// parallel with no shared stream state. Same inputs give bit-identical output
// on every platform.
namespace rng_detail {

inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace rng_detail

struct RngStream {
  std::uint64_t key = 0;

  static RngStream from_seed(std::uint64_t seed) {
    return {rng_detail::mix64(seed ^ 0x853c49e6748fea9bULL)};
  }

  // Sub-stream for index (replication, point, stage, ...). Derivations compose.
  RngStream derive(std::uint64_t index) const {
    return {rng_detail::mix64(key ^ (0x9e3779b97f4a7c15ULL + index + (key << 6) + (key >> 2)))};
  }

  std::uint64_t bits(std::uint64_t counter) const {
    return rng_detail::mix64(key ^ rng_detail::mix64(counter ^ (key >> 17)));
  }

  // uniform in [0,1), 53 mantissa bits
  double u01(std::uint64_t counter) const {
    return static_cast<double>(bits(counter) >> 11) * 0x1.0p-53;
  }
};

}  // namespace sobrec
