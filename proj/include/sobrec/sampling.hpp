#pragma once

#include <cstdint>

#include "sobrec/geometry.hpp"
#include "sobrec/pointset.hpp"

namespace sobrec {

// n iid uniform points on the domain, drawn by rejection from the bounding box.
// Point j uses its own counter stream derived from (seed, stream_tag, j), so
// points and replications can be generated in any order or in parallel and the
// result is bit-identical. Throws after 100000 rejected proposals for a single
// point (covers bounding-box volume fractions down to ~1e-4; the built-in
// domains accept within a few draws).
PointSet sample_iid_uniform(const Domain& domain, std::size_t n, std::uint64_t seed,
                            std::uint64_t stream_tag = 0);

// Deterministic midpoint tensor grid intersected with the domain, subdivision
// chosen so at least n points survive, thinned evenly to exactly n. Covering
// radius O(n^{-1/d}) on the built-in domains.
PointSet quasi_uniform_points(const Domain& domain, std::size_t n);

}  // namespace sobrec
