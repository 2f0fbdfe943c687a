// Compares the OpenMP kernels against their serial reference implementations:
// probe-grid evaluation of the recovery operator and the covering-radius scan.

#include <chrono>
#include <cstdio>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "sobrec/recovery.hpp"
#include "sobrec/sampling.hpp"
#include "sobrec/testbed.hpp"

using namespace sobrec;
using clock_type = std::chrono::steady_clock;

static double seconds_since(clock_type::time_point t0) {
  return std::chrono::duration<double>(clock_type::now() - t0).count();
}

int main() {
#ifdef _OPENMP
  std::printf("threads: %d\n", omp_get_max_threads());
#else
  std::printf("threads: 1 (built without OpenMP)\n");
#endif

  for (const int d : {1, 2}) {
    const Domain domain = Domain::by_name("cube", d);
    const std::size_t n = d == 1 ? 4096 : 8192;
    const AlgoConstants constants = AlgoConstants::make(domain, 2, 0.49, std::nullopt, 1.0);
    PointSet P = sample_iid_uniform(domain, n, 7, 0);
    const TestFunction f = testbed_function(domain, "gauss-s0.2", 3);
    std::vector<double> samples(n);
    for (std::size_t j = 0; j < n; ++j) samples[j] = f.f(P.point(j));
    const RecoveryOperator op(domain, std::move(P), std::move(samples), constants);

    const auto grid = reference_grid(domain, d == 1 ? 8192 : 96);
    auto t0 = clock_type::now();
    const auto serial = op.evaluate_on_grid_serial(grid->pts);
    const double t_serial = seconds_since(t0);
    t0 = clock_type::now();
    const auto parallel = op.evaluate_on_grid(grid->pts);
    const double t_parallel = seconds_since(t0);
    bool identical = serial == parallel;
    std::printf("evaluate_on_grid d=%d n=%zu probes=%zu: serial %.3fs, parallel %.3fs, speedup %.2fx, identical=%s\n",
                d, n, grid->count(), t_serial, t_parallel, t_serial / t_parallel,
                identical ? "yes" : "NO");

    const PointSet Q = sample_iid_uniform(domain, n, 8, 0);
    t0 = clock_type::now();
    const double h_serial = covering_radius_serial(Q, domain, d == 1 ? 4096 : 256);
    const double t_hs = seconds_since(t0);
    t0 = clock_type::now();
    const double h_parallel = covering_radius(Q, domain, d == 1 ? 4096 : 256);
    const double t_hp = seconds_since(t0);
    std::printf("covering_radius  d=%d n=%zu: serial %.3fs, parallel %.3fs, speedup %.2fx, identical=%s\n",
                d, n, t_hs, t_hp, t_hs / t_hp, h_serial == h_parallel ? "yes" : "NO");
  }
  return 0;
}
