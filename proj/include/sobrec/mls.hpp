#pragma once

#include <atomic>
#include <iosfwd>
#include <span>
#include <vector>

namespace sobrec {

// Monomial basis of all multi-indices |alpha| <= degree in graded-lex order
// (the constant monomial first). Size N = binomial(degree + dim, dim).
struct PolyBasis {
  int dim = 1;
  int degree = 0;
  std::vector<int> exponents;  // N * dim, row-major

  static PolyBasis make(int dim, int degree);
  int size() const { return static_cast<int>(exponents.size()) / dim; }
  void eval(std::span<const double> x, std::span<double> out) const;
};

std::vector<double> basis_eval(const PolyBasis& basis, std::span<const double> x);

enum class MlsStatus { ok, insufficient_points, solve_failure };

// Weights a_j at one evaluation point: the minimizer of sum a_j^2 / w_j under
// the constraint that sum a_j p(x_j) = p(x) for every polynomial p of degree
// <= s, with w_j = phi(|x - x_j| / delta), phi(t) = (1-t)_+^4 (4t+1).
// Weights are aligned with the local point sequence; points outside the
// support (w_j = 0) keep weight exactly 0.
struct MlsWeights {
  std::vector<double> eval_point;
  std::vector<double> weights;      // a_j, one per local point, zeros outside support
  std::vector<double> phi_weights;  // w_j = phi(|x - x_j| / delta)
  double delta = 0.0;
  double lebesgue_sum = 0.0;        // sum |a_j|
  double gram_condition = 0.0;      // rough estimate from the factorization
};

struct MlsSolveResult {
  MlsStatus status = MlsStatus::solve_failure;
  MlsWeights w;
};

// points: |Q| * dim flat coordinates. Requires |Q| >= N and delta > 0; the
// constraint system is formed in centered coordinates (y - x)/delta and solved
// through its dual Gram system with ridge 1e-12 * trace / N. Reproduction is
// verified a posteriori; an unverifiable system reports solve_failure so the
// caller can enlarge the region.
MlsSolveResult solve_mls(std::span<const double> x, std::span<const double> points,
                         const PolyBasis& basis, double delta);

double mls_apply(const MlsWeights& w, std::span<const double> samples);

// debugging dump, one row per local point: x, x_j, a_j, w_j
void dump_mls_weights(std::ostream& os, const MlsWeights& w, std::span<const double> points,
                      int dim);

// Test fixture: flips the sign of the reproduction right-hand side.
extern std::atomic<bool> g_mls_flip_constraint_sign;

}  // namespace sobrec
