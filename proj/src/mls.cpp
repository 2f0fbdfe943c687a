#include "sobrec/mls.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <ostream>
#include <limits>
#include <stdexcept>

namespace sobrec {

std::atomic<bool> g_mls_flip_constraint_sign{false};

static void gen_indices(int dim, int remaining, int pos, std::vector<int>& current,
                        std::vector<int>& out) {
  if (pos == dim - 1) {
    current[static_cast<std::size_t>(pos)] = remaining;
    out.insert(out.end(), current.begin(), current.end());
    return;
  }
  for (int e = remaining; e >= 0; --e) {
    current[static_cast<std::size_t>(pos)] = e;
    gen_indices(dim, remaining - e, pos + 1, current, out);
  }
}

PolyBasis PolyBasis::make(int dim, int degree) {
  if (dim < 1) throw std::invalid_argument("PolyBasis: dim must be >= 1");
  if (degree < 0) throw std::invalid_argument("PolyBasis: degree must be >= 0");
  PolyBasis b;
  b.dim = dim;
  b.degree = degree;
  std::vector<int> current(static_cast<std::size_t>(dim), 0);
  for (int total = 0; total <= degree; ++total) gen_indices(dim, total, 0, current, b.exponents);
  return b;
}

void PolyBasis::eval(std::span<const double> x, std::span<double> out) const {
  if (static_cast<int>(x.size()) != dim) throw std::invalid_argument("basis_eval: dimension mismatch");
  const int n = size();
  for (int k = 0; k < n; ++k) {
    double v = 1.0;
    for (int c = 0; c < dim; ++c) {
      const int e = exponents[static_cast<std::size_t>(k * dim + c)];
      for (int rep = 0; rep < e; ++rep) v *= x[static_cast<std::size_t>(c)];
    }
    out[static_cast<std::size_t>(k)] = v;
  }
}

std::vector<double> basis_eval(const PolyBasis& basis, std::span<const double> x) {
  std::vector<double> out(static_cast<std::size_t>(basis.size()));
  basis.eval(x, out);
  return out;
}

static double weight_fn(double t) {
  if (t >= 1.0) return 0.0;
  const double u = 1.0 - t;
  const double u2 = u * u;
  return u2 * u2 * (4.0 * t + 1.0);
}

MlsSolveResult solve_mls(std::span<const double> x, std::span<const double> points,
                         const PolyBasis& basis, double delta) {
  if (!(delta > 0.0)) throw std::invalid_argument("solve_mls: delta must be positive");
  const int d = basis.dim;
  if (static_cast<int>(x.size()) != d) throw std::invalid_argument("solve_mls: dimension mismatch");
  const std::size_t nq = points.size() / static_cast<std::size_t>(d);
  const int N = basis.size();

  MlsSolveResult res;
  res.w.eval_point.assign(x.begin(), x.end());
  res.w.delta = delta;
  res.w.weights.assign(nq, 0.0);
  res.w.phi_weights.assign(nq, 0.0);
  if (static_cast<int>(nq) < N) {
    res.status = MlsStatus::insufficient_points;
    return res;
  }

  std::vector<std::size_t> active;
  std::vector<double> wts;
  active.reserve(nq);
  for (std::size_t j = 0; j < nq; ++j) {
    double s = 0.0;
    for (int c = 0; c < d; ++c) {
      const double t = points[j * static_cast<std::size_t>(d) + static_cast<std::size_t>(c)] - x[static_cast<std::size_t>(c)];
      s += t * t;
    }
    const double w = weight_fn(std::sqrt(s) / delta);
    res.w.phi_weights[j] = w;
    if (w > 0.0) {
      active.push_back(j);
      wts.push_back(w);
    }
  }
  const int na = static_cast<int>(active.size());
  if (na < N) {
    res.status = MlsStatus::solve_failure;
    return res;
  }

  // centered, scaled coordinates keep the Gram well conditioned
  Eigen::MatrixXd B(N, na);
  std::vector<double> scaled(static_cast<std::size_t>(d));
  std::vector<double> mono(static_cast<std::size_t>(N));
  for (int j = 0; j < na; ++j) {
    const double* p = points.data() + active[static_cast<std::size_t>(j)] * static_cast<std::size_t>(d);
    for (int c = 0; c < d; ++c) scaled[static_cast<std::size_t>(c)] = (p[c] - x[static_cast<std::size_t>(c)]) / delta;
    basis.eval(scaled, mono);
    for (int k = 0; k < N; ++k) B(k, j) = mono[static_cast<std::size_t>(k)];
  }

  Eigen::VectorXd wv = Eigen::Map<const Eigen::VectorXd>(wts.data(), na);
  const Eigen::MatrixXd G0 = B * wv.asDiagonal() * B.transpose();
  Eigen::MatrixXd G = G0;
  const double ridge = 1e-12 * G.trace() / N;
  G.diagonal().array() += ridge;

  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(N);
  rhs(0) = g_mls_flip_constraint_sign.load(std::memory_order_relaxed) ? -1.0 : 1.0;

  Eigen::LDLT<Eigen::MatrixXd> ldlt(G);
  if (ldlt.info() != Eigen::Success) {
    res.status = MlsStatus::solve_failure;
    return res;
  }
  Eigen::VectorXd mu = ldlt.solve(rhs);
  // two refinement steps against the unridged Gram remove the ridge bias
  // (the primal defect of the ridged solve is exactly ridge * mu)
  mu += ldlt.solve(rhs - G0 * mu);
  mu += ldlt.solve(rhs - G0 * mu);
  const Eigen::VectorXd a = wv.asDiagonal() * (B.transpose() * mu);

  double leb = 0.0;
  for (int j = 0; j < na; ++j) leb += std::abs(a(j));

  // verify reproduction in the scaled basis; reject numerically singular fits
  const Eigen::VectorXd defect = B * a - rhs;
  for (int k = 0; k < N; ++k) {
    const double row_scale = B.row(k).cwiseAbs().maxCoeff();
    if (std::abs(defect(k)) > 1e-9 * (1.0 + leb) * std::max(1.0, row_scale)) {
      res.status = MlsStatus::solve_failure;
      return res;
    }
  }

  for (int j = 0; j < na; ++j) res.w.weights[active[static_cast<std::size_t>(j)]] = a(j);
  res.w.lebesgue_sum = leb;
  const Eigen::VectorXd diag = ldlt.vectorD().cwiseAbs();
  const double dmin = diag.minCoeff();
  res.w.gram_condition = dmin > 0.0 ? diag.maxCoeff() / dmin : std::numeric_limits<double>::infinity();
  res.status = MlsStatus::ok;
  return res;
}

void dump_mls_weights(std::ostream& os, const MlsWeights& w, std::span<const double> points,
                      int dim) {
  os << "x";
  for (const double c : w.eval_point) os << "," << c;
  os << "\n";
  const std::size_t nq = w.weights.size();
  for (std::size_t j = 0; j < nq; ++j) {
    for (int k = 0; k < dim; ++k)
      os << points[j * static_cast<std::size_t>(dim) + static_cast<std::size_t>(k)] << ",";
    os << w.weights[j] << "," << (j < w.phi_weights.size() ? w.phi_weights[j] : 0.0) << "\n";
  }
}

double mls_apply(const MlsWeights& w, std::span<const double> samples) {
  if (samples.size() != w.weights.size())
    throw std::invalid_argument("mls_apply: sample / weight length mismatch");
  double s = 0.0;
  for (std::size_t j = 0; j < samples.size(); ++j) s += w.weights[j] * samples[j];
  return s;
}

}  // namespace sobrec
