#include "sobrec/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "sobrec/errors.hpp"
#include "sobrec/integration.hpp"
#include "sobrec/sampling.hpp"

namespace sobrec {

std::string to_string(Criterion c) { return c == Criterion::uniform ? "uniform" : "monte-carlo"; }

std::string to_string(Task t) {
  switch (t) {
    case Task::approximation: return "approximation";
    case Task::integration_cv: return "integration-cv";
    case Task::integration_approx: return "integration-approx";
    case Task::integration_mc: return "integration-mc";
  }
  return "?";
}

std::string to_string(PointSource s) { return s == PointSource::iid ? "iid" : "quasi-uniform"; }

static Criterion parse_criterion(const std::string& s) {
  if (s == "monte-carlo" || s == "mc") return Criterion::monte_carlo;
  if (s == "uniform") return Criterion::uniform;
  throw UsageError("unknown criterion: " + s);
}

static Task parse_task(const std::string& s) {
  if (s == "approximation") return Task::approximation;
  if (s == "integration-cv") return Task::integration_cv;
  if (s == "integration-approx") return Task::integration_approx;
  if (s == "integration-mc") return Task::integration_mc;
  throw UsageError("unknown task: " + s);
}

static PointSource parse_source(const std::string& s) {
  if (s == "iid") return PointSource::iid;
  if (s == "quasi-uniform" || s == "quasi") return PointSource::quasi_uniform;
  throw UsageError("unknown point source: " + s);
}

ExperimentConfig ExperimentConfig::from_keyvalues(const KeyValues& kv) {
  static const char* known[] = {"domain", "d",      "s",          "p",         "q",
                                "n",      "reps",   "seed",       "criterion", "task",
                                "source", "r",      "theta",      "c1",        "error_grid",
                                "quad_grid", "h_probes", "dictionary", "out", "jobs"};
  for (const auto& [key, value] : kv.kv) {
    bool ok = false;
    for (const char* k : known) ok = ok || key == k;
    if (!ok) throw UsageError("unknown config key: " + key + " = " + value);
  }
  ExperimentConfig cfg;
  cfg.domain_kind = kv.get("domain", "cube");
  cfg.d = static_cast<int>(kv.get_int("d", 1));
  cfg.s = static_cast<int>(kv.get_int("s", 1));
  cfg.p = kv.get_double("p", 2.0);
  cfg.q = kv.get_double("q", 2.0);
  cfg.ns = parse_count_list(kv.get("n", "2^6..2^10"));
  cfg.replications = static_cast<int>(kv.get_int("reps", 1));
  cfg.seed = static_cast<std::uint64_t>(kv.get_int("seed", 1));
  cfg.criterion = parse_criterion(kv.get("criterion", "monte-carlo"));
  cfg.task = parse_task(kv.get("task", "approximation"));
  cfg.source = parse_source(kv.get("source", "iid"));
  cfg.r_override = kv.get_opt_double("r");
  cfg.theta_override = kv.get_opt_double("theta");
  cfg.c1_override = kv.get_opt_double("c1");
  cfg.error_grid = static_cast<int>(kv.get_int("error_grid", 0));
  cfg.quad_grid = static_cast<int>(kv.get_int("quad_grid", 0));
  cfg.h_probes = static_cast<int>(kv.get_int("h_probes", 0));
  cfg.dictionary = kv.get("dictionary", "multiscale");
  cfg.validate();
  return cfg;
}

Domain ExperimentConfig::make_domain() const { return Domain::by_name(domain_kind, d); }

AlgoConstants ExperimentConfig::make_constants(const Domain& domain) const {
  AlgoConstants c = AlgoConstants::make(domain, s, r_override, theta_override, c1_override);
  if (h_probes > 0) c.probe_resolution = h_probes;
  return c;
}

int ExperimentConfig::effective_error_grid() const {
  if (error_grid > 0) return error_grid;
  return d == 1 ? 16384 : (d == 2 ? 128 : 32);
}

int ExperimentConfig::effective_quad_grid() const {
  return quad_grid > 0 ? quad_grid : default_quad_resolution(d);
}

void ExperimentConfig::validate() const {
  if (d < 1 || d > 3) throw UsageError("d must be 1, 2 or 3");
  if (s < 1 || s > 3) throw UsageError("s must be 1, 2 or 3");
  if (!(p >= 1.0)) throw UsageError("p must be >= 1 (or inf)");
  if (!(q >= 1.0)) throw UsageError("q must be >= 1 (or inf)");
  if (replications < 1) throw UsageError("reps must be >= 1");
  if (ns.empty()) throw UsageError("empty n schedule");
  for (std::size_t i = 1; i < ns.size(); ++i)
    if (ns[i] <= ns[i - 1]) throw UsageError("n schedule must be strictly increasing");
  const Domain domain = make_domain();
  const AlgoConstants c = make_constants(domain);
  const double n_min = std::pow(c.r, -d);
  for (const std::size_t n : ns) {
    const double budget = task == Task::integration_cv ? static_cast<double>(n / 2) : static_cast<double>(n);
    if (task != Task::integration_mc && budget + 1e-9 < n_min)
      throw InfeasibleError("n schedule violates n >= r^-d for the recovery operator");
  }
}

std::string ExperimentConfig::canonical() const {
  const Domain domain = make_domain();
  const AlgoConstants c = make_constants(domain);
  std::ostringstream os;
  os << "c1 = " << fmt17(c.c1) << "\n";
  os << "c1_solvability_capped = " << (c.solvability_capped() ? "true" : "false") << "\n";
  os << "criterion = " << to_string(criterion) << "\n";
  os << "d = " << d << "\n";
  os << "dictionary = " << dictionary << "\n";
  os << "domain = " << domain_kind << "\n";
  os << "error_grid = " << effective_error_grid() << "\n";
  os << "h_probes = " << c.probe_resolution << "\n";
  os << "n =";
  for (std::size_t i = 0; i < ns.size(); ++i) os << (i ? "," : " ") << ns[i];
  os << "\n";
  os << "p = " << (std::isinf(p) ? "inf" : fmt17(p)) << "\n";
  os << "q = " << (std::isinf(q) ? "inf" : fmt17(q)) << "\n";
  os << "quad_grid = " << effective_quad_grid() << "\n";
  os << "r = " << fmt17(c.r) << "\n";
  os << "replications = " << replications << "\n";
  os << "s = " << s << "\n";
  os << "seed = " << seed << "\n";
  os << "source = " << to_string(source) << "\n";
  os << "task = " << to_string(task) << "\n";
  os << "theta = " << fmt17(c.theta) << "\n";
  return os.str();
}

// ---------------------------------------------------------------------------
// dictionaries

static std::vector<int> alternating_signs(int m) {
  std::vector<int> signs(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) signs[static_cast<std::size_t>(i)] = i % 2 == 0 ? 1 : -1;
  return signs;
}

static std::vector<int> plus_signs(int m) { return std::vector<int>(static_cast<std::size_t>(m), 1); }

static std::string family_cache_row(const BumpFamily& fam) {
  std::ostringstream os;
  os << "family-m" << fam.m << "," << fam.dim << "," << fam.degree << "," << fam.grid_k << ","
     << fmt17(fam.ball_radius) << "," << fmt17(fam.halfwidth) << "," << fmt17(fam.height) << ","
     << fmt17(fam.bump_sup_norm) << "," << fmt17(fam.bump_integral) << ",derived-by-quadrature";
  return os.str();
}

static TestFunction narrow_gaussian(const Domain& domain, double sigma) {
  TestFunction tf = testbed_function(domain, "gauss-s" + fmt17(sigma), 3);
  return tf;
}

Dictionary make_dictionary(const Domain& domain, const ExperimentConfig& cfg) {
  Dictionary dict;
  const int d = domain.dim;
  const int s = cfg.s;
  std::vector<TestFunction> members;

  if (cfg.dictionary == "multiscale") {
    std::vector<int> ms;
    std::vector<double> sigmas;
    if (d == 1) {
      ms = {16, 32, 64, 128, 256, 512, 1024, 2048};
      sigmas = {1.0 / 8, 1.0 / 32, 1.0 / 128, 1.0 / 512, 1.0 / 2048};
    } else if (d == 2) {
      ms = {16, 64, 256, 1024, 4096};
      sigmas = {1.0 / 4, 1.0 / 8, 1.0 / 16, 1.0 / 32, 1.0 / 48, 1.0 / 64};
    } else {
      ms = {8, 64};
      sigmas = {1.0 / 4, 1.0 / 8};
    }
    for (const int m : ms) {
      const BumpFamily fam = make_bump_family(domain, m, alternating_signs(m), s, 0.9);
      dict.family_cache_rows.push_back(family_cache_row(fam));
      members.push_back(fam.to_test_function());
    }
    for (const double sg : sigmas) members.push_back(narrow_gaussian(domain, sg));
  } else if (cfg.dictionary == "multiscale-int") {
    std::vector<int> ms = d == 1 ? std::vector<int>{8, 16, 32, 64, 128, 256, 512, 1024}
                                 : std::vector<int>{16, 64, 256};
    for (const int m : ms) {
      const BumpFamily fam = make_bump_family(domain, m, plus_signs(m), s, 0.9);
      dict.family_cache_rows.push_back(family_cache_row(fam));
      members.push_back(fam.to_test_function());
    }
    members.push_back(testbed_function(domain, "gauss-s0.2", 3));
  } else if (cfg.dictionary == "smooth") {
    members.push_back(testbed_function(domain, "gauss-s0.2", 3));
    members.push_back(testbed_function(domain, "sine-k1", 3));
    members.push_back(testbed_function(domain, "sine-k3", 3));
  } else if (cfg.dictionary == "polys") {
    for (int c = 0; c < d; ++c)
      for (int e = 0; e <= s; ++e) {
        if (c > 0 && e == 0) continue;
        std::vector<int> alpha(static_cast<std::size_t>(d), 0);
        alpha[static_cast<std::size_t>(c)] = e;
        std::string id = "mono";
        for (const int a : alpha) id += "-" + std::to_string(a);
        members.push_back(e == 0 ? testbed_function(domain, "const1", s) : testbed_function(domain, id, s));
      }
  } else if (cfg.dictionary.rfind("single:", 0) == 0) {
    members.push_back(testbed_function(domain, cfg.dictionary.substr(7), std::max(s, 3)));
  } else {
    throw UsageError("unknown dictionary: " + cfg.dictionary);
  }

  dict.members = std::move(members);
  dict.scale.resize(dict.members.size(), 1.0);
  std::string desc = cfg.dictionary + " [";
  for (std::size_t i = 0; i < dict.members.size(); ++i) {
    const SobolevEstimate est =
        sobolev_norm_estimate(dict.members[i], domain, cfg.p, s, cfg.effective_error_grid());
    dict.scale[i] = est.norm > 0.0 ? 1.0 / est.norm : 1.0;
    desc += (i ? "," : "") + dict.members[i].id;
  }
  desc += "] scaled to unit estimated W_p^s norm";
  dict.description = desc;
  return dict;
}

// ---------------------------------------------------------------------------
// fits

FitResult fit_rate(std::span<const std::size_t> ns, std::span<const double> errors,
                   Abscissa abscissa) {
  if (ns.size() != errors.size()) throw std::invalid_argument("fit_rate: length mismatch");
  std::vector<double> xs, ys;
  int dropped = 0;
  for (std::size_t i = 0; i < ns.size(); ++i) {
    if (!(errors[i] > 0.0) || !std::isfinite(errors[i])) {
      ++dropped;
      continue;
    }
    const double n = static_cast<double>(ns[i]);
    const double a = abscissa == Abscissa::n ? n : n / std::log(n);
    xs.push_back(std::log(a));
    ys.push_back(std::log(errors[i]));
  }
  if (xs.size() < 3) throw std::invalid_argument("fit_rate: fewer than 3 usable points");

  const std::size_t n = xs.size();
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  FitResult fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = ys[i] - (fit.intercept + fit.slope * xs[i]);
    ss_res += r * r;
  }
  fit.r2 = syy > 0.0 ? std::max(0.0, 1.0 - ss_res / syy) : 1.0;
  fit.used_points = static_cast<int>(n);
  fit.dropped_points = dropped;
  return fit;
}

static std::pair<double, bool> theoretical_rate_for(Task task, Criterion crit, int d, int s,
                                                    double p, double q) {
  const double ip = std::isinf(p) ? 0.0 : 1.0 / p;
  const double iq = std::isinf(q) ? 0.0 : 1.0 / q;
  const double sd = static_cast<double>(s) / d;
  switch (task) {
    case Task::approximation:
      if (crit == Criterion::monte_carlo) {
        if (std::isinf(p) && std::isinf(q)) return {-sd, true};
        return {-(sd - std::max(ip - iq, 0.0)), false};
      }
      if (q >= p || (std::isinf(q) && !std::isinf(p))) return {-(sd - ip + iq), true};
      return {-sd, false};
    case Task::integration_cv:
      return {-(sd + 0.5 - std::max(ip - 0.5, 0.0)), false};
    case Task::integration_approx:
      if (p == 1.0) return {-sd, true};
      return {-sd, false};
    case Task::integration_mc:
      return {-0.5, false};
  }
  return {0.0, false};
}

std::pair<double, bool> theoretical_rate(const ExperimentConfig& cfg) {
  return theoretical_rate_for(cfg.task, cfg.criterion, cfg.d, cfg.s, cfg.p, cfg.q);
}

// ---------------------------------------------------------------------------
// the sweep

namespace {

struct CellStats {
  double error = 0.0;
  int scenario = 0;
  std::uint64_t fallbacks = 0;
  std::uint64_t retries = 0;
};

double mean_of(std::span<const double> v) {
  double s = 0.0;
  for (const double x : v) s += x;
  return s / static_cast<double>(v.size());
}

RateRow stats_over(std::size_t n, std::span<const double> v) {
  RateRow row;
  row.n = n;
  row.mean = mean_of(v);
  double acc = 0.0;
  row.min = std::numeric_limits<double>::infinity();
  row.max = -std::numeric_limits<double>::infinity();
  for (const double x : v) {
    acc += (x - row.mean) * (x - row.mean);
    row.min = std::min(row.min, x);
    row.max = std::max(row.max, x);
  }
  row.stddev = v.size() > 1 ? std::sqrt(acc / static_cast<double>(v.size() - 1)) : 0.0;
  return row;
}

}  // namespace

SweepResult run_error_sweep(const ExperimentConfig& cfg, const PerNSink& per_n_sink) {
  cfg.validate();
  const Domain domain = cfg.make_domain();
  const AlgoConstants constants = cfg.make_constants(domain);
  const Dictionary dict = make_dictionary(domain, cfg);
  const int R = cfg.replications;
  const std::size_t NF = dict.members.size();
  const std::size_t NN = cfg.ns.size();
  const int d = domain.dim;

  std::shared_ptr<const ReferenceGrid> error_grid, quad_grid;
  std::vector<std::vector<double>> truth(NF);  // scaled truth on the error grid
  std::vector<double> ref_integral(NF, 0.0);

  if (cfg.task == Task::approximation) {
    error_grid = reference_grid(domain, cfg.effective_error_grid());
    const std::size_t np = error_grid->count();
    for (std::size_t fi = 0; fi < NF; ++fi) {
      truth[fi].resize(np);
      const auto& f = dict.members[fi];
      const double scale = dict.scale[fi];
#pragma omp parallel for schedule(static)
      for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(np); ++i) {
        const std::span<const double> x{
            error_grid->pts.data() + static_cast<std::size_t>(i) * static_cast<std::size_t>(d),
            static_cast<std::size_t>(d)};
        truth[fi][static_cast<std::size_t>(i)] = scale * f.f(x);
      }
    }
  } else if (cfg.task != Task::integration_mc) {
    quad_grid = reference_grid(domain, cfg.effective_quad_grid());
  }
  if (cfg.task != Task::approximation) {
    for (std::size_t fi = 0; fi < NF; ++fi) {
      const auto& f = dict.members[fi];
      double integral;
      if (f.integral) {
        integral = *f.integral;
      } else {
        // quadrature reference on a finer grid than the estimate uses
        const auto fine = reference_grid(domain, 2 * cfg.effective_quad_grid());
        double acc = 0.0;
        for (std::size_t i = 0; i < fine->count(); ++i) {
          const std::span<const double> x{fine->pts.data() + i * static_cast<std::size_t>(d),
                                          static_cast<std::size_t>(d)};
          acc += f.f(x);
        }
        integral = domain.volume * acc / static_cast<double>(fine->count());
      }
      ref_integral[fi] = dict.scale[fi] * integral;
    }
  }

  // err[n][f][rep]
  std::vector<std::vector<std::vector<double>>> err(
      NN, std::vector<std::vector<double>>(NF, std::vector<double>(static_cast<std::size_t>(R), 0.0)));
  std::vector<std::vector<int>> scen(NN, std::vector<int>(static_cast<std::size_t>(R), 0));
  std::vector<std::vector<std::uint64_t>> fallbacks(NN, std::vector<std::uint64_t>(static_cast<std::size_t>(R), 0));

  for (std::size_t ni = 0; ni < NN; ++ni) {
    const std::size_t n = cfg.ns[ni];
#pragma omp parallel for schedule(dynamic)
    for (int rep = 0; rep < R; ++rep) {
      const std::uint64_t tag = static_cast<std::uint64_t>(ni) * 2097152ULL + static_cast<std::uint64_t>(rep) * 4ULL;

      if (cfg.task == Task::integration_mc) {
        const PointSet P = cfg.source == PointSource::iid ? sample_iid_uniform(domain, n, cfg.seed, tag)
                                                          : quasi_uniform_points(domain, n);
        for (std::size_t fi = 0; fi < NF; ++fi) {
          double acc = 0.0;
          for (std::size_t j = 0; j < n; ++j) acc += dict.members[fi].f(P.point(j));
          const double est = domain.volume * dict.scale[fi] * acc / static_cast<double>(n);
          err[ni][fi][static_cast<std::size_t>(rep)] = std::abs(est - ref_integral[fi]);
        }
        continue;
      }

      const std::size_t n_build = cfg.task == Task::integration_cv ? n / 2 : n;
      PointSet P = cfg.source == PointSource::iid ? sample_iid_uniform(domain, n_build, cfg.seed, tag)
                                                  : quasi_uniform_points(domain, n_build);
      std::vector<std::vector<double>> samples(NF, std::vector<double>(n_build));
      for (std::size_t fi = 0; fi < NF; ++fi)
        for (std::size_t j = 0; j < n_build; ++j)
          samples[fi][j] = dict.scale[fi] * dict.members[fi].f(P.point(j));

      const RecoveryOperator op(domain, std::move(P), std::vector<double>(n_build, 0.0), constants);
      scen[ni][static_cast<std::size_t>(rep)] = op.scenario();

      if (cfg.task == Task::approximation) {
        const std::vector<EvalRule> rules = op.rules_on_grid(error_grid->pts);
        std::vector<double> approx(rules.size());
        for (std::size_t fi = 0; fi < NF; ++fi) {
          for (std::size_t i = 0; i < rules.size(); ++i) approx[i] = op.apply_rule(rules[i], samples[fi]);
          err[ni][fi][static_cast<std::size_t>(rep)] =
              lq_error_on_values(approx, truth[fi], cfg.q, domain.volume);
        }
      } else {
        const std::vector<EvalRule> rules_q = op.rules_on_grid(quad_grid->pts);
        std::vector<EvalRule> rules_fresh;
        PointSet P2;
        if (cfg.task == Task::integration_cv) {
          P2 = sample_iid_uniform(domain, n - n / 2, cfg.seed, tag + 1);
          rules_fresh = op.rules_on_grid(P2.coords);
        }
        for (std::size_t fi = 0; fi < NF; ++fi) {
          double acc = 0.0;
          for (const auto& rule : rules_q) acc += op.apply_rule(rule, samples[fi]);
          double est = domain.volume * acc / static_cast<double>(rules_q.size());
          if (cfg.task == Task::integration_cv) {
            double resid = 0.0;
            for (std::size_t j = 0; j < rules_fresh.size(); ++j)
              resid += dict.scale[fi] * dict.members[fi].f(P2.point(j)) -
                       op.apply_rule(rules_fresh[j], samples[fi]);
            est += domain.volume * resid / static_cast<double>(rules_fresh.size());
          }
          err[ni][fi][static_cast<std::size_t>(rep)] = std::abs(est - ref_integral[fi]);
        }
      }
      fallbacks[ni][static_cast<std::size_t>(rep)] = op.retry_count() + op.nearest_fallback_count();
    }
    if (per_n_sink) {
      std::vector<CsvRow> batch;
      batch.reserve(NF * static_cast<std::size_t>(R));
      for (std::size_t fi = 0; fi < NF; ++fi)
        for (int r = 0; r < R; ++r) {
          CsvRow row;
          row.n = n;
          row.rep = r;
          row.function_id = dict.members[fi].id;
          row.error = err[ni][fi][static_cast<std::size_t>(r)];
          row.scenario = scen[ni][static_cast<std::size_t>(r)];
          row.fallback_count = fallbacks[ni][static_cast<std::size_t>(r)];
          batch.push_back(std::move(row));
        }
      per_n_sink(n, batch);
    }
  }

  // aggregate both criteria from the same matrix
  SweepResult out;
  out.cfg = cfg;
  out.family_cache_rows = dict.family_cache_rows;
  std::vector<double> mc_curve(NN), uni_curve(NN);
  std::vector<RateRow> mc_rows(NN), uni_rows(NN);
  for (std::size_t ni = 0; ni < NN; ++ni) {
    std::size_t best_f = 0;
    double best_mean = -1.0;
    for (std::size_t fi = 0; fi < NF; ++fi) {
      const double m = mean_of(err[ni][fi]);
      if (m > best_mean) {
        best_mean = m;
        best_f = fi;
      }
    }
    mc_curve[ni] = best_mean;
    mc_rows[ni] = stats_over(cfg.ns[ni], err[ni][best_f]);
    mc_rows[ni].mean = best_mean;

    std::vector<double> per_rep(static_cast<std::size_t>(R), 0.0);
    for (int rep = 0; rep < R; ++rep) {
      double worst = 0.0;
      for (std::size_t fi = 0; fi < NF; ++fi)
        worst = std::max(worst, err[ni][fi][static_cast<std::size_t>(rep)]);
      per_rep[static_cast<std::size_t>(rep)] = worst;
    }
    uni_rows[ni] = stats_over(cfg.ns[ni], per_rep);
    uni_curve[ni] = uni_rows[ni].mean;

    if (!(uni_curve[ni] >= mc_curve[ni]))
      throw std::logic_error("criterion ordering violated: uniform < monte-carlo");
  }

  auto build_report = [&](Criterion crit, std::span<const double> curve,
                          std::vector<RateRow> rows) {
    RateReport rep;
    rep.criterion = crit;
    rep.task = cfg.task;
    rep.rows = std::move(rows);
    if (cfg.ns.size() >= 3) {
      try {
        rep.fit_n = fit_rate(cfg.ns, curve, Abscissa::n);
        rep.fit_n_over_log_n = fit_rate(cfg.ns, curve, Abscissa::n_over_log_n);
      } catch (const std::invalid_argument&) {
        // all-zero error curves (exact reproduction) leave the fit empty
      }
    }
    const auto theory = theoretical_rate_for(cfg.task, crit, cfg.d, cfg.s, cfg.p, cfg.q);
    rep.theoretical_exponent = theory.first;
    rep.theory_uses_log_abscissa = theory.second;
    rep.config_hash = cfg.hash();
    rep.config_echo = cfg.canonical();
    rep.dictionary_desc = dict.description;
    rep.scenario1_per_n.resize(NN, 0);
    for (std::size_t ni = 0; ni < NN; ++ni)
      for (int r = 0; r < R; ++r)
        if (scen[ni][static_cast<std::size_t>(r)] == 1) ++rep.scenario1_per_n[ni];
    return rep;
  };

  out.monte_carlo = build_report(Criterion::monte_carlo, mc_curve, std::move(mc_rows));
  out.uniform = build_report(Criterion::uniform, uni_curve, std::move(uni_rows));

  std::uint64_t total_fallbacks = 0;
  for (std::size_t ni = 0; ni < NN; ++ni)
    for (int r = 0; r < R; ++r) total_fallbacks += fallbacks[ni][static_cast<std::size_t>(r)];
  out.monte_carlo.nearest_fallbacks = total_fallbacks;
  out.uniform.nearest_fallbacks = total_fallbacks;

  out.rows.reserve(NN * NF * static_cast<std::size_t>(R));
  for (std::size_t ni = 0; ni < NN; ++ni)
    for (std::size_t fi = 0; fi < NF; ++fi)
      for (int r = 0; r < R; ++r) {
        CsvRow row;
        row.n = cfg.ns[ni];
        row.rep = r;
        row.function_id = dict.members[fi].id;
        row.error = err[ni][fi][static_cast<std::size_t>(r)];
        row.scenario = scen[ni][static_cast<std::size_t>(r)];
        row.fallback_count = fallbacks[ni][static_cast<std::size_t>(r)];
        out.rows.push_back(std::move(row));
      }
  return out;
}

RateReport mc_error_curve(const ExperimentConfig& cfg) {
  ExperimentConfig c = cfg;
  c.criterion = Criterion::monte_carlo;
  return run_error_sweep(c).monte_carlo;
}

RateReport uniform_error_curve(const ExperimentConfig& cfg) {
  ExperimentConfig c = cfg;
  c.criterion = Criterion::uniform;
  return run_error_sweep(c).uniform;
}

std::string RateReport::render() const {
  std::ostringstream os;
  os << "# rate report\n";
  os << "config_hash = " << hash_hex(config_hash) << "\n";
  os << "criterion = " << to_string(criterion) << "\n";
  os << "task = " << to_string(task) << "\n";
  os << "dictionary = " << dictionary_desc << "\n";
  os << "n,mean,std,min,max,scenario1\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    os << r.n << "," << fmt17(r.mean) << "," << fmt17(r.stddev) << "," << fmt17(r.min) << ","
       << fmt17(r.max) << "," << (i < scenario1_per_n.size() ? scenario1_per_n[i] : 0) << "\n";
  }
  os << "fit_vs_n: slope = " << fmt17(fit_n.slope) << ", intercept = " << fmt17(fit_n.intercept)
     << ", r2 = " << fmt17(fit_n.r2) << ", used = " << fit_n.used_points
     << ", dropped = " << fit_n.dropped_points << "\n";
  os << "fit_vs_n_over_log_n: slope = " << fmt17(fit_n_over_log_n.slope)
     << ", intercept = " << fmt17(fit_n_over_log_n.intercept)
     << ", r2 = " << fmt17(fit_n_over_log_n.r2) << ", used = " << fit_n_over_log_n.used_points
     << ", dropped = " << fit_n_over_log_n.dropped_points << "\n";
  os << "theoretical_exponent = " << fmt17(theoretical_exponent)
     << " (abscissa " << (theory_uses_log_abscissa ? "n/log n" : "n") << ")\n";
  os << "fallbacks = " << nearest_fallbacks << "\n";
  os << "# config echo\n" << config_echo;
  return os.str();
}

void write_sweep_csv(std::ostream& os, const SweepResult& sweep) {
  const std::string hash = hash_hex(sweep.cfg.hash());
  const std::string task = to_string(sweep.cfg.task);
  const std::string crit = to_string(sweep.cfg.criterion);
  os << "config_hash,task,criterion,d,s,p,q,n,rep,function_id,error,scenario,fallback_count\n";
  for (const auto& row : sweep.rows) {
    os << hash << "," << task << "," << crit << "," << sweep.cfg.d << "," << sweep.cfg.s << ","
       << (std::isinf(sweep.cfg.p) ? "inf" : fmt17(sweep.cfg.p)) << ","
       << (std::isinf(sweep.cfg.q) ? "inf" : fmt17(sweep.cfg.q)) << "," << row.n << "," << row.rep
       << "," << row.function_id << "," << fmt17(row.error) << "," << row.scenario << ","
       << row.fallback_count << "\n";
  }
}

// ---------------------------------------------------------------------------
// distributional checks

std::vector<MomentRow> radius_moment_check(const Domain& domain, std::span<const double> y,
                                           double alpha, std::span<const std::size_t> ns, int R,
                                           std::uint64_t seed, const AlgoConstants& constants) {
  if (alpha < 0.0) throw std::invalid_argument("radius_moment_check: alpha must be >= 0");
  if (!domain.contains(y)) throw std::invalid_argument("radius_moment_check: y not in the domain");
  std::vector<MomentRow> rows;
  for (std::size_t ni = 0; ni < ns.size(); ++ni) {
    const std::size_t n = ns[ni];
    std::vector<double> vals(static_cast<std::size_t>(R));
#pragma omp parallel for schedule(dynamic)
    for (int rep = 0; rep < R; ++rep) {
      PointSet P = sample_iid_uniform(domain, n, seed, static_cast<std::uint64_t>(ni) * 1048576ULL +
                                                           static_cast<std::uint64_t>(rep));
      const RecoveryOperator op(domain, std::move(P), std::vector<double>(n, 0.0), constants);
      vals[static_cast<std::size_t>(rep)] = std::pow(op.select_level(y).radius, alpha);
    }
    MomentRow row;
    row.n = n;
    row.mean_pow = mean_of(vals);
    row.normalized = row.mean_pow * std::pow(static_cast<double>(n), alpha / domain.dim);
    rows.push_back(row);
  }
  return rows;
}

TailReport tail_check(const Domain& domain, std::span<const double> y, std::span<const double> ts,
                      std::size_t n, int R, std::uint64_t seed, const AlgoConstants& constants) {
  if (!domain.contains(y)) throw std::invalid_argument("tail_check: y not in the domain");
  std::vector<double> radii(static_cast<std::size_t>(R));
#pragma omp parallel for schedule(dynamic)
  for (int rep = 0; rep < R; ++rep) {
    PointSet P = sample_iid_uniform(domain, n, seed, static_cast<std::uint64_t>(rep));
    const RecoveryOperator op(domain, std::move(P), std::vector<double>(n, 0.0), constants);
    radii[static_cast<std::size_t>(rep)] = op.select_level(y).radius;
  }

  TailReport report;
  std::vector<std::size_t> fit_ns;
  std::vector<double> fit_fs;
  for (const double t : ts) {
    int count = 0;
    for (const double r : radii)
      if (r > t) ++count;
    TailRow row;
    row.t = t;
    row.frequency = static_cast<double>(count) / R;
    report.rows.push_back(row);
  }
  // OLS of log frequency against t^d * n (positive frequencies only)
  std::vector<double> xs, ys;
  for (const auto& row : report.rows) {
    if (row.frequency > 0.0) {
      xs.push_back(std::pow(row.t, domain.dim) * static_cast<double>(n));
      ys.push_back(std::log(row.frequency));
    }
  }
  if (xs.size() >= 2) {
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      mx += xs[i];
      my += ys[i];
    }
    mx /= static_cast<double>(xs.size());
    my /= static_cast<double>(xs.size());
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      sxx += (xs[i] - mx) * (xs[i] - mx);
      sxy += (xs[i] - mx) * (ys[i] - my);
    }
    report.c = sxx > 0.0 ? -sxy / sxx : 0.0;
  }
  // smallest constant making the envelope dominate, then verify
  report.C = 0.0;
  for (const auto& row : report.rows)
    report.C = std::max(report.C,
                        row.frequency * std::exp(report.c * std::pow(row.t, domain.dim) * static_cast<double>(n)));
  report.dominated = true;
  for (auto& row : report.rows) {
    row.envelope = report.C * std::exp(-report.c * std::pow(row.t, domain.dim) * static_cast<double>(n));
    if (row.frequency > row.envelope + 1e-12) report.dominated = false;
  }
  return report;
}

double coupon_miss_probability(int m, double v, std::size_t n) {
  long double sum = 0.0L;
  long double binom = 1.0L;  // C(m, k)
  for (int k = 1; k <= m; ++k) {
    binom *= static_cast<long double>(m - k + 1) / k;
    const long double base = 1.0L - static_cast<long double>(k) * v;
    if (base <= 0.0L) break;
    const long double term = binom * std::pow(base, static_cast<long double>(n));
    sum += (k % 2 == 1 ? term : -term);
    if (term < 1e-24L && k > 4) break;
  }
  return static_cast<double>(std::min<long double>(1.0L, std::max<long double>(0.0L, sum)));
}

CouponResult coupon_check(const Domain& domain, std::size_t n, std::uint64_t seed, int R,
                          const AlgoConstants& constants) {
  if (n < 16) throw std::invalid_argument("coupon_check: n must be >= 16");
  CouponResult out;
  out.m = static_cast<int>(std::floor(static_cast<double>(n) / (2.0 * std::log(static_cast<double>(n)))));
  out.m = std::max(out.m, 1);
  const BumpFamily fam = make_bump_family(domain, out.m, plus_signs(out.m), constants.degree);
  out.support_volume_fraction = fam.support_volume / domain.volume;

  std::vector<int> scen1(static_cast<std::size_t>(R), 0), missed(static_cast<std::size_t>(R), 0);
#pragma omp parallel for schedule(dynamic)
  for (int rep = 0; rep < R; ++rep) {
    PointSet P = sample_iid_uniform(domain, n, seed, static_cast<std::uint64_t>(rep));
    std::vector<char> covered(static_cast<std::size_t>(out.m), 0);
    for (std::size_t j = 0; j < P.size(); ++j) {
      const int b = fam.bump_at(P.point(j));
      if (b >= 0) covered[static_cast<std::size_t>(b)] = 1;
    }
    bool miss = false;
    for (const char c : covered) miss = miss || c == 0;
    missed[static_cast<std::size_t>(rep)] = miss ? 1 : 0;
    const RecoveryOperator op(domain, std::move(P), std::vector<double>(n, 0.0), constants);
    scen1[static_cast<std::size_t>(rep)] = op.scenario() == 1 ? 1 : 0;
  }
  int s1 = 0, ms = 0;
  for (int rep = 0; rep < R; ++rep) {
    s1 += scen1[static_cast<std::size_t>(rep)];
    ms += missed[static_cast<std::size_t>(rep)];
  }
  out.scenario1_frequency = static_cast<double>(s1) / R;
  out.missed_bump_frequency = static_cast<double>(ms) / R;
  return out;
}

}  // namespace sobrec
