#include "gaudin/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include <Eigen/Cholesky>

#include "gaudin/errors.hpp"

namespace gaudin {

namespace {

constexpr double kPi = std::numbers::pi;

/// Potential, gradient and Hessian of one of the convex systems.
struct Objective {
  enum class Kind { full, reduced, periodic };
  Kind kind;
  MomentumLabels labels;
  SystemSpec spec;

  double value(const Eigen::VectorXd& k) const {
    switch (kind) {
      case Kind::full: return potential_B(k, labels, spec);
      case Kind::reduced: return potential_B_reduced(k, labels, spec);
      case Kind::periodic: return potential_periodic(k, labels, spec);
    }
    return 0.0;
  }
  Eigen::VectorXd gradient(const Eigen::VectorXd& k) const {
    switch (kind) {
      case Kind::full: return residual_transformed(k, labels, spec);
      case Kind::reduced: return gradient_B_reduced(k, labels, spec);
      case Kind::periodic: return residual_periodic_smooth(k, labels, spec);
    }
    return {};
  }
  DenseSymMatrix hessian(const Eigen::VectorXd& k) const {
    switch (kind) {
      case Kind::full: return hessian_B(k, spec);
      case Kind::reduced: return hessian_B_reduced(k, spec);
      case Kind::periodic: return hessian_periodic(k, spec);
    }
    return {};
  }
  /// Exact root positions of the c -> infinity limit for the full and reduced
  /// systems; the free-particle positions for the periodic one.
  Eigen::VectorXd limit_point() const {
    Eigen::VectorXd k(static_cast<Eigen::Index>(labels.size()));
    for (std::size_t i = 0; i < labels.size(); ++i)
      k[static_cast<Eigen::Index>(i)] = kPi * static_cast<double>(labels[i]) / spec.length;
    return k;
  }
};

double convergence_threshold(const Eigen::VectorXd& k, const SolverConfig& cfg, double length) {
  const double scale = k.size() == 0 ? 1.0 : std::max(1.0, k.cwiseAbs().maxCoeff());
  return cfg.grad_tol * length * scale;
}

double inf_norm(const Eigen::VectorXd& v) { return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff(); }

Minimum newton_minimize(const Objective& obj, Eigen::VectorXd x, const SolverConfig& cfg) {
  constexpr double eps = std::numeric_limits<double>::epsilon();
  const double length = obj.spec.length;

  Minimum out;
  double f = obj.value(x);
  Eigen::VectorXd g = obj.gradient(x);
  if (cfg.record_history) out.history.push_back(f);

  int iter = 0;
  for (;; ++iter) {
    const double gnorm = inf_norm(g);
    const double threshold = convergence_threshold(x, cfg, length);
    if (gnorm <= threshold) {
      out.grad_norm = gnorm;
      out.threshold = threshold;
      break;
    }
    if (iter >= cfg.max_iters) {
      std::ostringstream m;
      m << "Newton iteration did not converge in " << cfg.max_iters << " iterations (|grad| = "
        << gnorm << ", threshold " << threshold << ")";
      throw NoConvergence(m.str(), iter);
    }

    const Eigen::LLT<DenseSymMatrix> llt(obj.hessian(x));
    if (llt.info() != Eigen::Success)
      throw InternalError("Hessian is not positive definite; the potential must be strictly convex");
    Eigen::VectorXd dir = llt.solve(-g);
    double slope = g.dot(dir);
    if (!dir.allFinite() || !(slope < 0.0)) {
      dir = -g / length;
      slope = g.dot(dir);
      out.used_gradient_fallback = true;
    }

    double step = 1.0;
    bool accepted = false;
    Eigen::VectorXd trial;
    double f_trial = 0.0;
    Eigen::VectorXd g_trial;
    for (int bt = 0; bt < 80; ++bt, step *= cfg.backtrack) {
      trial = x + step * dir;
      f_trial = obj.value(trial);
      if (!std::isfinite(f_trial)) continue;
      if (f_trial <= f + cfg.armijo_c * step * slope) {
        g_trial = obj.gradient(trial);
        accepted = true;
        break;
      }
      // Near the minimum the predicted decrease drops below the rounding
      // level of B; accept on gradient reduction instead.
      if (-step * slope <= 64.0 * eps * std::max(1.0, std::abs(f))) {
        g_trial = obj.gradient(trial);
        if (inf_norm(g_trial) < gnorm) {
          accepted = true;
          break;
        }
      }
    }
    if (!accepted) {
      std::ostringstream m;
      m << "line search failed at iteration " << iter << " (|grad| = " << gnorm << ")";
      throw NoConvergence(m.str(), iter);
    }
    x = std::move(trial);
    f = f_trial;
    g = std::move(g_trial);
    if (cfg.record_history) out.history.push_back(f);
  }

  out.x = std::move(x);
  out.value = f;
  out.gradient = std::move(g);
  out.iterations = iter;
  return out;
}

Eigen::VectorXd starting_point(const Objective& obj, const SolverConfig& cfg) {
  const auto size = static_cast<Eigen::Index>(obj.labels.size());
  switch (cfg.init_mode) {
    case InitMode::tonks_limit: return obj.limit_point();
    case InitMode::user_supplied: {
      if (static_cast<Eigen::Index>(cfg.initial.size()) != size) {
        std::ostringstream m;
        m << "initial guess has " << cfg.initial.size() << " entries, expected " << size;
        throw InvalidSpec(m.str());
      }
      return Eigen::Map<const Eigen::VectorXd>(cfg.initial.data(), size);
    }
    case InitMode::random_box: {
      UniformStream rng(cfg.seed);
      Eigen::VectorXd k(size);
      for (Eigen::Index i = 0; i < size; ++i) k[i] = rng.next(-cfg.box, cfg.box);
      return k;
    }
  }
  return obj.limit_point();
}

bool strictly_increasing(const Eigen::VectorXd& k) {
  for (Eigen::Index i = 1; i < k.size(); ++i)
    if (!(k[i] > k[i - 1])) return false;
  return true;
}

bool has_coincident_magnitudes(const Eigen::VectorXd& k) {
  std::vector<double> mag(k.data(), k.data() + k.size());
  for (double& m : mag) m = std::abs(m);
  std::sort(mag.begin(), mag.end());
  for (std::size_t i = 1; i < mag.size(); ++i)
    if (mag[i] - mag[i - 1] <= 1e-12 * std::max(1.0, mag[i])) return true;
  return false;
}

Eigen::VectorXd sorted(Eigen::VectorXd k) {
  std::sort(k.data(), k.data() + k.size());
  return k;
}

void fill_from_minimum(SolveReport& report, const Minimum& min, const Objective& obj) {
  report.b_value = min.value;
  report.iterations = min.iterations;
  report.final_grad_norm = min.grad_norm;
  report.grad_threshold = min.threshold;
  report.b_history = min.history;
  const Eigen::LLT<DenseSymMatrix> llt(obj.hessian(min.x));
  report.hessian_pd = llt.info() == Eigen::Success;
  if (!report.hessian_pd) throw InternalError("Hessian at the minimum is not positive definite");
}

SolveReport solve_canonical(const SystemSpec& spec, std::span<const std::int64_t> n,
                            CanonicalForm form, const SolverConfig& cfg) {
  Objective obj{form.zero_reduced ? Objective::Kind::reduced : Objective::Kind::full,
                form.zero_reduced ? reduced_momentum_labels(form.canonical_n)
                                  : momentum_labels(form.canonical_n),
                spec};
  const Minimum min = newton_minimize(obj, starting_point(obj, cfg), cfg);

  SolveReport report;
  fill_from_minimum(report, min, obj);
  report.ordering_ok = strictly_increasing(min.x) && (min.x.size() == 0 || min.x[0] > 0.0);

  Eigen::VectorXd label_order(static_cast<Eigen::Index>(form.full_size()));
  if (form.zero_reduced) {
    label_order[0] = 0.0;
    label_order.tail(min.x.size()) = min.x;
  } else {
    label_order = min.x;
  }
  report.roots = sorted(label_order);
  report.signed_roots = to_input_order(label_order, form);
  report.coincident_magnitudes = has_coincident_magnitudes(report.roots);
  report.equivalence_class_size = form.equivalence_class_size;
  try {
    report.raw_residual_norm = inf_norm(residual_raw(report.signed_roots, n, spec));
  } catch (const DegenerateConfiguration&) {
    report.raw_residual_norm.reset();
  }
  report.canonical = std::move(form);
  return report;
}

}  // namespace

void validate_config(const SolverConfig& cfg) {
  std::ostringstream msg;
  bool ok = true;
  auto fail = [&](const char* text) {
    msg << (ok ? "" : "; ") << text;
    ok = false;
  };
  if (!(cfg.grad_tol > 0.0)) fail("grad_tol must be > 0");
  if (cfg.max_iters < 1) fail("max_iters must be >= 1");
  if (!(cfg.armijo_c > 0.0 && cfg.armijo_c < 1.0)) fail("armijo_c must lie in (0, 1)");
  if (!(cfg.backtrack > 0.0 && cfg.backtrack < 1.0)) fail("backtrack must lie in (0, 1)");
  if (cfg.init_mode == InitMode::random_box && !(cfg.box > 0.0)) fail("box must be > 0");
  if (!ok) throw InvalidSpec(msg.str());
}

SolveReport solve(const SystemSpec& spec, std::span<const std::int64_t> n, const SolverConfig& cfg) {
  validate_spec(spec, n);
  validate_config(cfg);
  return solve_canonical(spec, n, canonicalize(n), cfg);
}

SolveReport solve_reduced(const SystemSpec& spec, std::span<const std::int64_t> n,
                          const SolverConfig& cfg) {
  QuantumNumbers full;
  full.reserve(n.size() + 1);
  full.push_back(0);
  full.insert(full.end(), n.begin(), n.end());
  validate_spec(spec, full);
  validate_config(cfg);
  for (const auto v : n)
    if (v < 0) throw InvalidSpec("solve_reduced: quantum numbers must be nonnegative");
  return solve_canonical(spec, full, canonicalize(full), cfg);
}

SolveReport solve_periodic(const SystemSpec& spec, std::span<const std::int64_t> n,
                           const SolverConfig& cfg) {
  validate_spec(spec, n);
  validate_config(cfg);

  std::vector<std::size_t> order(n.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return n[a] < n[b]; });

  CanonicalForm form;
  form.sign_map.assign(n.size(), 1);
  form.permutation.assign(n.size(), 0);
  for (std::size_t pos = 0; pos < order.size(); ++pos) {
    form.canonical_n.push_back(n[order[pos]]);
    form.permutation[order[pos]] = pos;
  }
  for (std::size_t i = 1; i < form.canonical_n.size(); ++i)
    if (form.canonical_n[i] == form.canonical_n[i - 1])
      throw InvalidSpec("solve_periodic: quantum numbers must be distinct");

  Objective obj{Objective::Kind::periodic, periodic_labels(form.canonical_n), spec};
  const Minimum min = newton_minimize(obj, starting_point(obj, cfg), cfg);

  SolveReport report;
  fill_from_minimum(report, min, obj);
  report.periodic = true;
  report.ordering_ok = strictly_increasing(min.x);
  report.roots = sorted(min.x);
  report.signed_roots = to_input_order(min.x, form);
  try {
    report.raw_residual_norm = inf_norm(residual_periodic(report.signed_roots, n, spec));
  } catch (const DegenerateConfiguration&) {
    report.raw_residual_norm.reset();
  }
  report.canonical = std::move(form);
  return report;
}

UniquenessReport multistart_probe(const SystemSpec& spec, std::span<const std::int64_t> n,
                                  int starts, double box, std::uint64_t seed,
                                  const SolverConfig& cfg, double cluster_tol) {
  if (starts < 2) throw InvalidSpec("multistart_probe: starts must be >= 2");
  if (!(box > 0.0)) throw InvalidSpec("multistart_probe: box must be > 0");

  UniquenessReport report;
  report.starts = starts;
  report.assignment.assign(static_cast<std::size_t>(starts), -1);
  std::vector<std::pair<int, RootSet>> solutions;
  // One independent stream per start, derived from the base seed.
  std::seed_seq base{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
  std::vector<std::uint32_t> words(2 * static_cast<std::size_t>(starts));
  base.generate(words.begin(), words.end());

  for (int s = 0; s < starts; ++s) {
    SolverConfig start_cfg = cfg;
    start_cfg.init_mode = InitMode::random_box;
    start_cfg.box = box;
    start_cfg.seed = (static_cast<std::uint64_t>(words[2 * s]) << 32) | words[2 * s + 1];
    try {
      solutions.emplace_back(s, solve(spec, n, start_cfg).roots);
    } catch (const NoConvergence& e) {
      report.failures.emplace_back(s, e.what());
    } catch (const InternalError& e) {
      report.failures.emplace_back(s, e.what());
    }
  }
  report.converged = static_cast<int>(solutions.size());

  for (const auto& [start, k] : solutions) {
    int cluster = -1;
    for (std::size_t c = 0; c < report.representatives.size(); ++c) {
      if (same_physical_solution(k, report.representatives[c], cluster_tol)) {
        report.max_spread = std::max(report.max_spread, inf_norm(k - report.representatives[c]));
        cluster = static_cast<int>(c);
        break;
      }
    }
    if (cluster < 0) {
      cluster = static_cast<int>(report.representatives.size());
      report.representatives.push_back(k);
    }
    report.assignment[static_cast<std::size_t>(start)] = cluster;
  }

  // Order clusters by root values so the report does not depend on which
  // start happened to reach a cluster first.
  std::vector<int> order(report.representatives.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    const RootSet& ka = report.representatives[static_cast<std::size_t>(a)];
    const RootSet& kb = report.representatives[static_cast<std::size_t>(b)];
    return std::lexicographical_compare(ka.data(), ka.data() + ka.size(), kb.data(), kb.data() + kb.size());
  });
  std::vector<int> rank(order.size());
  std::vector<RootSet> reordered;
  for (std::size_t r = 0; r < order.size(); ++r) {
    rank[static_cast<std::size_t>(order[r])] = static_cast<int>(r);
    reordered.push_back(report.representatives[static_cast<std::size_t>(order[r])]);
  }
  report.representatives = std::move(reordered);
  for (int& a : report.assignment)
    if (a >= 0) a = rank[static_cast<std::size_t>(a)];
  report.clusters = static_cast<int>(report.representatives.size());
  return report;
}

}  // namespace gaudin
