#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <span>
#include <vector>

#include "gaudin/equations.hpp"
#include "gaudin/model.hpp"

namespace gaudin {

enum class InitMode { tonks_limit, user_supplied, random_box };

struct SolverConfig {
  /// Convergence when ||grad B||_inf <= grad_tol * L * max(1, max_i |k_i|).
  double grad_tol = 1e-12;
  int max_iters = 200;
  double armijo_c = 1e-4;
  double backtrack = 0.5;
  InitMode init_mode = InitMode::tonks_limit;
  /// Starting point for user_supplied, in canonical (sorted label) order.
  std::vector<double> initial;
  /// Half-width and seed for random_box starts.
  double box = 50.0;
  std::uint64_t seed = 0;
  /// Record the potential after every accepted step.
  bool record_history = false;
};

/// Throws InvalidSpec on out-of-range settings.
void validate_config(const SolverConfig& cfg);

struct SolveReport {
  /// Canonical roots sorted ascending; includes the pinned zero if zero_reduced.
  RootSet roots;
  /// Roots matched to the caller's quantum numbers (input order, signs applied).
  RootSet signed_roots;
  CanonicalForm canonical;
  double b_value = 0.0;
  int iterations = 0;
  double final_grad_norm = 0.0;
  /// Same norm the convergence test uses, in L*k units.
  double grad_threshold = 0.0;
  /// ||residual_raw(signed_roots, n)||_inf; empty when the raw form is undefined.
  std::optional<double> raw_residual_norm;
  bool hessian_pd = false;
  /// Filled by analysis::certify; the solver does not compute minors.
  std::optional<bool> minor_chain_ok;
  /// Roots as minimized (label order) were strictly increasing and positive.
  bool ordering_ok = false;
  std::uint64_t equivalence_class_size = 1;
  /// Some pair of canonical roots has coinciding magnitude.
  bool coincident_magnitudes = false;
  std::vector<double> b_history;
  /// Periodic boundary conditions (solve_periodic) rather than zero ones.
  bool periodic = false;
};

/// Outcome of a damped Newton minimization, independent of the system solved.
struct Minimum {
  Eigen::VectorXd x;
  double value = 0.0;
  Eigen::VectorXd gradient;
  int iterations = 0;
  double grad_norm = 0.0;
  double threshold = 0.0;
  bool used_gradient_fallback = false;
  std::vector<double> history;
};

/// Solves the zero-boundary system for arbitrary integer quantum numbers.
///
/// Quantum numbers are canonicalized first: negative entries flip the sign of
/// their root and a zero entry pins one root at k = 0 and routes to
/// solve_reduced. Throws InvalidSpec, NoConvergence, InternalError.
SolveReport solve(const SystemSpec& spec, std::span<const std::int64_t> n,
                  const SolverConfig& cfg = {});

/// Solves the system left after pinning one root at zero.
///
/// `n` holds the N-1 remaining quantum numbers (nonnegative, any order). The
/// reported roots are (0, k_2, ..., k_N); `spec.n_particles` is the full N.
SolveReport solve_reduced(const SystemSpec& spec, std::span<const std::int64_t> n,
                          const SolverConfig& cfg = {});

/// Periodic boundary conditions; n distinct integers of any sign.
SolveReport solve_periodic(const SystemSpec& spec, std::span<const std::int64_t> n,
                           const SolverConfig& cfg = {});

/// Newton-free reference solution for small systems (N <= 6).
///
/// Under-relaxed Gauss-Seidel fixed-point sweeps followed by per-coordinate
/// bisection on the smooth residual. Returns canonical roots sorted
/// ascending, with the pinned zero first when a zero quantum number is present.
RootSet oracle_solve(const SystemSpec& spec, std::span<const std::int64_t> n);

struct UniquenessReport {
  int starts = 0;
  int converged = 0;
  /// Distinct physical solutions among converged starts.
  int clusters = 0;
  /// One representative root set per cluster, ordered by root values.
  std::vector<RootSet> representatives;
  /// Start index and message for every start that failed.
  std::vector<std::pair<int, std::string>> failures;
  /// Largest distance of any converged start from its cluster representative.
  double max_spread = 0.0;
  /// Cluster index per start (index into representatives), -1 for failures.
  std::vector<int> assignment;
};

/// Solves from `starts` points drawn uniformly in [-box, box]^N (seeded) and
/// clusters the results with same_physical_solution at `cluster_tol`.
UniquenessReport multistart_probe(const SystemSpec& spec, std::span<const std::int64_t> n,
                                  int starts, double box, std::uint64_t seed,
                                  const SolverConfig& cfg = {}, double cluster_tol = 1e-8);

/// Deterministic uniform doubles in [0, 1).
///
/// The engine's output is fixed by the standard; the conversion takes the top
/// 53 bits directly instead of going through a (library-specific) distribution.
class UniformStream {
public:
  explicit UniformStream(std::uint64_t seed) : engine_(seed) {}
  double next() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double next(double lo, double hi) { return lo + (hi - lo) * next(); }

private:
  std::mt19937_64 engine_;
};

}  // namespace gaudin
