#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "gaudin/equations.hpp"
#include "gaudin/errors.hpp"
#include "gaudin/model.hpp"
#include "gaudin/solver.hpp"

namespace gaudin {

/// Leading principal minors G_1..G_N, kept as natural logarithms.
struct MinorChain {
  std::vector<double> log_minors;
  bool all_positive = false;
  bool strictly_increasing = false;
  /// Smallest log G_{j+1} - log G_j over the chain (+inf for N = 1).
  double min_log_increment = 0.0;
};

/// Raised when a pivot <= 0 appears; carries the chain computed so far.
class NotPositiveDefinite : public Error {
public:
  NotPositiveDefinite(const std::string& what, MinorChain partial, std::size_t failed_at)
      : Error(what), partial_(std::move(partial)), failed_at_(failed_at) {}
  const MinorChain& partial() const noexcept { return partial_; }
  std::size_t failed_at() const noexcept { return failed_at_; }

private:
  MinorChain partial_;
  std::size_t failed_at_;
};

/// All leading principal minors from one unpivoted LDL^T factorization:
/// G_j = d_1 * ... * d_j, accumulated in log space.
MinorChain dominant_minors(const DenseSymMatrix& m);

enum class Sampler { homogeneous, perturbed };

struct MinorSample {
  bool positive = false;
  bool chain_ok = false;
  double min_log_increment = 0.0;
  /// log G_N, the log-determinant (NaN when not positive definite).
  double log_det = 0.0;
};

struct MinorScanSummary {
  int n = 0;
  int samples = 0;
  int chain_ok = 0;
  int positive_ok = 0;
  double chain_ok_fraction = 0.0;
  /// Smallest log-minor increment seen over all samples.
  double min_log_increment = 0.0;
  double seconds = 0.0;
  std::vector<MinorSample> per_sample;
};

/// Evaluates hessian_B on generated configurations and counts how many give
/// 0 < G_1 < ... < G_N.
///
/// Homogeneous sample s uses k_i = i * (pi/L) * (1 + s * step_scale).
/// Perturbed samples start from k_i = i * pi / L and move every root by an
/// independent increment in [0, step_scale * pi / L] from one sample to the next.
MinorScanSummary scan_minor_chains(const SystemSpec& spec, Sampler sampler, int n, int samples,
                                   double step_scale, std::uint64_t seed);

struct OrderingReport {
  /// 0 < k_1 < ... < k_N.
  bool roots_strictly_increasing_positive = false;
  bool n_nondecreasing = false;
  /// Row i: L(k_{i+1}-k_i) minus the right-hand side of the difference identity.
  std::vector<double> difference_residuals;
  /// Per row: the four partial sums of that identity are all <= 0.
  std::vector<bool> four_sums_nonpositive;
  double max_difference_residual = 0.0;
  bool all_four_sums_nonpositive = true;
};

/// Diagnostics only; never throws. k and n are paired index by index.
OrderingReport check_ordering(const RootSet& k, std::span<const std::int64_t> n,
                              const SystemSpec& spec);

enum class LimitRegime { free, tonks };

struct LimitReport {
  double deviation = 0.0;
  /// False when c is outside the asymptotic regime (a warning, not an error).
  bool in_regime = true;
  std::string warning;
  RootSet roots;
  RootSet limit;
};

/// ||k - k_limit||_inf with k_limit = pi n / L (free) or pi I / L (tonks),
/// comparing sorted canonical roots.
LimitReport limit_deviation(const SystemSpec& spec, std::span<const std::int64_t> n,
                            LimitRegime regime, const SolverConfig& cfg = {});

struct HalvingReport {
  SystemSpec full_spec;
  QuantumNumbers full_n;
  RootSet full_roots;
  /// Positive half of the full periodic solution, ascending.
  RootSet half_roots;
  Eigen::VectorXd half_residual;
  double half_residual_norm = 0.0;
  /// max_l |k_l + k_{N-l+1}| over the full periodic roots.
  double mirror_deviation = 0.0;
  /// residual_raw of the half roots under zero boundary conditions.
  Eigen::VectorXd zero_bc_residual;
  double zero_bc_residual_norm = 0.0;
  /// min_i arctan(c / (2 k_i)).
  double min_obstruction = 0.0;
};

/// Solves the periodic system with N = 2 N_half, L = 2 L_half and mirror
/// quantum numbers (-n_half reversed, n_half), then evaluates the half-system
///   L_half k_i = pi n_i + atan(c/(2k_i)) + sum_{j!=i}[atan(c/(k_i-k_j)) + atan(c/(k_i+k_j))]
/// and the zero-boundary residual on the positive half.
HalvingReport periodic_halving_check(const SystemSpec& spec_half,
                                     std::span<const std::int64_t> n_half,
                                     const SolverConfig& cfg = {});

/// Residual of the half-system above.
Eigen::VectorXd residual_half_system(const RootSet& k, std::span<const std::int64_t> n,
                                     const SystemSpec& spec);

/// E = sum_j k_j^2 (units hbar^2/2m = 1).
double energy(const RootSet& k);

/// Attaches the minor chain at the reported minimum to a solve report.
MinorChain certify(SolveReport& report, const SystemSpec& spec);

}  // namespace gaudin
