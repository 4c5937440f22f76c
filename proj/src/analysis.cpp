#include "gaudin/analysis.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace gaudin {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// atan(c/x), NaN at the pole instead of the +-pi/2 jump
double atan_over(double c, double x) { return x == 0.0 ? kNaN : std::atan(c / x); }

double inf_norm(const Eigen::VectorXd& v) { return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff(); }

}  // namespace

MinorChain dominant_minors(const DenseSymMatrix& m) {
  if (m.rows() != m.cols()) throw LengthMismatch("dominant_minors: matrix is not square");
  const Eigen::Index n = m.rows();
  MinorChain chain;
  chain.log_minors.reserve(static_cast<std::size_t>(n));
  chain.min_log_increment = std::numeric_limits<double>::infinity();

  // Right-looking LDL^T without pivoting: after step j the trailing block is
  // the Schur complement, whose (0,0) entry is the next pivot d_{j+1} = G_{j+1}/G_j.
  Eigen::MatrixXd work = m;
  double log_g = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) {
    const double pivot = work(j, j);
    if (!(pivot > 0.0) || !std::isfinite(pivot)) {
      chain.all_positive = false;
      chain.strictly_increasing = false;
      std::ostringstream msg;
      msg << "dominant_minors: pivot " << j + 1 << " = " << pivot << " is not positive";
      throw NotPositiveDefinite(msg.str(), chain, static_cast<std::size_t>(j));
    }
    const double log_pivot = std::log(pivot);
    log_g += log_pivot;
    if (j > 0) chain.min_log_increment = std::min(chain.min_log_increment, log_pivot);
    chain.log_minors.push_back(log_g);

    const Eigen::Index rest = n - j - 1;
    if (rest > 0) {
      const Eigen::VectorXd column = work.col(j).tail(rest);
      work.bottomRightCorner(rest, rest).selfadjointView<Eigen::Lower>().rankUpdate(column, -1.0 / pivot);
    }
  }
  chain.all_positive = true;
  chain.strictly_increasing = n <= 1 || chain.min_log_increment > 0.0;
  return chain;
}

MinorScanSummary scan_minor_chains(const SystemSpec& spec, Sampler sampler, int n, int samples,
                                   double step_scale, std::uint64_t seed) {
  if (n < 1) throw InvalidSpec("scan_minor_chains: N must be >= 1");
  if (samples < 0) throw InvalidSpec("scan_minor_chains: samples must be >= 0");
  if (!(spec.length > 0.0) || !(spec.coupling > 0.0))
    throw InvalidSpec("scan_minor_chains: length and coupling must be > 0");

  const auto started = std::chrono::steady_clock::now();
  MinorScanSummary summary;
  summary.n = n;
  summary.samples = samples;
  summary.min_log_increment = std::numeric_limits<double>::infinity();

  const double spacing = kPi / spec.length;
  Eigen::VectorXd k(n);
  for (int i = 0; i < n; ++i) k[i] = (i + 1) * spacing;
  UniformStream rng(seed);

  for (int s = 0; s < samples; ++s) {
    if (sampler == Sampler::homogeneous) {
      const double delta = spacing * (1.0 + s * step_scale);
      for (int i = 0; i < n; ++i) k[i] = (i + 1) * delta;
    } else if (s > 0) {
      for (int i = 0; i < n; ++i) k[i] += rng.next() * step_scale * spacing;
    }
    MinorSample record;
    try {
      const MinorChain chain = dominant_minors(hessian_B(k, spec));
      record.positive = true;
      record.chain_ok = chain.strictly_increasing;
      record.min_log_increment = chain.min_log_increment;
      record.log_det = chain.log_minors.back();
    } catch (const NotPositiveDefinite&) {
      record.min_log_increment = -std::numeric_limits<double>::infinity();
      record.log_det = kNaN;
    }
    if (record.positive) ++summary.positive_ok;
    if (record.chain_ok) ++summary.chain_ok;
    summary.min_log_increment = std::min(summary.min_log_increment, record.min_log_increment);
    summary.per_sample.push_back(record);
  }
  summary.chain_ok_fraction = samples > 0 ? static_cast<double>(summary.chain_ok) / samples : 0.0;
  summary.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return summary;
}

OrderingReport check_ordering(const RootSet& k, std::span<const std::int64_t> n,
                              const SystemSpec& spec) {
  OrderingReport report;
  const auto size = static_cast<std::size_t>(k.size());

  report.roots_strictly_increasing_positive = size == 0 || k[0] > 0.0;
  for (std::size_t i = 1; i < size; ++i)
    if (!(k[i] > k[i - 1])) report.roots_strictly_increasing_positive = false;
  report.n_nondecreasing = std::is_sorted(n.begin(), n.end());
  if (n.size() != size) {
    report.all_four_sums_nonpositive = false;
    report.max_difference_residual = kNaN;
    return report;
  }

  const double c = spec.coupling;
  for (std::size_t i = 0; i + 1 < size; ++i) {
    const double lo = k[i];
    const double hi = k[i + 1];
    double sums[4] = {0.0, 0.0, 0.0, 0.0};
    for (std::size_t j = 0; j < i; ++j) {
      sums[0] += atan_over(c, hi - k[j]) - atan_over(c, lo - k[j]);
      sums[1] += atan_over(c, hi + k[j]) - atan_over(c, lo + k[j]);
    }
    for (std::size_t j = i + 2; j < size; ++j) {
      sums[2] += atan_over(c, hi - k[j]) - atan_over(c, lo - k[j]);
      sums[3] += atan_over(c, hi + k[j]) - atan_over(c, lo + k[j]);
    }
    const double rhs = kPi * static_cast<double>(n[i + 1] - n[i]) + 2.0 * atan_over(c, hi - lo) +
                       sums[0] + sums[1] + sums[2] + sums[3];
    const double residual = spec.length * (hi - lo) - rhs;
    report.difference_residuals.push_back(residual);
    const bool nonpositive =
        std::all_of(std::begin(sums), std::end(sums), [](double v) { return v <= 0.0; });
    report.four_sums_nonpositive.push_back(nonpositive);
    report.all_four_sums_nonpositive = report.all_four_sums_nonpositive && nonpositive;
    report.max_difference_residual = std::isnan(residual)
                                         ? kNaN
                                         : std::max(report.max_difference_residual, std::abs(residual));
  }
  return report;
}

LimitReport limit_deviation(const SystemSpec& spec, std::span<const std::int64_t> n,
                            LimitRegime regime, const SolverConfig& cfg) {
  const SolveReport solved = solve(spec, n, cfg);
  const CanonicalForm& form = solved.canonical;

  MomentumLabels reference;
  if (form.zero_reduced) reference.push_back(0);
  if (regime == LimitRegime::free) {
    reference.insert(reference.end(), form.canonical_n.begin(), form.canonical_n.end());
  } else {
    const MomentumLabels labels = form.zero_reduced ? reduced_momentum_labels(form.canonical_n)
                                                    : momentum_labels(form.canonical_n);
    reference.insert(reference.end(), labels.begin(), labels.end());
  }
  std::sort(reference.begin(), reference.end());

  LimitReport report;
  report.roots = solved.roots;
  report.limit.resize(static_cast<Eigen::Index>(reference.size()));
  for (std::size_t i = 0; i < reference.size(); ++i)
    report.limit[static_cast<Eigen::Index>(i)] = kPi * static_cast<double>(reference[i]) / spec.length;
  report.deviation = inf_norm(report.roots - report.limit);

  // c measured against the level spacing pi/L (free) or the largest root (tonks)
  const double scale = kPi / spec.length;
  if (regime == LimitRegime::free) {
    report.in_regime = spec.coupling <= 1e-3 * scale;
    if (!report.in_regime) report.warning = "coupling is not small against pi/L; free limit not reached";
  } else {
    const double kmax = report.limit.size() ? report.limit.cwiseAbs().maxCoeff() : 0.0;
    report.in_regime = spec.coupling >= 1e3 * spec.n_particles * std::max(kmax, scale);
    if (!report.in_regime) report.warning = "coupling is not large against N*max(k); Tonks limit not reached";
  }
  return report;
}

Eigen::VectorXd residual_half_system(const RootSet& k, std::span<const std::int64_t> n,
                                     const SystemSpec& spec) {
  Eigen::VectorXd r = residual_raw(k, n, spec);
  for (Eigen::Index i = 0; i < k.size(); ++i) {
    if (k[i] == 0.0) throw DegenerateConfiguration("residual_half_system: k_i = 0");
    r[i] -= std::atan(spec.coupling / (2.0 * k[i]));
  }
  return r;
}

HalvingReport periodic_halving_check(const SystemSpec& spec_half,
                                     std::span<const std::int64_t> n_half, const SolverConfig& cfg) {
  validate_spec(spec_half, n_half);
  QuantumNumbers half(n_half.begin(), n_half.end());
  std::sort(half.begin(), half.end());
  for (std::size_t i = 0; i < half.size(); ++i) {
    if (half[i] < 1) throw InvalidSpec("periodic_halving_check: quantum numbers must be positive");
    if (i > 0 && half[i] == half[i - 1])
      throw InvalidSpec("periodic_halving_check: quantum numbers must be distinct");
  }

  HalvingReport report;
  report.full_spec = {2 * spec_half.n_particles, 2.0 * spec_half.length, spec_half.coupling};
  for (auto it = half.rbegin(); it != half.rend(); ++it) report.full_n.push_back(-*it);
  report.full_n.insert(report.full_n.end(), half.begin(), half.end());

  const SolveReport full = solve_periodic(report.full_spec, report.full_n, cfg);
  report.full_roots = full.roots;
  const Eigen::Index size = full.roots.size();
  for (Eigen::Index l = 0; l < size; ++l)
    report.mirror_deviation =
        std::max(report.mirror_deviation, std::abs(full.roots[l] + full.roots[size - 1 - l]));

  report.half_roots = full.roots.tail(spec_half.n_particles);
  report.half_residual = residual_half_system(report.half_roots, half, spec_half);
  report.half_residual_norm = inf_norm(report.half_residual);
  report.zero_bc_residual = residual_raw(report.half_roots, half, spec_half);
  report.zero_bc_residual_norm = inf_norm(report.zero_bc_residual);
  report.min_obstruction = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < report.half_roots.size(); ++i)
    report.min_obstruction = std::min(report.min_obstruction,
                                      std::atan(spec_half.coupling / (2.0 * report.half_roots[i])));
  return report;
}

double energy(const RootSet& k) { return k.squaredNorm(); }

MinorChain certify(SolveReport& report, const SystemSpec& spec) {
  MinorChain chain;
  try {
    if (report.periodic) {
      chain = dominant_minors(hessian_periodic(report.roots, spec));
    } else if (report.canonical.zero_reduced) {
      const RootSet free_roots = report.roots.tail(report.roots.size() - 1);
      chain = dominant_minors(hessian_B_reduced(free_roots, spec));
    } else {
      chain = dominant_minors(hessian_B(report.roots, spec));
    }
  } catch (const NotPositiveDefinite& e) {
    chain = e.partial();
  }
  report.minor_chain_ok = chain.all_positive && chain.strictly_increasing;
  return chain;
}

}  // namespace gaudin
