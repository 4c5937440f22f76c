#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "gaudin/errors.hpp"
#include "gaudin/solver.hpp"

namespace gaudin {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTarget = 1e-10;
constexpr double kCoarse = 1e-6;
constexpr long kMaxSweeps = 1'000'000;

// Row i of the smooth system with the other roots held fixed; strictly
// increasing in k[i].
struct Row {
  const std::vector<double>& k;
  const MomentumLabels& labels;
  double length;
  double c;
  bool pinned;

  double operator()(std::size_t i, double x) const {
    double sum = pinned ? 2.0 * std::atan(x / c) : 0.0;
    for (std::size_t j = 0; j < k.size(); ++j)
      if (j != i) sum += std::atan((x - k[j]) / c) + std::atan((x + k[j]) / c);
    return length * x - kPi * static_cast<double>(labels[i]) + sum;
  }
};

double max_residual(const Row& row) {
  double worst = 0.0;
  for (std::size_t i = 0; i < row.k.size(); ++i) worst = std::max(worst, std::abs(row(i, row.k[i])));
  return worst;
}

double bisect_row(const Row& row, std::size_t i) {
  // Each arctan term is bounded by pi/2, which brackets the root of the row.
  const double spread = kPi * (static_cast<double>(row.k.size()) - 1.0 + (row.pinned ? 1.0 : 0.0));
  const double centre = kPi * static_cast<double>(row.labels[i]);
  double lo = (centre - spread) / row.length - 1.0;
  double hi = (centre + spread) / row.length + 1.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (row(i, mid) < 0.0 ? lo : hi) = mid;
  }
  const double r_lo = std::abs(row(i, lo));
  const double r_hi = std::abs(row(i, hi));
  return r_lo <= r_hi ? lo : hi;
}

}  // namespace

RootSet oracle_solve(const SystemSpec& spec, std::span<const std::int64_t> n) {
  validate_spec(spec, n);
  if (spec.n_particles > 6) throw InvalidSpec("oracle_solve: limited to N <= 6");

  const CanonicalForm form = canonicalize(n);
  const MomentumLabels labels =
      form.zero_reduced ? reduced_momentum_labels(form.canonical_n) : momentum_labels(form.canonical_n);

  std::vector<double> k(labels.size());
  for (std::size_t i = 0; i < k.size(); ++i)
    k[i] = kPi * static_cast<double>(labels[i]) / spec.length;

  const Row row{k, labels, spec.length, spec.coupling, form.zero_reduced};
  const double relax =
      std::min(1.0, spec.coupling * spec.length / (4.0 * static_cast<double>(spec.n_particles)));

  long sweep = 0;
  double residual = max_residual(row);
  for (; sweep < kMaxSweeps && residual > kTarget; ++sweep) {
    if (residual > kCoarse) {
      for (std::size_t i = 0; i < k.size(); ++i) k[i] -= relax * row(i, k[i]) / spec.length;
    } else {
      for (std::size_t i = 0; i < k.size(); ++i) k[i] = bisect_row(row, i);
    }
    residual = max_residual(row);
  }
  if (residual > kTarget) {
    std::ostringstream m;
    m << "oracle_solve: residual " << residual << " after " << sweep << " sweeps";
    throw OracleStall(m.str());
  }

  RootSet out(static_cast<Eigen::Index>(form.full_size()));
  Eigen::Index slot = 0;
  if (form.zero_reduced) out[slot++] = 0.0;
  for (double v : k) out[slot++] = v;
  std::sort(out.data(), out.data() + out.size());
  return out;
}

}  // namespace gaudin
