#include "gaudin/equations.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "gaudin/errors.hpp"

namespace gaudin {

namespace {

constexpr double kPi = std::numbers::pi;

// d/dx arctan(x/c)
inline double kernel(double x, double c) { return c / (c * c + x * x); }

void require_same_length(Eigen::Index a, std::size_t b, const char* what) {
  if (static_cast<std::size_t>(a) != b) {
    std::ostringstream m;
    m << what << ": " << a << " roots but " << b << " quantum numbers/labels";
    throw LengthMismatch(m.str());
  }
}

[[noreturn]] void degenerate(const char* what, Eigen::Index i, Eigen::Index j) {
  std::ostringstream m;
  m << what << ": k_" << i << " +- k_" << j << " = 0";
  throw DegenerateConfiguration(m.str());
}

// sum_{j!=i} [atan((k_i-k_j)/c) + atan((k_i+k_j)/c)]
double pair_arctan_sum(const RootSet& k, Eigen::Index i, double c) {
  double sum = 0.0;
  for (Eigen::Index j = 0; j < k.size(); ++j) {
    if (j == i) continue;
    sum += std::atan((k[i] - k[j]) / c) + std::atan((k[i] + k[j]) / c);
  }
  return sum;
}

// sum_{j!=i} [atan(c/(k_i-k_j)) + atan(c/(k_i+k_j))]
double pair_raw_sum(const RootSet& k, Eigen::Index i, double c, const char* what) {
  double sum = 0.0;
  for (Eigen::Index j = 0; j < k.size(); ++j) {
    if (j == i) continue;
    const double d = k[i] - k[j];
    const double s = k[i] + k[j];
    if (d == 0.0 || s == 0.0) degenerate(what, i, j);
    sum += std::atan(c / d) + std::atan(c / s);
  }
  return sum;
}

double pair_potential(const RootSet& k, double c) {
  // F is even, so the ordered-pair sum halves to a sum over j < l
  double sum = 0.0;
  for (Eigen::Index j = 0; j < k.size(); ++j)
    for (Eigen::Index l = j + 1; l < k.size(); ++l)
      sum += antiderivative_F(k[j] - k[l], c) + antiderivative_F(k[j] + k[l], c);
  return sum;
}

DenseSymMatrix assemble_hessian(const RootSet& k, const SystemSpec& spec) {
  const Eigen::Index n = k.size();
  const double c = spec.coupling;
  DenseSymMatrix h = DenseSymMatrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) h(i, i) = spec.length;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double minus = kernel(k[i] - k[j], c);
      const double plus = kernel(k[i] + k[j], c);
      h(i, i) += minus + plus;
      h(j, j) += minus + plus;
      h(i, j) = plus - minus;
      h(j, i) = h(i, j);
    }
  }
  return h;
}

double pair_sum_of_squares(const RootSet& k, const Eigen::VectorXd& u, double c) {
  double sum = 0.0;
  for (Eigen::Index j = 0; j < k.size(); ++j) {
    for (Eigen::Index l = j + 1; l < k.size(); ++l) {
      const double dm = u[j] - u[l];
      const double dp = u[j] + u[l];
      sum += kernel(k[j] - k[l], c) * dm * dm + kernel(k[j] + k[l], c) * dp * dp;
    }
  }
  return sum;
}

}  // namespace

double arctan_reflect(double alpha) {
  if (alpha == 0.0) throw UndefinedAtZero("arctan_reflect: alpha = 0");
  const double sgn = alpha > 0.0 ? 1.0 : -1.0;
  return 0.5 * kPi * sgn - std::atan(1.0 / alpha);
}

double antiderivative_F(double x, double c) {
  const double a = x / c;
  const double abs_a = std::abs(a);
  // (c/2) ln(1 + a^2) without overflowing a^2
  const double log_term = abs_a > 1e8 ? c * (std::log(abs_a) + 0.5 * std::log1p(1.0 / (a * a)))
                                      : 0.5 * c * std::log1p(a * a);
  return x * std::atan(a) - log_term;
}

Eigen::VectorXd residual_raw(const RootSet& k, std::span<const std::int64_t> n,
                             const SystemSpec& spec) {
  require_same_length(k.size(), n.size(), "residual_raw");
  Eigen::VectorXd r(k.size());
  for (Eigen::Index i = 0; i < k.size(); ++i)
    r[i] = spec.length * k[i] - kPi * static_cast<double>(n[i]) -
           pair_raw_sum(k, i, spec.coupling, "residual_raw");
  return r;
}

Eigen::VectorXd residual_transformed(const RootSet& k, std::span<const std::int64_t> labels,
                                     const SystemSpec& spec) {
  require_same_length(k.size(), labels.size(), "residual_transformed");
  Eigen::VectorXd r(k.size());
  for (Eigen::Index i = 0; i < k.size(); ++i)
    r[i] = spec.length * k[i] - kPi * static_cast<double>(labels[i]) +
           pair_arctan_sum(k, i, spec.coupling);
  return r;
}

double potential_B(const RootSet& k, std::span<const std::int64_t> labels, const SystemSpec& spec) {
  require_same_length(k.size(), labels.size(), "potential_B");
  double single = 0.0;
  for (Eigen::Index j = 0; j < k.size(); ++j)
    single += 0.5 * spec.length * k[j] * k[j] - kPi * static_cast<double>(labels[j]) * k[j];
  return single + pair_potential(k, spec.coupling);
}

DenseSymMatrix hessian_B(const RootSet& k, const SystemSpec& spec) {
  return assemble_hessian(k, spec);
}

QuadraticFormParts quadratic_form_parts(const RootSet& k, const Eigen::VectorXd& u,
                                        const SystemSpec& spec) {
  if (u.size() != k.size()) throw LengthMismatch("quadratic_form_parts: u and k differ in length");
  QuadraticFormParts parts;
  parts.lhs = u.dot(hessian_B(k, spec) * u);
  parts.rhs = spec.length * u.squaredNorm() + pair_sum_of_squares(k, u, spec.coupling);
  return parts;
}

Eigen::VectorXd gradient_B_reduced(const RootSet& k, std::span<const std::int64_t> labels,
                                   const SystemSpec& spec) {
  require_same_length(k.size(), labels.size(), "gradient_B_reduced");
  const double c = spec.coupling;
  Eigen::VectorXd r(k.size());
  for (Eigen::Index i = 0; i < k.size(); ++i)
    r[i] = spec.length * k[i] - kPi * static_cast<double>(labels[i]) +
           2.0 * std::atan(k[i] / c) + pair_arctan_sum(k, i, c);
  return r;
}

Eigen::VectorXd residual_reduced(const RootSet& k, std::span<const std::int64_t> n,
                                 const SystemSpec& spec) {
  require_same_length(k.size(), n.size(), "residual_reduced");
  return gradient_B_reduced(k, reduced_momentum_labels(n), spec);
}

Eigen::VectorXd residual_reduced_raw(const RootSet& k, std::span<const std::int64_t> n,
                                     const SystemSpec& spec) {
  require_same_length(k.size(), n.size(), "residual_reduced_raw");
  const double c = spec.coupling;
  Eigen::VectorXd r(k.size());
  for (Eigen::Index i = 0; i < k.size(); ++i) {
    if (k[i] == 0.0) {
      std::ostringstream m;
      m << "residual_reduced_raw: k_" << i << " = 0";
      throw DegenerateConfiguration(m.str());
    }
    r[i] = spec.length * k[i] - kPi * static_cast<double>(n[i]) - 2.0 * std::atan(c / k[i]) -
           pair_raw_sum(k, i, c, "residual_reduced_raw");
  }
  return r;
}

double potential_B_reduced(const RootSet& k, std::span<const std::int64_t> labels,
                           const SystemSpec& spec) {
  double pinned = 0.0;
  for (Eigen::Index j = 0; j < k.size(); ++j) pinned += 2.0 * antiderivative_F(k[j], spec.coupling);
  return potential_B(k, labels, spec) + pinned;
}

DenseSymMatrix hessian_B_reduced(const RootSet& k, const SystemSpec& spec) {
  DenseSymMatrix h = assemble_hessian(k, spec);
  for (Eigen::Index i = 0; i < k.size(); ++i) h(i, i) += 2.0 * kernel(k[i], spec.coupling);
  return h;
}

QuadraticFormParts quadratic_form_parts_reduced(const RootSet& k, const Eigen::VectorXd& u,
                                                const SystemSpec& spec) {
  if (u.size() != k.size())
    throw LengthMismatch("quadratic_form_parts_reduced: u and k differ in length");
  QuadraticFormParts parts;
  parts.lhs = u.dot(hessian_B_reduced(k, spec) * u);
  double diag = 0.0;
  for (Eigen::Index j = 0; j < k.size(); ++j)
    diag += (spec.length + 2.0 * kernel(k[j], spec.coupling)) * u[j] * u[j];
  parts.rhs = diag + pair_sum_of_squares(k, u, spec.coupling);
  return parts;
}

Eigen::VectorXd residual_periodic(const RootSet& k, std::span<const std::int64_t> n,
                                  const SystemSpec& spec) {
  require_same_length(k.size(), n.size(), "residual_periodic");
  const double c = spec.coupling;
  Eigen::VectorXd r(k.size());
  for (Eigen::Index i = 0; i < k.size(); ++i) {
    double sum = 0.0;
    for (Eigen::Index j = 0; j < k.size(); ++j) {
      if (j == i) continue;
      const double d = k[i] - k[j];
      if (d == 0.0) degenerate("residual_periodic", i, j);
      sum += std::atan(c / d);
    }
    r[i] = spec.length * k[i] - 2.0 * kPi * static_cast<double>(n[i]) - 2.0 * sum;
  }
  return r;
}

MomentumLabels periodic_labels(std::span<const std::int64_t> sorted_n) {
  const auto size = static_cast<std::int64_t>(sorted_n.size());
  MomentumLabels labels(sorted_n.size());
  for (std::size_t i = 0; i < sorted_n.size(); ++i) {
    if (i > 0 && sorted_n[i] <= sorted_n[i - 1])
      throw NotCanonical("periodic_labels: quantum numbers must be strictly increasing");
    const auto pos = static_cast<std::int64_t>(i) + 1;
    labels[i] = 2 * sorted_n[i] + 2 * pos - size - 1;
  }
  return labels;
}

Eigen::VectorXd residual_periodic_smooth(const RootSet& k, std::span<const std::int64_t> labels,
                                         const SystemSpec& spec) {
  require_same_length(k.size(), labels.size(), "residual_periodic_smooth");
  const double c = spec.coupling;
  Eigen::VectorXd r(k.size());
  for (Eigen::Index i = 0; i < k.size(); ++i) {
    double sum = 0.0;
    for (Eigen::Index j = 0; j < k.size(); ++j)
      if (j != i) sum += std::atan((k[i] - k[j]) / c);
    r[i] = spec.length * k[i] - kPi * static_cast<double>(labels[i]) + 2.0 * sum;
  }
  return r;
}

double potential_periodic(const RootSet& k, std::span<const std::int64_t> labels,
                          const SystemSpec& spec) {
  require_same_length(k.size(), labels.size(), "potential_periodic");
  double value = 0.0;
  for (Eigen::Index j = 0; j < k.size(); ++j) {
    value += 0.5 * spec.length * k[j] * k[j] - kPi * static_cast<double>(labels[j]) * k[j];
    for (Eigen::Index l = j + 1; l < k.size(); ++l)
      value += 2.0 * antiderivative_F(k[j] - k[l], spec.coupling);
  }
  return value;
}

DenseSymMatrix hessian_periodic(const RootSet& k, const SystemSpec& spec) {
  const Eigen::Index n = k.size();
  DenseSymMatrix h = DenseSymMatrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) h(i, i) = spec.length;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double w = 2.0 * kernel(k[i] - k[j], spec.coupling);
      h(i, i) += w;
      h(j, j) += w;
      h(i, j) = -w;
      h(j, i) = -w;
    }
  }
  return h;
}

}  // namespace gaudin
