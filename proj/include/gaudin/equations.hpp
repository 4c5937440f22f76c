#pragma once

#include <cstdint>
#include <span>

#include <Eigen/Core>

#include "gaudin/model.hpp"

namespace gaudin {

/// Symmetric by construction: entry (i,j) and (j,i) come from one expression.
using DenseSymMatrix = Eigen::MatrixXd;

/// (pi/2) sgn(alpha) - arctan(1/alpha). Throws UndefinedAtZero for alpha = 0.
double arctan_reflect(double alpha);

/// F(x) = x arctan(x/c) - (c/2) ln(1 + x^2/c^2), the antiderivative of
/// arctan(k/c) with F(0) = 0.
double antiderivative_F(double x, double c);

// Zero boundary conditions, full system ----------------------------------

/// r_i = L k_i - pi n_i - sum_{j!=i} [atan(c/(k_i-k_j)) + atan(c/(k_i+k_j))].
/// Throws DegenerateConfiguration where k_i +- k_j = 0.
Eigen::VectorXd residual_raw(const RootSet& k, std::span<const std::int64_t> n,
                             const SystemSpec& spec);

/// r_i = L k_i - pi I_i + sum_{j!=i} [atan((k_i-k_j)/c) + atan((k_i+k_j)/c)].
/// Smooth everywhere; equals the gradient of potential_B.
Eigen::VectorXd residual_transformed(const RootSet& k, std::span<const std::int64_t> labels,
                                     const SystemSpec& spec);

double potential_B(const RootSet& k, std::span<const std::int64_t> labels, const SystemSpec& spec);

DenseSymMatrix hessian_B(const RootSet& k, const SystemSpec& spec);

struct QuadraticFormParts {
  double lhs = 0.0;  ///< u^T H u evaluated through the assembled Hessian
  double rhs = 0.0;  ///< manifestly nonnegative sum-of-squares expansion
};

QuadraticFormParts quadratic_form_parts(const RootSet& k, const Eigen::VectorXd& u,
                                        const SystemSpec& spec);

// Zero boundary conditions, one root pinned at k = 0 --------------------------
//
// The unknowns are the N-1 remaining roots; n holds their (sorted) quantum
// numbers and the labels come from reduced_momentum_labels.

Eigen::VectorXd residual_reduced(const RootSet& k, std::span<const std::int64_t> n,
                                 const SystemSpec& spec);

/// Raw form: L k_i - pi n_i - 2 atan(c/k_i) - sum_{j!=i}[atan(c/(k_i-k_j)) + atan(c/(k_i+k_j))].
Eigen::VectorXd residual_reduced_raw(const RootSet& k, std::span<const std::int64_t> n,
                                     const SystemSpec& spec);

/// Gradient of potential_B_reduced with explicit labels.
Eigen::VectorXd gradient_B_reduced(const RootSet& k, std::span<const std::int64_t> labels,
                                   const SystemSpec& spec);

double potential_B_reduced(const RootSet& k, std::span<const std::int64_t> labels,
                           const SystemSpec& spec);

DenseSymMatrix hessian_B_reduced(const RootSet& k, const SystemSpec& spec);

QuadraticFormParts quadratic_form_parts_reduced(const RootSet& k, const Eigen::VectorXd& u,
                                                const SystemSpec& spec);

// Periodic boundary conditions -------------------------------------------------

/// r_i = L k_i - 2 pi n_i - 2 sum_{j!=i} atan(c/(k_i-k_j)). Throws on k_i = k_j.
Eigen::VectorXd residual_periodic(const RootSet& k, std::span<const std::int64_t> n,
                                  const SystemSpec& spec);

/// J_i = 2 n_i + 2i - N - 1 for n sorted strictly increasing (1-based i).
MomentumLabels periodic_labels(std::span<const std::int64_t> sorted_n);

/// r_i = L k_i - pi J_i + 2 sum_{j!=i} atan((k_i-k_j)/c).
Eigen::VectorXd residual_periodic_smooth(const RootSet& k, std::span<const std::int64_t> labels,
                                         const SystemSpec& spec);

double potential_periodic(const RootSet& k, std::span<const std::int64_t> labels,
                          const SystemSpec& spec);

DenseSymMatrix hessian_periodic(const RootSet& k, const SystemSpec& spec);

}  // namespace gaudin
