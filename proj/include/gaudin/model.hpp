#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace gaudin {

/// N spinless point bosons with contact repulsion c on a segment of length L.
struct SystemSpec {
  int n_particles = 1;
  double length = 1.0;
  double coupling = 1.0;
};

/// Integer quantum numbers n_i (any sign, any order on input).
using QuantumNumbers = std::vector<std::int64_t>;

/// Shifted labels I_i driving the smooth (everywhere-defined) equations.
using MomentumLabels = std::vector<std::int64_t>;

/// Quasimomenta k_i, in units of 1/L.
using RootSet = Eigen::VectorXd;

/// Normalized form of a quantum-number set.
///
/// Negative entries are flipped (the matching root changes sign), the first
/// zero entry is removed and its root pinned at k = 0, and the rest is sorted
/// nondecreasing. The canonical root vector is laid out as
/// `[0 (only if zero_reduced), roots of canonical_n in sorted order]`, and
/// `permutation[i]` is the slot of input index i in that vector.
struct CanonicalForm {
  QuantumNumbers canonical_n;
  std::vector<int> sign_map;
  bool zero_reduced = false;
  std::vector<std::size_t> permutation;
  /// A zero quantum number forces k = 0, a state without physical wave function.
  bool excluded_by_physics = false;
  /// Product of p! over groups of identical entries in canonical_n.
  std::uint64_t equivalence_class_size = 1;

  std::size_t full_size() const noexcept {
    return canonical_n.size() + (zero_reduced ? 1u : 0u);
  }
};

/// Throws InvalidSpec listing every violated bound.
void validate_spec(const SystemSpec& spec, std::span<const std::int64_t> n);

CanonicalForm canonicalize(std::span<const std::int64_t> n);

/// I_i = n_i + i - 1 (1-based i). Requires sorted input with n_i >= 1.
MomentumLabels momentum_labels(std::span<const std::int64_t> canonical_n);

/// Labels of the system left after pinning one root at zero.
///
/// The pinned root occupies the first slot, so the remaining unknowns keep
/// their original positions 2..N and I_m = n_m + m for m = 1..N-1. Entries may
/// be zero (repeated zero quantum numbers) but not negative.
MomentumLabels reduced_momentum_labels(std::span<const std::int64_t> canonical_n);

/// True iff the sorted magnitudes of a and b agree within tol.
bool same_physical_solution(const RootSet& a, const RootSet& b, double tol);

/// Maps a canonical root vector back to input order, applying sign flips.
RootSet to_input_order(const RootSet& canonical_roots, const CanonicalForm& form);

std::uint64_t equivalence_class_size(std::span<const std::int64_t> n);

}  // namespace gaudin
