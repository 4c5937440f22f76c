#include "gaudin/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "gaudin/errors.hpp"

namespace gaudin {

void validate_spec(const SystemSpec& spec, std::span<const std::int64_t> n) {
  std::ostringstream msg;
  bool ok = true;
  auto fail = [&](const char* text) {
    msg << (ok ? "" : "; ") << text;
    ok = false;
  };
  if (spec.n_particles < 1) fail("n_particles must be >= 1");
  if (!(spec.length > 0.0) || !std::isfinite(spec.length)) fail("length must be finite and > 0");
  if (!(spec.coupling > 0.0) || !std::isfinite(spec.coupling))
    fail("coupling must be finite and > 0");
  if (spec.n_particles >= 1 && n.size() != static_cast<std::size_t>(spec.n_particles)) {
    std::ostringstream m;
    m << "quantum numbers: expected " << spec.n_particles << " entries, got " << n.size();
    fail(m.str().c_str());
  }
  if (!ok) throw InvalidSpec(msg.str());
}

std::uint64_t equivalence_class_size(std::span<const std::int64_t> n) {
  std::vector<std::int64_t> sorted(n.begin(), n.end());
  std::sort(sorted.begin(), sorted.end());
  std::uint64_t total = 1;
  constexpr auto kMax = std::numeric_limits<std::uint64_t>::max();
  std::size_t run = 1;
  for (std::size_t i = 1; i <= sorted.size(); ++i) {
    if (i < sorted.size() && sorted[i] == sorted[i - 1]) {
      ++run;
      // saturate rather than wrap
      total = (total > kMax / run) ? kMax : total * run;
    } else {
      run = 1;
    }
  }
  return total;
}

CanonicalForm canonicalize(std::span<const std::int64_t> n) {
  CanonicalForm form;
  const std::size_t size = n.size();
  form.sign_map.resize(size);
  std::vector<std::int64_t> magnitude(size);
  for (std::size_t i = 0; i < size; ++i) {
    if (n[i] == std::numeric_limits<std::int64_t>::min())
      throw InvalidSpec("quantum number out of range");
    form.sign_map[i] = n[i] < 0 ? -1 : 1;
    magnitude[i] = n[i] < 0 ? -n[i] : n[i];
  }

  const auto first_zero = std::find(magnitude.begin(), magnitude.end(), 0);
  form.zero_reduced = first_zero != magnitude.end();
  form.excluded_by_physics = form.zero_reduced;
  const std::size_t pinned = static_cast<std::size_t>(first_zero - magnitude.begin());

  std::vector<std::size_t> order;
  order.reserve(size);
  for (std::size_t i = 0; i < size; ++i)
    if (!form.zero_reduced || i != pinned) order.push_back(i);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return magnitude[a] < magnitude[b]; });

  const std::size_t offset = form.zero_reduced ? 1 : 0;
  form.permutation.assign(size, 0);
  form.canonical_n.reserve(order.size());
  for (std::size_t pos = 0; pos < order.size(); ++pos) {
    form.canonical_n.push_back(magnitude[order[pos]]);
    form.permutation[order[pos]] = pos + offset;
  }
  if (form.zero_reduced) form.permutation[pinned] = 0;
  form.equivalence_class_size = equivalence_class_size(form.canonical_n);
  return form;
}

namespace {

void require_sorted(std::span<const std::int64_t> n, std::int64_t lower, const char* what) {
  for (std::size_t i = 0; i < n.size(); ++i) {
    if (n[i] < lower) {
      std::ostringstream m;
      m << what << ": entry " << i << " = " << n[i] << " is below " << lower;
      throw NotCanonical(m.str());
    }
    if (i > 0 && n[i] < n[i - 1]) {
      std::ostringstream m;
      m << what << ": entries must be nondecreasing (index " << i << ")";
      throw NotCanonical(m.str());
    }
  }
}

}  // namespace

MomentumLabels momentum_labels(std::span<const std::int64_t> canonical_n) {
  require_sorted(canonical_n, 1, "momentum_labels");
  MomentumLabels labels(canonical_n.size());
  for (std::size_t i = 0; i < canonical_n.size(); ++i)
    labels[i] = canonical_n[i] + static_cast<std::int64_t>(i);
  return labels;
}

MomentumLabels reduced_momentum_labels(std::span<const std::int64_t> canonical_n) {
  require_sorted(canonical_n, 0, "reduced_momentum_labels");
  MomentumLabels labels(canonical_n.size());
  for (std::size_t m = 0; m < canonical_n.size(); ++m)
    labels[m] = canonical_n[m] + static_cast<std::int64_t>(m) + 1;
  return labels;
}

bool same_physical_solution(const RootSet& a, const RootSet& b, double tol) {
  if (a.size() != b.size()) throw LengthMismatch("same_physical_solution: root sets differ in length");
  std::vector<double> ma(a.size()), mb(b.size());
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    ma[i] = std::abs(a[i]);
    mb[i] = std::abs(b[i]);
  }
  std::sort(ma.begin(), ma.end());
  std::sort(mb.begin(), mb.end());
  for (std::size_t i = 0; i < ma.size(); ++i)
    if (!(std::abs(ma[i] - mb[i]) <= tol)) return false;
  return true;
}

RootSet to_input_order(const RootSet& canonical_roots, const CanonicalForm& form) {
  if (static_cast<std::size_t>(canonical_roots.size()) != form.full_size())
    throw LengthMismatch("to_input_order: root vector does not match canonical form");
  RootSet out(form.permutation.size());
  for (std::size_t i = 0; i < form.permutation.size(); ++i)
    out[i] = form.sign_map[i] * canonical_roots[form.permutation[i]];
  return out;
}

}  // namespace gaudin
