#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/LU>

#include "doctest.h"
#include "gaudin/analysis.hpp"
#include "oracles.hpp"

using namespace gaudin;
using namespace gaudin::testing;
using std::numbers::pi;

namespace {
RootSet roots(std::initializer_list<double> v) {
  RootSet k(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) k[i++] = x;
  return k;
}
double inf(const Eigen::VectorXd& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }
QuantumNumbers ladder(int n) {
  QuantumNumbers q;
  for (int i = 1; i <= n; ++i) q.push_back(i);
  return q;
}
RootSet sorted_positive(UniformStream& rng, Eigen::Index n, double hi) {
  RootSet k = random_vector(rng, n, 0.05, hi);
  std::sort(k.begin(), k.end());
  return k;
}
}  // namespace

TEST_CASE("dominant minors of small matrices") {
  SUBCASE("2 x 2") {
    Eigen::Matrix2d m;
    m << 4, 2, 2, 3;
    const MinorChain chain = dominant_minors(m);
    REQUIRE(chain.log_minors.size() == 2);
    CHECK(std::exp(chain.log_minors[0]) == doctest::Approx(4.0).epsilon(1e-14));
    CHECK(std::exp(chain.log_minors[1]) == doctest::Approx(8.0).epsilon(1e-14));
    CHECK(chain.all_positive);
    CHECK(chain.strictly_increasing);
  }
  SUBCASE("identity has equal minors") {
    const MinorChain chain = dominant_minors(Eigen::MatrixXd::Identity(4, 4));
    CHECK(chain.all_positive);
    CHECK_FALSE(chain.strictly_increasing);
    CHECK(chain.min_log_increment == 0.0);
  }
  SUBCASE("indefinite matrix") {
    Eigen::Matrix2d m;
    m << 1, 2, 2, 1;
    try {
      dominant_minors(m);
      FAIL("expected NotPositiveDefinite");
    } catch (const NotPositiveDefinite& e) {
      CHECK(e.failed_at() == 1);
      CHECK(e.partial().log_minors.size() == 1);
    }
  }
  SUBCASE("non-square") { CHECK_THROWS_AS(dominant_minors(Eigen::MatrixXd::Zero(2, 3)), LengthMismatch); }
}

TEST_CASE("log minors match determinants of leading blocks") {
  UniformStream rng(4);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::Index n = 6;
    Eigen::MatrixXd a(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j) a(i, j) = rng.next(-1.0, 1.0);
    const Eigen::MatrixXd m = a * a.transpose() + 0.5 * Eigen::MatrixXd::Identity(n, n);
    const MinorChain chain = dominant_minors(m);
    for (Eigen::Index j = 1; j <= n; ++j) {
      const double det = m.topLeftCorner(j, j).determinant();
      CHECK(std::abs(chain.log_minors[static_cast<std::size_t>(j - 1)] - std::log(det)) <= 1e-11);
    }
  }
}

TEST_CASE("Hessian minors increase along the chain") {
  UniformStream rng(12);
  for (int trial = 0; trial < 50; ++trial) {
    const SystemSpec spec{8, rng.next(1.0, 5.0), rng.next(0.01, 20.0)};
    const RootSet k = random_vector(rng, 8, -30.0, 30.0);
    const MinorChain chain = dominant_minors(hessian_B(k, spec));
    CHECK(chain.all_positive);
    CHECK(chain.strictly_increasing);
  }
}

TEST_CASE("minor chain scans") {
  for (Sampler s : {Sampler::homogeneous, Sampler::perturbed}) {
    const MinorScanSummary summary = scan_minor_chains({10, 1.0, 1.0}, s, 10, 100, 0.1, 1);
    CHECK(summary.samples == 100);
    CHECK(summary.positive_ok == 100);
    CHECK(summary.chain_ok_fraction == 1.0);
    CHECK(summary.per_sample.size() == 100);
  }
  const MinorScanSummary one = scan_minor_chains({1, 1.0, 1.0}, Sampler::perturbed, 1, 5, 0.1, 0);
  CHECK(one.chain_ok_fraction == 1.0);

  const MinorScanSummary a = scan_minor_chains({5, 1.0, 0.3}, Sampler::perturbed, 5, 20, 0.5, 9);
  const MinorScanSummary b = scan_minor_chains({5, 1.0, 0.3}, Sampler::perturbed, 5, 20, 0.5, 9);
  for (std::size_t i = 0; i < a.per_sample.size(); ++i) CHECK(a.per_sample[i].log_det == b.per_sample[i].log_det);

  CHECK_THROWS_AS(scan_minor_chains({1, 1.0, 1.0}, Sampler::perturbed, 0, 5, 0.1, 0), InvalidSpec);
  CHECK_THROWS_AS(scan_minor_chains({1, 1.0, -1.0}, Sampler::perturbed, 3, 5, 0.1, 0), InvalidSpec);
}

TEST_CASE("difference identity is the difference of adjacent raw rows") {
  UniformStream rng(21);
  for (int trial = 0; trial < 100; ++trial) {
    const SystemSpec spec{6, rng.next(0.5, 3.0), rng.next(0.1, 10.0)};
    const RootSet k = sorted_positive(rng, 6, 20.0);
    const QuantumNumbers n{1, 1, 2, 4, 4, 7};
    const Eigen::VectorXd raw = residual_raw(k, n, spec);
    const OrderingReport r = check_ordering(k, n, spec);
    REQUIRE(r.difference_residuals.size() == 5);
    for (std::size_t i = 0; i < 5; ++i) {
      const auto row = static_cast<Eigen::Index>(i);
      CHECK(std::abs(r.difference_residuals[i] - (raw[row + 1] - raw[row])) <= 1e-11 * std::max(1.0, inf(raw)));
    }
    // each partial sum compares atan(c/x) at two x of equal sign, hi above lo
    CHECK(r.all_four_sums_nonpositive);
    CHECK(r.roots_strictly_increasing_positive);
  }
}

TEST_CASE("ordering report at a solution") {
  const SystemSpec spec{5, 1.0, 2.0};
  const QuantumNumbers n{1, 1, 2, 3, 3};
  const SolveReport solved = solve(spec, n);
  const OrderingReport r = check_ordering(solved.roots, n, spec);
  CHECK(r.roots_strictly_increasing_positive);
  CHECK(r.n_nondecreasing);
  CHECK(r.max_difference_residual <= 1e-9);
  CHECK(r.all_four_sums_nonpositive);

  const OrderingReport unsorted = check_ordering(roots({2.0, 1.0}), QuantumNumbers{2, 1}, spec);
  CHECK_FALSE(unsorted.roots_strictly_increasing_positive);
  CHECK_FALSE(unsorted.n_nondecreasing);

  const OrderingReport mismatch = check_ordering(roots({1.0, 2.0}), QuantumNumbers{1}, spec);
  CHECK(std::isnan(mismatch.max_difference_residual));
}

TEST_CASE("coupling limits") {
  const QuantumNumbers n{1, 2, 3};
  const LimitReport free = limit_deviation({3, 1.0, 1e-8}, n, LimitRegime::free);
  CHECK(free.in_regime);
  CHECK(free.deviation <= 1e-5);
  CHECK(inf(free.limit - pi * roots({1, 2, 3})) <= 1e-15 * 3 * pi);

  const LimitReport tonks = limit_deviation({3, 1.0, 1e8}, n, LimitRegime::tonks);
  CHECK(tonks.in_regime);
  CHECK(tonks.deviation <= 1e-5);
  CHECK(inf(tonks.limit - pi * roots({1, 3, 5})) <= 1e-15 * 5 * pi);

  // deviation from the hard-core limit is about 2 k N / c
  const LimitReport mid = limit_deviation({3, 1.0, 1e4}, n, LimitRegime::tonks);
  CHECK(mid.deviation <= 2.0 * 5 * pi * 3 / 1e4);

  const LimitReport off = limit_deviation({3, 1.0, 1.0}, n, LimitRegime::free);
  CHECK_FALSE(off.in_regime);
  CHECK_FALSE(off.warning.empty());
  const LimitReport off_tonks = limit_deviation({3, 1.0, 1.0}, n, LimitRegime::tonks);
  CHECK_FALSE(off_tonks.in_regime);

  // a zero quantum number keeps its pinned zero in both limits
  const LimitReport zero = limit_deviation({2, 1.0, 1e8}, QuantumNumbers{0, 2}, LimitRegime::tonks);
  CHECK(zero.limit[0] == 0.0);
  CHECK(std::abs(zero.limit[1] - 3 * pi) <= 1e-14);
}

TEST_CASE("periodic halving") {
  SUBCASE("one particle per half") {
    const HalvingReport h = periodic_halving_check({1, 1.0, 1.0}, QuantumNumbers{1});
    // mpmath, 40 digits, on L k = pi + atan(1/(2k))
    CHECK(std::abs(h.half_roots[0] - 3.292310021282086596) <= 1e-12);
    CHECK(h.full_spec.n_particles == 2);
    CHECK(h.full_spec.length == 2.0);
    CHECK(h.full_n == QuantumNumbers{-1, 1});
  }
  SUBCASE("two particles per half") {
    const HalvingReport h = periodic_halving_check({2, 1.0, 1.0}, QuantumNumbers{1, 2});
    CHECK(h.half_residual_norm <= 1e-9);
    CHECK(h.mirror_deviation <= 1e-9);
    CHECK(h.zero_bc_residual_norm >= 0.9 * h.min_obstruction);
    for (Eigen::Index i = 0; i < 2; ++i)
      CHECK(std::abs(h.zero_bc_residual[i] - std::atan(1.0 / (2.0 * h.half_roots[i]))) <= 1e-9);
  }
  SUBCASE("input checks") {
    CHECK_THROWS_AS(periodic_halving_check({2, 1.0, 1.0}, QuantumNumbers{1, 1}), InvalidSpec);
    CHECK_THROWS_AS(periodic_halving_check({2, 1.0, 1.0}, QuantumNumbers{0, 1}), InvalidSpec);
  }
}

TEST_CASE("energy and certification") {
  CHECK(energy(roots({1.0, 2.0})) == 5.0);

  SolveReport full = solve({4, 1.0, 1.0}, ladder(4));
  const MinorChain chain = certify(full, {4, 1.0, 1.0});
  REQUIRE(full.minor_chain_ok);
  CHECK(*full.minor_chain_ok);
  CHECK(chain.log_minors.size() == 4);

  SolveReport reduced = solve({3, 1.0, 1.0}, QuantumNumbers{0, 1, 2});
  const MinorChain reduced_chain = certify(reduced, {3, 1.0, 1.0});
  CHECK(reduced_chain.log_minors.size() == 2);
  CHECK(*reduced.minor_chain_ok);

  SolveReport periodic = solve_periodic({3, 1.0, 1.0}, QuantumNumbers{-1, 0, 1});
  certify(periodic, {3, 1.0, 1.0});
  CHECK(*periodic.minor_chain_ok);
}
