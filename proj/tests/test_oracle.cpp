#include <doctest.h>

#include <cmath>

#include "deadleaves/oracle.hpp"
#include "test_util.hpp"

using namespace deadleaves;

namespace {
const RadiusLaw kLaw12{1.0, 2.0, 0.0};
}

TEST_CASE("mc_leaf_probability: unreachable subset estimates exactly zero") {
  PixelSet a;
  a.points = {{0, 0}, {5, 0}};  // farther than 2 r_max apart
  const Estimate est = mc_leaf_probability(a, 0b11u, kLaw12, 20'000, 7);
  CHECK(est.value == 0.0);
  CHECK(est.std_error == 0.0);
  CHECK(est.n_samples == 20'000);
}

TEST_CASE("mc_leaf_probability matches the singleton closed form") {
  // isolated pixel: scaled mass is 2 pi log(r_max/r_min) * prefactor
  PixelSet a;
  a.points = {{1.0, 1.0}};
  const RadiusLaw law = framed_law(a, kLaw12);
  const double expect = 2 * kPi * std::log(2.0) * mass_scale_factor(law);
  const Estimate est = mc_leaf_probability(a, 1u, kLaw12, 2'000'000, 99);
  CHECK(std::abs(est.value - expect) < 3 * est.std_error);
  CHECK(est.std_error > 0.0);
}

TEST_CASE("mc estimators are bit-reproducible and chunk-stable") {
  PixelSet a = test::unit_grid(2, 2);
  const Estimate e1 = mc_leaf_probability(a, 0b0011u, kLaw12, 100'000, 5);
  const Estimate e2 = mc_leaf_probability(a, 0b0011u, kLaw12, 100'000, 5);
  CHECK(e1.value == e2.value);
  CHECK(e1.std_error == e2.std_error);

  // a longer run prefixes shorter ones only per whole chunk; instead assert
  // different seeds stay within joint errors of each other
  const Estimate e3 = mc_leaf_probability(a, 0b0011u, kLaw12, 100'000, 6);
  const double se = std::hypot(e1.std_error, e3.std_error);
  CHECK(std::abs(e1.value - e3.value) < 5 * se);
}

TEST_CASE("grid oracle converges to the analytic mass") {
  PixelSet a;
  a.points = {{0, 0}, {1, 0}};
  const RadiusLaw law = framed_law(a, kLaw12);
  const auto analytic = leaf_prob_table(a, law);
  const double exact = analytic.mass(0b11u) * mass_scale_factor(law);

  double prev_err = 1e300;
  for (int res : {250, 500, 1000}) {
    const Estimate est = grid_leaf_probability(a, 0b11u, law, res, res / 2);
    const double err = std::abs(est.value - exact);
    CHECK(est.std_error == 0.0);
    CHECK(err <= prev_err);
    prev_err = err;
  }
  CHECK(prev_err / exact < 2e-3);

  // resolution doubling shrinks the error by a decent factor while still in
  // the asymptotic regime
  const double e1 = std::abs(grid_leaf_probability(a, 0b11u, law, 60, 30).value - exact);
  const double e2 = std::abs(grid_leaf_probability(a, 0b11u, law, 120, 60).value - exact);
  CHECK(e2 < e1 / 1.5);
}

TEST_CASE("grid oracle: unreachable subset is zero at any resolution") {
  PixelSet a;
  a.points = {{0, 0}, {5, 0}};
  for (int res : {50, 200}) {
    CHECK(grid_leaf_probability(a, 0b11u, kLaw12, res, res).value == 0.0);
  }
}

TEST_CASE("mc_partition_prior: single pixel always yields the singleton partition") {
  PixelSet a;
  a.points = {{0, 0}};
  Partition m{{1u}};
  const Estimate est = mc_partition_prior(a, m, kLaw12, 1000, 3);
  CHECK(est.value == 1.0);
}

TEST_CASE("mc_partition_prior: impossible diagonal partition never occurs") {
  PixelSet a = test::unit_grid(2, 2);
  Partition diag{{test::mask_of({0, 3}), test::mask_of({1, 2})}};
  const Estimate est = mc_partition_prior(a, diag, kLaw12, 50'000, 17);
  CHECK(est.value == 0.0);
}

TEST_CASE("mc_partition_prior cross-validates the analytic recursion") {
  PixelSet a = test::unit_grid(2, 2);
  Partition m{{test::mask_of({0, 1, 2, 3})}};
  const auto analytic = prior_unordered(a, m, kLaw12);
  const Estimate est = mc_partition_prior(a, m, kLaw12, 400'000, 11);
  CHECK(std::abs(est.value - analytic.value) < 3 * est.std_error);
}

TEST_CASE("empirical partition distribution sums to one") {
  // the estimator is an empirical frequency, so summing over all partitions
  // of a 3-pixel set gives exactly 1
  PixelSet a = test::unit_grid(3, 1);
  PartitionEnumerator en(3);
  Partition m;
  double total = 0.0;
  while (en.next(m)) total += mc_partition_prior(a, m, kLaw12, 20'000, 123).value;
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("ratio_std_error delta method") {
  const Estimate x{0.5, 0.01, 1000};
  const Estimate y{2.0, 0.02, 1000};
  const double se = ratio_std_error(x, y);
  // relative errors 2% and 1% -> ratio r = 0.25, se = r * sqrt(4e-4 + 1e-4)
  CHECK(se == doctest::Approx(0.25 * std::sqrt(5e-4)).epsilon(1e-12));
}
