#include <doctest.h>

#include <cmath>

#include "accex/accuracy.hpp"
#include "accex/rroc.hpp"
#include "test_util.hpp"

using namespace accex;
using namespace accex::test;

namespace {

std::vector<PointStats> stats_from_fracs(const std::vector<double>& fracs,
                                         int n_classes) {
  std::vector<PointStats> stats;
  for (double c : fracs)
    stats.push_back({"p", static_cast<int>(std::lround(c * (n_classes - 1))), c});
  return stats;
}

}  // namespace

TEST_CASE("per-point reversed ROC is the step of the proposition") {
  CHECK(rroc_point(1.0, 0.01) == true);
  CHECK(rroc_point(0.5, 0.5) == false);  // strict inequality at the boundary
  CHECK(rroc_point(0.5, 0.6) == true);
  CHECK(rroc_point(0.0, 0.0) == false);
  CHECK(rroc_point(1.0, 0.0) == false);
  CHECK_THROWS_AS(rroc_point(1.2, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(rroc_point(0.5, -0.1), std::invalid_argument);
}

TEST_CASE("proposition equivalence on a dense grid") {
  for (int ci = 0; ci <= 20; ++ci)
    for (int ui = 0; ui <= 20; ++ui) {
      const double c = ci / 20.0;
      const double u = ui / 20.0;
      CHECK(rroc_point(c, u) == (u > 1.0 - c));
    }
}

TEST_CASE("averaged reversed ROC on M3") {
  const auto stats = compute_rank_stats(make_m3());
  const RRocCurve curve = rroc_average(stats, {0.0, 0.3, 0.6});
  CHECK(curve.values[0] == 0.0);
  CHECK(curve.values[1] == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
  CHECK(curve.values[2] == 1.0);
}

TEST_CASE("averaged reversed ROC validation") {
  const auto stats = compute_rank_stats(make_m3());
  CHECK_THROWS_AS(rroc_average({}, {0.5}), std::invalid_argument);
  CHECK_THROWS_AS(rroc_average(stats, {0.5, 0.4}), std::invalid_argument);
  CHECK_THROWS_AS(rroc_average(stats, {0.5, 1.4}), std::invalid_argument);
}

TEST_CASE("averaged reversed ROC is a nondecreasing curve in [0, 1]") {
  auto rng = SplitMix64(99);
  const ScoreMatrix m = random_score_matrix(9, 3, rng);
  const auto stats = compute_rank_stats(m);
  const RRocCurve curve = rroc_average(stats, uniform_grid(129));
  for (std::size_t i = 0; i < curve.values.size(); ++i) {
    CHECK(curve.values[i] >= 0.0);
    CHECK(curve.values[i] <= 1.0);
    if (i > 0) CHECK(curve.values[i] >= curve.values[i - 1]);
  }
}

TEST_CASE("reversed AUC") {
  const auto stats = compute_rank_stats(make_m3());
  CHECK(reversed_auc(stats) == doctest::Approx(2.0 / 3.0).epsilon(1e-14));

  CHECK(reversed_auc(stats_from_fracs({1, 1, 1}, 5)) == 1.0);
  CHECK(reversed_auc(stats_from_fracs({0, 0}, 5)) == 0.0);
  CHECK_THROWS_AS(reversed_auc({}), std::invalid_argument);
}

TEST_CASE("reversed AUC equals the observed two-class accuracy") {
  auto rng = SplitMix64(4242);
  const ScoreMatrix m = random_score_matrix(10, 2, rng);
  const auto stats = compute_rank_stats(m);
  const AccuracyCurve curve = observed_accuracy_curve(stats, 10, 2, 10);
  CHECK(std::abs(reversed_auc(stats) - curve.at(2)) <= 1e-12);
}

TEST_CASE("discriminability") {
  const auto stats = compute_rank_stats(make_m3());
  CHECK(discriminability(stats, 0.5) == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
  CHECK(discriminability(stats, 1.0) == 1.0);

  CHECK(discriminability(stats_from_fracs({0.25, 0.5, 0.75}, 5), 0.0) == 0.0);
  CHECK_THROWS_AS(discriminability(stats, 1.5), std::invalid_argument);
  CHECK_THROWS_AS(discriminability({}, 0.5), std::invalid_argument);
}

TEST_CASE("discriminability complements the averaged reversed ROC") {
  // C values on eighths and u values away from them keep every comparison
  // exact, so the identity holds with no tolerance.
  const auto stats = stats_from_fracs({0.0, 0.125, 0.375, 0.5, 0.875, 1.0}, 9);
  for (double u : {0.1, 0.3, 0.45, 0.7, 0.9}) {
    const double d = discriminability(stats, u);
    const double r = rroc_average(stats, {1.0 - u}).values[0];
    CHECK(d + r == 1.0);
  }
}

TEST_CASE("step-function integral reproduces the power-mean accuracy") {
  auto rng = SplitMix64(2024);
  for (int trial = 0; trial < 10; ++trial) {
    const int n_classes = 3 + static_cast<int>(rng.below(30));
    const int n = 20 + static_cast<int>(rng.below(200));
    std::vector<PointStats> stats;
    for (int i = 0; i < n; ++i) {
      const int r = static_cast<int>(rng.below(n_classes));
      stats.push_back(
          {"p", r, static_cast<double>(r) / static_cast<double>(n_classes - 1)});
    }
    for (int k = 2; k <= 20; ++k) {
      double mean_pow = 0.0;
      for (const auto& s : stats) mean_pow += std::pow(s.outscore_frac, k - 1);
      mean_pow /= static_cast<double>(n);
      CHECK(std::abs(accuracy_from_discriminability(stats, k) - mean_pow) <=
            1e-10);
    }
  }
}

TEST_CASE("uniform grid") {
  const auto grid = uniform_grid(5);
  CHECK(grid == std::vector<double>{0.0, 0.25, 0.5, 0.75, 1.0});
  CHECK(uniform_grid().size() == 513);
  CHECK(uniform_grid().front() == 0.0);
  CHECK(uniform_grid().back() == 1.0);
  CHECK_THROWS_AS(uniform_grid(1), std::invalid_argument);
}
