#include <doctest.h>

#include <cmath>

#include "accex/accuracy.hpp"
#include "accex/rroc.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace accex;
using namespace accex::test;

TEST_CASE("rank statistics of M3") {
  const auto stats = compute_rank_stats(make_m3());
  REQUIRE(stats.size() == 3);
  CHECK(stats[0].outscored == 2);
  CHECK(stats[1].outscored == 1);
  CHECK(stats[2].outscored == 1);
  CHECK(stats[0].outscore_frac == 1.0);
  CHECK(stats[1].outscore_frac == 0.5);
  CHECK(stats[2].outscore_frac == 0.5);
  CHECK(stats[0].point_id == "x1");
}

TEST_CASE("rank statistics corner cases") {
  SUBCASE("dominant correct scores give R = K - 1") {
    Eigen::MatrixXd scores(4, 4);
    scores << 9, 1, 2, 3,
              0, 8, 2, 3,
              0, 1, 7, 3,
              0, 1, 2, 6;
    const ScoreMatrix m({"a", "b", "c", "d"}, {"p0", "p1", "p2", "p3"},
                        {0, 1, 2, 3}, scores);
    for (const auto& s : compute_rank_stats(m)) {
      CHECK(s.outscored == 3);
      CHECK(s.outscore_frac == 1.0);
    }
  }
  SUBCASE("a tie is not counted as outscored") {
    Eigen::MatrixXd scores(3, 3);
    scores << 0.5, 0.5, 0.1,   // ties B, beats C
              0.1, 0.9, 0.0,
              0.1, 0.2, 0.9;
    const ScoreMatrix m({"a", "b", "c"}, {"p0", "p1", "p2"}, {0, 1, 2}, scores);
    CHECK(compute_rank_stats(m)[0].outscored == 1);
  }
}

TEST_CASE("observed accuracy curve on M3") {
  const auto stats = compute_rank_stats(make_m3());
  const AccuracyCurve curve = observed_accuracy_curve(stats, 3, 1, 3);
  CHECK(curve.k_max() == 3);
  CHECK(curve.at(2) == doctest::Approx(2.0 / 3.0).epsilon(1e-13));
  CHECK(curve.at(3) == doctest::Approx(1.0 / 3.0).epsilon(1e-13));
  CHECK(curve.source() == CurveSource::observed);
}

TEST_CASE("observed accuracy curve degenerate stats") {
  SUBCASE("all dominant") {
    std::vector<PointStats> stats(8, PointStats{"p", 3, 1.0});
    const AccuracyCurve curve = observed_accuracy_curve(stats, 4, 2, 4);
    for (int k = 2; k <= 4; ++k)
      CHECK(curve.at(k) == doctest::Approx(1.0).epsilon(1e-13));
  }
  SUBCASE("all R = 0") {
    std::vector<PointStats> stats(8, PointStats{"p", 0, 0.0});
    const AccuracyCurve curve = observed_accuracy_curve(stats, 4, 2, 4);
    for (int k = 2; k <= 4; ++k) CHECK(curve.at(k) == 0.0);
  }
}

TEST_CASE("observed accuracy curve preconditions") {
  const auto stats = compute_rank_stats(make_m3());
  CHECK_THROWS_AS(observed_accuracy_curve(stats, 3, 1, 4), std::invalid_argument);
  CHECK_THROWS_AS(observed_accuracy_curve(stats, 3, 1, 1), std::invalid_argument);
  CHECK_THROWS_AS(observed_accuracy_curve(stats, 3, 2, 3), std::invalid_argument);
}

TEST_CASE("brute force oracle on M3") {
  const ScoreMatrix m = make_m3();
  CHECK(brute_force_accuracy(m, 2) == doctest::Approx(2.0 / 3.0).epsilon(1e-13));
  CHECK(brute_force_accuracy(m, 3) == doctest::Approx(1.0 / 3.0).epsilon(1e-13));
}

TEST_CASE("brute force refuses past the enumeration cap") {
  const ScoreMatrix m = make_m3();
  CHECK_THROWS_WITH_AS(brute_force_accuracy(m, 2, 2),
                       doctest::Contains("closed-form"), std::runtime_error);
  auto rng = SplitMix64(11);
  const ScoreMatrix big = random_score_matrix(40, 1, rng);
  CHECK_THROWS_AS(brute_force_accuracy(big, 20), std::runtime_error);
}

TEST_CASE("brute force dominance gives 1.0 at k = K") {
  Eigen::MatrixXd scores(3, 3);
  scores << 5, 1, 2,
            0, 5, 2,
            0, 1, 5;
  const ScoreMatrix m({"a", "b", "c"}, {"p0", "p1", "p2"}, {0, 1, 2}, scores);
  CHECK(brute_force_accuracy(m, 3) == 1.0);
}

TEST_CASE("closed form matches the enumeration oracle and the hypergeometric"
          " route on random matrices") {
  auto rng = SplitMix64(777);
  for (int trial = 0; trial < 30; ++trial) {
    const int n_classes = 3 + static_cast<int>(rng.below(6));  // 3..8
    const int r = 1 + static_cast<int>(rng.below(3));          // 1..3
    const ScoreMatrix m = random_score_matrix(n_classes, r, rng);
    const auto stats = compute_rank_stats(m);
    const AccuracyCurve curve =
        observed_accuracy_curve(stats, n_classes, r, n_classes);
    for (int k = 2; k <= n_classes; ++k) {
      CHECK(std::abs(curve.at(k) - brute_force_accuracy(m, k)) <= 1e-12);
      CHECK(std::abs(curve.at(k) -
                     hypergeometric_accuracy(stats, n_classes, k)) <= 1e-12);
    }
  }
}

TEST_CASE("observed curves are nonincreasing and bounded") {
  auto rng = SplitMix64(31337);
  for (int trial = 0; trial < 10; ++trial) {
    const int n_classes = 3 + static_cast<int>(rng.below(20));
    const ScoreMatrix m = random_score_matrix(n_classes, 2, rng);
    const auto stats = compute_rank_stats(m);
    const AccuracyCurve curve =
        observed_accuracy_curve(stats, n_classes, 2, n_classes);
    for (int k = 2; k <= n_classes; ++k) {
      CHECK(curve.at(k) >= 0.0);
      CHECK(curve.at(k) <= 1.0);
      if (k > 2) CHECK(curve.at(k) <= curve.at(k - 1) + 1e-12);
    }
  }
}

TEST_CASE("the k = 2 value is the mean outscore fraction") {
  auto rng = SplitMix64(8);
  const ScoreMatrix m = random_score_matrix(12, 2, rng);
  const auto stats = compute_rank_stats(m);
  const AccuracyCurve curve = observed_accuracy_curve(stats, 12, 2, 12);
  double mean_c = 0.0;
  for (const auto& s : stats) mean_c += s.outscore_frac;
  mean_c /= static_cast<double>(stats.size());
  CHECK(curve.at(2) == doctest::Approx(mean_c).epsilon(1e-13));
  CHECK(curve.at(2) == doctest::Approx(reversed_auc(stats)).epsilon(1e-13));
}

TEST_CASE("AccuracyCurve accessors") {
  const AccuracyCurve curve({0.5, 0.25}, CurveSource::oracle);
  CHECK(curve.k_max() == 3);
  CHECK(curve.at(2) == 0.5);
  CHECK(curve.at(3) == 0.25);
  CHECK_THROWS_AS(curve.at(1), std::out_of_range);
  CHECK_THROWS_AS(curve.at(4), std::out_of_range);
  CHECK_THROWS_AS(AccuracyCurve({1.5}, CurveSource::oracle),
                  std::invalid_argument);
  CHECK_THROWS_AS(AccuracyCurve({}, CurveSource::oracle), std::invalid_argument);
}

TEST_CASE("curve_from_chat") {
  SUBCASE("constant 0.5 gives the closed form 0.5^(k-1)") {
    const std::vector<double> chat(5, 0.5);
    const AccuracyCurve curve = curve_from_chat(chat, 10, CurveSource::kde);
    for (int k = 2; k <= 10; ++k)
      CHECK(curve.at(k) == doctest::Approx(std::pow(0.5, k - 1)).epsilon(1e-13));
  }
  SUBCASE("saturated estimates stay near 1 for huge k") {
    const std::vector<double> chat(4, 1.0 - 1e-12);
    const AccuracyCurve curve = curve_from_chat(chat, 1000, CurveSource::kde);
    CHECK(curve.at(1000) == doctest::Approx(1.0).epsilon(1e-8));
  }
  SUBCASE("domain") {
    CHECK_THROWS_AS(curve_from_chat(std::vector<double>{1.0}, 5, CurveSource::kde),
                    std::invalid_argument);
    CHECK_THROWS_AS(curve_from_chat(std::vector<double>{0.0}, 5, CurveSource::kde),
                    std::invalid_argument);
    CHECK_THROWS_AS(curve_from_chat(std::vector<double>{0.5}, 1, CurveSource::kde),
                    std::invalid_argument);
    CHECK_THROWS_AS(curve_from_chat(std::vector<double>{}, 5, CurveSource::kde),
                    std::invalid_argument);
  }
}
