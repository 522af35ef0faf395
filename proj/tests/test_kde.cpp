#include <doctest.h>

#include <cmath>
#include <numbers>

#include "accex/kde.hpp"
#include "test_util.hpp"

using namespace accex;
using namespace accex::test;

TEST_CASE("normal CDF") {
  CHECK(normal_cdf(0.0) == 0.5);
  CHECK(normal_cdf(1.0) + normal_cdf(-1.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(normal_cdf(10.0) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("smoothed CDF at the correct score") {
  SUBCASE("symmetry at zero") {
    const std::vector<double> incorrect = {0.0, 0.0};
    CHECK(kde_cdf_at_correct(0.0, incorrect, 0.7) == 0.5);
  }
  SUBCASE("antisymmetric pair") {
    const std::vector<double> incorrect = {0.0, 2.0};
    CHECK(kde_cdf_at_correct(1.0, incorrect, 1.0) ==
          doctest::Approx(0.5).epsilon(1e-15));
  }
  SUBCASE("saturation far above the incorrect scores") {
    const std::vector<double> incorrect = {0.0, 1.0};
    CHECK(kde_cdf_at_correct(1000.0, incorrect, 0.1) ==
          doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("monotone in the correct score") {
    const std::vector<double> incorrect = {-0.4, 0.1, 0.8};
    double prev = 0.0;
    for (double c : {-1.0, -0.3, 0.2, 0.7, 1.5}) {
      const double v = kde_cdf_at_correct(c, incorrect, 0.5);
      CHECK(v > prev);
      prev = v;
    }
  }
  SUBCASE("a vanishing bandwidth recovers the tie-splitting empirical CDF") {
    const std::vector<double> incorrect = {0.5, 0.2, 0.9};
    CHECK(kde_cdf_at_correct(0.5, incorrect, 1e-12) == 0.5);
  }
  SUBCASE("validation") {
    const std::vector<double> incorrect = {0.0};
    CHECK_THROWS_AS(kde_cdf_at_correct(0.0, incorrect, 0.0),
                    std::invalid_argument);
    CHECK_THROWS_AS(kde_cdf_at_correct(0.0, incorrect, -1.0),
                    std::invalid_argument);
    CHECK_THROWS_AS(kde_cdf_at_correct(0.0, std::vector<double>{}, 1.0),
                    std::invalid_argument);
  }
}

TEST_CASE("bandwidth grid around Silverman's rule") {
  const std::vector<double> values = {0.1, 0.4, 0.7, 1.1, 1.3};
  KdeConfig cfg;
  const auto grid = kde_bandwidth_grid(values, cfg);
  REQUIRE(static_cast<int>(grid.size()) == cfg.grid_size);
  for (std::size_t i = 1; i < grid.size(); ++i) CHECK(grid[i] > grid[i - 1]);
  CHECK(grid.back() / grid.front() == doctest::Approx(64.0).epsilon(1e-9));

  KdeConfig bad = cfg;
  bad.grid_size = 1;
  CHECK_THROWS_AS(kde_bandwidth_grid(values, bad), std::invalid_argument);
  CHECK_THROWS_AS(kde_bandwidth_grid(std::vector<double>{1.0}, cfg),
                  std::invalid_argument);
  CHECK_THROWS_AS(kde_bandwidth_grid(std::vector<double>{1.0, 1.0}, cfg),
                  std::runtime_error);
}

TEST_CASE("leave-one-out selection on a two-point sample peaks at their distance") {
  const double d = 1.3;
  const std::vector<double> values = {0.0, d};
  KdeConfig cfg;
  const auto grid = kde_bandwidth_grid(values, cfg);
  const double chosen = kde_select_bandwidth(values, cfg);

  // Independent evaluation of the two-point likelihood
  // ll(h) = 2 log(phi(d/h) / h) + const.
  double best_ll = -1e300, best_h = 0.0;
  for (double h : grid) {
    const double z = d / h;
    const double ll =
        2.0 * (-0.5 * z * z - std::log(h) -
               0.5 * std::log(2.0 * std::numbers::pi));
    if (ll > best_ll) {
      best_ll = ll;
      best_h = h;
    }
  }
  CHECK(chosen == best_h);
  // The analytic maximizer is h = d; the grid argmax lands within one
  // logarithmic grid step of it.
  const double log_step = std::log(grid[1] / grid[0]);
  CHECK(std::abs(std::log(chosen / d)) <= log_step);
}

TEST_CASE("bandwidth selection details") {
  SUBCASE("a single-candidate grid is returned as-is") {
    const std::vector<double> values = {0.0, 1.0, 2.5};
    CHECK(kde_select_bandwidth(values, std::vector<double>{0.37}) == 0.37);
  }
  SUBCASE("identical values are degenerate") {
    const std::vector<double> values = {2.0, 2.0, 2.0};
    CHECK_THROWS_AS(kde_select_bandwidth(values, std::vector<double>{0.5}),
                    std::runtime_error);
  }
  SUBCASE("validation") {
    const std::vector<double> values = {0.0, 1.0};
    CHECK_THROWS_AS(kde_select_bandwidth(values, std::vector<double>{}),
                    std::invalid_argument);
    CHECK_THROWS_AS(kde_select_bandwidth(values, std::vector<double>{-0.1}),
                    std::invalid_argument);
    CHECK_THROWS_AS(
        kde_select_bandwidth(std::vector<double>{1.0}, std::vector<double>{0.5}),
        std::invalid_argument);
  }
}

TEST_CASE("kde_chat needs at least two incorrect scores") {
  Eigen::MatrixXd scores(2, 2);
  scores << 1, 0, 0, 1;
  const ScoreMatrix m({"a", "b"}, {"p0", "p1"}, {0, 1}, scores);
  CHECK_THROWS_AS(kde_chat(m, KdeConfig{}), std::invalid_argument);
}

TEST_CASE("kde estimates on M3 are inside (0, 1)") {
  const auto chat = kde_chat(make_m3(), KdeConfig{});
  REQUIRE(chat.size() == 3);
  for (double c : chat) {
    CHECK(c > 0.0);
    CHECK(c < 1.0);
  }
  const AccuracyCurve curve = kde_extrapolate(make_m3(), KdeConfig{}, 10);
  CHECK(curve.source() == CurveSource::kde);
  for (int k = 2; k <= 10; ++k) {
    CHECK(curve.at(k) > 0.0);
    CHECK(curve.at(k) < 1.0);
    if (k > 2) CHECK(curve.at(k) <= curve.at(k - 1));
  }
}

TEST_CASE("kde saturates on well-separated data") {
  // Correct scores far above every incorrect one relative to any plausible
  // bandwidth.
  const int n_classes = 6;
  auto rng = SplitMix64(40);
  Eigen::MatrixXd scores(n_classes, n_classes);
  std::vector<std::string> class_ids, point_ids;
  std::vector<int> correct;
  for (int p = 0; p < n_classes; ++p) {
    class_ids.push_back("c" + std::to_string(p));
    point_ids.push_back("p" + std::to_string(p));
    correct.push_back(p);
    for (int c = 0; c < n_classes; ++c)
      scores(p, c) = (c == p) ? 1000.0 : rng.uniform01();
  }
  const ScoreMatrix m(class_ids, point_ids, correct, scores);
  const AccuracyCurve curve = kde_extrapolate(m, KdeConfig{}, 20);
  for (int k = 2; k <= 20; ++k) CHECK(curve.at(k) > 0.999);
}

TEST_CASE("iid scores yield near-chance kde curves") {
  // With class-independent scores the true accuracy is 1/k. The tolerance is
  // three standard errors of the observed-curve Monte Carlo estimate.
  auto rng = SplitMix64(123456);
  const int n_classes = 101, r = 5;
  const ScoreMatrix m = random_score_matrix(n_classes, r, rng);
  const int n = m.n_points();
  const AccuracyCurve curve = kde_extrapolate(m, KdeConfig{}, 50);
  for (int k = 2; k <= 50; ++k) {
    const double variance = 1.0 / (2.0 * k - 1.0) - 1.0 / (static_cast<double>(k) * k);
    const double se = std::sqrt(variance / n);
    CHECK(std::abs(curve.at(k) - 1.0 / k) <= 3.0 * se);
  }
}
