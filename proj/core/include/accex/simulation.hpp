#pragma once

#include <cstdint>
#include <span>

#include "accex/score_matrix.hpp"

namespace accex {

//! Class-centroid distribution: standard normal, uniform with the same
//! per-coordinate variance (U(-sqrt(3), sqrt(3))), or the unit cube variant
//! U(-1, 1).
enum class ClassDist { GaussianStd, UniformMatched, UniformUnit };

//! Point distribution around a centroid y: N(y, sigma2 I), the
//! variance-matched uniform U(y +- sqrt(3 sigma2)), or the literal-width
//! uniform U(y +- sigma2).
enum class PointDist { GaussianSpread, UniformSpreadMatched, UniformSpreadUnit };

//! Synthetic recognition problem: centroids in R^dim, `points_per_class`
//! points scattered around each, scores = negated Euclidean distances (so
//! the canonical higher-is-better convention holds downstream).
struct SimulationConfig {
  int dim = 5;
  ClassDist class_dist = ClassDist::GaussianStd;
  PointDist point_dist = PointDist::GaussianSpread;
  double sigma2 = 0.1;
  int n_classes = 100;
  int points_per_class = 10;
  std::uint64_t seed = 0;
};

//! Draws a complete score matrix. Each centroid and each point uses its own
//! substream of (seed, class index[, point index]), so generation order does
//! not affect the result and equal seeds reproduce matrices bit for bit.
ScoreMatrix generate(const SimulationConfig& config);

//! The class centroids `generate` would use, one row per class.
Eigen::MatrixXd sample_centroids(const SimulationConfig& config);

//! Score of point x against centroid y: the negated Euclidean distance.
double euclidean_score(std::span<const double> x, std::span<const double> y);

}  // namespace accex
