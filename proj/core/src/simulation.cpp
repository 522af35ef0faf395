#include "accex/simulation.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "accex/rng.hpp"

namespace accex {

namespace {

// Substream tags; centroids and points draw from disjoint streams so the
// generation order (or parallel generation across classes) cannot matter.
constexpr std::uint64_t kCentroidTag = 0x43454e54ULL;  // "CENT"
constexpr std::uint64_t kPointTag = 0x504f494eULL;     // "POIN"

void validate(const SimulationConfig& cfg) {
  if (cfg.dim < 1) throw std::invalid_argument("simulation: dim must be >= 1");
  if (cfg.n_classes < 2)
    throw std::invalid_argument("simulation: need at least 2 classes");
  if (cfg.points_per_class < 1)
    throw std::invalid_argument("simulation: points_per_class must be >= 1");
  if (!(cfg.sigma2 > 0.0))
    throw std::invalid_argument("simulation: sigma2 must be positive");
}

std::string padded_index(int i, int width) {
  std::string s = std::to_string(i);
  return std::string(width > static_cast<int>(s.size())
                         ? width - static_cast<int>(s.size())
                         : 0,
                     '0') +
         s;
}

}  // namespace

Eigen::MatrixXd sample_centroids(const SimulationConfig& cfg) {
  validate(cfg);
  const double sqrt3 = std::sqrt(3.0);
  Eigen::MatrixXd centroids(cfg.n_classes, cfg.dim);
  for (int c = 0; c < cfg.n_classes; ++c) {
    auto rng = SplitMix64::substream(cfg.seed,
                                     {kCentroidTag, static_cast<std::uint64_t>(c)});
    for (int d = 0; d < cfg.dim; ++d) {
      switch (cfg.class_dist) {
        case ClassDist::GaussianStd: centroids(c, d) = rng.normal(); break;
        case ClassDist::UniformMatched:
          centroids(c, d) = rng.uniform(-sqrt3, sqrt3);
          break;
        case ClassDist::UniformUnit:
          centroids(c, d) = rng.uniform(-1.0, 1.0);
          break;
      }
    }
  }
  return centroids;
}

double euclidean_score(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size())
    throw std::invalid_argument("euclidean_score: dimension mismatch");
  double sq = 0.0;
  for (std::size_t d = 0; d < x.size(); ++d) {
    const double diff = x[d] - y[d];
    sq += diff * diff;
  }
  return -std::sqrt(sq);
}

ScoreMatrix generate(const SimulationConfig& cfg) {
  validate(cfg);
  const int dim = cfg.dim;
  const int n_cls = cfg.n_classes;
  const int r = cfg.points_per_class;
  const int n_pts = n_cls * r;
  const double sigma = std::sqrt(cfg.sigma2);
  const int id_width =
      static_cast<int>(std::to_string(n_cls - 1).size());

  const Eigen::MatrixXd centroids = sample_centroids(cfg);
  // Flat row-major copy; the score loop below touches every (point, class)
  // pair and wants contiguous centroid rows.
  std::vector<double> centroid_rows(static_cast<std::size_t>(n_cls) * dim);
  for (int c = 0; c < n_cls; ++c)
    for (int d = 0; d < dim; ++d)
      centroid_rows[static_cast<std::size_t>(c) * dim + d] = centroids(c, d);

  std::vector<std::string> class_ids(n_cls);
  for (int c = 0; c < n_cls; ++c) class_ids[c] = "c" + padded_index(c, id_width);

  std::vector<std::string> point_ids;
  point_ids.reserve(n_pts);
  std::vector<int> correct;
  correct.reserve(n_pts);
  Eigen::MatrixXd scores(n_pts, n_cls);

  const double spread_matched = std::sqrt(3.0 * cfg.sigma2);
  std::vector<double> x(dim);
  int row = 0;
  for (int c = 0; c < n_cls; ++c) {
    const double* y = &centroid_rows[static_cast<std::size_t>(c) * dim];
    for (int j = 0; j < r; ++j, ++row) {
      auto rng = SplitMix64::substream(
          cfg.seed, {kPointTag, static_cast<std::uint64_t>(c),
                     static_cast<std::uint64_t>(j)});
      for (int d = 0; d < dim; ++d) {
        switch (cfg.point_dist) {
          case PointDist::GaussianSpread:
            x[d] = y[d] + sigma * rng.normal();
            break;
          case PointDist::UniformSpreadMatched:
            x[d] = y[d] + rng.uniform(-spread_matched, spread_matched);
            break;
          case PointDist::UniformSpreadUnit:
            x[d] = y[d] + rng.uniform(-cfg.sigma2, cfg.sigma2);
            break;
        }
      }
      point_ids.push_back(class_ids[c] + "_" + std::to_string(j));
      correct.push_back(c);
      for (int c2 = 0; c2 < n_cls; ++c2)
        scores(row, c2) = euclidean_score(
            x, std::span<const double>(
                   &centroid_rows[static_cast<std::size_t>(c2) * dim],
                   static_cast<std::size_t>(dim)));
    }
  }

  return ScoreMatrix(std::move(class_ids), std::move(point_ids),
                     std::move(correct), std::move(scores));
}

}  // namespace accex
