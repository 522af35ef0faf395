#include "accex/rroc.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace accex {

bool rroc_point(double c, double u) {
  if (!(c >= 0.0 && c <= 1.0) || !(u >= 0.0 && u <= 1.0))
    throw std::invalid_argument("rroc_point: inputs must lie in [0, 1]");
  return u > 1.0 - c;
}

RRocCurve rroc_average(const std::vector<PointStats>& stats,
                       const std::vector<double>& grid) {
  if (stats.empty()) throw std::invalid_argument("rroc_average: no stats");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(grid[i] >= 0.0 && grid[i] <= 1.0))
      throw std::invalid_argument("rroc_average: grid value outside [0, 1]");
    if (i > 0 && !(grid[i] > grid[i - 1]))
      throw std::invalid_argument("rroc_average: grid must be strictly increasing");
  }

  // Each point switches on at u = 1 - C; count thresholds strictly below u.
  std::vector<double> thresholds;
  thresholds.reserve(stats.size());
  for (const auto& s : stats) thresholds.push_back(1.0 - s.outscore_frac);
  std::sort(thresholds.begin(), thresholds.end());

  RRocCurve curve;
  curve.grid = grid;
  curve.values.reserve(grid.size());
  const double inv_n = 1.0 / static_cast<double>(stats.size());
  for (double u : grid) {
    auto it = std::lower_bound(thresholds.begin(), thresholds.end(), u);
    curve.values.push_back(static_cast<double>(it - thresholds.begin()) * inv_n);
  }
  return curve;
}

double reversed_auc(const std::vector<PointStats>& stats) {
  if (stats.empty()) throw std::invalid_argument("reversed_auc: no stats");
  double sum = 0.0;
  for (const auto& s : stats) sum += s.outscore_frac;
  return sum / static_cast<double>(stats.size());
}

double discriminability(const std::vector<PointStats>& stats, double u) {
  if (stats.empty()) throw std::invalid_argument("discriminability: no stats");
  if (!(u >= 0.0 && u <= 1.0))
    throw std::invalid_argument("discriminability: u must lie in [0, 1]");
  std::int64_t count = 0;
  for (const auto& s : stats)
    if (s.outscore_frac <= u) ++count;
  return static_cast<double>(count) / static_cast<double>(stats.size());
}

double accuracy_from_discriminability(const std::vector<PointStats>& stats,
                                      int k) {
  if (stats.empty())
    throw std::invalid_argument("accuracy_from_discriminability: no stats");
  if (k < 2)
    throw std::invalid_argument("accuracy_from_discriminability: k must be >= 2");

  // D is constant between consecutive sorted C values; on [c_i, c_{i+1})
  // it equals i/N, and (k-1) * integral of u^(k-2) over [a, b) is
  // b^(k-1) - a^(k-1).
  std::vector<double> c_sorted;
  c_sorted.reserve(stats.size());
  for (const auto& s : stats) c_sorted.push_back(s.outscore_frac);
  std::sort(c_sorted.begin(), c_sorted.end());

  const double n = static_cast<double>(c_sorted.size());
  double integral = 0.0;
  double prev_pow = std::pow(c_sorted[0], k - 1);  // D = 0 below c_sorted[0]
  for (std::size_t i = 1; i <= c_sorted.size(); ++i) {
    const double upper = i < c_sorted.size() ? c_sorted[i] : 1.0;
    const double upper_pow = i < c_sorted.size() ? std::pow(upper, k - 1) : 1.0;
    integral += (static_cast<double>(i) / n) * (upper_pow - prev_pow);
    prev_pow = upper_pow;
  }
  return 1.0 - integral;
}

std::vector<double> uniform_grid(int n) {
  if (n < 2) throw std::invalid_argument("uniform_grid: need at least 2 values");
  std::vector<double> grid(n);
  for (int i = 0; i < n; ++i)
    grid[i] = static_cast<double>(i) / static_cast<double>(n - 1);
  return grid;
}

}  // namespace accex
