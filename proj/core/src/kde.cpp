#include "accex/kde.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace accex {

namespace {

constexpr double kChatEps = 1e-12;

double sample_sd(std::span<const double> values) {
  const double n = static_cast<double>(values.size());
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= n;
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / (n - 1.0));
}

// Linear interpolation between order statistics of a sorted vector.
double quantile_sorted(const std::vector<double>& sorted, double p) {
  const double h = p * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(h);
  if (lo + 1 >= sorted.size()) return sorted.back();
  const double frac = h - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

// Leave-one-out log pseudo-likelihood of one bandwidth given the pairwise
// squared differences (diagonal preloaded with a huge value so the self
// terms vanish). The matrix is symmetric, so the per-point sums run down the
// columns, which keeps the kernel evaluation contiguous. Exponents are
// floored at -700: that keeps deeply underflowing kernels in normal range
// (subnormal handling triples the cost), and a term of e-700 sits ~300
// orders of magnitude below anything that can influence the argmax.
double loo_log_likelihood(const Eigen::ArrayXXd& sq_diffs, double h) {
  const auto n = sq_diffs.rows();
  const double log_norm =
      -std::log(static_cast<double>(n - 1) * h *
                std::sqrt(2.0 * std::numbers::pi));
  const Eigen::ArrayXd sums =
      (sq_diffs * (-0.5 / (h * h))).max(-700.0).exp().colwise().sum();
  double ll = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) ll += std::log(sums[i]) + log_norm;
  return ll;
}

constexpr double kSelfExcluded = 1e300;  // diagonal marker; kernel -> 0

void fill_pairwise_squared_diffs(std::span<const double> values,
                                 Eigen::ArrayXXd& sq) {
  const auto n = static_cast<Eigen::Index>(values.size());
  sq.resize(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) {
      const double d = values[i] - values[j];
      sq(i, j) = d * d;
    }
    sq(j, j) = kSelfExcluded;
  }
}

double select_bandwidth_impl(const Eigen::ArrayXXd& sq_diffs,
                             std::span<const double> grid) {
  // Ascending scan with strict improvement resolves ties toward smaller h.
  std::vector<double> ordered(grid.begin(), grid.end());
  std::sort(ordered.begin(), ordered.end());
  double best_h = ordered[0];
  double best_ll = loo_log_likelihood(sq_diffs, ordered[0]);
  for (std::size_t i = 1; i < ordered.size(); ++i) {
    const double ll = loo_log_likelihood(sq_diffs, ordered[i]);
    if (ll > best_ll) {
      best_ll = ll;
      best_h = ordered[i];
    }
  }
  return best_h;
}

}  // namespace

double normal_cdf(double z) {
  return 0.5 * std::erfc(-z / std::numbers::sqrt2);
}

double kde_cdf_at_correct(double correct, std::span<const double> incorrect,
                          double bandwidth) {
  if (!(bandwidth > 0.0))
    throw std::invalid_argument("kde_cdf_at_correct: bandwidth must be positive");
  if (incorrect.empty())
    throw std::invalid_argument("kde_cdf_at_correct: no incorrect scores");
  double sum = 0.0;
  for (double s : incorrect) sum += normal_cdf((correct - s) / bandwidth);
  return sum / static_cast<double>(incorrect.size());
}

std::vector<double> kde_bandwidth_grid(std::span<const double> values,
                                       const KdeConfig& cfg) {
  if (cfg.grid_size < 2)
    throw std::invalid_argument("kde_bandwidth_grid: grid size must be >= 2");
  if (!(cfg.span_low > 0.0) || !(cfg.span_high > cfg.span_low))
    throw std::invalid_argument("kde_bandwidth_grid: invalid span");
  if (values.size() < 2)
    throw std::invalid_argument("kde_bandwidth_grid: need at least 2 values");

  const double sd = sample_sd(values);
  if (!(sd > 0.0))
    throw std::runtime_error(
        "kde_bandwidth_grid: degenerate sample (all values identical)");

  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const double iqr = quantile_sorted(sorted, 0.75) - quantile_sorted(sorted, 0.25);
  double scale = std::min(sd, iqr / 1.349);
  if (!(scale > 0.0)) scale = sd;

  // Silverman's rule-of-thumb center.
  const double h0 =
      0.9 * scale * std::pow(static_cast<double>(values.size()), -0.2);

  std::vector<double> grid(cfg.grid_size);
  const double log_lo = std::log(h0 * cfg.span_low);
  const double log_hi = std::log(h0 * cfg.span_high);
  for (int i = 0; i < cfg.grid_size; ++i)
    grid[i] = std::exp(log_lo + (log_hi - log_lo) * i / (cfg.grid_size - 1));
  return grid;
}

double kde_select_bandwidth(std::span<const double> values,
                            std::span<const double> grid) {
  if (values.size() < 2)
    throw std::invalid_argument("kde_select_bandwidth: need at least 2 values");
  if (grid.empty())
    throw std::invalid_argument("kde_select_bandwidth: empty bandwidth grid");
  const auto [mn, mx] = std::minmax_element(values.begin(), values.end());
  if (*mn == *mx)
    throw std::runtime_error(
        "kde_select_bandwidth: degenerate sample (all values identical)");
  for (double h : grid)
    if (!(h > 0.0))
      throw std::invalid_argument("kde_select_bandwidth: bandwidths must be positive");

  Eigen::ArrayXXd sq_diffs;
  fill_pairwise_squared_diffs(values, sq_diffs);
  return select_bandwidth_impl(sq_diffs, grid);
}

double kde_select_bandwidth(std::span<const double> values,
                            const KdeConfig& cfg) {
  const auto grid = kde_bandwidth_grid(values, cfg);
  return kde_select_bandwidth(values, grid);
}

std::vector<double> kde_chat(const ScoreMatrix& m, const KdeConfig& cfg) {
  if (m.n_classes() < 3)
    throw std::invalid_argument(
        "kde_chat: need K >= 3 (at least two incorrect scores per point)");

  std::vector<double> chat(m.n_points());
  std::vector<double> incorrect(m.n_classes() - 1);
  Eigen::ArrayXXd sq_diffs;  // reused across points
  for (int p = 0; p < m.n_points(); ++p) {
    int idx = 0;
    for (int c = 0; c < m.n_classes(); ++c)
      if (c != m.correct_class(p)) incorrect[idx++] = m.scores()(p, c);
    const auto grid = kde_bandwidth_grid(incorrect, cfg);
    fill_pairwise_squared_diffs(incorrect, sq_diffs);
    const double h = select_bandwidth_impl(sq_diffs, grid);
    const double value = kde_cdf_at_correct(m.correct_score(p), incorrect, h);
    chat[p] = std::clamp(value, kChatEps, 1.0 - kChatEps);
  }
  return chat;
}

AccuracyCurve kde_extrapolate(const ScoreMatrix& m, const KdeConfig& cfg,
                              int k2) {
  return curve_from_chat(kde_chat(m, cfg), k2, CurveSource::kde);
}

}  // namespace accex
