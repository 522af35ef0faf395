#include "accex/accuracy.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace accex {

const char* to_string(CurveSource source) {
  switch (source) {
    case CurveSource::observed: return "observed";
    case CurveSource::cleanex: return "cleanex";
    case CurveSource::kde: return "kde";
    case CurveSource::regression: return "regression";
    case CurveSource::oracle: return "oracle";
  }
  return "?";
}

AccuracyCurve::AccuracyCurve(std::vector<double> values, CurveSource source,
                             int clamp_count)
    : values_(std::move(values)), source_(source), clamp_count_(clamp_count) {
  if (values_.empty())
    throw std::invalid_argument("AccuracyCurve: needs at least the k = 2 value");
  for (double v : values_)
    if (!(v >= 0.0 && v <= 1.0))
      throw std::invalid_argument("AccuracyCurve: value outside [0, 1]");
}

double AccuracyCurve::at(int k) const {
  if (k < 2 || k > k_max())
    throw std::out_of_range("AccuracyCurve: k = " + std::to_string(k) +
                            " outside [2, " + std::to_string(k_max()) + "]");
  return values_[k - 2];
}

std::vector<PointStats> compute_rank_stats(const ScoreMatrix& m) {
  const int n_cls = m.n_classes();
  if (n_cls < 2) throw std::invalid_argument("compute_rank_stats: K < 2");
  std::vector<PointStats> stats;
  stats.reserve(m.n_points());
  for (int p = 0; p < m.n_points(); ++p) {
    const double cs = m.correct_score(p);
    int outscored = 0;
    for (int c = 0; c < n_cls; ++c)
      if (c != m.correct_class(p) && m.scores()(p, c) < cs) ++outscored;
    stats.push_back({m.point_ids()[p], outscored,
                     static_cast<double>(outscored) / (n_cls - 1)});
  }
  return stats;
}

AccuracyCurve observed_accuracy_curve(const std::vector<PointStats>& stats,
                                      int n_classes, int points_per_class,
                                      int k_max) {
  if (k_max < 2 || k_max > n_classes)
    throw std::invalid_argument("observed_accuracy_curve: k_max must be in [2, K]");
  const std::int64_t n_points =
      static_cast<std::int64_t>(points_per_class) * n_classes;
  if (static_cast<std::int64_t>(stats.size()) != n_points)
    throw std::invalid_argument("observed_accuracy_curve: expected r*K stats");

  // Identical R values contribute identical terms, so aggregate them first;
  // that is also what keeps the k loop O(K) instead of O(N).
  std::vector<std::int64_t> r_hist(n_classes, 0);
  for (const auto& s : stats) {
    if (s.outscored < 0 || s.outscored > n_classes - 1)
      throw std::invalid_argument("observed_accuracy_curve: R outside [0, K-1]");
    ++r_hist[s.outscored];
  }

  // lgamma_table[n] = log(n!)
  std::vector<double> lgamma_table(n_classes + 1);
  for (int n = 0; n <= n_classes; ++n) lgamma_table[n] = std::lgamma(n + 1.0);
  auto log_choose = [&](int n, int m) {
    return lgamma_table[n] - lgamma_table[m] - lgamma_table[n - m];
  };

  std::vector<double> values(k_max - 1);
  for (int k = 2; k <= k_max; ++k) {
    const double log_denom =
        log_choose(n_classes, k) + std::log(static_cast<double>(points_per_class) * k);
    double sum = 0.0;
    for (int r = k - 1; r <= n_classes - 1; ++r) {
      if (r_hist[r] == 0) continue;
      sum += static_cast<double>(r_hist[r]) *
             std::exp(log_choose(r, k - 1) - log_denom);
    }
    values[k - 2] = std::clamp(sum, 0.0, 1.0);
  }
  return AccuracyCurve(std::move(values), CurveSource::observed);
}

double brute_force_accuracy(const ScoreMatrix& m, int k,
                            std::uint64_t max_subsets) {
  const int n_cls = m.n_classes();
  if (k < 2 || k > n_cls)
    throw std::invalid_argument("brute_force_accuracy: k must be in [2, K]");

  // C(K, k) with an overflow-free cap check.
  double n_subsets = 1.0;
  for (int i = 0; i < k; ++i) {
    n_subsets *= static_cast<double>(n_cls - i) / (i + 1);
    if (n_subsets > 2.0 * static_cast<double>(max_subsets)) break;
  }
  if (n_subsets > static_cast<double>(max_subsets))
    throw std::runtime_error(
        "brute_force_accuracy: C(K, k) exceeds the enumeration cap of " +
        std::to_string(max_subsets) +
        " subsets; use the closed-form observed_accuracy_curve instead");

  // Points grouped by correct class, so a subset visits only its own points.
  std::vector<std::vector<int>> by_class(n_cls);
  for (int p = 0; p < m.n_points(); ++p) by_class[m.correct_class(p)].push_back(p);

  const double points_per_subset =
      static_cast<double>(m.points_per_class()) * k;

  std::vector<int> subset(k);
  std::iota(subset.begin(), subset.end(), 0);

  double total = 0.0;
  std::uint64_t count = 0;
  while (true) {
    int wins = 0;
    for (int ci : subset) {
      for (int p : by_class[ci]) {
        const double cs = m.scores()(p, ci);
        bool win = true;
        for (int cj : subset) {
          if (cj != ci && m.scores()(p, cj) >= cs) {  // ties lose
            win = false;
            break;
          }
        }
        wins += win ? 1 : 0;
      }
    }
    total += static_cast<double>(wins) / points_per_subset;
    ++count;

    // Next k-combination in lexicographic order.
    int i = k - 1;
    while (i >= 0 && subset[i] == n_cls - k + i) --i;
    if (i < 0) break;
    ++subset[i];
    for (int j = i + 1; j < k; ++j) subset[j] = subset[j - 1] + 1;
  }
  return total / static_cast<double>(count);
}

AccuracyCurve curve_from_chat(std::span<const double> chat, int k2,
                              CurveSource source) {
  if (k2 < 2) throw std::invalid_argument("curve_from_chat: k2 must be >= 2");
  if (chat.empty()) throw std::invalid_argument("curve_from_chat: empty estimates");
  constexpr double kEps = 1e-12;

  std::vector<double> log_chat;
  log_chat.reserve(chat.size());
  for (double c : chat) {
    if (!(c > 0.0 && c < 1.0))
      throw std::invalid_argument(
          "curve_from_chat: estimate outside the open interval (0, 1)");
    log_chat.push_back(std::log(std::clamp(c, kEps, 1.0 - kEps)));
  }

  const double inv_n = 1.0 / static_cast<double>(log_chat.size());
  std::vector<double> values(k2 - 1);
  for (int k = 2; k <= k2; ++k) {
    double sum = 0.0;
    for (double lc : log_chat) sum += std::exp((k - 1) * lc);
    values[k - 2] = std::clamp(sum * inv_n, 0.0, 1.0);
  }
  return AccuracyCurve(std::move(values), source);
}

}  // namespace accex
