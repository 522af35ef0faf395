#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "accex/score_matrix.hpp"

namespace accex {

//! Sufficient statistics of one data point: the number of incorrect classes
//! its correct class strictly outscores (R, `outscored`) and the same count
//! as a fraction of the K-1 incorrect classes (C = R/(K-1), `outscore_frac`).
struct PointStats {
  std::string point_id;
  int outscored = 0;
  double outscore_frac = 0.0;
};

enum class CurveSource { observed, cleanex, kde, regression, oracle };

const char* to_string(CurveSource source);

//! Accuracy estimates indexed by the candidate-set size k = 2..k_max.
class AccuracyCurve {
 public:
  //! `values[i]` is the accuracy at k = i + 2; must all lie in [0, 1].
  AccuracyCurve(std::vector<double> values, CurveSource source,
                int clamp_count = 0);

  int k_max() const { return static_cast<int>(values_.size()) + 1; }
  static constexpr int k_min() { return 2; }

  //! Accuracy at k; throws std::out_of_range outside [2, k_max].
  double at(int k) const;

  const std::vector<double>& values() const { return values_; }
  CurveSource source() const { return source_; }

  //! How many raw predictions had to be clamped into [0, 1]; nonzero only
  //! for the regression estimator.
  int clamp_count() const { return clamp_count_; }

 private:
  std::vector<double> values_;
  CurveSource source_;
  int clamp_count_ = 0;
};

//! Per-point rank statistics under strict comparison (a tie with the correct
//! score does not count as outscored).
std::vector<PointStats> compute_rank_stats(const ScoreMatrix& m);

//! Exact observed accuracy over all size-k class subsets, k = 2..k_max,
//! evaluated from the rank statistics in closed form. Binomial ratios are
//! computed through log-gamma so class counts in the thousands do not
//! overflow.
AccuracyCurve observed_accuracy_curve(const std::vector<PointStats>& stats,
                                      int n_classes, int points_per_class,
                                      int k_max);

//! Enumeration oracle: averages the subset accuracy over every size-k class
//! subset directly from the score matrix. A point is correct in a subset iff
//! its correct class attains the strict maximum of the restricted scores.
//! Refuses (std::runtime_error) when the subset count exceeds `max_subsets`;
//! use the closed form for anything beyond desk scale.
double brute_force_accuracy(const ScoreMatrix& m, int k,
                            std::uint64_t max_subsets = 1000000);

//! mean_x chat[x]^(k-1) for k = 2..k2, the extrapolation rule shared by the
//! chat-based estimators. Inputs must lie in the open interval (0, 1); they
//! are clamped to [1e-12, 1 - 1e-12] before the log-space powering.
AccuracyCurve curve_from_chat(std::span<const double> chat, int k2,
                              CurveSource source);

}  // namespace accex
