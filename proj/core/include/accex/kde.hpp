#pragma once

#include <span>
#include <vector>

#include "accex/accuracy.hpp"
#include "accex/score_matrix.hpp"

namespace accex {

//! Bandwidth-search settings for the Gaussian-kernel CDF estimator: a
//! log-spaced grid of `grid_size` candidates spanning Silverman's
//! rule-of-thumb bandwidth times [span_low, span_high].
struct KdeConfig {
  int grid_size = 32;
  double span_low = 0.125;
  double span_high = 8.0;
};

//! Standard normal CDF.
double normal_cdf(double z);

//! Gaussian-kernel-smoothed CDF of the incorrect scores, evaluated at the
//! correct score: mean_i Phi((correct - incorrect[i]) / bandwidth).
double kde_cdf_at_correct(double correct, std::span<const double> incorrect,
                          double bandwidth);

//! Candidate bandwidths for one sample (log-spaced around Silverman's rule).
//! Throws on fewer than two values or zero spread.
std::vector<double> kde_bandwidth_grid(std::span<const double> values,
                                       const KdeConfig& cfg);

//! Leave-one-out log pseudo-likelihood maximizer over an explicit candidate
//! grid; ties resolve toward the smaller bandwidth.
double kde_select_bandwidth(std::span<const double> values,
                            std::span<const double> grid);

//! Convenience overload: build the grid from `cfg`, then select.
double kde_select_bandwidth(std::span<const double> values,
                            const KdeConfig& cfg);

//! Per-point smoothed outscore-fraction estimates: for each point, a
//! bandwidth is selected on its own incorrect scores and the smoothed CDF is
//! read off at the correct score. Requires K >= 3 so each point has at least
//! two incorrect scores to select on.
std::vector<double> kde_chat(const ScoreMatrix& m, const KdeConfig& cfg);

//! Full KDE estimator: kde_chat followed by the power-mean extrapolation.
AccuracyCurve kde_extrapolate(const ScoreMatrix& m, const KdeConfig& cfg,
                              int k2);

}  // namespace accex
