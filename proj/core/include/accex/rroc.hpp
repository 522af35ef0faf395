#pragma once

#include <vector>

#include "accex/accuracy.hpp"

namespace accex {

//! Averaged reversed ROC sampled on a grid of reversed-FPR values u.
//! Values are fractions of points, hence in [0, 1] and nondecreasing in u.
struct RRocCurve {
  std::vector<double> grid;
  std::vector<double> values;
};

//! Reversed ROC of a single point with outscore fraction c, evaluated at u:
//! the step function that is 1 iff u > 1 - c.
bool rroc_point(double c, double u);

//! Fraction of points whose step has switched on at each grid value.
//! The grid must be sorted and contained in [0, 1].
RRocCurve rroc_average(const std::vector<PointStats>& stats,
                       const std::vector<double>& grid);

//! Area under the averaged reversed ROC; equals the mean outscore fraction
//! exactly (the step functions integrate to their thresholds' complements),
//! and equals the observed two-class accuracy.
double reversed_auc(const std::vector<PointStats>& stats);

//! Empirical discriminability D(u): fraction of points with C <= u. Equals
//! 1 - rroc_average at 1 - u.
double discriminability(const std::vector<PointStats>& stats, double u);

//! k-class accuracy implied by the empirical discriminability step function:
//! 1 - (k-1) * integral of D(u) u^(k-2) du, integrated piecewise-exactly over
//! the constancy intervals of D (no quadrature error).
double accuracy_from_discriminability(const std::vector<PointStats>& stats,
                                      int k);

//! n equally spaced values spanning [0, 1] inclusive (default display grid).
std::vector<double> uniform_grid(int n = 513);

}  // namespace accex
