#pragma once

#include <Eigen/Core>
#include <vector>

#include "accex/accuracy.hpp"

namespace accex {

//! Gauss-Legendre nodes and weights transplanted to [0, 1].
struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

QuadratureRule gauss_legendre_01(int n);

//! Nonparametric regression of the discriminability function on Gaussian
//! bumps b_j(u) = exp(-(u - c_j)^2 / (2 s^2)) with centers c_j = (j - 1/2)/J
//! and width s = 1/J. The predicted accuracy at k is linear in the
//! coefficients: 1 - sum_j beta_j * M_kj with
//! M_kj = (k-1) * integral b_j(u) u^(k-2) du.
class RegressionModel {
 public:
  //! Canonical basis of `n_bases` bumps; `ridge` damps the near-collinear
  //! normal equations.
  explicit RegressionModel(int n_bases, double ridge = 1e-6);

  //! Custom bump width, for conditioning experiments.
  RegressionModel(int n_bases, double width, double ridge);

  //! Default basis count as a function of the observed-class count:
  //! clamp(k1 / 10, 5, 25).
  static int default_bases(int k1);

  int n_bases() const { return static_cast<int>(centers_.size()); }
  double width() const { return width_; }
  double ridge() const { return ridge_; }
  const std::vector<double>& centers() const { return centers_; }

  bool fitted() const { return beta_.size() > 0; }
  const Eigen::VectorXd& beta() const { return beta_; }
  void set_beta(Eigen::VectorXd beta);

  //! Design row for class count k: M_kj for each basis j, evaluated by
  //! fixed 256-node Gauss-Legendre quadrature.
  Eigen::RowVectorXd basis_moments(int k) const;

  //! 1 - predicted accuracy for k = 2..k2, before any clamping. Linear in
  //! beta by construction.
  Eigen::VectorXd deviation(int k2) const;

  static constexpr int kQuadratureNodes = 256;

 private:
  std::vector<double> centers_;
  double width_;
  double ridge_;
  Eigen::VectorXd beta_;
};

//! Least-squares fit of the basis coefficients to an observed curve on
//! k = 2..k1 with ridge penalty `model.ridge()`. With a zero ridge a
//! rank-deficient system is refused (std::runtime_error) rather than solved
//! in the null space.
RegressionModel regression_fit(const AccuracyCurve& observed,
                               RegressionModel model);

//! Predicted curve for k = 2..k2, clamped into [0, 1]; the number of clamped
//! entries is recorded on the returned curve.
AccuracyCurve regression_extrapolate(const RegressionModel& model, int k2);

}  // namespace accex
