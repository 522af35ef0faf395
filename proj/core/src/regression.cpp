#include "accex/regression.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace accex {

QuadratureRule gauss_legendre_01(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre_01: n must be >= 1");
  QuadratureRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);

  // Roots of the Legendre polynomial on (-1, 1) by Newton iteration from the
  // Chebyshev-like initial guesses, then mapped to (0, 1).
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int j = 2; j <= n; ++j) {
        const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double step = p1 / dp;
      x -= step;
      if (std::abs(step) < 1e-15) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = 0.5 * (1.0 - x);  // descending x = ascending node
    rule.weights[i] = 0.5 * w;
    rule.nodes[n - 1 - i] = 0.5 * (1.0 + x);
    rule.weights[n - 1 - i] = 0.5 * w;
  }
  return rule;
}

namespace {

const QuadratureRule& default_rule() {
  static const QuadratureRule rule =
      gauss_legendre_01(RegressionModel::kQuadratureNodes);
  return rule;
}

}  // namespace

RegressionModel::RegressionModel(int n_bases, double ridge)
    : RegressionModel(n_bases, 1.0 / n_bases, ridge) {}

RegressionModel::RegressionModel(int n_bases, double width, double ridge)
    : width_(width), ridge_(ridge) {
  if (n_bases < 2)
    throw std::invalid_argument("RegressionModel: need at least 2 bases");
  if (!(width > 0.0))
    throw std::invalid_argument("RegressionModel: width must be positive");
  if (!(ridge >= 0.0))
    throw std::invalid_argument("RegressionModel: ridge must be >= 0");
  centers_.resize(n_bases);
  for (int j = 0; j < n_bases; ++j)
    centers_[j] = (j + 0.5) / static_cast<double>(n_bases);
}

int RegressionModel::default_bases(int k1) {
  return std::clamp(k1 / 10, 5, 25);
}

void RegressionModel::set_beta(Eigen::VectorXd beta) {
  if (beta.size() != n_bases())
    throw std::invalid_argument("set_beta: wrong coefficient count");
  beta_ = std::move(beta);
}

Eigen::RowVectorXd RegressionModel::basis_moments(int k) const {
  if (k < 2) throw std::invalid_argument("basis_moments: k must be >= 2");
  const auto& rule = default_rule();
  Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(n_bases());
  const double inv_two_s2 = 1.0 / (2.0 * width_ * width_);
  for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
    const double u = rule.nodes[q];
    const double factor =
        rule.weights[q] * (k - 1.0) * std::pow(u, static_cast<double>(k - 2));
    if (factor == 0.0) continue;
    for (int j = 0; j < n_bases(); ++j) {
      const double d = u - centers_[j];
      row[j] += factor * std::exp(-d * d * inv_two_s2);
    }
  }
  return row;
}

Eigen::VectorXd RegressionModel::deviation(int k2) const {
  if (!fitted()) throw std::logic_error("deviation: model has no coefficients");
  if (k2 < 2) throw std::invalid_argument("deviation: k2 must be >= 2");

  // The basis part of the integrand does not depend on k, so fold beta and
  // the quadrature weights into one value per node up front.
  const auto& rule = default_rule();
  const auto n_nodes = static_cast<int>(rule.nodes.size());
  Eigen::VectorXd node_value(n_nodes);
  const double inv_two_s2 = 1.0 / (2.0 * width_ * width_);
  for (int q = 0; q < n_nodes; ++q) {
    double b = 0.0;
    for (int j = 0; j < n_bases(); ++j) {
      const double d = rule.nodes[q] - centers_[j];
      b += beta_[j] * std::exp(-d * d * inv_two_s2);
    }
    node_value[q] = rule.weights[q] * b;
  }

  Eigen::VectorXd dev(k2 - 1);
  for (int k = 2; k <= k2; ++k) {
    double sum = 0.0;
    for (int q = 0; q < n_nodes; ++q)
      sum += node_value[q] * std::pow(rule.nodes[q], static_cast<double>(k - 2));
    dev[k - 2] = (k - 1.0) * sum;
  }
  return dev;
}

RegressionModel regression_fit(const AccuracyCurve& observed,
                               RegressionModel model) {
  const int k1 = observed.k_max();
  const int n_rows = k1 - 1;
  const int n_cols = model.n_bases();

  Eigen::MatrixXd design(n_rows, n_cols);
  Eigen::VectorXd target(n_rows);
  for (int k = 2; k <= k1; ++k) {
    design.row(k - 2) = model.basis_moments(k);
    target[k - 2] = 1.0 - observed.at(k);
  }

  if (model.ridge() > 0.0) {
    // Augmented least squares: minimize |design b - target|^2 + ridge |b|^2.
    Eigen::MatrixXd aug(n_rows + n_cols, n_cols);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n_rows + n_cols);
    aug.topRows(n_rows) = design;
    aug.bottomRows(n_cols) =
        std::sqrt(model.ridge()) * Eigen::MatrixXd::Identity(n_cols, n_cols);
    rhs.head(n_rows) = target;
    model.set_beta(aug.colPivHouseholderQr().solve(rhs));
  } else {
    auto qr = design.colPivHouseholderQr();
    if (qr.rank() < n_cols)
      throw std::runtime_error(
          "regression_fit: singular system with zero ridge (rank " +
          std::to_string(qr.rank()) + " of " + std::to_string(n_cols) +
          "); set ridge > 0");
    model.set_beta(qr.solve(target));
  }
  return model;
}

AccuracyCurve regression_extrapolate(const RegressionModel& model, int k2) {
  const Eigen::VectorXd dev = model.deviation(k2);
  std::vector<double> values(k2 - 1);
  int clamped = 0;
  for (int i = 0; i < dev.size(); ++i) {
    const double raw = 1.0 - dev[i];
    values[i] = std::clamp(raw, 0.0, 1.0);
    if (values[i] != raw) ++clamped;
  }
  return AccuracyCurve(std::move(values), CurveSource::regression, clamped);
}

}  // namespace accex
