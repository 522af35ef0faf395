#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <filesystem>
#include <span>
#include <utility>
#include <vector>

#include "accex/accuracy.hpp"
#include "accex/score_matrix.hpp"

namespace accex {

//! Network inputs: one row per point, the correct score first and the
//! incorrect scores after it sorted ascending, all entries z-scored with a
//! single global mean and standard deviation (stored for reuse at
//! prediction time).
struct FeatureSet {
  Eigen::MatrixXd rows;  // N x k1, standardized
  double mean = 0.0;
  double stddev = 1.0;

  int width() const { return static_cast<int>(rows.cols()); }
  int n_points() const { return static_cast<int>(rows.rows()); }
};

//! Builds features and computes the standardization constants from `m`.
//! Throws std::runtime_error when all scores are equal (zero variance).
FeatureSet build_features(const ScoreMatrix& m);

//! Builds features standardized with externally supplied constants (e.g.
//! the ones stored in a trained model).
FeatureSet build_features(const ScoreMatrix& m, double mean, double stddev);

//! Feedforward estimator of the per-point outscore fractions:
//! k1 -> 512 -> 128 -> 1, rectified-linear hidden activations, logistic
//! output. Weights are plain matrices so training, checking and
//! serialization can address them directly.
struct CleanexModel {
  static constexpr int kHidden1 = 512;
  static constexpr int kHidden2 = 128;

  Eigen::MatrixXd w1;     // kHidden1 x k1
  Eigen::VectorXd b1;     // kHidden1
  Eigen::MatrixXd w2;     // kHidden2 x kHidden1
  Eigen::VectorXd b2;     // kHidden2
  Eigen::RowVectorXd w3;  // 1 x kHidden2
  double b3 = 0.0;

  // Standardization constants of the features the model was trained on.
  double feat_mean = 0.0;
  double feat_stddev = 1.0;

  int input_width() const { return static_cast<int>(w1.cols()); }
};

//! Parameter gradients of the training loss, in model layout.
struct CleanexGradients {
  Eigen::MatrixXd w1;
  Eigen::VectorXd b1;
  Eigen::MatrixXd w2;
  Eigen::VectorXd b2;
  Eigen::RowVectorXd w3;
  double b3 = 0.0;
  double loss = 0.0;
};

struct TrainOptions {
  int iterations = 10000;
  double learning_rate = 1e-4;
  std::uint64_t seed = 0;
  //! Evaluate the loss on k = 2, 2+stride, ... instead of every k; 1 keeps
  //! the full objective and is the default everywhere.
  int k_stride = 1;
};

struct TrainingTrace {
  std::vector<double> losses;  // loss at the top of each iteration
  double final_loss = 0.0;
  double seconds = 0.0;
};

//! Fresh model: symmetric-uniform weights scaled by sqrt(6/(fan_in+fan_out))
//! per layer, zero biases; deterministic given `seed`.
CleanexModel init_model(int input_width, std::uint64_t seed, double feat_mean,
                        double feat_stddev);

//! Estimated outscore fractions for each feature row, clamped to
//! [1e-12, 1 - 1e-12] so saturated sigmoids stay inside the open interval.
Eigen::VectorXd forward(const CleanexModel& model, const Eigen::MatrixXd& rows);

//! Mean over the evaluated k of (mean_x chat_x^(k-1) - observed(k))^2.
double loss(std::span<const double> chat, const AccuracyCurve& observed,
            int k_stride = 1);

//! Loss and its analytic parameter gradients at the current weights.
CleanexGradients loss_gradients(const CleanexModel& model,
                                const Eigen::MatrixXd& rows,
                                const AccuracyCurve& observed, int k_stride = 1);

//! Full-batch adaptive-moment training (decay 0.9/0.999, stabilizer 1e-8,
//! bias correction) for `opts.iterations` steps. Deterministic given the
//! seed; aborts with the iteration number if the loss or a gradient turns
//! non-finite.
std::pair<CleanexModel, TrainingTrace> train(const FeatureSet& features,
                                             const AccuracyCurve& observed,
                                             const TrainOptions& opts);

//! Power-mean extrapolation of estimated outscore fractions to k = 2..k2.
//! Inputs must lie in the open interval (0, 1).
AccuracyCurve extrapolate(std::span<const double> chat, int k2);

//! Versioned binary model file: magic "CLNX1", layer-dimension header,
//! standardization constants, then the weights as little-endian doubles.
void save_model(const CleanexModel& model, const std::filesystem::path& path);
CleanexModel load_model(const std::filesystem::path& path);

}  // namespace accex
