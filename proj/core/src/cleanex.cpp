#include "accex/cleanex.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <vector>

#include "accex/rng.hpp"

namespace accex {

namespace {

constexpr double kChatEps = 1e-12;
constexpr double kBeta1 = 0.9;
constexpr double kBeta2 = 0.999;
constexpr double kAdamEps = 1e-8;

Eigen::MatrixXd raw_feature_rows(const ScoreMatrix& m) {
  const int n_cls = m.n_classes();
  Eigen::MatrixXd rows(m.n_points(), n_cls);
  std::vector<double> incorrect(n_cls - 1);
  for (int p = 0; p < m.n_points(); ++p) {
    int idx = 0;
    for (int c = 0; c < n_cls; ++c)
      if (c != m.correct_class(p)) incorrect[idx++] = m.scores()(p, c);
    std::sort(incorrect.begin(), incorrect.end());
    rows(p, 0) = m.correct_score(p);
    for (int c = 0; c + 1 < n_cls; ++c) rows(p, c + 1) = incorrect[c];
  }
  return rows;
}

template <typename Matrix>
void fill_glorot(Matrix& w, SplitMix64& rng) {
  const double limit =
      std::sqrt(6.0 / static_cast<double>(w.rows() + w.cols()));
  for (Eigen::Index r = 0; r < w.rows(); ++r)
    for (Eigen::Index c = 0; c < w.cols(); ++c)
      w(r, c) = rng.uniform(-limit, limit);
}

// The k values the objective averages over: 2, 2 + stride, ... up to k1.
std::vector<int> evaluated_k(int k1, int stride) {
  if (stride < 1) throw std::invalid_argument("k_stride must be >= 1");
  std::vector<int> ks;
  for (int k = 2; k <= k1; k += stride) ks.push_back(k);
  return ks;
}

// Accumulates mean_x chat_x^(k-1) for the evaluated k.
std::vector<double> power_means(const Eigen::VectorXd& chat,
                                const std::vector<int>& ks) {
  const int k1 = ks.back();
  std::vector<double> sums(ks.size(), 0.0);
  for (Eigen::Index x = 0; x < chat.size(); ++x) {
    const double c = chat[x];
    double p = c;  // c^(k-1) at k = 2
    std::size_t next = 0;
    for (int k = 2; k <= k1; ++k) {
      if (next < ks.size() && ks[next] == k) sums[next++] += p;
      p *= c;
    }
  }
  for (double& s : sums) s /= static_cast<double>(chat.size());
  return sums;
}

struct ForwardPass {
  Eigen::MatrixXd h1;     // N x 512, post-ReLU
  Eigen::MatrixXd h2;     // N x 128, post-ReLU
  Eigen::VectorXd chat;   // N, clamped sigmoid
};

ForwardPass run_forward(const CleanexModel& model,
                        const Eigen::MatrixXd& rows) {
  if (rows.cols() != model.input_width())
    throw std::invalid_argument(
        "forward: feature width " + std::to_string(rows.cols()) +
        " does not match the model input width " +
        std::to_string(model.input_width()));
  ForwardPass fp;
  fp.h1.noalias() = rows * model.w1.transpose();
  fp.h1.rowwise() += model.b1.transpose();
  fp.h1 = fp.h1.cwiseMax(0.0);
  fp.h2.noalias() = fp.h1 * model.w2.transpose();
  fp.h2.rowwise() += model.b2.transpose();
  fp.h2 = fp.h2.cwiseMax(0.0);
  Eigen::VectorXd z = fp.h2 * model.w3.transpose();
  z.array() += model.b3;
  fp.chat = (1.0 / (1.0 + (-z.array()).exp()))
                .cwiseMax(kChatEps)
                .cwiseMin(1.0 - kChatEps)
                .matrix();
  return fp;
}

double loss_from_means(const std::vector<double>& means,
                       const std::vector<int>& ks,
                       const AccuracyCurve& observed) {
  double sum = 0.0;
  for (std::size_t i = 0; i < ks.size(); ++i) {
    const double d = means[i] - observed.at(ks[i]);
    sum += d * d;
  }
  return sum / static_cast<double>(ks.size());
}

}  // namespace

FeatureSet build_features(const ScoreMatrix& m) {
  Eigen::MatrixXd raw = raw_feature_rows(m);
  const double mean = raw.mean();
  const double var = (raw.array() - mean).square().mean();
  const double stddev = std::sqrt(var);
  if (!(stddev > 0.0))
    throw std::runtime_error(
        "build_features: degenerate input (zero score variance)");
  FeatureSet fs;
  fs.mean = mean;
  fs.stddev = stddev;
  fs.rows = (raw.array() - mean) / stddev;
  return fs;
}

FeatureSet build_features(const ScoreMatrix& m, double mean, double stddev) {
  if (!(stddev > 0.0) || !std::isfinite(mean))
    throw std::invalid_argument("build_features: invalid standardization constants");
  FeatureSet fs;
  fs.mean = mean;
  fs.stddev = stddev;
  fs.rows = (raw_feature_rows(m).array() - mean) / stddev;
  return fs;
}

CleanexModel init_model(int input_width, std::uint64_t seed, double feat_mean,
                        double feat_stddev) {
  if (input_width < 2)
    throw std::invalid_argument("init_model: input width must be >= 2");
  CleanexModel model;
  model.w1.resize(CleanexModel::kHidden1, input_width);
  model.b1 = Eigen::VectorXd::Zero(CleanexModel::kHidden1);
  model.w2.resize(CleanexModel::kHidden2, CleanexModel::kHidden1);
  model.b2 = Eigen::VectorXd::Zero(CleanexModel::kHidden2);
  model.w3.resize(CleanexModel::kHidden2);
  model.b3 = 0.0;
  model.feat_mean = feat_mean;
  model.feat_stddev = feat_stddev;

  auto rng1 = SplitMix64::substream(seed, {0x57u, 1});
  auto rng2 = SplitMix64::substream(seed, {0x57u, 2});
  auto rng3 = SplitMix64::substream(seed, {0x57u, 3});
  fill_glorot(model.w1, rng1);
  fill_glorot(model.w2, rng2);
  fill_glorot(model.w3, rng3);
  return model;
}

Eigen::VectorXd forward(const CleanexModel& model,
                        const Eigen::MatrixXd& rows) {
  return run_forward(model, rows).chat;
}

double loss(std::span<const double> chat, const AccuracyCurve& observed,
            int k_stride) {
  if (chat.empty()) throw std::invalid_argument("loss: empty estimates");
  const auto ks = evaluated_k(observed.k_max(), k_stride);
  Eigen::VectorXd v(chat.size());
  for (std::size_t i = 0; i < chat.size(); ++i) v[static_cast<Eigen::Index>(i)] = chat[i];
  return loss_from_means(power_means(v, ks), ks, observed);
}

CleanexGradients loss_gradients(const CleanexModel& model,
                                const Eigen::MatrixXd& rows,
                                const AccuracyCurve& observed, int k_stride) {
  const auto ks = evaluated_k(observed.k_max(), k_stride);
  const auto n_points = rows.rows();

  ForwardPass fp = run_forward(model, rows);
  const std::vector<double> means = power_means(fp.chat, ks);

  CleanexGradients g;
  g.loss = loss_from_means(means, ks, observed);

  // d loss / d chat_x = sum_k w_k (k-1) chat_x^(k-2), with
  // w_k = 2 (mean_k - observed_k) / (|ks| N). Evaluated per point by Horner
  // over the dense power range.
  const int k1 = ks.back();
  std::vector<double> coeff(k1 - 1, 0.0);  // coeff[k-2] multiplies chat^(k-2)
  const double scale =
      2.0 / (static_cast<double>(ks.size()) * static_cast<double>(n_points));
  for (std::size_t i = 0; i < ks.size(); ++i) {
    const int k = ks[i];
    coeff[k - 2] = scale * (means[i] - observed.at(k)) * (k - 1.0);
  }

  Eigen::VectorXd dchat(n_points);
  for (Eigen::Index x = 0; x < n_points; ++x) {
    const double c = fp.chat[x];
    double acc = 0.0;
    for (int j = k1 - 2; j >= 0; --j) acc = acc * c + coeff[j];
    dchat[x] = acc;
  }

  // Backpropagation. The sigmoid derivative uses the clamped activations;
  // at the clamp bounds it is ~1e-12, indistinguishable from the saturated
  // true derivative.
  Eigen::VectorXd dz =
      dchat.array() * fp.chat.array() * (1.0 - fp.chat.array());

  g.w3.noalias() = dz.transpose() * fp.h2;
  g.b3 = dz.sum();

  Eigen::MatrixXd dh2 = dz * model.w3;
  dh2.array() *= (fp.h2.array() > 0.0).cast<double>();
  g.w2.noalias() = dh2.transpose() * fp.h1;
  g.b2 = dh2.colwise().sum().transpose();

  Eigen::MatrixXd dh1 = dh2 * model.w2;
  dh1.array() *= (fp.h1.array() > 0.0).cast<double>();
  g.w1.noalias() = dh1.transpose() * rows;
  g.b1 = dh1.colwise().sum().transpose();

  return g;
}

std::pair<CleanexModel, TrainingTrace> train(const FeatureSet& features,
                                             const AccuracyCurve& observed,
                                             const TrainOptions& opts) {
  if (opts.iterations < 0)
    throw std::invalid_argument("train: negative iteration count");
  if (!(opts.learning_rate > 0.0))
    throw std::invalid_argument("train: learning rate must be positive");
  if (observed.k_max() != features.width())
    throw std::invalid_argument(
        "train: observed curve must cover k = 2.." +
        std::to_string(features.width()) + " (the feature width)");

  const auto start = std::chrono::steady_clock::now();

  CleanexModel model = init_model(features.width(), opts.seed, features.mean,
                                  features.stddev);

  struct Moments {
    Eigen::MatrixXd w1, w2;
    Eigen::VectorXd b1, b2;
    Eigen::RowVectorXd w3;
    double b3 = 0.0;
  };
  Moments m1, m2;
  auto zero_like = [&](Moments& mo) {
    mo.w1 = Eigen::MatrixXd::Zero(model.w1.rows(), model.w1.cols());
    mo.b1 = Eigen::VectorXd::Zero(model.b1.size());
    mo.w2 = Eigen::MatrixXd::Zero(model.w2.rows(), model.w2.cols());
    mo.b2 = Eigen::VectorXd::Zero(model.b2.size());
    mo.w3 = Eigen::RowVectorXd::Zero(model.w3.size());
    mo.b3 = 0.0;
  };
  zero_like(m1);
  zero_like(m2);

  TrainingTrace trace;
  trace.losses.reserve(opts.iterations);

  for (int step = 1; step <= opts.iterations; ++step) {
    CleanexGradients g =
        loss_gradients(model, features.rows, observed, opts.k_stride);
    const bool finite = std::isfinite(g.loss) && g.w1.allFinite() &&
                        g.b1.allFinite() && g.w2.allFinite() &&
                        g.b2.allFinite() && g.w3.allFinite() &&
                        std::isfinite(g.b3);
    if (!finite)
      throw std::runtime_error("train: non-finite loss or gradient at iteration " +
                               std::to_string(step));
    trace.losses.push_back(g.loss);

    const double bc1 = 1.0 - std::pow(kBeta1, step);
    const double bc2 = 1.0 - std::pow(kBeta2, step);
    auto update = [&](auto& param, auto& mom1, auto& mom2, const auto& grad) {
      mom1 = kBeta1 * mom1 + (1.0 - kBeta1) * grad;
      mom2.array() = kBeta2 * mom2.array() + (1.0 - kBeta2) * grad.array().square();
      param.array() -= opts.learning_rate * (mom1.array() / bc1) /
                       ((mom2.array() / bc2).sqrt() + kAdamEps);
    };
    update(model.w1, m1.w1, m2.w1, g.w1);
    update(model.b1, m1.b1, m2.b1, g.b1);
    update(model.w2, m1.w2, m2.w2, g.w2);
    update(model.b2, m1.b2, m2.b2, g.b2);
    update(model.w3, m1.w3, m2.w3, g.w3);
    m1.b3 = kBeta1 * m1.b3 + (1.0 - kBeta1) * g.b3;
    m2.b3 = kBeta2 * m2.b3 + (1.0 - kBeta2) * g.b3 * g.b3;
    model.b3 -= opts.learning_rate * (m1.b3 / bc1) /
                (std::sqrt(m2.b3 / bc2) + kAdamEps);
  }

  {
    const Eigen::VectorXd chat = forward(model, features.rows);
    const auto ks = evaluated_k(observed.k_max(), opts.k_stride);
    trace.final_loss = loss_from_means(power_means(chat, ks), ks, observed);
  }
  trace.seconds = std::chrono::duration<double>(
                      std::chrono::steady_clock::now() - start)
                      .count();
  return {std::move(model), std::move(trace)};
}

AccuracyCurve extrapolate(std::span<const double> chat, int k2) {
  return curve_from_chat(chat, k2, CurveSource::cleanex);
}

// --- serialization ----------------------------------------------------------

namespace {

constexpr char kMagic[5] = {'C', 'L', 'N', 'X', '1'};

void put_u32(std::ostream& out, std::uint32_t v) {
  char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  out.write(b, 4);
}

void put_f64(std::ostream& out, double v) {
  std::uint64_t bits;
  std::memcpy(&bits, &v, 8);
  char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((bits >> (8 * i)) & 0xff);
  out.write(b, 8);
}

std::uint32_t get_u32(std::istream& in) {
  unsigned char b[4];
  in.read(reinterpret_cast<char*>(b), 4);
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
  return v;
}

double get_f64(std::istream& in) {
  unsigned char b[8];
  in.read(reinterpret_cast<char*>(b), 8);
  std::uint64_t bits = 0;
  for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  double v;
  std::memcpy(&v, &bits, 8);
  return v;
}

void put_matrix(std::ostream& out, const Eigen::MatrixXd& m) {
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) put_f64(out, m(r, c));
}

void get_matrix(std::istream& in, Eigen::MatrixXd& m) {
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) m(r, c) = get_f64(in);
}

}  // namespace

void save_model(const CleanexModel& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write model file: " + path.string());
  out.write(kMagic, sizeof(kMagic));
  put_u32(out, 3);  // layer count
  put_u32(out, static_cast<std::uint32_t>(model.input_width()));
  put_u32(out, CleanexModel::kHidden1);
  put_u32(out, CleanexModel::kHidden2);
  put_u32(out, 1);
  put_f64(out, model.feat_mean);
  put_f64(out, model.feat_stddev);
  put_matrix(out, model.w1);
  for (Eigen::Index i = 0; i < model.b1.size(); ++i) put_f64(out, model.b1[i]);
  put_matrix(out, model.w2);
  for (Eigen::Index i = 0; i < model.b2.size(); ++i) put_f64(out, model.b2[i]);
  for (Eigen::Index i = 0; i < model.w3.size(); ++i) put_f64(out, model.w3[i]);
  put_f64(out, model.b3);
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

CleanexModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open model file: " + path.string());
  char magic[5];
  in.read(magic, 5);
  if (!in || std::memcmp(magic, kMagic, 5) != 0)
    throw std::runtime_error("not a CLNX1 model file: " + path.string());
  const std::uint32_t layers = get_u32(in);
  const std::uint32_t in_width = get_u32(in);
  const std::uint32_t h1 = get_u32(in);
  const std::uint32_t h2 = get_u32(in);
  const std::uint32_t out_width = get_u32(in);
  if (layers != 3 || h1 != CleanexModel::kHidden1 ||
      h2 != CleanexModel::kHidden2 || out_width != 1 || in_width < 2)
    throw std::runtime_error("unsupported model layout in " + path.string());

  CleanexModel model;
  model.feat_mean = get_f64(in);
  model.feat_stddev = get_f64(in);
  model.w1.resize(h1, in_width);
  model.b1.resize(h1);
  model.w2.resize(h2, h1);
  model.b2.resize(h2);
  model.w3.resize(h2);
  get_matrix(in, model.w1);
  for (Eigen::Index i = 0; i < model.b1.size(); ++i) model.b1[i] = get_f64(in);
  get_matrix(in, model.w2);
  for (Eigen::Index i = 0; i < model.b2.size(); ++i) model.b2[i] = get_f64(in);
  for (Eigen::Index i = 0; i < model.w3.size(); ++i) model.w3[i] = get_f64(in);
  model.b3 = get_f64(in);
  if (!in) throw std::runtime_error("truncated model file: " + path.string());
  return model;
}

}  // namespace accex
