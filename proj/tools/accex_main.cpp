// accex: predict a classifier's accuracy on large class sets from its scores
// on a small pilot sample of classes.

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <memory>
#include <span>
#include <string>

#include "accex/accuracy.hpp"
#include "accex/cleanex.hpp"
#include "accex/experiment.hpp"
#include "accex/format.hpp"
#include "accex/kde.hpp"
#include "accex/regression.hpp"
#include "accex/rroc.hpp"
#include "accex/simulation.hpp"

namespace {

using namespace accex;

Orientation parse_orientation(const std::string& v) {
  if (v == "higher") return Orientation::HigherIsBetter;
  if (v == "lower") return Orientation::LowerIsBetter;
  throw CLI::ValidationError("--orientation", "must be 'higher' or 'lower'");
}

// Output sink: a file path or '-' for stdout.
class Sink {
 public:
  explicit Sink(const std::string& path) {
    if (path != "-") {
      file_.open(path, std::ios::binary);
      if (!file_) throw std::runtime_error("cannot write to " + path);
    }
  }
  std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

 private:
  std::ofstream file_;
};

ScoreMatrix load_input(const std::string& path, const std::string& orientation) {
  ScoreMatrix m = load_scores(path, parse_orientation(orientation));
  if (m.tie_count() > 0)
    std::cerr << "warning: " << m.tie_count()
              << " incorrect score(s) tie their correct score exactly; "
                 "ties count against the classifier\n";
  return m;
}

void emit_curve(const AccuracyCurve& curve, const std::string& out) {
  Sink sink(out);
  sink.stream() << "k,accuracy\n";
  for (int k = 2; k <= curve.k_max(); ++k)
    sink.stream() << k << ',' << format_double(curve.at(k)) << '\n';
}

struct CurveArgs {
  std::string in, orientation = "higher", out = "-";
  int k_max = 0;
  bool oracle = false;
  std::uint64_t max_subsets = 1000000;
};

int run_curve(const CurveArgs& a) {
  const ScoreMatrix m = load_input(a.in, a.orientation);
  const int k_max = a.k_max > 0 ? a.k_max : m.n_classes();
  if (a.oracle) {
    std::vector<double> values;
    for (int k = 2; k <= k_max; ++k)
      values.push_back(brute_force_accuracy(m, k, a.max_subsets));
    emit_curve(AccuracyCurve(std::move(values), CurveSource::oracle), a.out);
  } else {
    const auto stats = compute_rank_stats(m);
    emit_curve(observed_accuracy_curve(stats, m.n_classes(),
                                       m.points_per_class(), k_max),
               a.out);
  }
  return 0;
}

struct RRocArgs {
  std::string in, orientation = "higher", out = "-";
  int grid = 513;
};

int run_rroc(const RRocArgs& a) {
  const ScoreMatrix m = load_input(a.in, a.orientation);
  const auto stats = compute_rank_stats(m);
  const auto curve = rroc_average(stats, uniform_grid(a.grid));
  {
    Sink sink(a.out);
    sink.stream() << "u,rroc_avg,discriminability\n";
    for (std::size_t i = 0; i < curve.grid.size(); ++i)
      sink.stream() << format_double(curve.grid[i]) << ','
                    << format_double(curve.values[i]) << ','
                    << format_double(discriminability(stats, curve.grid[i]))
                    << '\n';
  }
  std::cout << "rAUC=" << format_double(reversed_auc(stats)) << '\n';
  return 0;
}

struct FitArgs {
  std::string method, in, orientation = "higher", out = "-", model_out;
  int k2 = 0;
  // cleanex
  int iters = 10000;
  double lr = 1e-4;
  std::uint64_t seed = 0;
  int k_stride = 1;
  // kde
  int kde_grid = 32;
  // regression
  int bases = 0;
  double ridge = 1e-6;
};

int run_fit(const FitArgs& a) {
  const ScoreMatrix m = load_input(a.in, a.orientation);
  const int k2 = a.k2 > 0 ? a.k2 : m.n_classes();

  if (a.method == "cleanex") {
    const FeatureSet features = build_features(m);
    const auto stats = compute_rank_stats(m);
    const AccuracyCurve observed = observed_accuracy_curve(
        stats, m.n_classes(), m.points_per_class(), m.n_classes());
    TrainOptions opts;
    opts.iterations = a.iters;
    opts.learning_rate = a.lr;
    opts.seed = a.seed;
    opts.k_stride = a.k_stride;
    auto [model, trace] = train(features, observed, opts);
    std::cerr << "trained " << a.iters << " iterations in "
              << format_double(trace.seconds)
              << " s, final loss " << format_double(trace.final_loss) << '\n';
    if (!a.model_out.empty()) save_model(model, a.model_out);
    const Eigen::VectorXd chat = forward(model, features.rows);
    emit_curve(extrapolate(std::span<const double>(
                               chat.data(), static_cast<std::size_t>(chat.size())),
                           k2),
               a.out);
  } else if (a.method == "kde") {
    KdeConfig cfg;
    cfg.grid_size = a.kde_grid;
    emit_curve(kde_extrapolate(m, cfg, k2), a.out);
  } else if (a.method == "regression") {
    const auto stats = compute_rank_stats(m);
    const AccuracyCurve observed = observed_accuracy_curve(
        stats, m.n_classes(), m.points_per_class(), m.n_classes());
    const int bases =
        a.bases > 0 ? a.bases : RegressionModel::default_bases(m.n_classes());
    RegressionModel model(bases, a.ridge);
    model = regression_fit(observed, std::move(model));
    const AccuracyCurve curve = regression_extrapolate(model, k2);
    if (curve.clamp_count() > 0)
      std::cerr << "warning: " << curve.clamp_count()
                << " prediction(s) clamped into [0, 1]\n";
    emit_curve(curve, a.out);
  } else {
    throw CLI::ValidationError("--method", "must be cleanex, kde or regression");
  }
  return 0;
}

struct ExtrapolateArgs {
  std::string model, in, orientation = "higher", out = "-";
  int k2 = 0;
};

int run_extrapolate(const ExtrapolateArgs& a) {
  const CleanexModel model = load_model(a.model);
  const ScoreMatrix m = load_input(a.in, a.orientation);
  if (m.n_classes() != model.input_width())
    throw std::runtime_error("score file has " + std::to_string(m.n_classes()) +
                             " classes but the model expects " +
                             std::to_string(model.input_width()));
  const FeatureSet features =
      build_features(m, model.feat_mean, model.feat_stddev);
  const Eigen::VectorXd chat = forward(model, features.rows);
  emit_curve(extrapolate(std::span<const double>(
                             chat.data(), static_cast<std::size_t>(chat.size())),
                         a.k2),
             a.out);
  return 0;
}

struct SimulateArgs {
  int d = 5, classes = 100, r = 10;
  double sigma2 = 0.1;
  std::string class_dist = "gauss", point_dist = "gauss", out;
  std::uint64_t seed = 0;
};

int run_simulate(const SimulateArgs& a) {
  SimulationConfig cfg;
  cfg.dim = a.d;
  cfg.n_classes = a.classes;
  cfg.points_per_class = a.r;
  cfg.sigma2 = a.sigma2;
  cfg.seed = a.seed;
  if (a.class_dist == "gauss") cfg.class_dist = ClassDist::GaussianStd;
  else if (a.class_dist == "uniform-matched") cfg.class_dist = ClassDist::UniformMatched;
  else if (a.class_dist == "uniform-unit") cfg.class_dist = ClassDist::UniformUnit;
  else throw CLI::ValidationError("--class-dist", "unknown distribution");
  if (a.point_dist == "gauss") cfg.point_dist = PointDist::GaussianSpread;
  else if (a.point_dist == "uniform-matched") cfg.point_dist = PointDist::UniformSpreadMatched;
  else if (a.point_dist == "uniform-unit") cfg.point_dist = PointDist::UniformSpreadUnit;
  else throw CLI::ValidationError("--point-dist", "unknown distribution");

  save_scores(generate(cfg), a.out);
  return 0;
}

int run_evaluate(const std::string& config_path) {
  const ExperimentConfig cfg = parse_experiment_config(config_path);
  const ExperimentReport report = run_experiment(cfg);
  write_report(report, cfg.out_dir);

  bool all_ok = true;
  for (const auto& [name, s] : report.summary) {
    std::cout << name << ": ";
    if (s.successes > 0)
      std::cout << "median RMSE " << format_double(s.median) << " (q1 "
                << format_double(s.q1) << ", q3 " << format_double(s.q3) << ")";
    else
      std::cout << "no successful repetition";
    if (s.failures > 0) {
      std::cout << ", " << s.failures << " failure(s)";
      all_ok = false;
    }
    std::cout << '\n';
  }
  std::cout << "report written to "
            << (cfg.out_dir / "report.json").string() << '\n';
  return all_ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multiclass accuracy extrapolation from pilot class samples"};
  app.require_subcommand(1);

  CurveArgs curve_args;
  auto* curve = app.add_subcommand(
      "curve", "Observed accuracy for every candidate-set size k");
  curve->add_option("--in", curve_args.in, "score CSV")->required();
  curve->add_option("--orientation", curve_args.orientation,
                    "score orientation: higher|lower");
  curve->add_option("--k-max", curve_args.k_max, "largest k (default: K)");
  curve->add_flag("--oracle", curve_args.oracle,
                  "average over explicit class subsets instead of the closed form");
  curve->add_option("--max-subsets", curve_args.max_subsets,
                    "enumeration cap for --oracle");
  curve->add_option("--out", curve_args.out, "output CSV ('-' = stdout)");

  RRocArgs rroc_args;
  auto* rroc = app.add_subcommand(
      "rroc", "Averaged reversed ROC, discriminability and rAUC");
  rroc->add_option("--in", rroc_args.in, "score CSV")->required();
  rroc->add_option("--orientation", rroc_args.orientation,
                   "score orientation: higher|lower");
  rroc->add_option("--grid", rroc_args.grid, "number of grid values");
  rroc->add_option("--out", rroc_args.out, "output CSV ('-' = stdout)");

  FitArgs fit_args;
  auto* fit = app.add_subcommand("fit", "Fit an estimator and extrapolate");
  fit->add_option("--method", fit_args.method, "cleanex|kde|regression")
      ->required();
  fit->add_option("--in", fit_args.in, "score CSV")->required();
  fit->add_option("--orientation", fit_args.orientation,
                  "score orientation: higher|lower");
  fit->add_option("--k2", fit_args.k2, "extrapolation target (default: K)");
  fit->add_option("--out", fit_args.out, "output CSV ('-' = stdout)");
  fit->add_option("--iters", fit_args.iters, "cleanex: training iterations");
  fit->add_option("--lr", fit_args.lr, "cleanex: learning rate");
  fit->add_option("--seed", fit_args.seed, "cleanex: init seed");
  fit->add_option("--k-stride", fit_args.k_stride,
                  "cleanex: evaluate the loss every k-stride-th k");
  fit->add_option("--model-out", fit_args.model_out,
                  "cleanex: write the trained model (CLNX1 binary)");
  fit->add_option("--kde-grid", fit_args.kde_grid, "kde: bandwidth grid size");
  fit->add_option("--bases", fit_args.bases,
                  "regression: basis count (0 = from k1)");
  fit->add_option("--ridge", fit_args.ridge, "regression: ridge penalty");

  ExtrapolateArgs ext_args;
  auto* ext = app.add_subcommand(
      "extrapolate", "Extrapolate a saved cleanex model to k2 classes");
  ext->add_option("--model", ext_args.model, "CLNX1 model file")->required();
  ext->add_option("--in", ext_args.in, "score CSV the model was fit on")
      ->required();
  ext->add_option("--orientation", ext_args.orientation,
                  "score orientation: higher|lower");
  ext->add_option("--k2", ext_args.k2, "extrapolation target")->required();
  ext->add_option("--out", ext_args.out, "output CSV ('-' = stdout)");

  SimulateArgs sim_args;
  auto* sim = app.add_subcommand("simulate",
                                 "Generate a synthetic score matrix");
  sim->add_option("--d", sim_args.d, "dimension");
  sim->add_option("--classes", sim_args.classes, "number of classes");
  sim->add_option("--r", sim_args.r, "points per class");
  sim->add_option("--sigma2", sim_args.sigma2, "point spread");
  sim->add_option("--class-dist", sim_args.class_dist,
                  "gauss|uniform-matched|uniform-unit");
  sim->add_option("--point-dist", sim_args.point_dist,
                  "gauss|uniform-matched|uniform-unit");
  sim->add_option("--seed", sim_args.seed, "generator seed");
  sim->add_option("--out", sim_args.out, "output score CSV")->required();

  std::string eval_config;
  auto* eval = app.add_subcommand(
      "evaluate", "Run a repetition study from a config file");
  eval->add_option("--config", eval_config, "experiment config")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (curve->parsed()) return run_curve(curve_args);
    if (rroc->parsed()) return run_rroc(rroc_args);
    if (fit->parsed()) return run_fit(fit_args);
    if (ext->parsed()) return run_extrapolate(ext_args);
    if (sim->parsed()) return run_simulate(sim_args);
    if (eval->parsed()) return run_evaluate(eval_config);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
