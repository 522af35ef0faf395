#include "accex/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "accex/format.hpp"
#include "accex/rng.hpp"

namespace accex {

namespace {

constexpr std::uint64_t kSubsampleTag = 0x53554253ULL;  // "SUBS"
constexpr std::uint64_t kTrainTag = 0x54524e00ULL;      // "TRN"

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t");
  return s.substr(begin, end - begin + 1);
}

std::int64_t parse_int(const std::string& text, const std::string& what) {
  try {
    std::size_t pos = 0;
    const std::int64_t v = std::stoll(text, &pos);
    if (pos != text.size()) throw std::invalid_argument("");
    return v;
  } catch (...) {
    throw std::runtime_error(what + ": not an integer: '" + text + "'");
  }
}

ClassDist parse_class_dist(const std::string& v) {
  if (v == "gauss") return ClassDist::GaussianStd;
  if (v == "uniform-matched") return ClassDist::UniformMatched;
  if (v == "uniform-unit") return ClassDist::UniformUnit;
  throw std::runtime_error("unknown class distribution '" + v +
                           "' (expected gauss, uniform-matched or uniform-unit)");
}

PointDist parse_point_dist(const std::string& v) {
  if (v == "gauss") return PointDist::GaussianSpread;
  if (v == "uniform-matched") return PointDist::UniformSpreadMatched;
  if (v == "uniform-unit") return PointDist::UniformSpreadUnit;
  throw std::runtime_error("unknown point distribution '" + v +
                           "' (expected gauss, uniform-matched or uniform-unit)");
}

const char* class_dist_name(ClassDist d) {
  switch (d) {
    case ClassDist::GaussianStd: return "gauss";
    case ClassDist::UniformMatched: return "uniform-matched";
    case ClassDist::UniformUnit: return "uniform-unit";
  }
  return "?";
}

const char* point_dist_name(PointDist d) {
  switch (d) {
    case PointDist::GaussianSpread: return "gauss";
    case PointDist::UniformSpreadMatched: return "uniform-matched";
    case PointDist::UniformSpreadUnit: return "uniform-unit";
  }
  return "?";
}

}  // namespace

double rmse(const AccuracyCurve& predicted, const AccuracyCurve& truth,
            int k2) {
  if (k2 < 2) throw std::invalid_argument("rmse: k2 must be >= 2");
  if (predicted.k_max() < k2 || truth.k_max() < k2)
    throw std::invalid_argument("rmse: curves do not cover k = 2.." +
                                std::to_string(k2));
  double sum = 0.0;
  for (int k = 2; k <= k2; ++k) {
    const double d = predicted.at(k) - truth.at(k);
    sum += d * d;
  }
  return std::sqrt(sum / static_cast<double>(k2 - 1));
}

Quartiles quartiles(std::vector<double> values) {
  if (values.empty()) throw std::invalid_argument("quartiles: no values");
  std::sort(values.begin(), values.end());
  auto at = [&](double p) {
    const double h = p * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(h);
    if (lo + 1 >= values.size()) return values.back();
    return values[lo] + (h - static_cast<double>(lo)) * (values[lo + 1] - values[lo]);
  };
  return {at(0.25), at(0.5), at(0.75)};
}

ExperimentConfig parse_experiment_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path.string());
  return parse_experiment_config(in, path.string());
}

ExperimentConfig parse_experiment_config(std::istream& in,
                                         const std::string& name) {
  ExperimentConfig cfg;
  SimulationConfig sim;
  std::string source;
  bool sim_seed_set = false;

  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos)
      line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error(name + ":" + std::to_string(line_no) +
                               ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty())
      throw std::runtime_error(name + ":" + std::to_string(line_no) +
                               ": empty key or value");

    if (key == "source") {
      source = value;
    } else if (key == "file") {
      cfg.score_file = value;
    } else if (key == "orientation") {
      if (value == "higher") cfg.orientation = Orientation::HigherIsBetter;
      else if (value == "lower") cfg.orientation = Orientation::LowerIsBetter;
      else throw std::runtime_error(name + ": orientation must be higher or lower");
    } else if (key == "k1") {
      cfg.k1 = static_cast<int>(parse_int(value, key));
    } else if (key == "k2") {
      cfg.k2 = static_cast<int>(parse_int(value, key));
    } else if (key == "repetitions") {
      cfg.repetitions = static_cast<int>(parse_int(value, key));
    } else if (key == "seed") {
      cfg.master_seed = static_cast<std::uint64_t>(parse_int(value, key));
    } else if (key == "out_dir") {
      cfg.out_dir = value;
    } else if (key == "methods") {
      cfg.methods.clear();
      std::stringstream ss(value);
      std::string item;
      while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        if (item != "cleanex" && item != "kde" && item != "regression")
          throw std::runtime_error(name + ": unknown method '" + item + "'");
        cfg.methods.push_back(item);
      }
    } else if (key == "sim.d") {
      sim.dim = static_cast<int>(parse_int(value, key));
    } else if (key == "sim.classes") {
      sim.n_classes = static_cast<int>(parse_int(value, key));
    } else if (key == "sim.r") {
      sim.points_per_class = static_cast<int>(parse_int(value, key));
    } else if (key == "sim.sigma2") {
      sim.sigma2 = parse_double(value, key);
    } else if (key == "sim.class_dist") {
      sim.class_dist = parse_class_dist(value);
    } else if (key == "sim.point_dist") {
      sim.point_dist = parse_point_dist(value);
    } else if (key == "sim.seed") {
      sim.seed = static_cast<std::uint64_t>(parse_int(value, key));
      sim_seed_set = true;
    } else if (key == "cleanex.iters") {
      cfg.cleanex.iterations = static_cast<int>(parse_int(value, key));
    } else if (key == "cleanex.lr") {
      cfg.cleanex.learning_rate = parse_double(value, key);
    } else if (key == "cleanex.k_stride") {
      cfg.cleanex.k_stride = static_cast<int>(parse_int(value, key));
    } else if (key == "kde.grid") {
      cfg.kde.grid_size = static_cast<int>(parse_int(value, key));
    } else if (key == "regression.bases") {
      cfg.regression.n_bases = static_cast<int>(parse_int(value, key));
    } else if (key == "regression.ridge") {
      cfg.regression.ridge = parse_double(value, key);
    } else {
      throw std::runtime_error(name + ":" + std::to_string(line_no) +
                               ": unknown key '" + key + "'");
    }
  }

  if (source == "sim") {
    if (!sim_seed_set) sim.seed = cfg.master_seed;
    cfg.sim = sim;
  } else if (source == "file") {
    if (cfg.score_file.empty())
      throw std::runtime_error(name + ": source = file requires a file key");
  } else if (source.empty()) {
    throw std::runtime_error(name + ": missing source (sim or file)");
  } else {
    throw std::runtime_error(name + ": source must be sim or file");
  }
  return cfg;
}

namespace {

void validate_config(const ExperimentConfig& cfg, int n_classes) {
  if (cfg.k1 < 2 || cfg.k1 > cfg.k2 || cfg.k2 > n_classes)
    throw std::invalid_argument(
        "experiment: need 2 <= k1 <= k2 <= K (k1 = " + std::to_string(cfg.k1) +
        ", k2 = " + std::to_string(cfg.k2) + ", K = " + std::to_string(n_classes) +
        ")");
  if (cfg.repetitions < 1)
    throw std::invalid_argument("experiment: repetitions must be >= 1");
}

RepMethodResult fit_one_method(const std::string& method,
                               const ScoreMatrix& sub,
                               const std::vector<PointStats>& sub_stats,
                               const ExperimentConfig& cfg,
                               const AccuracyCurve& truth,
                               std::uint64_t train_seed) {
  RepMethodResult result;
  const auto start = std::chrono::steady_clock::now();
  try {
    std::optional<AccuracyCurve> curve;
    if (method == "cleanex") {
      const FeatureSet features = build_features(sub);
      const AccuracyCurve observed = observed_accuracy_curve(
          sub_stats, sub.n_classes(), sub.points_per_class(), sub.n_classes());
      TrainOptions opts;
      opts.iterations = cfg.cleanex.iterations;
      opts.learning_rate = cfg.cleanex.learning_rate;
      opts.k_stride = cfg.cleanex.k_stride;
      opts.seed = train_seed;
      auto [model, trace] = train(features, observed, opts);
      const Eigen::VectorXd chat = forward(model, features.rows);
      curve = extrapolate(
          std::span<const double>(chat.data(), static_cast<std::size_t>(chat.size())),
          cfg.k2);
    } else if (method == "kde") {
      curve = kde_extrapolate(sub, cfg.kde, cfg.k2);
    } else if (method == "regression") {
      const AccuracyCurve observed = observed_accuracy_curve(
          sub_stats, sub.n_classes(), sub.points_per_class(), sub.n_classes());
      const int bases = cfg.regression.n_bases > 0
                            ? cfg.regression.n_bases
                            : RegressionModel::default_bases(sub.n_classes());
      RegressionModel model(bases, cfg.regression.ridge);
      model = regression_fit(observed, std::move(model));
      curve = regression_extrapolate(model, cfg.k2);
    } else {
      throw std::invalid_argument("unknown method '" + method + "'");
    }
    result.rmse = rmse(*curve, truth, cfg.k2);
    result.clamp_count = curve->clamp_count();
    result.curve = std::move(curve);
  } catch (const std::exception& e) {
    result.error = e.what();
  }
  result.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  return result;
}

}  // namespace

ExperimentReport run_experiment(const ExperimentConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();

  std::optional<ScoreMatrix> full;
  if (cfg.sim.has_value()) {
    full = generate(*cfg.sim);
  } else {
    full = load_scores(cfg.score_file, cfg.orientation);
  }
  validate_config(cfg, full->n_classes());

  ExperimentReport report;
  report.config = cfg;
  report.tie_count = full->tie_count();

  {
    const auto stats = compute_rank_stats(*full);
    report.ground_truth = observed_accuracy_curve(
        stats, full->n_classes(), full->points_per_class(), cfg.k2);
  }

  for (int rep = 0; rep < cfg.repetitions; ++rep) {
    RepetitionResult rep_result;
    const std::uint64_t sub_seed =
        SplitMix64::substream(cfg.master_seed,
                              {kSubsampleTag, static_cast<std::uint64_t>(rep)})
            .next();
    const std::uint64_t train_seed =
        SplitMix64::substream(cfg.master_seed,
                              {kTrainTag, static_cast<std::uint64_t>(rep)})
            .next();
    const ScoreMatrix sub = subsample_classes(*full, cfg.k1, sub_seed);
    rep_result.tie_count = sub.tie_count();
    const auto sub_stats = compute_rank_stats(sub);
    for (const auto& method : cfg.methods)
      rep_result.methods[method] = fit_one_method(
          method, sub, sub_stats, cfg, *report.ground_truth, train_seed);
    report.repetitions.push_back(std::move(rep_result));
  }

  for (const auto& method : cfg.methods) {
    MethodSummary summary;
    std::vector<double> rmses;
    for (const auto& rep : report.repetitions) {
      const auto& r = rep.methods.at(method);
      if (r.error.empty()) rmses.push_back(r.rmse);
      else ++summary.failures;
    }
    summary.successes = static_cast<int>(rmses.size());
    if (!rmses.empty()) {
      const Quartiles q = quartiles(rmses);
      summary.q1 = q.q1;
      summary.median = q.median;
      summary.q3 = q.q3;
    }
    report.summary[method] = summary;
  }

  report.seconds_total =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  return report;
}

namespace {

nlohmann::json curve_to_json(const AccuracyCurve& curve) {
  nlohmann::json j;
  j["k_min"] = 2;
  j["k_max"] = curve.k_max();
  j["source"] = to_string(curve.source());
  j["clamp_count"] = curve.clamp_count();
  j["values"] = curve.values();
  return j;
}

nlohmann::json config_to_json(const ExperimentConfig& cfg) {
  nlohmann::json j;
  j["source"] = cfg.sim.has_value() ? "sim" : "file";
  if (cfg.sim.has_value()) {
    const auto& s = *cfg.sim;
    j["sim"] = {{"d", s.dim},
                {"classes", s.n_classes},
                {"r", s.points_per_class},
                {"sigma2", s.sigma2},
                {"class_dist", class_dist_name(s.class_dist)},
                {"point_dist", point_dist_name(s.point_dist)},
                {"seed", s.seed}};
  } else {
    j["file"] = cfg.score_file.string();
    j["orientation"] =
        cfg.orientation == Orientation::HigherIsBetter ? "higher" : "lower";
  }
  j["k1"] = cfg.k1;
  j["k2"] = cfg.k2;
  j["repetitions"] = cfg.repetitions;
  j["methods"] = cfg.methods;
  j["seed"] = cfg.master_seed;
  j["cleanex"] = {{"iters", cfg.cleanex.iterations},
                  {"lr", cfg.cleanex.learning_rate},
                  {"k_stride", cfg.cleanex.k_stride}};
  j["kde"] = {{"grid", cfg.kde.grid_size}};
  j["regression"] = {{"bases", cfg.regression.n_bases},
                     {"ridge", cfg.regression.ridge}};
  return j;
}

}  // namespace

std::string report_to_json(const ExperimentReport& report) {
  nlohmann::json j;
  j["config"] = config_to_json(report.config);
  if (report.ground_truth.has_value())
    j["ground_truth"] = curve_to_json(*report.ground_truth);
  j["tie_count"] = report.tie_count;
  j["seconds_total"] = report.seconds_total;

  nlohmann::json reps = nlohmann::json::array();
  for (std::size_t i = 0; i < report.repetitions.size(); ++i) {
    const auto& rep = report.repetitions[i];
    nlohmann::json jr;
    jr["rep"] = i;
    jr["tie_count"] = rep.tie_count;
    nlohmann::json methods;
    for (const auto& [name, r] : rep.methods) {
      nlohmann::json jm;
      if (r.error.empty()) {
        jm["rmse"] = r.rmse;
        jm["clamp_count"] = r.clamp_count;
        jm["csv"] = "rep" + std::to_string(i) + "_" + name + ".csv";
        jm["error"] = nullptr;
      } else {
        jm["error"] = r.error;
      }
      jm["seconds"] = r.seconds;
      methods[name] = jm;
    }
    jr["methods"] = methods;
    reps.push_back(jr);
  }
  j["reps"] = reps;

  nlohmann::json summary;
  for (const auto& [name, s] : report.summary) {
    nlohmann::json js;
    js["failures"] = s.failures;
    js["successes"] = s.successes;
    if (s.successes > 0) {
      js["q1"] = s.q1;
      js["median"] = s.median;
      js["q3"] = s.q3;
    } else {
      js["q1"] = nullptr;
      js["median"] = nullptr;
      js["q3"] = nullptr;
    }
    summary[name] = js;
  }
  j["summary"] = summary;

  return j.dump(2) + "\n";
}

void write_curve_csv(const AccuracyCurve& curve,
                     const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write curve file: " + path.string());
  out << "k,accuracy\n";
  for (int k = 2; k <= curve.k_max(); ++k)
    out << k << ',' << format_double(curve.at(k)) << '\n';
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

void write_report(const ExperimentReport& report,
                  const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  {
    std::ofstream out(out_dir / "report.json", std::ios::binary);
    if (!out)
      throw std::runtime_error("cannot write report to " + out_dir.string());
    out << report_to_json(report);
  }
  for (std::size_t i = 0; i < report.repetitions.size(); ++i) {
    for (const auto& [name, r] : report.repetitions[i].methods) {
      if (!r.curve.has_value()) continue;
      write_curve_csv(*r.curve,
                      out_dir / ("rep" + std::to_string(i) + "_" + name + ".csv"));
    }
  }
}

}  // namespace accex
