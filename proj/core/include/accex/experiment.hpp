#pragma once

#include <cstdint>
#include <filesystem>
#include <istream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "accex/accuracy.hpp"
#include "accex/cleanex.hpp"
#include "accex/kde.hpp"
#include "accex/regression.hpp"
#include "accex/simulation.hpp"

namespace accex {

struct CleanexParams {
  int iterations = 10000;
  double learning_rate = 1e-4;
  int k_stride = 1;
};

struct RegressionParams {
  int n_bases = 0;  // 0 = derive from k1
  double ridge = 1e-6;
};

//! One repetition study: take a data source, repeatedly subsample k1
//! classes, fit the requested estimators, extrapolate each to k2 and score
//! it against the observed full-sample curve.
struct ExperimentConfig {
  // Exactly one source: a simulation or a score file.
  std::optional<SimulationConfig> sim;
  std::filesystem::path score_file;
  Orientation orientation = Orientation::HigherIsBetter;

  int k1 = 0;
  int k2 = 0;
  int repetitions = 50;
  std::vector<std::string> methods;  // subset of {cleanex, kde, regression}

  CleanexParams cleanex;
  KdeConfig kde;
  RegressionParams regression;

  std::uint64_t master_seed = 0;
  std::filesystem::path out_dir = ".";
};

struct RepMethodResult {
  double rmse = 0.0;
  int clamp_count = 0;
  double seconds = 0.0;
  std::string error;  // empty = success
  std::optional<AccuracyCurve> curve;
};

struct RepetitionResult {
  std::int64_t tie_count = 0;
  std::map<std::string, RepMethodResult> methods;
};

struct MethodSummary {
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
  int failures = 0;
  int successes = 0;
};

struct ExperimentReport {
  ExperimentConfig config;
  std::optional<AccuracyCurve> ground_truth;
  std::vector<RepetitionResult> repetitions;
  std::map<std::string, MethodSummary> summary;
  std::int64_t tie_count = 0;  // on the full data
  double seconds_total = 0.0;
};

//! Root mean squared deviation between two curves over k = 2..k2.
double rmse(const AccuracyCurve& predicted, const AccuracyCurve& truth,
            int k2);

//! Lower quartile / median / upper quartile by linear interpolation between
//! order statistics.
struct Quartiles {
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
};
Quartiles quartiles(std::vector<double> values);

//! Flat `key = value` config format; '#' starts a comment. See the README
//! for the key list.
ExperimentConfig parse_experiment_config(const std::filesystem::path& path);
ExperimentConfig parse_experiment_config(std::istream& in,
                                         const std::string& name);

//! Runs the study in memory. Ground truth is computed once on the full
//! data; each repetition draws an independent subsample substream from the
//! master seed. A method failure is recorded on its repetition and does not
//! abort the others.
ExperimentReport run_experiment(const ExperimentConfig& cfg);

//! Serializes `report.json` plus one `rep<i>_<method>.csv` per fitted curve
//! into cfg.out_dir. The JSON is emitted with fixed field order so reruns
//! differ only in the timing fields.
void write_report(const ExperimentReport& report,
                  const std::filesystem::path& out_dir);

std::string report_to_json(const ExperimentReport& report);

//! Writes `k,accuracy` rows for k = 2..k_max.
void write_curve_csv(const AccuracyCurve& curve,
                     const std::filesystem::path& path);

}  // namespace accex
