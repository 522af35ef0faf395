#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace accex {

//! Score convention of an input file: canonical storage is higher-is-better,
//! distance-like inputs are negated on load.
enum class Orientation { HigherIsBetter, LowerIsBetter };

//! Scores of a classifier over a fixed sample of classes.
//!
//! Row i holds the scores of point i against every class in `class_ids`
//! (higher = more likely), with the correct class recorded per point. Every
//! class contributes exactly the same number of points r, so N = r * K.
//! Instances are immutable after construction and safe to share across
//! threads.
class ScoreMatrix {
 public:
  //! Validates and takes ownership; throws std::invalid_argument on a
  //! violated invariant (unknown correct class, unequal r, non-finite score).
  ScoreMatrix(std::vector<std::string> class_ids,
              std::vector<std::string> point_ids,
              std::vector<int> correct_class, Eigen::MatrixXd scores);

  int n_classes() const { return static_cast<int>(class_ids_.size()); }
  int n_points() const { return static_cast<int>(point_ids_.size()); }
  int points_per_class() const { return points_per_class_; }

  const std::vector<std::string>& class_ids() const { return class_ids_; }
  const std::vector<std::string>& point_ids() const { return point_ids_; }

  //! Column index of the correct class of the given point.
  int correct_class(int point) const { return correct_class_[point]; }
  double correct_score(int point) const {
    return scores_(point, correct_class_[point]);
  }
  const Eigen::MatrixXd& scores() const { return scores_; }

  //! Number of (point, incorrect class) pairs whose score exactly ties the
  //! correct score. Ties are legal input but count against the classifier in
  //! every strict comparison, so they are surfaced as a diagnostic.
  std::int64_t tie_count() const { return tie_count_; }

 private:
  std::vector<std::string> class_ids_;
  std::vector<std::string> point_ids_;
  std::vector<int> correct_class_;
  Eigen::MatrixXd scores_;
  int points_per_class_ = 0;
  std::int64_t tie_count_ = 0;
};

//! Reads the score CSV schema: header `point_id,correct_class,<id>,...`,
//! one row per point, scores as plain decimal literals. LowerIsBetter input
//! is negated so downstream code sees one orientation only. Parse and
//! validation errors carry the 1-based line number.
ScoreMatrix load_scores(const std::filesystem::path& path,
                        Orientation orientation = Orientation::HigherIsBetter);

//! Writes the same CSV schema with shortest round-trip number formatting, so
//! a save/load cycle reproduces the matrix bit for bit.
void save_scores(const ScoreMatrix& m, const std::filesystem::path& path);

//! Uniformly random k1-class restriction: keeps the sampled classes (in their
//! original column order), the points whose correct class survives, and the
//! score columns of the sampled classes. Deterministic given `seed`.
ScoreMatrix subsample_classes(const ScoreMatrix& m, int k1,
                              std::uint64_t seed);

}  // namespace accex
