#include "accex/score_matrix.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include "accex/format.hpp"
#include "accex/rng.hpp"

namespace accex {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(std::move(field));
      field.clear();
    } else {
      field.push_back(c);
    }
  }
  fields.push_back(std::move(field));
  return fields;
}

[[noreturn]] void parse_fail(const std::filesystem::path& path, int line,
                             const std::string& message) {
  throw std::runtime_error(path.string() + ":" + std::to_string(line) + ": " +
                           message);
}

}  // namespace

ScoreMatrix::ScoreMatrix(std::vector<std::string> class_ids,
                         std::vector<std::string> point_ids,
                         std::vector<int> correct_class,
                         Eigen::MatrixXd scores)
    : class_ids_(std::move(class_ids)),
      point_ids_(std::move(point_ids)),
      correct_class_(std::move(correct_class)),
      scores_(std::move(scores)) {
  const int n_cls = static_cast<int>(class_ids_.size());
  const int n_pts = static_cast<int>(point_ids_.size());
  if (n_cls < 2) throw std::invalid_argument("ScoreMatrix: need at least 2 classes");
  if (n_pts == 0) throw std::invalid_argument("ScoreMatrix: no points");
  if (static_cast<int>(correct_class_.size()) != n_pts ||
      scores_.rows() != n_pts || scores_.cols() != n_cls)
    throw std::invalid_argument("ScoreMatrix: inconsistent dimensions");

  std::unordered_set<std::string> seen;
  for (const auto& id : class_ids_)
    if (!seen.insert(id).second)
      throw std::invalid_argument("ScoreMatrix: duplicate class id '" + id + "'");

  std::vector<int> per_class(n_cls, 0);
  for (int p = 0; p < n_pts; ++p) {
    const int c = correct_class_[p];
    if (c < 0 || c >= n_cls)
      throw std::invalid_argument("ScoreMatrix: correct class out of range for point '" +
                                  point_ids_[p] + "'");
    ++per_class[c];
  }
  for (int c = 0; c < n_cls; ++c) {
    if (per_class[c] != per_class[0])
      throw std::invalid_argument(
          "ScoreMatrix: unequal r (class '" + class_ids_[c] + "' has " +
          std::to_string(per_class[c]) + " points, class '" + class_ids_[0] +
          "' has " + std::to_string(per_class[0]) + ")");
  }
  points_per_class_ = per_class[0];
  if (points_per_class_ < 1)
    throw std::invalid_argument("ScoreMatrix: unequal r (a class has no points)");

  if (!scores_.allFinite())
    throw std::invalid_argument("ScoreMatrix: non-finite score");

  for (int p = 0; p < n_pts; ++p) {
    const double cs = scores_(p, correct_class_[p]);
    for (int c = 0; c < n_cls; ++c)
      if (c != correct_class_[p] && scores_(p, c) == cs) ++tie_count_;
  }
}

ScoreMatrix load_scores(const std::filesystem::path& path,
                        Orientation orientation) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open score file: " + path.string());

  std::string line;
  int line_no = 0;

  if (!std::getline(in, line)) parse_fail(path, 1, "empty file");
  ++line_no;
  if (!line.empty() && line.back() == '\r') line.pop_back();

  auto header = split_csv_line(line);
  if (header.size() < 4)
    parse_fail(path, line_no,
               "header must be point_id,correct_class,<id>,... with at least 2 classes");
  if (header[0] != "point_id" || header[1] != "correct_class")
    parse_fail(path, line_no, "header must start with point_id,correct_class");

  std::vector<std::string> class_ids(header.begin() + 2, header.end());
  std::unordered_map<std::string, int> class_index;
  for (int c = 0; c < static_cast<int>(class_ids.size()); ++c) {
    if (class_ids[c].empty()) parse_fail(path, line_no, "empty class id in header");
    if (!class_index.emplace(class_ids[c], c).second)
      parse_fail(path, line_no, "duplicate class id '" + class_ids[c] + "'");
  }
  const int n_cls = static_cast<int>(class_ids.size());

  std::vector<std::string> point_ids;
  std::vector<int> correct;
  std::vector<double> score_rows;

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto fields = split_csv_line(line);
    if (static_cast<int>(fields.size()) != n_cls + 2)
      parse_fail(path, line_no,
                 "expected " + std::to_string(n_cls + 2) + " fields, got " +
                     std::to_string(fields.size()));
    auto it = class_index.find(fields[1]);
    if (it == class_index.end())
      parse_fail(path, line_no, "correct class '" + fields[1] + "' not in header");
    point_ids.push_back(fields[0]);
    correct.push_back(it->second);
    for (int c = 0; c < n_cls; ++c) {
      double v;
      try {
        v = parse_double(fields[c + 2], "score");
      } catch (const std::exception& e) {
        parse_fail(path, line_no, e.what());
      }
      score_rows.push_back(orientation == Orientation::LowerIsBetter ? -v : v);
    }
  }
  if (point_ids.empty()) parse_fail(path, line_no + 1, "no data rows");

  const int n_pts = static_cast<int>(point_ids.size());
  Eigen::MatrixXd scores(n_pts, n_cls);
  for (int p = 0; p < n_pts; ++p)
    for (int c = 0; c < n_cls; ++c) scores(p, c) = score_rows[p * n_cls + c];

  return ScoreMatrix(std::move(class_ids), std::move(point_ids),
                     std::move(correct), std::move(scores));
}

void save_scores(const ScoreMatrix& m, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write score file: " + path.string());
  out << "point_id,correct_class";
  for (const auto& id : m.class_ids()) out << ',' << id;
  out << '\n';
  for (int p = 0; p < m.n_points(); ++p) {
    out << m.point_ids()[p] << ',' << m.class_ids()[m.correct_class(p)];
    for (int c = 0; c < m.n_classes(); ++c)
      out << ',' << format_double(m.scores()(p, c));
    out << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

ScoreMatrix subsample_classes(const ScoreMatrix& m, int k1,
                              std::uint64_t seed) {
  const int n_cls = m.n_classes();
  if (k1 < 2 || k1 > n_cls)
    throw std::invalid_argument("subsample_classes: k1 must be in [2, " +
                                std::to_string(n_cls) + "], got " +
                                std::to_string(k1));

  // Partial Fisher-Yates over the class indices, then restore column order.
  auto rng = SplitMix64::substream(seed, {0x5355424bULL});  // "SUBK"
  std::vector<int> indices(n_cls);
  std::iota(indices.begin(), indices.end(), 0);
  for (int i = 0; i < k1; ++i) {
    const int j = i + static_cast<int>(rng.below(n_cls - i));
    std::swap(indices[i], indices[j]);
  }
  std::vector<int> chosen(indices.begin(), indices.begin() + k1);
  std::sort(chosen.begin(), chosen.end());

  std::vector<int> new_index(n_cls, -1);
  std::vector<std::string> class_ids;
  class_ids.reserve(k1);
  for (int c = 0; c < k1; ++c) {
    new_index[chosen[c]] = c;
    class_ids.push_back(m.class_ids()[chosen[c]]);
  }

  std::vector<std::string> point_ids;
  std::vector<int> correct;
  std::vector<int> rows;
  for (int p = 0; p < m.n_points(); ++p) {
    const int c = new_index[m.correct_class(p)];
    if (c < 0) continue;
    point_ids.push_back(m.point_ids()[p]);
    correct.push_back(c);
    rows.push_back(p);
  }

  Eigen::MatrixXd scores(static_cast<int>(rows.size()), k1);
  for (int i = 0; i < static_cast<int>(rows.size()); ++i)
    for (int c = 0; c < k1; ++c) scores(i, c) = m.scores()(rows[i], chosen[c]);

  return ScoreMatrix(std::move(class_ids), std::move(point_ids),
                     std::move(correct), std::move(scores));
}

}  // namespace accex
