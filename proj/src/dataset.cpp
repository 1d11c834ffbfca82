#include "pairsig/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include "pairsig/csv_io.hpp"
#include "pairsig/errors.hpp"
#include "pairsig/parallel.hpp"
#include "pairsig/rng.hpp"

namespace pairsig {

int FeatureMatrix::num_classes() const {
  int max_label = -1;
  for (const auto& row : rows) max_label = std::max(max_label, row.label);
  return max_label + 1;
}

std::vector<long> FeatureMatrix::class_counts(int num_classes) const {
  std::vector<long> counts(static_cast<std::size_t>(num_classes), 0);
  for (const auto& row : rows) {
    if (row.label >= 0 && row.label < num_classes) {
      ++counts[static_cast<std::size_t>(row.label)];
    }
  }
  return counts;
}

std::string_view to_string(SplitMode mode) {
  return mode == SplitMode::stratified_by_class ? "stratified" : "grouped";
}

FeatureMatrix build_matrix(const std::vector<Segment>& segments,
                           const ModalityCombination& combination,
                           double lag_ms,
                           const std::vector<std::string>* allowlist,
                           int* degenerate_pairs, int threads) {
  if (segments.empty()) fail(Errc::empty_input, "no segments");

  FeatureMatrix matrix;
  matrix.combination_name = combination.name();

  std::vector<FeatureVector> vectors(segments.size());
  std::vector<int> degenerate(segments.size(), 0);
  parallel_for(segments.size(), threads, [&](std::size_t i) {
    vectors[i] = extract_features(segments[i], combination, lag_ms, &degenerate[i]);
  });
  if (degenerate_pairs) {
    for (int d : degenerate) *degenerate_pairs += d;
  }

  // Column selection: full set or the configured allowlist subset.
  std::vector<std::size_t> keep;
  const auto& names = vectors[0].names;
  if (allowlist) {
    for (const auto& want : *allowlist) {
      auto it = std::find(names.begin(), names.end(), want);
      if (it == names.end()) {
        fail(Errc::config_invalid,
             "feature allowlist entry '" + want + "' not produced by " +
                 matrix.combination_name);
      }
      keep.push_back(static_cast<std::size_t>(it - names.begin()));
    }
  } else {
    keep.resize(names.size());
    for (std::size_t i = 0; i < names.size(); ++i) keep[i] = i;
  }
  for (std::size_t idx : keep) matrix.feature_names.push_back(names[idx]);

  matrix.rows.reserve(vectors.size());
  for (auto& fv : vectors) {
    if (fv.names != names) {
      fail(Errc::missing_channel,
           "segments disagree on channel layout for " + matrix.combination_name);
    }
    MatrixRow row;
    row.session_id = fv.session_id;
    row.window_index = fv.window_index;
    row.label = static_cast<int>(fv.label);
    row.values.reserve(keep.size());
    for (std::size_t idx : keep) row.values.push_back(fv.values[idx]);
    matrix.rows.push_back(std::move(row));
  }
  std::sort(matrix.rows.begin(), matrix.rows.end(),
            [](const MatrixRow& a, const MatrixRow& b) {
              return std::tie(a.session_id, a.window_index) <
                     std::tie(b.session_id, b.window_index);
            });
  return matrix;
}

namespace {

SplitResult split_stratified(const FeatureMatrix& matrix, const SplitSpec& spec) {
  const int num_classes = matrix.num_classes();
  std::vector<std::vector<std::size_t>> by_class(
      static_cast<std::size_t>(num_classes));
  for (std::size_t i = 0; i < matrix.rows.size(); ++i) {
    by_class[static_cast<std::size_t>(matrix.rows[i].label)].push_back(i);
  }
  int present = 0;
  for (const auto& idx : by_class) present += idx.empty() ? 0 : 1;
  if (present < 2) {
    fail(Errc::single_class, "stratified split needs >= 2 classes");
  }

  std::vector<char> in_train(matrix.rows.size(), 0);
  for (std::size_t c = 0; c < by_class.size(); ++c) {
    auto& indices = by_class[c];
    if (indices.empty()) continue;
    Rng rng(seed_for(spec.seed, 0x51a7, c));
    rng.shuffle(indices);
    const auto want = static_cast<std::size_t>(std::lround(
        static_cast<double>(indices.size()) * spec.train_fraction));
    for (std::size_t i = 0; i < want && i < indices.size(); ++i) {
      in_train[indices[i]] = 1;
    }
  }

  SplitResult result;
  result.train.feature_names = result.test.feature_names = matrix.feature_names;
  result.train.combination_name = result.test.combination_name =
      matrix.combination_name;
  for (std::size_t i = 0; i < matrix.rows.size(); ++i) {
    (in_train[i] ? result.train : result.test).rows.push_back(matrix.rows[i]);
  }
  return result;
}

SplitResult split_grouped(const FeatureMatrix& matrix, const SplitSpec& spec) {
  std::map<std::string, long> session_sizes;
  for (const auto& row : matrix.rows) ++session_sizes[row.session_id];
  if (session_sizes.size() < 2) {
    fail(Errc::too_few_sessions,
         "grouped split needs >= 2 sessions, got " +
             std::to_string(session_sizes.size()));
  }

  // Largest first, ties by session id; take a session whenever it still
  // fits under the target train size.
  std::vector<std::pair<std::string, long>> sessions(session_sizes.begin(),
                                                     session_sizes.end());
  std::sort(sessions.begin(), sessions.end(),
            [](const auto& a, const auto& b) {
              return a.second != b.second ? a.second > b.second
                                          : a.first < b.first;
            });
  const long target = std::lround(static_cast<double>(matrix.rows.size()) *
                                  spec.train_fraction);
  std::set<std::string> train_sessions;
  long train_size = 0;
  for (const auto& [id, size] : sessions) {
    if (train_size + size <= target) {
      train_sessions.insert(id);
      train_size += size;
    }
  }
  if (train_sessions.empty()) {
    // Every session overshoots the target; take the smallest.
    train_sessions.insert(sessions.back().first);
  } else if (train_sessions.size() == sessions.size()) {
    // Keep at least one session on the test side.
    train_sessions.erase(sessions.back().first);
  }

  SplitResult result;
  result.train.feature_names = result.test.feature_names = matrix.feature_names;
  result.train.combination_name = result.test.combination_name =
      matrix.combination_name;
  for (const auto& row : matrix.rows) {
    (train_sessions.count(row.session_id) ? result.train : result.test)
        .rows.push_back(row);
  }
  return result;
}

}  // namespace

SplitResult split(const FeatureMatrix& matrix, const SplitSpec& spec) {
  if (matrix.rows.size() < 2) {
    fail(Errc::empty_input, "need at least 2 rows to split");
  }
  if (!(spec.train_fraction > 0.0 && spec.train_fraction < 1.0)) {
    fail(Errc::config_invalid, "train_fraction must be in (0, 1)");
  }
  return spec.mode == SplitMode::stratified_by_class
             ? split_stratified(matrix, spec)
             : split_grouped(matrix, spec);
}

// ---------------------------------------------------------------------------
// Serialization

void write_matrix_csv(const FeatureMatrix& matrix, std::ostream& out) {
  out << "session_id,window_index";
  for (const auto& name : matrix.feature_names) out << ',' << name;
  out << ",label\n";
  for (const auto& row : matrix.rows) {
    out << row.session_id << ',' << row.window_index;
    for (double v : row.values) out << ',' << format_double(v);
    out << ',' << row.label << '\n';
  }
}

FeatureMatrix read_matrix_csv(std::istream& in,
                              const std::string& combination_name) {
  FeatureMatrix matrix;
  matrix.combination_name = combination_name;
  std::string line;
  if (!std::getline(in, line)) fail(Errc::empty_file, "no header row");
  {
    std::istringstream header(line);
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(header, cell, ',')) cells.push_back(cell);
    if (cells.size() < 3 || cells.front() != "session_id" ||
        cells.back() != "label") {
      fail(Errc::invalid_field, "bad feature matrix header");
    }
    matrix.feature_names.assign(cells.begin() + 2, cells.end() - 1);
  }
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() != matrix.feature_names.size() + 3) {
      fail(Errc::ragged_rows, "row " + std::to_string(line_no) +
                                  " has wrong column count");
    }
    MatrixRow row;
    row.session_id = cells[0];
    row.window_index = std::stoi(cells[1]);
    for (std::size_t i = 2; i + 1 < cells.size(); ++i) {
      double v = 0.0;
      auto [p, ec] =
          std::from_chars(cells[i].data(), cells[i].data() + cells[i].size(), v);
      if (ec != std::errc() || p != cells[i].data() + cells[i].size()) {
        fail(Errc::non_numeric_cell, "row " + std::to_string(line_no) +
                                         ", column " + std::to_string(i + 1));
      }
      row.values.push_back(v);
    }
    row.label = std::stoi(cells.back());
    matrix.rows.push_back(std::move(row));
  }
  return matrix;
}

nlohmann::ordered_json matrix_to_json(const FeatureMatrix& matrix) {
  nlohmann::ordered_json j;
  j["combination"] = matrix.combination_name;
  j["feature_names"] = matrix.feature_names;
  auto& rows = j["rows"] = nlohmann::ordered_json::array();
  for (const auto& row : matrix.rows) {
    rows.push_back({{"session_id", row.session_id},
                    {"window_index", row.window_index},
                    {"label", row.label},
                    {"values", row.values}});
  }
  return j;
}

nlohmann::ordered_json split_manifest_json(const SplitResult& result,
                                           const SplitSpec& spec) {
  nlohmann::ordered_json j;
  j["mode"] = std::string(to_string(spec.mode));
  j["train_fraction"] = spec.train_fraction;
  j["seed"] = spec.seed;
  auto keys = [](const FeatureMatrix& m) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& row : m.rows) {
      arr.push_back({{"session_id", row.session_id},
                     {"window_index", row.window_index}});
    }
    return arr;
  };
  j["train"] = keys(result.train);
  j["test"] = keys(result.test);
  return j;
}

}  // namespace pairsig
