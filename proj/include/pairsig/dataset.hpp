#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "pairsig/features.hpp"
#include "pairsig/types.hpp"

namespace pairsig {

struct MatrixRow {
  std::string session_id;
  int window_index = 0;
  std::vector<double> values;
  int label = 0;
};

struct FeatureMatrix {
  std::vector<std::string> feature_names;
  std::vector<MatrixRow> rows;
  std::string combination_name;

  int num_classes() const;
  std::vector<long> class_counts(int num_classes) const;
};

enum class SplitMode { stratified_by_class, grouped_by_session };

std::string_view to_string(SplitMode mode);

struct SplitSpec {
  double train_fraction = 0.7;
  SplitMode mode = SplitMode::stratified_by_class;
  std::uint64_t seed = 0;
};

struct SplitResult {
  FeatureMatrix train;
  FeatureMatrix test;
};

/// Extracts features for every segment; rows ordered by
/// (session_id, window_index). Optional allowlist restricts columns.
FeatureMatrix build_matrix(const std::vector<Segment>& segments,
                           const ModalityCombination& combination,
                           double lag_ms = kDefaultLagMs,
                           const std::vector<std::string>* allowlist = nullptr,
                           int* degenerate_pairs = nullptr,
                           int threads = 1);

/// Stratified mode: per-class train counts are round(count * fraction),
/// drawn by seeded shuffle. Grouped mode: whole sessions greedily fill the
/// train side toward the target row count; no session straddles the split.
SplitResult split(const FeatureMatrix& matrix, const SplitSpec& spec);

void write_matrix_csv(const FeatureMatrix& matrix, std::ostream& out);
FeatureMatrix read_matrix_csv(std::istream& in,
                              const std::string& combination_name);

nlohmann::ordered_json matrix_to_json(const FeatureMatrix& matrix);
nlohmann::ordered_json split_manifest_json(const SplitResult& result,
                                           const SplitSpec& spec);

}  // namespace pairsig
