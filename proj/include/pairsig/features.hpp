#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pairsig/types.hpp"

namespace pairsig {

inline constexpr double kDegenerateVarianceEps = 1e-12;
inline constexpr double kDefaultLagMs = 500.0;

/// Pearson correlation coefficient. If either input has population variance
/// below kDegenerateVarianceEps the result is 0 and *degenerate is set.
double pearson(std::span<const double> x, std::span<const double> y,
               bool* degenerate = nullptr);

/// Population (1/N) covariance.
double covariance(std::span<const double> x, std::span<const double> y);

struct CrossCorrResult {
  double value = 0.0;
  long lag_at_max = 0;  // samples; positive means y lags x (y shifted later)
};

/// Maximum normalized cross-correlation over lags within +/- max_lag_ms.
/// Sequences are mean-removed and scaled by full-window population standard
/// deviations; each lag's product sum is divided by the overlap length, so
/// lag 0 reproduces Pearson r. Ties break toward the smallest |lag|, then
/// toward negative lag. The result is clamped to [-1, 1].
CrossCorrResult max_cross_corr(std::span<const double> x,
                               std::span<const double> y, double rate,
                               double max_lag_ms = kDefaultLagMs,
                               bool* degenerate = nullptr);

enum class FeatureKind : int { corr = 0, cross_corr = 1, cov = 2 };

std::string_view to_string(FeatureKind kind);
std::optional<FeatureKind> feature_kind_from_string(std::string_view s);

struct ModalityCombination {
  std::vector<Modality> modalities;  // canonical order, no duplicates

  std::string name() const;  // "ECG|EMG|EEG"
  bool contains(Modality m) const;
  static ModalityCombination from_name(std::string_view name);
};

struct CombinationInfo {
  ModalityCombination combination;
  int channel_count = 0;
  bool feasible = false;  // channel union has >= 2 channels
};

/// All non-empty modality subsets available in `channels`, ordered by
/// subset size then canonical modality order. Infeasible subsets are
/// returned flagged rather than dropped.
std::vector<CombinationInfo> enumerate_modality_combinations(
    const std::vector<ChannelMeta>& channels);

/// Feature name "C3-EEG_C4-EEG_Corr"; channel a precedes b canonically.
std::string feature_name(const ChannelMeta& a, const ChannelMeta& b,
                         FeatureKind kind);

struct ParsedFeatureName {
  Modality modality_a;
  std::string sub_a;
  Modality modality_b;
  std::string sub_b;
  FeatureKind kind;
};
ParsedFeatureName parse_feature_name(std::string_view name);

/// Channels of the segment covered by the combination, canonically ordered.
std::vector<ChannelMeta> combination_channels(
    const std::vector<ChannelMeta>& channels,
    const ModalityCombination& combination);

/// Deterministic feature order: all Corr pairs, then CrossCorr, then Cov,
/// pairs in canonical channel order within each group.
std::vector<std::string> feature_names_for(
    const std::vector<ChannelMeta>& union_channels);

struct FeatureVector {
  std::string session_id;
  int window_index = 0;
  std::vector<std::string> names;
  std::vector<double> values;
  FatigueClass label = FatigueClass::alert;
};

/// Computes the three descriptors over every unordered channel pair of the
/// combination; 3 * C(k, 2) values for k channels.
FeatureVector extract_features(const Segment& segment,
                               const ModalityCombination& combination,
                               double lag_ms = kDefaultLagMs,
                               int* degenerate_pairs = nullptr);

}  // namespace pairsig
