#include "pairsig/features.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "pairsig/errors.hpp"

namespace pairsig {

namespace {

struct Moments {
  double mean = 0.0;
  double var = 0.0;  // population
};

Moments moments(std::span<const double> x) {
  Moments m;
  const double n = static_cast<double>(x.size());
  for (double v : x) m.mean += v;
  m.mean /= n;
  for (double v : x) m.var += (v - m.mean) * (v - m.mean);
  m.var /= n;
  return m;
}

void require_same_length(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    fail(Errc::length_mismatch, "sequence lengths differ: " +
                                    std::to_string(x.size()) + " vs " +
                                    std::to_string(y.size()));
  }
}

}  // namespace

double pearson(std::span<const double> x, std::span<const double> y,
               bool* degenerate) {
  require_same_length(x, y);
  if (x.size() < 2) fail(Errc::too_short, "need at least 2 samples");
  if (degenerate) *degenerate = false;
  const Moments mx = moments(x);
  const Moments my = moments(y);
  if (mx.var < kDegenerateVarianceEps || my.var < kDegenerateVarianceEps) {
    if (degenerate) *degenerate = true;
    return 0.0;
  }
  double cov = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    cov += (x[i] - mx.mean) * (y[i] - my.mean);
  }
  cov /= static_cast<double>(x.size());
  return cov / std::sqrt(mx.var * my.var);
}

double covariance(std::span<const double> x, std::span<const double> y) {
  require_same_length(x, y);
  if (x.empty()) fail(Errc::empty_input, "covariance of empty sequences");
  const Moments mx = moments(x);
  const Moments my = moments(y);
  double cov = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    cov += (x[i] - mx.mean) * (y[i] - my.mean);
  }
  return cov / static_cast<double>(x.size());
}

CrossCorrResult max_cross_corr(std::span<const double> x,
                               std::span<const double> y, double rate,
                               double max_lag_ms, bool* degenerate) {
  require_same_length(x, y);
  if (rate <= 0.0) fail(Errc::non_positive_rate, "rate must be > 0");
  if (x.size() < 2) fail(Errc::too_short, "need at least 2 samples");
  if (degenerate) *degenerate = false;
  const long n = static_cast<long>(x.size());
  const long max_lag = std::lround(rate * max_lag_ms / 1000.0);
  if (max_lag < 0 || max_lag >= n) {
    fail(Errc::lag_too_large, "lag window of " + std::to_string(max_lag) +
                                  " samples needs sequences longer than that");
  }

  const Moments mx = moments(x);
  const Moments my = moments(y);
  if (mx.var < kDegenerateVarianceEps || my.var < kDegenerateVarianceEps) {
    if (degenerate) *degenerate = true;
    return {0.0, 0};
  }
  const double inv_norm = 1.0 / std::sqrt(mx.var * my.var);

  CrossCorrResult best{0.0, 0};
  bool first = true;
  // Positive lag tau: product of x[i] with y[i + tau], i.e. y shifted later.
  for (long tau = -max_lag; tau <= max_lag; ++tau) {
    const long lo = std::max(0L, -tau);
    const long hi = std::min(n, n - tau);  // exclusive
    double sum = 0.0;
    for (long i = lo; i < hi; ++i) {
      sum += (x[static_cast<std::size_t>(i)] - mx.mean) *
             (y[static_cast<std::size_t>(i + tau)] - my.mean);
    }
    const double value = sum / static_cast<double>(hi - lo) * inv_norm;
    // Ties break toward the smallest |tau|, then toward negative tau.
    const bool better =
        first || value > best.value ||
        (value == best.value &&
         (std::labs(tau) < std::labs(best.lag_at_max) ||
          (std::labs(tau) == std::labs(best.lag_at_max) && tau < best.lag_at_max)));
    if (better) {
      best.value = value;
      best.lag_at_max = tau;
      first = false;
    }
  }
  best.value = std::clamp(best.value, -1.0, 1.0);
  return best;
}

// ---------------------------------------------------------------------------
// Combinations and naming

std::string_view to_string(FeatureKind kind) {
  switch (kind) {
    case FeatureKind::corr: return "Corr";
    case FeatureKind::cross_corr: return "CrossCorr";
    case FeatureKind::cov: return "Cov";
  }
  return "?";
}

std::optional<FeatureKind> feature_kind_from_string(std::string_view s) {
  if (s == "Corr") return FeatureKind::corr;
  if (s == "CrossCorr") return FeatureKind::cross_corr;
  if (s == "Cov") return FeatureKind::cov;
  return std::nullopt;
}

std::string ModalityCombination::name() const {
  std::string out;
  for (Modality m : modalities) {
    if (!out.empty()) out.push_back('|');
    out += to_string(m);
  }
  return out;
}

bool ModalityCombination::contains(Modality m) const {
  return std::find(modalities.begin(), modalities.end(), m) != modalities.end();
}

ModalityCombination ModalityCombination::from_name(std::string_view name) {
  ModalityCombination combination;
  std::size_t pos = 0;
  while (pos <= name.size()) {
    const std::size_t bar = name.find('|', pos);
    const std::string_view part =
        name.substr(pos, bar == std::string_view::npos ? name.size() - pos
                                                       : bar - pos);
    auto m = modality_from_string(part);
    if (!m) {
      fail(Errc::config_invalid,
           "bad modality '" + std::string(part) + "' in combination '" +
               std::string(name) + "'");
    }
    if (!combination.contains(*m)) combination.modalities.push_back(*m);
    if (bar == std::string_view::npos) break;
    pos = bar + 1;
  }
  std::sort(combination.modalities.begin(), combination.modalities.end());
  if (combination.modalities.empty()) {
    fail(Errc::config_invalid, "empty combination name");
  }
  return combination;
}

std::vector<CombinationInfo> enumerate_modality_combinations(
    const std::vector<ChannelMeta>& channels) {
  std::array<int, 4> counts{0, 0, 0, 0};
  std::vector<Modality> available;
  for (const auto& ch : channels) {
    if (counts[static_cast<int>(ch.modality)]++ == 0) {
      available.push_back(ch.modality);
    }
  }
  std::sort(available.begin(), available.end());
  if (available.empty()) fail(Errc::no_channels, "no modalities available");

  const unsigned total = 1u << available.size();
  std::vector<unsigned> masks;
  for (unsigned mask = 1; mask < total; ++mask) masks.push_back(mask);
  std::sort(masks.begin(), masks.end(), [](unsigned a, unsigned b) {
    const int pa = std::popcount(a);
    const int pb = std::popcount(b);
    return pa != pb ? pa < pb : a < b;
  });

  std::vector<CombinationInfo> result;
  result.reserve(masks.size());
  for (unsigned mask : masks) {
    CombinationInfo info;
    for (std::size_t i = 0; i < available.size(); ++i) {
      if (mask & (1u << i)) {
        info.combination.modalities.push_back(available[i]);
        info.channel_count += counts[static_cast<int>(available[i])];
      }
    }
    info.feasible = info.channel_count >= 2;
    result.push_back(std::move(info));
  }
  return result;
}

std::string feature_name(const ChannelMeta& a, const ChannelMeta& b,
                         FeatureKind kind) {
  const ChannelMeta& first = canonical_channel_less(a, b) ? a : b;
  const ChannelMeta& second = canonical_channel_less(a, b) ? b : a;
  return first.token() + "_" + second.token() + "_" +
         std::string(to_string(kind));
}

ParsedFeatureName parse_feature_name(std::string_view name) {
  // token_a '_' token_b '_' kind; tokens never contain '_'.
  const std::size_t last = name.rfind('_');
  if (last == std::string_view::npos) {
    fail(Errc::invalid_field, "bad feature name '" + std::string(name) + "'");
  }
  const std::size_t mid = name.rfind('_', last - 1);
  if (mid == std::string_view::npos || mid == 0) {
    fail(Errc::invalid_field, "bad feature name '" + std::string(name) + "'");
  }
  auto kind = feature_kind_from_string(name.substr(last + 1));
  auto a = parse_channel_token(name.substr(0, mid));
  auto b = parse_channel_token(name.substr(mid + 1, last - mid - 1));
  if (!kind || !a || !b) {
    fail(Errc::invalid_field, "bad feature name '" + std::string(name) + "'");
  }
  return {a->first, a->second, b->first, b->second, *kind};
}

std::vector<ChannelMeta> combination_channels(
    const std::vector<ChannelMeta>& channels,
    const ModalityCombination& combination) {
  std::vector<ChannelMeta> selected;
  for (const auto& ch : channels) {
    if (combination.contains(ch.modality)) selected.push_back(ch);
  }
  std::sort(selected.begin(), selected.end(), canonical_channel_less);
  return selected;
}

std::vector<std::string> feature_names_for(
    const std::vector<ChannelMeta>& union_channels) {
  std::vector<std::string> names;
  const std::size_t k = union_channels.size();
  names.reserve(3 * k * (k - 1) / 2);
  for (FeatureKind kind :
       {FeatureKind::corr, FeatureKind::cross_corr, FeatureKind::cov}) {
    for (std::size_t i = 0; i < k; ++i) {
      for (std::size_t j = i + 1; j < k; ++j) {
        names.push_back(feature_name(union_channels[i], union_channels[j], kind));
      }
    }
  }
  return names;
}

FeatureVector extract_features(const Segment& segment,
                               const ModalityCombination& combination,
                               double lag_ms, int* degenerate_pairs) {
  std::vector<ChannelMeta> metas;
  metas.reserve(segment.channels.size());
  for (const auto& ch : segment.channels) metas.push_back(ch.meta);
  const auto selected = combination_channels(metas, combination);
  if (selected.size() < 2) {
    fail(Errc::infeasible_combination,
         "combination " + combination.name() + " covers " +
             std::to_string(selected.size()) + " channel(s); need >= 2");
  }

  // Channel data in canonical order.
  std::vector<const Channel*> ordered;
  ordered.reserve(selected.size());
  for (const auto& meta : selected) {
    const Channel* found = nullptr;
    for (const auto& ch : segment.channels) {
      if (ch.meta.modality == meta.modality && ch.meta.sub_label == meta.sub_label) {
        found = &ch;
        break;
      }
    }
    if (!found) {
      fail(Errc::missing_channel, "channel " + meta.token() + " not in segment");
    }
    ordered.push_back(found);
  }

  FeatureVector fv;
  fv.session_id = segment.session_id;
  fv.window_index = segment.window_index;
  fv.label = segment.label;
  fv.names = feature_names_for(selected);
  fv.values.reserve(fv.names.size());

  const double rate = ordered[0]->meta.sampling_rate;
  const std::size_t k = ordered.size();
  int degenerate = 0;
  for (FeatureKind kind :
       {FeatureKind::corr, FeatureKind::cross_corr, FeatureKind::cov}) {
    for (std::size_t i = 0; i < k; ++i) {
      for (std::size_t j = i + 1; j < k; ++j) {
        const auto& x = ordered[i]->samples;
        const auto& y = ordered[j]->samples;
        bool flag = false;
        double value = 0.0;
        switch (kind) {
          case FeatureKind::corr:
            value = pearson(x, y, &flag);
            break;
          case FeatureKind::cross_corr:
            value = max_cross_corr(x, y, rate, lag_ms, &flag).value;
            break;
          case FeatureKind::cov:
            value = covariance(x, y);
            break;
        }
        if (flag) ++degenerate;
        fv.values.push_back(value);
      }
    }
  }
  if (degenerate_pairs) *degenerate_pairs += degenerate;
  return fv;
}

}  // namespace pairsig
