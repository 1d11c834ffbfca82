#include "pairsig/types.hpp"

#include <algorithm>
#include <tuple>

#include "pairsig/errors.hpp"

namespace pairsig {

std::string_view to_string(Modality m) {
  switch (m) {
    case Modality::ecg: return "ECG";
    case Modality::eog: return "EOG";
    case Modality::emg: return "EMG";
    case Modality::eeg: return "EEG";
  }
  return "?";
}

std::optional<Modality> modality_from_string(std::string_view s) {
  for (Modality m : kAllModalities) {
    if (s == to_string(m)) return m;
  }
  return std::nullopt;
}

std::string ChannelMeta::token() const {
  if (sub_label.empty()) return std::string(to_string(modality));
  return sub_label + "-" + std::string(to_string(modality));
}

std::optional<std::pair<Modality, std::string>> parse_channel_token(
    std::string_view token) {
  // The modality name follows the last '-'; sub labels never contain '-'.
  auto dash = token.rfind('-');
  if (dash == std::string_view::npos) {
    auto m = modality_from_string(token);
    if (!m) return std::nullopt;
    return std::make_pair(*m, std::string());
  }
  auto m = modality_from_string(token.substr(dash + 1));
  if (!m || dash == 0) return std::nullopt;
  return std::make_pair(*m, std::string(token.substr(0, dash)));
}

bool canonical_channel_less(const ChannelMeta& a, const ChannelMeta& b) {
  return std::tie(a.modality, a.sub_label) < std::tie(b.modality, b.sub_label);
}

double SignalRecord::duration_seconds() const {
  double duration = 0.0;
  bool first = true;
  for (const auto& ch : channels) {
    if (ch.meta.sampling_rate <= 0.0) {
      fail(Errc::non_positive_rate,
           "channel '" + ch.meta.label + "' has rate <= 0");
    }
    double d = static_cast<double>(ch.samples.size()) / ch.meta.sampling_rate;
    duration = first ? d : std::min(duration, d);
    first = false;
  }
  return duration;
}

std::string_view errc_name(Errc code) {
  switch (code) {
    case Errc::truncated_header: return "TruncatedHeader";
    case Errc::invalid_field: return "InvalidField";
    case Errc::degenerate_calibration: return "DegenerateCalibration";
    case Errc::unknown_label: return "UnknownLabel";
    case Errc::ragged_rows: return "RaggedRows";
    case Errc::non_numeric_cell: return "NonNumericCell";
    case Errc::empty_file: return "EmptyFile";
    case Errc::infeasible_coupling: return "InfeasibleCoupling";
    case Errc::empty_input: return "EmptyInput";
    case Errc::non_positive_rate: return "NonPositiveRate";
    case Errc::band_out_of_range: return "BandOutOfRange";
    case Errc::too_short: return "TooShort";
    case Errc::out_of_range_kss: return "OutOfRangeKss";
    case Errc::mixed_rates: return "MixedRates";
    case Errc::no_channels: return "NoChannels";
    case Errc::length_mismatch: return "LengthMismatch";
    case Errc::lag_too_large: return "LagTooLarge";
    case Errc::missing_channel: return "MissingChannel";
    case Errc::infeasible_combination: return "InfeasibleCombination";
    case Errc::single_class: return "SingleClass";
    case Errc::too_few_sessions: return "TooFewSessions";
    case Errc::non_finite: return "NonFinite";
    case Errc::width_mismatch: return "WidthMismatch";
    case Errc::missing_cover: return "MissingCover";
    case Errc::config_invalid: return "ConfigInvalid";
    case Errc::missing_manifest: return "MissingManifest";
    case Errc::io_failure: return "IoFailure";
  }
  return "UnknownError";
}

}  // namespace pairsig
