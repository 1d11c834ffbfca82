#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace pairsig {

/// Signal modalities in canonical order. The order fixes combination names
/// ("ECG|EMG|EEG") and the pair ordering of feature vectors.
enum class Modality : int { ecg = 0, eog = 1, emg = 2, eeg = 3 };

inline constexpr std::array<Modality, 4> kAllModalities = {
    Modality::ecg, Modality::eog, Modality::emg, Modality::eeg};

std::string_view to_string(Modality m);
std::optional<Modality> modality_from_string(std::string_view s);

/// Three-level fatigue label derived from KSS scores.
enum class FatigueClass : int { alert = 0, normal = 1, fatigued = 2 };

inline constexpr int kNumFatigueClasses = 3;

struct ChannelMeta {
  std::string label;      // raw source label, e.g. "C3-A1"
  Modality modality = Modality::eeg;
  std::string sub_label;  // "C3", "H", ... empty for single-channel modalities
  double sampling_rate = 0.0;  // Hz, > 0
  std::string physical_unit;

  /// Channel token used in feature names: "C3-EEG", "H-EOG", "ECG".
  std::string token() const;
};

/// Parse a channel token back into (modality, sub_label).
std::optional<std::pair<Modality, std::string>> parse_channel_token(
    std::string_view token);

/// Canonical ordering: modality order ECG, EOG, EMG, EEG, then sub_label.
bool canonical_channel_less(const ChannelMeta& a, const ChannelMeta& b);

struct KssAnnotation {
  double time_seconds = 0.0;
  int kss = 0;  // 1..9
};

struct Channel {
  ChannelMeta meta;
  std::vector<double> samples;
};

/// Synchronized multichannel recording of one session.
struct SignalRecord {
  std::string session_id;
  std::vector<Channel> channels;
  std::vector<KssAnnotation> kss_annotations;

  /// Time span covered by all channels, i.e. the shortest channel duration.
  double duration_seconds() const;
};

/// One fixed-duration window of all channels plus its fatigue label.
struct Segment {
  std::string session_id;
  int window_index = 0;
  double start_time = 0.0;
  std::vector<Channel> channels;  // each exactly window_samples long
  FatigueClass label = FatigueClass::alert;
};

}  // namespace pairsig
