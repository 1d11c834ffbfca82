#include "pairsig/segmentation.hpp"

#include <algorithm>
#include <cmath>

#include "pairsig/errors.hpp"

namespace pairsig {

FatigueClass kss_to_class(int kss) {
  if (kss < 1 || kss > 9) {
    fail(Errc::out_of_range_kss,
         "KSS score " + std::to_string(kss) + " outside [1, 9]");
  }
  if (kss <= 3) return FatigueClass::alert;
  if (kss <= 6) return FatigueClass::normal;
  return FatigueClass::fatigued;
}

SegmentationResult segment_record(const SignalRecord& record,
                                  double window_seconds) {
  if (record.channels.empty()) fail(Errc::no_channels, "record has no channels");
  if (window_seconds <= 0.0) {
    fail(Errc::config_invalid, "window_seconds must be > 0");
  }
  const double rate = record.channels[0].meta.sampling_rate;
  for (const auto& ch : record.channels) {
    if (ch.meta.sampling_rate != rate) {
      fail(Errc::mixed_rates, "channel '" + ch.meta.label + "' has rate " +
                                  std::to_string(ch.meta.sampling_rate) +
                                  ", expected " + std::to_string(rate));
    }
  }
  if (rate <= 0.0) fail(Errc::non_positive_rate, "rate must be > 0");

  const auto window_samples =
      static_cast<std::size_t>(std::llround(window_seconds * rate));
  if (window_samples == 0) {
    fail(Errc::config_invalid, "window shorter than one sample");
  }
  std::size_t min_len = record.channels[0].samples.size();
  for (const auto& ch : record.channels) {
    min_len = std::min(min_len, ch.samples.size());
  }
  const std::size_t num_windows = min_len / window_samples;

  // Annotations sorted by time; each window takes the latest annotation at
  // or before its start.
  std::vector<KssAnnotation> annotations = record.kss_annotations;
  std::sort(annotations.begin(), annotations.end(),
            [](const KssAnnotation& a, const KssAnnotation& b) {
              return a.time_seconds < b.time_seconds;
            });

  SegmentationResult result;
  result.dropped_tail_seconds =
      static_cast<double>(min_len - num_windows * window_samples) / rate;
  result.segments.reserve(num_windows);
  for (std::size_t w = 0; w < num_windows; ++w) {
    const double start = static_cast<double>(w) * window_seconds;
    const KssAnnotation* latest = nullptr;
    for (const auto& a : annotations) {
      if (a.time_seconds <= start) {
        latest = &a;
      } else {
        break;
      }
    }
    if (!latest) {
      ++result.dropped_unlabeled;
      continue;
    }
    Segment segment;
    segment.session_id = record.session_id;
    segment.window_index = static_cast<int>(w);
    segment.start_time = start;
    segment.label = kss_to_class(latest->kss);
    segment.channels.reserve(record.channels.size());
    const std::size_t begin = w * window_samples;
    for (const auto& ch : record.channels) {
      Channel piece;
      piece.meta = ch.meta;
      piece.samples.assign(ch.samples.begin() + static_cast<std::ptrdiff_t>(begin),
                           ch.samples.begin() +
                               static_cast<std::ptrdiff_t>(begin + window_samples));
      segment.channels.push_back(std::move(piece));
    }
    result.segments.push_back(std::move(segment));
  }
  return result;
}

}  // namespace pairsig
