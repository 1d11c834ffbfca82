#pragma once

#include <vector>

#include "pairsig/types.hpp"

namespace pairsig {

/// KSS 1-3 -> Alert, 4-6 -> Normal, 7-9 -> Fatigued.
FatigueClass kss_to_class(int kss);

struct SegmentationResult {
  std::vector<Segment> segments;
  int dropped_unlabeled = 0;      // windows with no annotation at or before start
  double dropped_tail_seconds = 0.0;
};

/// Cuts a record into non-overlapping windows of window_seconds. Each window
/// is labeled by the latest KSS annotation at or before its start time;
/// the trailing remainder is dropped.
SegmentationResult segment_record(const SignalRecord& record,
                                  double window_seconds);

}  // namespace pairsig
