#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "pairsig/types.hpp"

namespace pairsig {

/// Reads a comma-separated recording: first row is channel labels matching
/// meta order, subsequent rows are numeric samples at one common rate.
SignalRecord read_csv_record(std::istream& in,
                             const std::vector<ChannelMeta>& meta,
                             const std::string& session_id = "csv");

/// KSS sidecar: two columns time_seconds,kss; an optional header row is
/// skipped. Scores outside [1, 9] raise OutOfRangeKss.
std::vector<KssAnnotation> read_kss_sidecar(std::istream& in);

void write_csv_record(const SignalRecord& record, std::ostream& out);
void write_kss_sidecar(const std::vector<KssAnnotation>& annotations,
                       std::ostream& out);

/// Decimal text with enough digits to round-trip doubles exactly.
std::string format_double(double v);

}  // namespace pairsig
