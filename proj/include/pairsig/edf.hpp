#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pairsig/types.hpp"

namespace pairsig {

/// Maps raw source channel labels to (modality, sub_label). User-editable:
/// lines of "RAW LABEL = MODALITY:SUB" (or "= MODALITY" for unlabelled).
/// Lookup normalizes case, collapses whitespace to '-', and strips common
/// reference suffixes (-A1, -A2, -M1, -M2, -REF) before matching.
class LabelMap {
 public:
  static LabelMap defaults();
  static LabelMap load_file(const std::filesystem::path& path);
  static LabelMap parse(std::string_view text);

  void add(std::string raw, Modality modality, std::string sub_label);
  std::optional<std::pair<Modality, std::string>> lookup(
      std::string_view raw_label) const;

  static std::string normalize(std::string_view raw);

 private:
  std::map<std::string, std::pair<Modality, std::string>> entries_;
};

struct EdfSignalHeader {
  std::string label;
  std::string transducer;
  std::string physical_dimension;
  double physical_min = 0.0;
  double physical_max = 0.0;
  int digital_min = 0;
  int digital_max = 0;
  std::string prefiltering;
  int samples_per_record = 0;
  std::string reserved;

  bool is_annotation_channel() const;
};

struct EdfHeader {
  std::string version;       // "0" for EDF
  std::string patient_id;
  std::string recording_id;
  std::string start_date;    // dd.mm.yy
  std::string start_time;    // hh.mm.ss
  int header_bytes = 0;
  std::string reserved;
  long num_records = 0;      // -1 in the wild means "unknown, read to EOF"
  double record_duration = 0.0;  // seconds
  int num_signals = 0;
  std::vector<EdfSignalHeader> signals;
};

struct EdfFile {
  EdfHeader header;
  // digital[s] holds all samples of signal s, record-concatenated.
  std::vector<std::vector<std::int16_t>> digital;
};

/// Physical value of one digital sample under the signal's calibration.
double edf_calibrate(const EdfSignalHeader& sig, std::int16_t d);

EdfHeader parse_edf_header(std::span<const std::uint8_t> bytes);
EdfFile parse_edf_file_bytes(std::span<const std::uint8_t> bytes);

/// Full parse: header + data records + calibration + label mapping.
/// Annotation channels are skipped. Unknown labels are dropped with a count
/// unless strict, in which case they raise UnknownLabel.
struct EdfParseOptions {
  const LabelMap* label_map = nullptr;  // nullptr => LabelMap::defaults()
  bool strict_labels = false;
  std::string session_id;  // empty => recording_id or "edf"
};
struct EdfParseStats {
  int unknown_labels = 0;
  int annotation_channels_skipped = 0;
};
SignalRecord parse_edf(std::span<const std::uint8_t> bytes,
                       const EdfParseOptions& options = {},
                       EdfParseStats* stats = nullptr);

/// Fixture writer: serializes a header + digital samples back to EDF bytes
/// with canonical space padding. parse -> write round-trips byte-exactly on
/// files this writer produced.
std::vector<std::uint8_t> write_edf(
    const EdfHeader& header,
    const std::vector<std::vector<std::int16_t>>& digital);

std::vector<std::uint8_t> read_binary_file(const std::filesystem::path& path);

}  // namespace pairsig
