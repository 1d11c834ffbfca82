#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace pairsig {

/// Error codes for every failure mode the library can report. The CLI maps
/// these to exit messages; tests match on them.
enum class Errc {
  // ingest
  truncated_header,
  invalid_field,
  degenerate_calibration,
  unknown_label,
  ragged_rows,
  non_numeric_cell,
  empty_file,
  infeasible_coupling,
  // preprocess
  empty_input,
  non_positive_rate,
  band_out_of_range,
  too_short,
  // segmentation
  out_of_range_kss,
  mixed_rates,
  no_channels,
  // features
  length_mismatch,
  lag_too_large,
  missing_channel,
  infeasible_combination,
  // dataset
  single_class,
  too_few_sessions,
  // models
  non_finite,
  width_mismatch,
  // explain
  missing_cover,
  // cli
  config_invalid,
  missing_manifest,
  io_failure,
};

std::string_view errc_name(Errc code);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(std::string(errc_name(code)) + ": " + message),
        code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace pairsig
