#pragma once

#include <optional>
#include <span>
#include <vector>

#include "pairsig/types.hpp"

namespace pairsig {

/// Butterworth band-pass description. Applied forward-backward when
/// zero_phase, which doubles the effective attenuation and cancels phase.
struct FilterSpec {
  double low_cut = 0.5;   // Hz
  double high_cut = 45.0; // Hz
  int order = 4;
  bool zero_phase = true;
};

/// One second-order section, direct form II transposed.
struct Biquad {
  double b0, b1, b2;
  double a1, a2;
};

/// Digital Butterworth band-pass as cascaded biquads (analog prototype,
/// band transform, bilinear map). Throws BandOutOfRange against Nyquist.
std::vector<Biquad> design_butterworth_bandpass(const FilterSpec& spec,
                                                double rate);

/// Linear-interpolation resampling with terminal hold;
/// output length = round(len * to_rate / from_rate).
std::vector<double> resample(std::span<const double> samples, double from_rate,
                             double to_rate);

/// Zero-phase (or single-pass) band-pass filter with odd-reflection padding
/// and steady-state initial conditions. Output length equals input length.
std::vector<double> bandpass_filter(std::span<const double> samples,
                                    double rate, const FilterSpec& spec);

struct ZscoreResult {
  std::vector<double> values;
  bool constant_channel = false;
};

/// Per-channel standardization with population (1/N) statistics. Constant
/// input maps to zeros with the flag set.
ZscoreResult zscore(std::span<const double> samples);

struct PreprocessOptions {
  FilterSpec filter;
  std::optional<double> resample_to;  // common rate; unset => keep rates
  bool apply_filter = true;
  bool apply_zscore = true;
};

struct PreprocessStats {
  int constant_channels = 0;
  int resampled_channels = 0;
};

/// Full per-channel chain: (anti-alias band-pass when downsampling by >= 2x)
/// -> resample -> band-pass -> z-score.
SignalRecord preprocess_record(const SignalRecord& record,
                               const PreprocessOptions& options,
                               PreprocessStats* stats = nullptr);

}  // namespace pairsig
