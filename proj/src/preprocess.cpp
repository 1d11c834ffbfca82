#include "pairsig/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

#include "pairsig/errors.hpp"

namespace pairsig {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

using cplx = std::complex<double>;

/// Biquad cascade, one forward pass. `zi_scale` gives the DC level the state
/// is initialized for (steady-state step response), so a constant input
/// produces its steady-state output from the first sample.
void sos_filter_inplace(const std::vector<Biquad>& sections,
                        std::vector<double>& x, double zi_level) {
  double level = zi_level;
  for (const auto& s : sections) {
    const double h1 = (s.b0 + s.b1 + s.b2) / (1.0 + s.a1 + s.a2);
    const double y_ss = h1 * level;
    // Direct form II transposed steady state for a step of height `level`.
    double s2 = s.b2 * level - s.a2 * y_ss;
    double s1 = s.b1 * level - s.a1 * y_ss + s2;
    for (double& v : x) {
      const double in = v;
      const double out = s.b0 * in + s1;
      s1 = s.b1 * in - s.a1 * out + s2;
      s2 = s.b2 * in - s.a2 * out;
      v = out;
    }
    level = y_ss;
  }
}

}  // namespace

std::vector<Biquad> design_butterworth_bandpass(const FilterSpec& spec,
                                                double rate) {
  if (rate <= 0.0) fail(Errc::non_positive_rate, "sampling rate must be > 0");
  if (spec.order < 1) fail(Errc::band_out_of_range, "filter order must be >= 1");
  const double nyquist = rate / 2.0;
  if (!(0.0 < spec.low_cut && spec.low_cut < spec.high_cut &&
        spec.high_cut < nyquist)) {
    fail(Errc::band_out_of_range,
         "band [" + std::to_string(spec.low_cut) + ", " +
             std::to_string(spec.high_cut) + "] Hz invalid for rate " +
             std::to_string(rate) + " Hz");
  }

  const int n = spec.order;
  // Analog prototype poles on the unit circle, left half plane.
  std::vector<cplx> proto;
  for (int k = 1; k <= n; ++k) {
    const double theta = kPi * (2.0 * k + n - 1.0) / (2.0 * n);
    proto.emplace_back(std::cos(theta), std::sin(theta));
  }

  // Pre-warped band edges and low-pass -> band-pass transform.
  const double fs2 = 2.0 * rate;
  const double w1 = fs2 * std::tan(kPi * spec.low_cut / rate);
  const double w2 = fs2 * std::tan(kPi * spec.high_cut / rate);
  const double bw = w2 - w1;
  const double w0_sq = w1 * w2;

  std::vector<cplx> analog_poles;
  analog_poles.reserve(2 * proto.size());
  for (const cplx& p : proto) {
    const cplx half = p * (bw / 2.0);
    const cplx root = std::sqrt(half * half - w0_sq);
    analog_poles.push_back(half + root);
    analog_poles.push_back(half - root);
  }
  // Band-pass gain: bw^n with n zeros at s = 0.
  double log_gain = static_cast<double>(n) * std::log(bw);

  // Bilinear transform. Zeros: n at z = +1 (from s = 0) and n at z = -1.
  std::vector<cplx> z_poles;
  cplx gain_num = 1.0;  // prod(fs2 - analog zeros) over the n zeros at 0
  cplx gain_den = 1.0;  // prod(fs2 - analog poles)
  for (const cplx& s : analog_poles) {
    z_poles.push_back((fs2 + s) / (fs2 - s));
    gain_den *= (fs2 - s);
  }
  for (int i = 0; i < n; ++i) gain_num *= fs2;
  const double k_gain =
      std::exp(log_gain) * std::real(gain_num / gain_den);

  // Pair poles into real-coefficient biquads. The band transform maps each
  // prototype pole to the +/- root pair; for complex prototype poles the
  // conjugate symmetry pairs each root with its own conjugate.
  struct PolePair {
    cplx a, b;
  };
  std::vector<PolePair> pairs;
  if (n % 2 == 1) {
    // Real prototype pole sits at index (n-1)/2; its two band-pass roots
    // form one real-coefficient section.
    const int real_idx = (n - 1) / 2;
    pairs.push_back({analog_poles[2 * real_idx], analog_poles[2 * real_idx + 1]});
  }
  for (int k = 0; k < n / 2; ++k) {
    // Prototype poles k and n-1-k are conjugates; use pole k's two roots,
    // each paired with its conjugate.
    pairs.push_back({analog_poles[2 * k], std::conj(analog_poles[2 * k])});
    pairs.push_back({analog_poles[2 * k + 1], std::conj(analog_poles[2 * k + 1])});
  }

  std::vector<Biquad> sections;
  sections.reserve(pairs.size());
  const double section_gain =
      std::pow(std::fabs(k_gain), 1.0 / static_cast<double>(pairs.size()));
  const double sign = k_gain < 0.0 ? -1.0 : 1.0;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const cplx za = (fs2 + pairs[i].a) / (fs2 - pairs[i].a);
    const cplx zb = (fs2 + pairs[i].b) / (fs2 - pairs[i].b);
    Biquad s{};
    const double g = i == 0 ? section_gain * sign : section_gain;
    // Numerator (z - 1)(z + 1) = z^2 - 1: one zero from each bilinear set.
    s.b0 = g;
    s.b1 = 0.0;
    s.b2 = -g;
    s.a1 = -std::real(za + zb);
    s.a2 = std::real(za * zb);
    sections.push_back(s);
  }
  return sections;
}

std::vector<double> resample(std::span<const double> samples, double from_rate,
                             double to_rate) {
  if (from_rate <= 0.0 || to_rate <= 0.0) {
    fail(Errc::non_positive_rate, "rates must be > 0");
  }
  if (samples.empty()) fail(Errc::empty_input, "cannot resample empty input");
  if (from_rate == to_rate) return {samples.begin(), samples.end()};
  if (samples.size() < 2) fail(Errc::too_short, "need at least 2 samples");

  const auto out_len = static_cast<std::size_t>(std::llround(
      static_cast<double>(samples.size()) * to_rate / from_rate));
  std::vector<double> out;
  out.reserve(out_len);
  const double step = from_rate / to_rate;
  const std::size_t last = samples.size() - 1;
  for (std::size_t i = 0; i < out_len; ++i) {
    const double pos = static_cast<double>(i) * step;
    const auto j = static_cast<std::size_t>(pos);
    if (j >= last) {
      out.push_back(samples[last]);  // terminal hold
      continue;
    }
    const double frac = pos - static_cast<double>(j);
    out.push_back(samples[j] * (1.0 - frac) + samples[j + 1] * frac);
  }
  return out;
}

std::vector<double> bandpass_filter(std::span<const double> samples,
                                    double rate, const FilterSpec& spec) {
  const auto sections = design_butterworth_bandpass(spec, rate);
  if (samples.size() <= static_cast<std::size_t>(3 * spec.order)) {
    fail(Errc::too_short, "need more than 3 x order samples, got " +
                              std::to_string(samples.size()));
  }
  // Odd reflection about both endpoints, capped by the signal length.
  const std::size_t realized_order = 2 * sections.size();
  const std::size_t pad =
      std::min(3 * realized_order, samples.size() - 1);
  const std::size_t n = samples.size();

  std::vector<double> x;
  x.reserve(n + 2 * pad);
  for (std::size_t i = 0; i < pad; ++i) {
    x.push_back(2.0 * samples[0] - samples[pad - i]);
  }
  x.insert(x.end(), samples.begin(), samples.end());
  for (std::size_t i = 0; i < pad; ++i) {
    x.push_back(2.0 * samples[n - 1] - samples[n - 2 - i]);
  }

  sos_filter_inplace(sections, x, x.front());
  if (spec.zero_phase) {
    std::reverse(x.begin(), x.end());
    sos_filter_inplace(sections, x, x.front());
    std::reverse(x.begin(), x.end());
  }
  return {x.begin() + static_cast<std::ptrdiff_t>(pad),
          x.begin() + static_cast<std::ptrdiff_t>(pad + n)};
}

ZscoreResult zscore(std::span<const double> samples) {
  if (samples.empty()) fail(Errc::empty_input, "cannot z-score empty input");
  if (samples.size() < 2) fail(Errc::too_short, "need at least 2 samples");
  const double n = static_cast<double>(samples.size());
  double mean = 0.0;
  for (double v : samples) mean += v;
  mean /= n;
  double var = 0.0;
  for (double v : samples) var += (v - mean) * (v - mean);
  var /= n;  // population variance

  ZscoreResult result;
  result.values.resize(samples.size());
  if (var < 1e-24) {
    result.constant_channel = true;
    return result;  // all zeros
  }
  const double inv_sd = 1.0 / std::sqrt(var);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    result.values[i] = (samples[i] - mean) * inv_sd;
  }
  return result;
}

SignalRecord preprocess_record(const SignalRecord& record,
                               const PreprocessOptions& options,
                               PreprocessStats* stats) {
  if (record.channels.empty()) fail(Errc::no_channels, "record has no channels");
  SignalRecord out;
  out.session_id = record.session_id;
  out.kss_annotations = record.kss_annotations;
  out.channels.reserve(record.channels.size());
  for (const auto& ch : record.channels) {
    Channel next;
    next.meta = ch.meta;
    std::vector<double> samples = ch.samples;
    const double from = ch.meta.sampling_rate;
    double rate = from;
    if (options.resample_to && *options.resample_to != from) {
      const double to = *options.resample_to;
      if (options.apply_filter && to < from / 2.0) {
        samples = bandpass_filter(samples, from, options.filter);
      }
      samples = resample(samples, from, to);
      rate = to;
      next.meta.sampling_rate = to;
      if (stats) ++stats->resampled_channels;
    }
    if (options.apply_filter) {
      samples = bandpass_filter(samples, rate, options.filter);
    }
    if (options.apply_zscore) {
      auto z = zscore(samples);
      if (z.constant_channel && stats) ++stats->constant_channels;
      samples = std::move(z.values);
    }
    next.samples = std::move(samples);
    out.channels.push_back(std::move(next));
  }
  return out;
}

}  // namespace pairsig
