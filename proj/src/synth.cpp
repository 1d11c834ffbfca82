#include "pairsig/synth.hpp"

#include <cmath>
#include <cstdint>

#include "pairsig/errors.hpp"
#include "pairsig/rng.hpp"

namespace pairsig {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;
constexpr double kPivotTolerance = 1e-9;

int channel_index(const std::vector<SynthChannelSpec>& channels,
                  const std::string& token) {
  auto parsed = parse_channel_token(token);
  if (!parsed) {
    fail(Errc::config_invalid, "bad channel token '" + token + "'");
  }
  for (std::size_t i = 0; i < channels.size(); ++i) {
    if (channels[i].modality == parsed->first &&
        channels[i].sub_label == parsed->second) {
      return static_cast<int>(i);
    }
  }
  fail(Errc::config_invalid, "coupling names unknown channel '" + token + "'");
}

std::vector<std::vector<double>> coupling_matrix(
    const std::vector<SynthChannelSpec>& channels, const ClassCoupling& spec) {
  const std::size_t k = channels.size();
  std::vector<std::vector<double>> r(k, std::vector<double>(k, spec.default_r));
  for (std::size_t i = 0; i < k; ++i) r[i][i] = 1.0;
  for (const auto& pair : spec.pairs) {
    int a = channel_index(channels, pair.a);
    int b = channel_index(channels, pair.b);
    r[a][b] = pair.r;
    r[b][a] = pair.r;
  }
  return r;
}

}  // namespace

std::vector<std::vector<double>> semidefinite_cholesky(
    const std::vector<std::vector<double>>& matrix) {
  const std::size_t n = matrix.size();
  std::vector<std::vector<double>> l(n, std::vector<double>(n, 0.0));
  for (std::size_t j = 0; j < n; ++j) {
    double d = matrix[j][j];
    for (std::size_t k = 0; k < j; ++k) d -= l[j][k] * l[j][k];
    if (d < -kPivotTolerance) {
      fail(Errc::infeasible_coupling,
           "coupling matrix is not positive semidefinite (pivot " +
               std::to_string(d) + " at " + std::to_string(j) + ")");
    }
    if (d <= kPivotTolerance) {
      // Rank-deficient direction: the column must be fully explained by the
      // previous factors, otherwise the matrix is indefinite.
      l[j][j] = 0.0;
      for (std::size_t i = j + 1; i < n; ++i) {
        double r = matrix[i][j];
        for (std::size_t k = 0; k < j; ++k) r -= l[i][k] * l[j][k];
        if (std::fabs(r) > 1e-6) {
          fail(Errc::infeasible_coupling,
               "coupling matrix is not positive semidefinite (residual " +
                   std::to_string(r) + " in column " + std::to_string(j) + ")");
        }
        l[i][j] = 0.0;
      }
      continue;
    }
    l[j][j] = std::sqrt(d);
    for (std::size_t i = j + 1; i < n; ++i) {
      double v = matrix[i][j];
      for (std::size_t k = 0; k < j; ++k) v -= l[i][k] * l[j][k];
      l[i][j] = v / l[j][j];
    }
  }
  return l;
}

int representative_kss(FatigueClass label) {
  switch (label) {
    case FatigueClass::alert: return 2;
    case FatigueClass::normal: return 5;
    case FatigueClass::fatigued: return 8;
  }
  return 5;
}

std::vector<SynthChannelSpec> SynthConfig::default_layout() {
  return {
      {Modality::ecg, "", 1.0},  {Modality::eog, "H", 1.0},
      {Modality::eog, "V", 1.0}, {Modality::emg, "", 1.0},
      {Modality::eeg, "C3", 1.0}, {Modality::eeg, "C4", 1.0},
      {Modality::eeg, "Cz", 1.0}, {Modality::eeg, "Fz", 1.0},
      {Modality::eeg, "Pz", 1.0},
  };
}

SignalRecord generate_synthetic(const SynthConfig& config, std::uint64_t seed) {
  if (config.rate <= 0.0) fail(Errc::non_positive_rate, "rate must be > 0");
  if (config.blocks.empty()) {
    fail(Errc::config_invalid, "synthetic config needs at least one block");
  }
  const std::vector<SynthChannelSpec> channels =
      config.channels.empty() ? SynthConfig::default_layout() : config.channels;
  const std::size_t k = channels.size();
  if (k == 0) fail(Errc::no_channels, "synthetic config has no channels");
  const double osc = std::min(std::max(config.oscillator_fraction, 0.0), 1.0);

  // One Cholesky factor per class that actually appears.
  std::map<int, std::vector<std::vector<double>>> factors;
  for (const auto& block : config.blocks) {
    const int cls = static_cast<int>(block.label);
    if (factors.count(cls)) continue;
    ClassCoupling spec;
    auto it = config.coupling.find(cls);
    if (it != config.coupling.end()) spec = it->second;
    factors[cls] = semidefinite_cholesky(coupling_matrix(channels, spec));
  }

  SignalRecord record;
  record.session_id = config.session_id;
  record.channels.resize(k);
  for (std::size_t i = 0; i < k; ++i) {
    record.channels[i].meta.modality = channels[i].modality;
    record.channels[i].meta.sub_label = channels[i].sub_label;
    record.channels[i].meta.label = record.channels[i].meta.token();
    record.channels[i].meta.sampling_rate = config.rate;
    record.channels[i].meta.physical_unit = "au";
  }

  const double osc_scale = std::sqrt(osc) * std::sqrt(2.0);
  const double noise_scale = std::sqrt(1.0 - osc);
  double block_start = 0.0;
  std::vector<double> latents(k);
  for (std::size_t b = 0; b < config.blocks.size(); ++b) {
    const auto& block = config.blocks[b];
    const int cls = static_cast<int>(block.label);
    const auto& l = factors.at(cls);
    const auto n = static_cast<std::size_t>(
        std::llround(block.seconds * config.rate));
    record.kss_annotations.push_back(
        {block_start, representative_kss(block.label)});

    // Independent seeded stream per (block, latent): frequency, phase, noise.
    std::vector<Rng> rngs;
    std::vector<double> freqs(k);
    std::vector<double> phases(k);
    rngs.reserve(k);
    for (std::size_t j = 0; j < k; ++j) {
      rngs.emplace_back(seed_for(seed, 0x5a17, b, j));
      freqs[j] = 2.0 + 1.9 * static_cast<double>(j) + rngs[j].uniform();
      phases[j] = 2.0 * kPi * rngs[j].uniform();
    }
    for (std::size_t t = 0; t < n; ++t) {
      const double time = static_cast<double>(t) / config.rate;
      for (std::size_t j = 0; j < k; ++j) {
        latents[j] = osc_scale * std::sin(2.0 * kPi * freqs[j] * time + phases[j]) +
                     noise_scale * rngs[j].normal();
      }
      for (std::size_t i = 0; i < k; ++i) {
        double v = 0.0;
        for (std::size_t j = 0; j <= i; ++j) v += l[i][j] * latents[j];
        record.channels[i].samples.push_back(channels[i].amplitude * v);
      }
    }
    block_start += static_cast<double>(n) / config.rate;
  }
  return record;
}

// ---------------------------------------------------------------------------
// JSON

SynthConfig SynthConfig::from_json(const nlohmann::json& j) {
  SynthConfig config;
  config.rate = j.value("rate", 512.0);
  config.oscillator_fraction = j.value("oscillator_fraction", 0.5);
  config.session_id = j.value("session_id", std::string("synthetic"));
  if (j.contains("channels")) {
    for (const auto& cj : j.at("channels")) {
      SynthChannelSpec spec;
      auto modality = modality_from_string(cj.at("modality").get<std::string>());
      if (!modality) {
        fail(Errc::config_invalid,
             "channels[].modality must be one of ECG, EOG, EMG, EEG");
      }
      spec.modality = *modality;
      spec.sub_label = cj.value("sub_label", std::string());
      spec.amplitude = cj.value("amplitude", 1.0);
      config.channels.push_back(std::move(spec));
    }
  }
  if (!j.contains("blocks")) {
    fail(Errc::config_invalid, "synthetic config requires blocks");
  }
  for (const auto& bj : j.at("blocks")) {
    int cls = bj.at("class").get<int>();
    if (cls < 0 || cls > 2) {
      fail(Errc::config_invalid, "blocks[].class must be 0, 1 or 2");
    }
    double seconds = bj.at("seconds").get<double>();
    if (seconds <= 0) fail(Errc::config_invalid, "blocks[].seconds must be > 0");
    config.blocks.push_back({static_cast<FatigueClass>(cls), seconds});
  }
  if (j.contains("coupling")) {
    for (const auto& [key, cj] : j.at("coupling").items()) {
      ClassCoupling coupling;
      coupling.default_r = cj.value("default", 0.0);
      if (cj.contains("pairs")) {
        for (const auto& pj : cj.at("pairs")) {
          coupling.pairs.push_back({pj.at("a").get<std::string>(),
                                    pj.at("b").get<std::string>(),
                                    pj.at("r").get<double>()});
        }
      }
      config.coupling[std::stoi(key)] = std::move(coupling);
    }
  }
  return config;
}

nlohmann::json SynthConfig::to_json() const {
  nlohmann::json j;
  j["rate"] = rate;
  j["oscillator_fraction"] = oscillator_fraction;
  j["session_id"] = session_id;
  if (!channels.empty()) {
    auto& cj = j["channels"] = nlohmann::json::array();
    for (const auto& c : channels) {
      cj.push_back({{"modality", std::string(to_string(c.modality))},
                    {"sub_label", c.sub_label},
                    {"amplitude", c.amplitude}});
    }
  }
  auto& bj = j["blocks"] = nlohmann::json::array();
  for (const auto& b : blocks) {
    bj.push_back({{"class", static_cast<int>(b.label)}, {"seconds", b.seconds}});
  }
  if (!coupling.empty()) {
    auto& cj = j["coupling"] = nlohmann::json::object();
    for (const auto& [cls, spec] : coupling) {
      nlohmann::json sj;
      sj["default"] = spec.default_r;
      if (!spec.pairs.empty()) {
        auto& pj = sj["pairs"] = nlohmann::json::array();
        for (const auto& p : spec.pairs) {
          pj.push_back({{"a", p.a}, {"b", p.b}, {"r", p.r}});
        }
      }
      cj[std::to_string(cls)] = std::move(sj);
    }
  }
  return j;
}

}  // namespace pairsig
