#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "pairsig/types.hpp"

namespace pairsig {

struct SynthChannelSpec {
  Modality modality = Modality::eeg;
  std::string sub_label;
  double amplitude = 1.0;  // output scale; correlations are unaffected
};

struct SynthBlock {
  FatigueClass label = FatigueClass::alert;
  double seconds = 0.0;
};

struct CouplingPair {
  std::string a;  // channel token, e.g. "C3-EEG"
  std::string b;
  double r = 0.0;
};

/// Target pairwise correlation structure for one fatigue class: a default
/// off-diagonal level with per-pair overrides.
struct ClassCoupling {
  double default_r = 0.0;
  std::vector<CouplingPair> pairs;
};

struct SynthConfig {
  double rate = 512.0;
  std::vector<SynthChannelSpec> channels;  // empty => default 9-channel layout
  std::vector<SynthBlock> blocks;
  std::map<int, ClassCoupling> coupling;  // keyed by class code 0/1/2
  double oscillator_fraction = 0.5;       // latent power in sinusoids vs noise
  std::string session_id = "synthetic";

  static std::vector<SynthChannelSpec> default_layout();
  static SynthConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

/// Deterministic multichannel generator: channels are Cholesky mixtures of
/// shared unit-variance latents (sinusoid plus Gaussian noise), so the
/// expected pairwise Pearson correlation inside each class block equals the
/// configured coupling. Pure function of (config, seed).
SignalRecord generate_synthetic(const SynthConfig& config, std::uint64_t seed);

/// Lower-triangular factor of a symmetric PSD matrix; tolerates rank
/// deficiency (exact r = 1 couplings). Throws InfeasibleCoupling otherwise.
std::vector<std::vector<double>> semidefinite_cholesky(
    const std::vector<std::vector<double>>& matrix);

int representative_kss(FatigueClass label);

}  // namespace pairsig
