#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dsp/types.hpp"
#include "train/manifest.hpp"

namespace exknet::testsupport {

// Glottal-pulse toy speakers: a pulse train with a drifting F0 through a
// cascade of time-varying formant resonators, interleaved with noise
// fricatives and pauses. Deterministic per seed; speech-like enough for the
// pitch tracker, LP analysis and desk-scale training.
struct ToySpeaker {
  std::string id;
  double f0_base_hz = 150.0;
  std::uint64_t timbre_seed = 0;  // fixes the speaker's vowel inventory
};

struct ToyUtteranceOptions {
  double duration_s = 2.0;
  bool continuous_voicing = false;  // no pauses or fricatives
  double peak = 0.6;
};

dsp::Waveform toy_utterance(const ToySpeaker& speaker, int sample_rate_hz, std::uint64_t seed,
                            const ToyUtteranceOptions& opt = {});

// The stock cast: four SI speakers plus one held-out target.
std::vector<ToySpeaker> toy_si_speakers();
ToySpeaker toy_target_speaker();

struct ToyCorpusLayout {
  double si_train_seconds_per_speaker = 75.0;  // 4 speakers -> 5 min total
  double si_dev_seconds_per_speaker = 10.0;
  double target_train_seconds = 30.0;
  double target_dev_seconds = 6.0;
  double target_test_seconds = 8.0;
  double utterance_seconds = 5.0;
  double test_utterance_seconds = 2.0;
  int sample_rate_hz = 24000;
};

// Writes wavs plus manifest.json under `dir` and returns the manifest path.
// Fully deterministic per seed.
std::string make_toy_corpus(const std::string& dir, std::uint64_t seed,
                            const ToyCorpusLayout& layout = {});

}  // namespace exknet::testsupport
