#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>

#include "dsp/mulaw.hpp"
#include "dsp/types.hpp"
#include "features/features.hpp"
#include "net/sampler.hpp"
#include "train/checkpoint.hpp"
#include "vocoder/kind.hpp"

namespace exknet::voc {

// Training-side target preparation (Fig. 1a direction). WaveNet codes the
// speech samples; ExcitNet codes the LP residual scaled by its per-utterance
// 99th-percentile magnitude and hard-limited to [-1, 1]. Conditions are the
// f0-interpolated, z-scored features, stored per frame; column t of
// upsampled() is the vector for sample t.
struct PreparedTargets {
  dsp::CodeStream codes;         // one symbol per sample, length = usable length
  Eigen::MatrixXf cond_frames;   // condition_dim x n_frames, normalized
  int hop = 0;
  double excitation_scale = 1.0;  // 1.0 for WaveNet

  std::size_t length() const { return codes.size(); }
  Eigen::MatrixXf upsampled() const;
  Eigen::MatrixXf window(std::size_t begin, std::size_t end) const;  // columns [begin, end)
};

PreparedTargets prepare_targets(const dsp::Waveform& w, const feat::FeatureTrack& track,
                                VocoderKind kind, const feat::NormalizationStats& stats);

// Synthesis (Fig. 1b direction): autoregressive sample generation under the
// checkpoint's statistics, one code per sample, mu-law expansion, and for
// ExcitNet the gain-derived residual rescaling plus LP synthesis filtering.
// Output length is frames * hop; deterministic per (checkpoint, track, mode,
// seed).
dsp::Waveform synthesize(const training::Checkpoint& ckpt, const feat::FeatureTrack& track,
                         net::SampleMode mode, std::uint64_t seed);

// Ground-truth-excitation pipeline: prepare_targets then immediate decoding,
// no neural model. Isolates codec + filter error.
dsp::Waveform copy_synthesis(const dsp::Waveform& w, VocoderKind kind,
                             const feat::ExtractOptions& opt);

// Residual scale used at synthesis time: exp(mean voiced gain) times the
// checkpoint's calibration constant.
double synthesis_excitation_scale(const feat::FeatureTrack& track, double calibration);

// Per-frame LP coefficients from the track's (raw) LSFs.
std::vector<dsp::LpcCoefficients> track_lpc(const feat::FeatureTrack& track);

}  // namespace exknet::voc
