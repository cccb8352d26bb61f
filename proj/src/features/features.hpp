#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

#include "dsp/types.hpp"

namespace exknet::feat {

// Per-frame conditioning features. Dimension order everywhere (files,
// stats, network conditions) is lsf_1..lsf_p, f0_hz, gain, vuv.
struct AcousticFrame {
  std::vector<double> lsf;  // ascending radian frequencies, order p
  double f0_hz = 0.0;       // 0 when unvoiced
  double gain = 0.0;        // ln(frame RMS + 1e-9)
  bool voiced = false;
};

struct FeatureTrack {
  std::vector<AcousticFrame> frames;
  dsp::FrameSpec spec;
  int sample_rate_hz = 24000;
  std::string speaker_id;

  int lsf_order() const { return frames.empty() ? 0 : static_cast<int>(frames[0].lsf.size()); }
  int dim() const { return lsf_order() + 3; }
  std::size_t size() const { return frames.size(); }

  std::vector<double> row(std::size_t i) const;
  void set_row(std::size_t i, const std::vector<double>& values);
};

struct NormalizationStats {
  std::vector<double> mean;
  std::vector<double> std;  // floored at 1e-6

  std::size_t dim() const { return mean.size(); }
};

struct F0Options {
  double f0_min_hz = 50.0;
  double f0_max_hz = 500.0;
  double voicing_threshold = 0.45;  // on normalized-autocorrelation peak
  double silence_floor_db = -60.0;
};

struct ExtractOptions {
  dsp::FrameSpec spec;
  int lpc_order = 40;
  F0Options f0;
};

// Normalized-autocorrelation pitch estimate with parabolic peak
// interpolation. Returns (f0_hz, periodicity in [0, 1]); degenerate frames
// give (0, 0). Lags are clipped to the frame length.
struct F0Estimate {
  double f0_hz = 0.0;
  double periodicity = 0.0;
};
F0Estimate estimate_f0(const std::vector<double>& frame, int sample_rate_hz,
                       double f0_min_hz = 50.0, double f0_max_hz = 500.0);

// Voiced iff periodic enough and above the silence gate. `gain` is the log
// RMS the track stores; the gate is expressed in dB.
bool detect_voicing(double periodicity, double gain, const F0Options& opt = {});

// Full per-frame analysis: Hann-windowed autocorrelation -> order-p LSF,
// pitch/voicing (on a window twice the frame length, centered on the frame,
// so the lowest pitches still fit), gain = ln(RMS + 1e-9).
FeatureTrack extract_features(const dsp::Waveform& w, const ExtractOptions& opt,
                              const std::string& speaker_id = "");

// Per-dimension stats over all frames of all tracks. The vuv dimension is
// fixed at mean 0 / std 1 so z-scoring leaves the binary flag untouched.
NormalizationStats compute_norm_stats(const std::vector<const FeatureTrack*>& tracks);

FeatureTrack normalize_track(const FeatureTrack& t, const NormalizationStats& stats);
FeatureTrack denormalize_track(const FeatureTrack& t, const NormalizationStats& stats);

// Replaces unvoiced f0 values with linear interpolation between voiced
// neighbors (edge frames take the nearest voiced value) so the f0 dimension
// the network sees is continuous. vuv flags keep the truth.
FeatureTrack interpolate_unvoiced_f0(const FeatureTrack& t);

// Frame-to-sample duplication: column t of the result is the feature vector
// of frame t/hop. Matrix is dim x (frames * hop).
Eigen::MatrixXd upsample_features(const FeatureTrack& t);

// Multiplies voiced frames' f0 by `factor`; everything else untouched.
FeatureTrack scale_f0(const FeatureTrack& t, double factor);

// Adds seeded Gaussian noise of standard deviation `noise_std` in the
// normalized feature space of `stats` to the continuous dimensions, then
// restores the LSF ordering invariant and the vuv/f0 consistency.
FeatureTrack perturb_features(const FeatureTrack& t, double noise_std, std::uint64_t seed,
                              const NormalizationStats& stats, const F0Options& f0 = {});

}  // namespace exknet::feat
