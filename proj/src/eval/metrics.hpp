#pragma once

#include "dsp/types.hpp"
#include "features/features.hpp"

namespace exknet::eval {

// Log-spectral distance in dB: canonical framing (Hann), 512-point magnitude
// spectra floored at 1e-10, per-frame RMS over bins of the 20*log10
// difference, mean over frames. Lengths are aligned by truncating the longer
// signal.
double lsd(const dsp::Waveform& reference, const dsp::Waveform& test,
           const dsp::FrameSpec& spec = {});

// RMSE in Hz over frames voiced in both tracks (tracks truncated to the
// shorter); 0 with a warning when no frame is voiced in both.
double f0_rmse(const feat::FeatureTrack& reference, const feat::FeatureTrack& test);

}  // namespace exknet::eval
