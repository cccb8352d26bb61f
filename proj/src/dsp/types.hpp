#pragma once

#include <cstdint>
#include <vector>

namespace exknet::dsp {

// Mono audio, samples in [-1, 1] after load-time normalization.
struct Waveform {
  std::vector<double> samples;
  int sample_rate_hz = 24000;

  std::size_t size() const { return samples.size(); }
  double duration_s() const { return static_cast<double>(samples.size()) / sample_rate_hz; }
};

// 8-bit categorical symbols, one per sample.
using CodeStream = std::vector<std::uint8_t>;

enum class WindowKind { Rectangular, Hann };

struct FrameSpec {
  int frame_len = 480;  // 20 ms at 24 kHz
  int hop = 120;        // 5 ms at 24 kHz
  WindowKind window = WindowKind::Hann;
};

// Predictor coefficients in the convention x_hat[n] = sum_k a[k-1] * x[n-k].
struct LpcCoefficients {
  int order = 0;
  std::vector<double> a;
  double prediction_error_power = 0.0;
};

// Line spectral frequencies: strictly ascending radian angles in (0, pi).
struct LsfVector {
  int order = 0;
  std::vector<double> freqs;
};

}  // namespace exknet::dsp
