#include "eval/metrics.hpp"

#include <cmath>

#include "dsp/fft.hpp"
#include "dsp/framing.hpp"
#include "util/error.hpp"
#include "util/log.hpp"

namespace exknet::eval {

namespace {
constexpr int kFftSize = 512;
constexpr double kMagnitudeFloor = 1e-10;
}  // namespace

double lsd(const dsp::Waveform& reference, const dsp::Waveform& test, const dsp::FrameSpec& spec) {
  if (reference.sample_rate_hz != test.sample_rate_hz) {
    throw_argument("lsd: sample rates differ");
  }
  const std::size_t len = std::min(reference.samples.size(), test.samples.size());
  if (len == 0) throw_argument("lsd: empty overlap");

  dsp::FrameSpec hann_spec = spec;
  hann_spec.window = dsp::WindowKind::Hann;

  dsp::Waveform a, b;
  a.sample_rate_hz = reference.sample_rate_hz;
  b.sample_rate_hz = test.sample_rate_hz;
  a.samples.assign(reference.samples.begin(), reference.samples.begin() + len);
  b.samples.assign(test.samples.begin(), test.samples.begin() + len);

  const auto frames_a = dsp::frame_signal(a, hann_spec);
  const auto frames_b = dsp::frame_signal(b, hann_spec);

  double total = 0.0;
  for (std::size_t i = 0; i < frames_a.size(); ++i) {
    const std::vector<double> sa = dsp::magnitude_spectrum(frames_a[i], kFftSize);
    const std::vector<double> sb = dsp::magnitude_spectrum(frames_b[i], kFftSize);
    double acc = 0.0;
    for (std::size_t k = 0; k < sa.size(); ++k) {
      const double la = 20.0 * std::log10(std::max(sa[k], kMagnitudeFloor));
      const double lb = 20.0 * std::log10(std::max(sb[k], kMagnitudeFloor));
      acc += (la - lb) * (la - lb);
    }
    total += std::sqrt(acc / static_cast<double>(sa.size()));
  }
  return total / static_cast<double>(frames_a.size());
}

double f0_rmse(const feat::FeatureTrack& reference, const feat::FeatureTrack& test) {
  const std::size_t n = std::min(reference.size(), test.size());
  double acc = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const feat::AcousticFrame& r = reference.frames[i];
    const feat::AcousticFrame& t = test.frames[i];
    if (r.voiced && t.voiced) {
      const double d = r.f0_hz - t.f0_hz;
      acc += d * d;
      ++count;
    }
  }
  if (count == 0) {
    log_warn("f0_rmse: no frames voiced in both tracks, returning 0");
    return 0.0;
  }
  return std::sqrt(acc / static_cast<double>(count));
}

}  // namespace exknet::eval
