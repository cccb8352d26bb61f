#include "dsp/framing.hpp"

#include <cmath>

#include "util/error.hpp"

namespace exknet::dsp {

std::size_t frame_count(std::size_t length, const FrameSpec& spec) {
  if (spec.frame_len <= 0 || spec.hop <= 0 || spec.hop > spec.frame_len) {
    throw_argument("frame_count: require 0 < hop <= frame_len");
  }
  if (length == 0) return 0;
  const std::size_t fl = static_cast<std::size_t>(spec.frame_len);
  if (length < fl) return 1;  // one zero-padded tail frame
  return (length - fl) / static_cast<std::size_t>(spec.hop) + 1;
}

std::vector<double> make_window(WindowKind kind, int length) {
  std::vector<double> w(static_cast<std::size_t>(length), 1.0);
  if (kind == WindowKind::Hann && length > 1) {
    for (int n = 0; n < length; ++n) {
      w[n] = 0.5 - 0.5 * std::cos(2.0 * M_PI * n / (length - 1));
    }
  }
  return w;
}

std::vector<double> extract_frame(const std::vector<double>& x, std::size_t start, int frame_len) {
  std::vector<double> frame(static_cast<std::size_t>(frame_len), 0.0);
  for (int n = 0; n < frame_len; ++n) {
    const std::size_t idx = start + static_cast<std::size_t>(n);
    if (idx < x.size()) frame[n] = x[idx];
  }
  return frame;
}

std::vector<std::vector<double>> frame_signal(const Waveform& w, const FrameSpec& spec) {
  if (w.samples.empty()) throw_argument("frame_signal: empty waveform");
  const std::size_t n_frames = frame_count(w.samples.size(), spec);
  const std::vector<double> window = make_window(spec.window, spec.frame_len);

  std::vector<std::vector<double>> frames;
  frames.reserve(n_frames);
  for (std::size_t i = 0; i < n_frames; ++i) {
    std::vector<double> frame =
        extract_frame(w.samples, i * static_cast<std::size_t>(spec.hop), spec.frame_len);
    for (int n = 0; n < spec.frame_len; ++n) frame[n] *= window[n];
    frames.push_back(std::move(frame));
  }
  return frames;
}

}  // namespace exknet::dsp
