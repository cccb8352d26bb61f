#pragma once

#include <cstddef>
#include <vector>

#include "dsp/types.hpp"

namespace exknet::dsp {

// Number of analysis frames for a signal of the given length: full windows at
// hop spacing when the signal covers at least one window, otherwise a single
// zero-padded tail frame.
std::size_t frame_count(std::size_t length, const FrameSpec& spec);

// Symmetric window of the requested kind; all-ones for rectangular.
std::vector<double> make_window(WindowKind kind, int length);

// Slices (and windows) the signal into frames. The final partial frame, when
// present, is zero-padded to frame_len.
std::vector<std::vector<double>> frame_signal(const Waveform& w, const FrameSpec& spec);

// One frame starting at sample `start`, zero-padded past the end of `x`.
std::vector<double> extract_frame(const std::vector<double>& x, std::size_t start, int frame_len);

}  // namespace exknet::dsp
