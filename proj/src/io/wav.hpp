#pragma once

#include <string>

#include "dsp/types.hpp"

namespace exknet::io {

// RIFF/WAVE, PCM 16-bit signed little-endian, mono. Samples map to
// [-1, 1) by division by 32768. Multichannel, non-PCM and truncated files
// are rejected with format errors; no resampling is performed.
dsp::Waveform read_wav(const std::string& path);
void write_wav(const dsp::Waveform& w, const std::string& path);

}  // namespace exknet::io
