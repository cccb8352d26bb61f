#pragma once

#include <cstdint>

#include "dsp/types.hpp"

namespace exknet::dsp {

// mu-law companding over [-1, 1] and the uniform 256-way quantizer used to
// turn companded samples into categorical symbols.

double mulaw_compress(double x, int mu = 255);
double mulaw_expand(double y, int mu = 255);

// Uniform binning of [-1, 1] into 256 bins; values at +1 land in the top bin.
std::uint8_t quantize_256(double y);
// Returns the bin center.
double dequantize_256(std::uint8_t code);

// Full sample -> symbol -> sample paths.
std::uint8_t encode_sample(double x, int mu = 255);
double decode_sample(std::uint8_t code, int mu = 255);

CodeStream encode_waveform(const std::vector<double>& x, int mu = 255);
std::vector<double> decode_codes(const CodeStream& codes, int mu = 255);

}  // namespace exknet::dsp
