#pragma once

#include <complex>
#include <vector>

namespace exknet::dsp {

// In-place iterative radix-2 FFT; size must be a power of two.
void fft(std::vector<std::complex<double>>& x, bool inverse = false);

// One-sided magnitude spectrum (n/2 + 1 bins) of a real frame zero-padded or
// truncated to n points.
std::vector<double> magnitude_spectrum(const std::vector<double>& frame, int n);

}  // namespace exknet::dsp
