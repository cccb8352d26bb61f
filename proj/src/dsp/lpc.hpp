#pragma once

#include <vector>

#include "dsp/types.hpp"

namespace exknet::dsp {

// Biased, unnormalized autocorrelation r[k] = sum_n x[n] * x[n+k].
std::vector<double> autocorrelation(const std::vector<double>& frame, int max_lag);

// Solves the Toeplitz normal equations for an order-p predictor. A small
// ridge (1e-9 * r[0]) and white-noise floor (1e-12) are applied to r[0] so
// silence frames stay solvable.
LpcCoefficients levinson_durbin(const std::vector<double>& r, int order);

// Reflection coefficients via the step-down recursion. Throws if the filter
// degenerates (|k| >= 1 means non-minimum-phase).
std::vector<double> reflection_coefficients(const LpcCoefficients& lpc);
bool is_minimum_phase(const LpcCoefficients& lpc);

// Inverse (analysis) filtering: e[n] = x[n] - sum_k a_k x[n-k], coefficients
// held constant over each hop interval; samples past the last frame reuse the
// final frame's coefficients. History before sample 0 is zero.
Waveform lp_analysis_filter(const Waveform& w, const std::vector<LpcCoefficients>& per_frame_lpc,
                            const FrameSpec& spec);

// Recursive (synthesis) filtering: x[n] = e[n] + sum_k a_k x[n-k]. Exact
// inverse of the analysis filter under the same coefficient schedule.
// Verifies each frame's filter is minimum phase before running.
Waveform lp_synthesis_filter(const Waveform& e, const std::vector<LpcCoefficients>& per_frame_lpc,
                             const FrameSpec& spec);

}  // namespace exknet::dsp
