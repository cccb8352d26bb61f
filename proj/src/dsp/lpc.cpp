#include "dsp/lpc.hpp"

#include <cmath>
#include <cstddef>
#include <string>

#include "dsp/framing.hpp"
#include "util/error.hpp"

namespace exknet::dsp {

std::vector<double> autocorrelation(const std::vector<double>& frame, int max_lag) {
  const std::size_t n = frame.size();
  if (max_lag < 0 || static_cast<std::size_t>(max_lag) >= n) {
    throw_argument("autocorrelation: max_lag must be < frame length");
  }
  std::vector<double> r(static_cast<std::size_t>(max_lag) + 1, 0.0);
  for (int k = 0; k <= max_lag; ++k) {
    double acc = 0.0;
    for (std::size_t i = 0; i + static_cast<std::size_t>(k) < n; ++i) {
      acc += frame[i] * frame[i + static_cast<std::size_t>(k)];
    }
    r[k] = acc;
  }
  return r;
}

LpcCoefficients levinson_durbin(const std::vector<double>& r_in, int order) {
  if (order <= 0) throw_argument("levinson_durbin: order must be positive");
  if (r_in.size() < static_cast<std::size_t>(order) + 1) {
    throw_argument("levinson_durbin: need order+1 autocorrelation lags");
  }

  std::vector<double> r = r_in;
  r[0] = r[0] * (1.0 + 1e-9) + 1e-12;
  if (r[0] <= 0.0) throw_numeric("levinson_durbin: degenerate frame, r[0] <= 0 after flooring");

  LpcCoefficients out;
  out.order = order;
  out.a.assign(order, 0.0);
  double err = r[0];

  std::vector<double> prev(order, 0.0);
  for (int m = 0; m < order; ++m) {
    double acc = r[m + 1];
    for (int i = 0; i < m; ++i) acc -= out.a[i] * r[m - i];
    const double k = acc / err;

    prev = out.a;
    out.a[m] = k;
    for (int i = 0; i < m; ++i) out.a[i] = prev[i] - k * prev[m - 1 - i];

    err *= (1.0 - k * k);
    if (err <= 0.0) {
      throw_numeric("levinson_durbin: prediction error collapsed at order " + std::to_string(m + 1));
    }
  }
  out.prediction_error_power = err;
  return out;
}

std::vector<double> reflection_coefficients(const LpcCoefficients& lpc) {
  const int p = lpc.order;
  std::vector<double> k(p, 0.0);
  std::vector<double> a = lpc.a;  // working copy, order shrinks in place
  for (int m = p; m >= 1; --m) {
    const double km = a[m - 1];
    k[m - 1] = km;
    const double denom = 1.0 - km * km;
    if (denom <= 0.0) {
      throw_numeric("reflection_coefficients: |k| >= 1 at stage " + std::to_string(m));
    }
    std::vector<double> next(m - 1);
    for (int i = 0; i < m - 1; ++i) next[i] = (a[i] + km * a[m - 2 - i]) / denom;
    a = std::move(next);
  }
  return k;
}

bool is_minimum_phase(const LpcCoefficients& lpc) {
  try {
    for (double km : reflection_coefficients(lpc)) {
      if (!(std::fabs(km) < 1.0)) return false;
    }
  } catch (const Error&) {
    return false;
  }
  return true;
}

namespace {

// The schedule is valid when it carries one coefficient set per analysis
// frame of the signal, or when the signal is exactly frames * hop long (the
// synthesis side, whose output length is defined by the conditioning track).
std::size_t check_schedule(const Waveform& w, const std::vector<LpcCoefficients>& per_frame_lpc,
                           const FrameSpec& spec, const char* who) {
  const std::size_t frames = frame_count(w.samples.size(), spec);
  const std::size_t n = per_frame_lpc.size();
  if (n != frames && n * static_cast<std::size_t>(spec.hop) != w.samples.size()) {
    throw_argument(std::string(who) + ": got " + std::to_string(n) +
                   " coefficient sets for " + std::to_string(frames) + " frames");
  }
  return n;
}

inline std::size_t frame_of(std::size_t n, int hop, std::size_t frames) {
  const std::size_t f = n / static_cast<std::size_t>(hop);
  return f < frames ? f : frames - 1;
}

}  // namespace

Waveform lp_analysis_filter(const Waveform& w, const std::vector<LpcCoefficients>& per_frame_lpc,
                            const FrameSpec& spec) {
  const std::size_t frames = check_schedule(w, per_frame_lpc, spec, "lp_analysis_filter");
  Waveform e;
  e.sample_rate_hz = w.sample_rate_hz;
  e.samples.resize(w.samples.size());
  const std::vector<double>& x = w.samples;
  for (std::size_t n = 0; n < x.size(); ++n) {
    const LpcCoefficients& lpc = per_frame_lpc[frame_of(n, spec.hop, frames)];
    double pred = 0.0;
    const int p = lpc.order;
    for (int k = 1; k <= p; ++k) {
      if (n >= static_cast<std::size_t>(k)) pred += lpc.a[k - 1] * x[n - k];
    }
    e.samples[n] = x[n] - pred;
  }
  return e;
}

Waveform lp_synthesis_filter(const Waveform& e, const std::vector<LpcCoefficients>& per_frame_lpc,
                             const FrameSpec& spec) {
  const std::size_t frames = check_schedule(e, per_frame_lpc, spec, "lp_synthesis_filter");
  for (std::size_t i = 0; i < frames; ++i) {
    if (!is_minimum_phase(per_frame_lpc[i])) {
      throw_stability("lp_synthesis_filter: unstable filter at frame " + std::to_string(i));
    }
  }
  Waveform x;
  x.sample_rate_hz = e.sample_rate_hz;
  x.samples.resize(e.samples.size());
  for (std::size_t n = 0; n < e.samples.size(); ++n) {
    const LpcCoefficients& lpc = per_frame_lpc[frame_of(n, spec.hop, frames)];
    double acc = e.samples[n];
    const int p = lpc.order;
    for (int k = 1; k <= p; ++k) {
      if (n >= static_cast<std::size_t>(k)) acc += lpc.a[k - 1] * x.samples[n - k];
    }
    x.samples[n] = acc;
  }
  return x;
}

}  // namespace exknet::dsp
