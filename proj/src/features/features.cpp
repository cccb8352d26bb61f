#include "features/features.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "dsp/framing.hpp"
#include "dsp/lpc.hpp"
#include "dsp/lsf.hpp"
#include "util/error.hpp"
#include "util/random.hpp"

namespace exknet::feat {

std::vector<double> FeatureTrack::row(std::size_t i) const {
  const AcousticFrame& f = frames.at(i);
  std::vector<double> r(f.lsf.begin(), f.lsf.end());
  r.push_back(f.f0_hz);
  r.push_back(f.gain);
  r.push_back(f.voiced ? 1.0 : 0.0);
  return r;
}

void FeatureTrack::set_row(std::size_t i, const std::vector<double>& values) {
  AcousticFrame& f = frames.at(i);
  const std::size_t p = f.lsf.size();
  if (values.size() != p + 3) throw_argument("FeatureTrack::set_row: dimension mismatch");
  std::copy(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(p), f.lsf.begin());
  f.f0_hz = values[p];
  f.gain = values[p + 1];
  f.voiced = values[p + 2] > 0.5;
}

namespace {

struct LagRange {
  int lo = 0;
  int hi = 0;  // inclusive
  bool ok = false;
};

LagRange lag_range(int n, int sample_rate_hz, double f0_min_hz, double f0_max_hz) {
  LagRange r;
  if (n < 4 || sample_rate_hz <= 0 || f0_min_hz <= 0 || f0_max_hz <= f0_min_hz) return r;
  r.lo = std::max(static_cast<int>(std::floor(sample_rate_hz / f0_max_hz)), 2);
  r.hi = std::min(static_cast<int>(std::ceil(sample_rate_hz / f0_min_hz)), n - 2);
  r.ok = r.hi > r.lo;
  return r;
}

// Normalized cross-correlation over the lag range; index k of the result is
// the correlation at lag k (zero outside the range).
std::vector<double> ncc_curve(const std::vector<double>& frame, const LagRange& r) {
  const int n = static_cast<int>(frame.size());
  std::vector<double> vals(static_cast<std::size_t>(r.hi) + 2, 0.0);
  for (int k = r.lo; k <= r.hi; ++k) {
    double num = 0.0, e0 = 0.0, e1 = 0.0;
    const int m = n - k;
    for (int i = 0; i < m; ++i) {
      num += frame[i] * frame[i + k];
      e0 += frame[i] * frame[i];
      e1 += frame[i + k] * frame[i + k];
    }
    const double denom = std::sqrt(e0 * e1);
    vals[k] = denom > 0.0 ? num / denom : 0.0;
  }
  return vals;
}

// Parabolic refinement of an integer-lag peak.
void refine_peak(const std::vector<double>& vals, const LagRange& r, int k, double& lag,
                 double& peak) {
  lag = k;
  peak = vals[k];
  if (k > r.lo && k < r.hi) {
    const double ym = vals[k - 1], y0 = vals[k], yp = vals[k + 1];
    const double denom = ym - 2.0 * y0 + yp;
    if (denom < 0.0) {
      const double delta = 0.5 * (ym - yp) / denom;
      if (std::fabs(delta) <= 1.0) {
        lag = k + delta;
        peak = y0 - 0.25 * (ym - yp) * delta;
      }
    }
  }
}

struct F0Candidate {
  double f0_hz = 0.0;
  double ncc = 0.0;
};

// Local maxima of the correlation curve worth considering as pitch
// hypotheses, strongest first capped to a handful.
std::vector<F0Candidate> f0_candidates(const std::vector<double>& frame, int sample_rate_hz,
                                       double f0_min_hz, double f0_max_hz) {
  std::vector<F0Candidate> cands;
  const LagRange r = lag_range(static_cast<int>(frame.size()), sample_rate_hz, f0_min_hz, f0_max_hz);
  if (!r.ok) return cands;
  const std::vector<double> vals = ncc_curve(frame, r);

  double best = 0.0;
  for (int k = r.lo; k <= r.hi; ++k) best = std::max(best, vals[k]);
  if (best <= 0.0) return cands;

  for (int k = r.lo; k <= r.hi; ++k) {
    const double prev = k > r.lo ? vals[k - 1] : -1.0;
    const double next = k < r.hi ? vals[k + 1] : -1.0;
    if (vals[k] > 0.0 && vals[k] >= prev && vals[k] > next && vals[k] >= 0.4 * best) {
      double lag, peak;
      refine_peak(vals, r, k, lag, peak);
      cands.push_back({static_cast<double>(sample_rate_hz) / lag, std::clamp(peak, 0.0, 1.0)});
    }
  }
  std::sort(cands.begin(), cands.end(),
            [](const F0Candidate& a, const F0Candidate& b) { return a.ncc > b.ncc; });
  if (cands.size() > 8) cands.resize(8);
  return cands;
}

}  // namespace

F0Estimate estimate_f0(const std::vector<double>& frame, int sample_rate_hz, double f0_min_hz,
                       double f0_max_hz) {
  F0Estimate out;
  const auto cands = f0_candidates(frame, sample_rate_hz, f0_min_hz, f0_max_hz);
  if (cands.empty()) return out;

  // For strongly periodic frames the correlation at integer multiples of the
  // period ties with the fundamental; among near-tied peaks take the highest
  // frequency (shortest lag).
  const double best = cands.front().ncc;
  const F0Candidate* chosen = &cands.front();
  for (const F0Candidate& c : cands) {
    if (c.ncc >= 0.99 * best && c.f0_hz > chosen->f0_hz) chosen = &c;
  }
  out.f0_hz = chosen->f0_hz;
  out.periodicity = chosen->ncc;
  return out;
}

bool detect_voicing(double periodicity, double gain, const F0Options& opt) {
  // gain is ln(RMS); the silence floor is given in dB.
  const double gain_db = 20.0 * gain / std::log(10.0);
  return periodicity >= opt.voicing_threshold && gain_db >= opt.silence_floor_db;
}

namespace {

// Continuity-constrained pitch selection over one voiced run: Viterbi over
// per-frame correlation peaks with an octave-jump penalty. Near-tied peaks
// at period multiples flip freely under quantization noise; coupling
// neighboring frames pins the whole run to one consistent contour.
void snap_f0_run(std::vector<AcousticFrame>& frames,
                 const std::vector<std::vector<F0Candidate>>& cands, std::size_t begin,
                 std::size_t end) {
  constexpr double kJumpWeight = 0.4;
  // Slight preference for shorter lags; period multiples of a pulse train
  // correlate within noise of each other, and without a strict order the
  // whole run can lock onto a subharmonic.
  constexpr double kLagBias = 0.03;
  const std::size_t n = end - begin;
  if (n == 0) return;

  std::vector<std::vector<double>> cost(n);
  std::vector<std::vector<int>> back(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& cs = cands[begin + i];
    cost[i].assign(cs.size(), 0.0);
    back[i].assign(cs.size(), -1);
    for (std::size_t c = 0; c < cs.size(); ++c) {
      const double emission = -cs[c].ncc - kLagBias * std::log2(cs[c].f0_hz / 100.0);
      if (i == 0) {
        cost[i][c] = emission;
        continue;
      }
      double best = std::numeric_limits<double>::infinity();
      int arg = -1;
      for (std::size_t p = 0; p < cost[i - 1].size(); ++p) {
        const double jump = std::fabs(std::log2(cs[c].f0_hz / cands[begin + i - 1][p].f0_hz));
        const double total = cost[i - 1][p] + kJumpWeight * jump;
        if (total < best) {
          best = total;
          arg = static_cast<int>(p);
        }
      }
      cost[i][c] = emission + best;
      back[i][c] = arg;
    }
  }

  int pick = 0;
  for (std::size_t c = 1; c < cost[n - 1].size(); ++c) {
    if (cost[n - 1][c] < cost[n - 1][pick]) pick = static_cast<int>(c);
  }
  for (std::size_t i = n; i-- > 0;) {
    frames[begin + i].f0_hz = cands[begin + i][pick].f0_hz;
    pick = back[i][pick];
  }
}

}  // namespace

FeatureTrack extract_features(const dsp::Waveform& w, const ExtractOptions& opt,
                              const std::string& speaker_id) {
  if (w.samples.empty()) throw_argument("extract_features: empty waveform");

  FeatureTrack track;
  track.spec = opt.spec;
  track.sample_rate_hz = w.sample_rate_hz;
  track.speaker_id = speaker_id;

  const std::size_t n_frames = dsp::frame_count(w.samples.size(), opt.spec);
  const std::vector<double> hann = dsp::make_window(dsp::WindowKind::Hann, opt.spec.frame_len);
  const int pitch_win = 2 * opt.spec.frame_len;

  std::vector<std::vector<F0Candidate>> cands(n_frames);
  track.frames.reserve(n_frames);
  for (std::size_t i = 0; i < n_frames; ++i) {
    const std::size_t start = i * static_cast<std::size_t>(opt.spec.hop);
    std::vector<double> frame = dsp::extract_frame(w.samples, start, opt.spec.frame_len);

    AcousticFrame af;

    // Gain from the raw (unwindowed) frame.
    double energy = 0.0;
    for (double v : frame) energy += v * v;
    const double rms = std::sqrt(energy / static_cast<double>(frame.size()));
    af.gain = std::log(rms + 1e-9);

    // Spectral envelope from the Hann-windowed frame.
    std::vector<double> windowed = frame;
    for (int k = 0; k < opt.spec.frame_len; ++k) windowed[k] *= hann[k];
    const std::vector<double> r = dsp::autocorrelation(windowed, opt.lpc_order);
    const dsp::LpcCoefficients lpc = dsp::levinson_durbin(r, opt.lpc_order);
    af.lsf = dsp::lpc_to_lsf(lpc).freqs;

    // Pitch hypotheses on a wider window centered on this frame, so lags
    // near rate/f0_min still have usable overlap.
    const std::size_t center = start + static_cast<std::size_t>(opt.spec.frame_len) / 2;
    const std::size_t pw_start =
        center >= static_cast<std::size_t>(pitch_win) / 2 ? center - pitch_win / 2 : 0;
    std::vector<double> pitch_frame = dsp::extract_frame(w.samples, pw_start, pitch_win);
    cands[i] = f0_candidates(pitch_frame, w.sample_rate_hz, opt.f0.f0_min_hz, opt.f0.f0_max_hz);

    const double periodicity = cands[i].empty() ? 0.0 : cands[i].front().ncc;
    af.voiced = detect_voicing(periodicity, af.gain, opt.f0);
    af.f0_hz = af.voiced ? cands[i].front().f0_hz : 0.0;

    track.frames.push_back(std::move(af));
  }

  // Low-level filter ring-downs correlate like voiced frames; an
  // utterance-relative gate 35 dB under the loudest frame removes them.
  double max_gain = -std::numeric_limits<double>::infinity();
  for (const AcousticFrame& f : track.frames) max_gain = std::max(max_gain, f.gain);
  const double rel_floor = max_gain - 35.0 / 20.0 * std::log(10.0);
  for (AcousticFrame& f : track.frames) {
    if (f.voiced && f.gain < rel_floor) {
      f.voiced = false;
      f.f0_hz = 0.0;
    }
  }

  // Per voiced run: trim decaying edges (filter ring-out correlates like a
  // tone at a formant frequency), drop residual blips, then pick an
  // octave-consistent contour.
  constexpr double kEdgeDropLn = 20.0 / 20.0 * 2.302585092994046;  // 20 dB in ln units
  constexpr std::size_t kMinRunFrames = 3;
  std::size_t run_begin = 0;
  bool in_run = false;
  for (std::size_t i = 0; i <= track.frames.size(); ++i) {
    const bool voiced = i < track.frames.size() && track.frames[i].voiced;
    if (voiced && !in_run) {
      run_begin = i;
      in_run = true;
    } else if (!voiced && in_run) {
      in_run = false;
      std::size_t begin = run_begin, end = i;
      double run_peak = -std::numeric_limits<double>::infinity();
      for (std::size_t j = begin; j < end; ++j) run_peak = std::max(run_peak, track.frames[j].gain);
      while (begin < end && track.frames[begin].gain < run_peak - kEdgeDropLn) ++begin;
      while (end > begin && track.frames[end - 1].gain < run_peak - kEdgeDropLn) --end;
      if (end - begin < kMinRunFrames) {
        begin = run_begin;
        end = run_begin;  // whole run rejected
      }
      for (std::size_t j = run_begin; j < i; ++j) {
        if (j < begin || j >= end) {
          track.frames[j].voiced = false;
          track.frames[j].f0_hz = 0.0;
        }
      }
      if (end > begin) snap_f0_run(track.frames, cands, begin, end);
    }
  }
  return track;
}

NormalizationStats compute_norm_stats(const std::vector<const FeatureTrack*>& tracks) {
  if (tracks.empty()) throw_argument("compute_norm_stats: no tracks");
  const int dim = tracks.front()->dim();
  std::size_t count = 0;
  std::vector<double> sum(dim, 0.0), sumsq(dim, 0.0);
  for (const FeatureTrack* t : tracks) {
    if (t->dim() != dim) throw_argument("compute_norm_stats: inconsistent dimensions");
    for (std::size_t i = 0; i < t->size(); ++i) {
      const std::vector<double> r = t->row(i);
      for (int d = 0; d < dim; ++d) {
        sum[d] += r[d];
        sumsq[d] += r[d] * r[d];
      }
      ++count;
    }
  }
  if (count == 0) throw_argument("compute_norm_stats: no frames");

  NormalizationStats stats;
  stats.mean.resize(dim);
  stats.std.resize(dim);
  for (int d = 0; d < dim; ++d) {
    stats.mean[d] = sum[d] / static_cast<double>(count);
    const double var = std::max(0.0, sumsq[d] / static_cast<double>(count) - stats.mean[d] * stats.mean[d]);
    stats.std[d] = std::max(std::sqrt(var), 1e-6);
  }
  // The binary vuv dimension is exempt from z-scoring.
  stats.mean[dim - 1] = 0.0;
  stats.std[dim - 1] = 1.0;
  return stats;
}

namespace {
FeatureTrack affine_track(const FeatureTrack& t, const NormalizationStats& stats, bool forward) {
  if (static_cast<std::size_t>(t.dim()) != stats.dim()) {
    throw_argument("normalize_track: stats dimension mismatch");
  }
  FeatureTrack out = t;
  const int dim = t.dim();
  for (std::size_t i = 0; i < t.size(); ++i) {
    std::vector<double> r = t.row(i);
    for (int d = 0; d < dim; ++d) {
      r[d] = forward ? (r[d] - stats.mean[d]) / stats.std[d] : r[d] * stats.std[d] + stats.mean[d];
    }
    // set_row would re-threshold vuv; write fields directly to keep the
    // round trip exact.
    AcousticFrame& f = out.frames[i];
    std::copy(r.begin(), r.begin() + t.lsf_order(), f.lsf.begin());
    f.f0_hz = r[dim - 3];
    f.gain = r[dim - 2];
  }
  return out;
}
}  // namespace

FeatureTrack normalize_track(const FeatureTrack& t, const NormalizationStats& stats) {
  return affine_track(t, stats, true);
}

FeatureTrack denormalize_track(const FeatureTrack& t, const NormalizationStats& stats) {
  return affine_track(t, stats, false);
}

FeatureTrack interpolate_unvoiced_f0(const FeatureTrack& t) {
  FeatureTrack out = t;
  const std::size_t n = t.size();
  std::vector<std::size_t> voiced_idx;
  for (std::size_t i = 0; i < n; ++i) {
    if (t.frames[i].voiced) voiced_idx.push_back(i);
  }
  if (voiced_idx.empty()) return out;  // nothing to anchor on

  std::size_t next = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (out.frames[i].voiced) continue;
    while (next < voiced_idx.size() && voiced_idx[next] < i) ++next;
    if (next == 0) {
      out.frames[i].f0_hz = t.frames[voiced_idx.front()].f0_hz;
    } else if (next == voiced_idx.size()) {
      out.frames[i].f0_hz = t.frames[voiced_idx.back()].f0_hz;
    } else {
      const std::size_t lo = voiced_idx[next - 1], hi = voiced_idx[next];
      const double w = static_cast<double>(i - lo) / static_cast<double>(hi - lo);
      out.frames[i].f0_hz = (1.0 - w) * t.frames[lo].f0_hz + w * t.frames[hi].f0_hz;
    }
  }
  return out;
}

Eigen::MatrixXd upsample_features(const FeatureTrack& t) {
  const int dim = t.dim();
  const std::size_t n = t.size();
  const std::size_t hop = static_cast<std::size_t>(t.spec.hop);
  Eigen::MatrixXd m(dim, static_cast<Eigen::Index>(n * hop));
  for (std::size_t i = 0; i < n; ++i) {
    const std::vector<double> r = t.row(i);
    Eigen::VectorXd col = Eigen::Map<const Eigen::VectorXd>(r.data(), dim);
    for (std::size_t j = 0; j < hop; ++j) m.col(static_cast<Eigen::Index>(i * hop + j)) = col;
  }
  return m;
}

FeatureTrack scale_f0(const FeatureTrack& t, double factor) {
  if (!(factor > 0.0)) throw_argument("scale_f0: factor must be positive");
  FeatureTrack out = t;
  for (AcousticFrame& f : out.frames) {
    if (f.voiced) f.f0_hz *= factor;
  }
  return out;
}

FeatureTrack perturb_features(const FeatureTrack& t, double noise_std, std::uint64_t seed,
                              const NormalizationStats& stats, const F0Options& f0) {
  if (noise_std < 0.0) throw_argument("perturb_features: noise_std must be nonnegative");
  if (noise_std == 0.0) return t;

  FeatureTrack norm = normalize_track(t, stats);
  std::mt19937_64 rng(seed);
  GaussianSampler gauss;
  const int p = t.lsf_order();

  for (std::size_t i = 0; i < norm.size(); ++i) {
    AcousticFrame& f = norm.frames[i];
    for (int d = 0; d < p; ++d) f.lsf[d] += noise_std * gauss(rng);
    const double f0_noise = noise_std * gauss(rng);  // drawn even if unused, keeps stream aligned
    if (f.voiced) f.f0_hz += f0_noise;
    f.gain += noise_std * gauss(rng);
  }

  FeatureTrack out = denormalize_track(norm, stats);

  // Restore invariants: ascending LSFs strictly inside (0, pi), nonnegative
  // f0 within the tracker's range for voiced frames, zero when unvoiced.
  constexpr double kEdge = 1e-4;
  constexpr double kMinGap = 1e-5;
  for (std::size_t i = 0; i < out.size(); ++i) {
    AcousticFrame& f = out.frames[i];
    std::sort(f.lsf.begin(), f.lsf.end());
    double lo = kEdge;
    for (int d = 0; d < p; ++d) {
      f.lsf[d] = std::clamp(f.lsf[d], lo, M_PI - kEdge * (p - d));
      lo = f.lsf[d] + kMinGap;
    }
    if (f.voiced) {
      f.f0_hz = std::clamp(f.f0_hz, f0.f0_min_hz, f0.f0_max_hz);
    } else {
      f.f0_hz = 0.0;
    }
  }
  return out;
}

}  // namespace exknet::feat
