#include "vocoder/vocoder.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "dsp/lpc.hpp"
#include "dsp/lsf.hpp"
#include "util/log.hpp"
#include "util/random.hpp"

namespace exknet::voc {

Eigen::MatrixXf PreparedTargets::upsampled() const {
  return window(0, length());
}

Eigen::MatrixXf PreparedTargets::window(std::size_t begin, std::size_t end) const {
  Eigen::MatrixXf m(cond_frames.rows(), static_cast<Eigen::Index>(end - begin));
  const std::size_t n_frames = static_cast<std::size_t>(cond_frames.cols());
  for (std::size_t t = begin; t < end; ++t) {
    std::size_t f = t / static_cast<std::size_t>(hop);
    if (f >= n_frames) f = n_frames - 1;
    m.col(static_cast<Eigen::Index>(t - begin)) = cond_frames.col(static_cast<Eigen::Index>(f));
  }
  return m;
}

std::vector<dsp::LpcCoefficients> track_lpc(const feat::FeatureTrack& track) {
  std::vector<dsp::LpcCoefficients> lpcs;
  lpcs.reserve(track.size());
  for (const feat::AcousticFrame& f : track.frames) {
    dsp::LsfVector lsf;
    lsf.order = static_cast<int>(f.lsf.size());
    lsf.freqs = f.lsf;
    lpcs.push_back(dsp::lsf_to_lpc(lsf));
  }
  return lpcs;
}

namespace {

Eigen::MatrixXf normalized_condition_frames(const feat::FeatureTrack& track,
                                            const feat::NormalizationStats& stats) {
  const feat::FeatureTrack cont = feat::interpolate_unvoiced_f0(track);
  const feat::FeatureTrack norm = feat::normalize_track(cont, stats);
  Eigen::MatrixXf m(norm.dim(), static_cast<Eigen::Index>(norm.size()));
  for (std::size_t i = 0; i < norm.size(); ++i) {
    const std::vector<double> r = norm.row(i);
    for (int d = 0; d < norm.dim(); ++d) m(d, static_cast<Eigen::Index>(i)) = static_cast<float>(r[d]);
  }
  return m;
}

double percentile99_abs(const std::vector<double>& x, std::size_t n) {
  std::vector<double> mags(n);
  for (std::size_t i = 0; i < n; ++i) mags[i] = std::fabs(x[i]);
  const std::size_t idx = static_cast<std::size_t>(std::llround(0.99 * double(n - 1)));
  std::nth_element(mags.begin(), mags.begin() + idx, mags.end());
  return mags[idx];
}

}  // namespace

double synthesis_excitation_scale(const feat::FeatureTrack& track, double calibration) {
  double sum = 0.0;
  std::size_t count = 0;
  for (const feat::AcousticFrame& f : track.frames) {
    if (f.voiced) {
      sum += f.gain;
      ++count;
    }
  }
  if (count == 0) {
    for (const feat::AcousticFrame& f : track.frames) sum += f.gain;
    count = track.size();
  }
  const double mean_gain = count > 0 ? sum / static_cast<double>(count) : 0.0;
  return std::max(std::exp(mean_gain) * calibration, 1e-6);
}

PreparedTargets prepare_targets(const dsp::Waveform& w, const feat::FeatureTrack& track,
                                VocoderKind kind, const feat::NormalizationStats& stats) {
  if (track.frames.empty()) throw_argument("prepare_targets: empty feature track");

  PreparedTargets out;
  out.hop = track.spec.hop;
  out.cond_frames = normalized_condition_frames(track, stats);

  const std::size_t cond_len = track.size() * static_cast<std::size_t>(track.spec.hop);
  const std::size_t usable = std::min(w.samples.size(), cond_len);
  if (usable != w.samples.size()) {
    log_warn("prepare_targets: trimming " + std::to_string(w.samples.size()) + " samples to " +
             std::to_string(usable) + " (condition length)");
  }

  if (kind == VocoderKind::WaveNet) {
    out.excitation_scale = 1.0;
    out.codes.resize(usable);
    for (std::size_t i = 0; i < usable; ++i) out.codes[i] = dsp::encode_sample(w.samples[i]);
    return out;
  }

  const dsp::Waveform e = dsp::lp_analysis_filter(w, track_lpc(track), track.spec);
  out.excitation_scale = std::max(percentile99_abs(e.samples, usable), 1e-6);
  out.codes.resize(usable);
  std::size_t clipped = 0;
  for (std::size_t i = 0; i < usable; ++i) {
    double v = e.samples[i] / out.excitation_scale;
    if (v > 1.0) {
      v = 1.0;
      ++clipped;
    } else if (v < -1.0) {
      v = -1.0;
      ++clipped;
    }
    out.codes[i] = dsp::encode_sample(v);
  }
  if (clipped > usable / 50) {
    log_warn("prepare_targets: hard-limited " + std::to_string(clipped) + "/" +
             std::to_string(usable) + " residual samples");
  }
  return out;
}

dsp::Waveform synthesize(const training::Checkpoint& ckpt, const feat::FeatureTrack& track,
                         net::SampleMode mode, std::uint64_t seed) {
  if (track.frames.empty()) throw_argument("synthesize: empty feature track");
  if (track.dim() != ckpt.config.net.condition_dim) {
    throw_state("synthesize: track dimension " + std::to_string(track.dim()) +
                " does not match checkpoint condition_dim " +
                std::to_string(ckpt.config.net.condition_dim));
  }

  const Eigen::MatrixXf cond = normalized_condition_frames(track, ckpt.stats);
  const std::size_t hop = static_cast<std::size_t>(track.spec.hop);
  const std::size_t total = track.size() * hop;

  net::Sampler<float> sampler(ckpt.params);
  std::mt19937_64 rng(seed);

  dsp::CodeStream codes(total);
  int prev = -1;
  for (std::size_t t = 0; t < total; ++t) {
    const Eigen::Index frame = static_cast<Eigen::Index>(t / hop);
    const Eigen::VectorXf logits = sampler.step_logits(cond.col(frame), prev);
    const int code = net::sample_code<float>(logits, rng, mode);
    codes[t] = static_cast<std::uint8_t>(code);
    prev = code;
  }

  dsp::Waveform y;
  y.sample_rate_hz = track.sample_rate_hz;
  y.samples = dsp::decode_codes(codes);

  if (ckpt.kind == VocoderKind::ExcitNet) {
    const double scale = synthesis_excitation_scale(track, ckpt.excitation_calibration);
    for (double& v : y.samples) v *= scale;
    y = dsp::lp_synthesis_filter(y, track_lpc(track), track.spec);
  }

  std::size_t clipped = 0;
  for (double& v : y.samples) {
    if (v > 1.0) {
      v = 1.0;
      ++clipped;
    } else if (v < -1.0) {
      v = -1.0;
      ++clipped;
    }
  }
  if (clipped > 0) {
    log_warn("synthesize: clamped " + std::to_string(clipped) + "/" + std::to_string(total) +
             " output samples to [-1, 1]");
  }
  return y;
}

dsp::Waveform copy_synthesis(const dsp::Waveform& w, VocoderKind kind,
                             const feat::ExtractOptions& opt) {
  const feat::FeatureTrack track = feat::extract_features(w, opt);
  std::vector<const feat::FeatureTrack*> one{&track};
  const feat::NormalizationStats stats = feat::compute_norm_stats(one);
  const PreparedTargets prep = prepare_targets(w, track, kind, stats);

  dsp::Waveform y;
  y.sample_rate_hz = w.sample_rate_hz;
  y.samples = dsp::decode_codes(prep.codes);

  if (kind == VocoderKind::ExcitNet) {
    for (double& v : y.samples) v *= prep.excitation_scale;
    y = dsp::lp_synthesis_filter(y, track_lpc(track), track.spec);
  }
  for (double& v : y.samples) v = std::clamp(v, -1.0, 1.0);
  return y;
}

}  // namespace exknet::voc
