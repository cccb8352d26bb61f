#include "train/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "io/wav.hpp"
#include "util/log.hpp"
#include "util/random.hpp"

namespace exknet::training {

TrainMode parse_mode(const std::string& name) {
  if (name == "sd") return TrainMode::SD;
  if (name == "si") return TrainMode::SI;
  if (name == "sa") return TrainMode::SA;
  throw_argument("unknown training mode '" + name + "' (expected sd, si or sa)");
}

std::string mode_name(TrainMode mode) {
  switch (mode) {
    case TrainMode::SD: return "sd";
    case TrainMode::SI: return "si";
    case TrainMode::SA: return "sa";
  }
  return "sd";
}

namespace {

// Input code sequence for a window: the previous sample's code, with the
// zero-history symbol at utterance position 0.
std::vector<int> window_inputs(const dsp::CodeStream& codes, std::size_t begin, std::size_t end) {
  std::vector<int> inputs(end - begin);
  for (std::size_t t = begin; t < end; ++t) {
    inputs[t - begin] = t == 0 ? -1 : static_cast<int>(codes[t - 1]);
  }
  return inputs;
}

void deterministic_shuffle(std::vector<std::size_t>& v, std::mt19937_64& rng) {
  // Fisher-Yates with explicit index derivation; std::shuffle's draw pattern
  // is implementation-defined.
  for (std::size_t i = v.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng() % i);
    std::swap(v[i - 1], v[j]);
  }
}

struct LoadedUtterance {
  const ManifestEntry* entry;
  dsp::Waveform wav;
  feat::FeatureTrack track;
};

std::vector<LoadedUtterance> load_and_extract(const std::vector<const ManifestEntry*>& entries,
                                              const ToolkitConfig& config) {
  std::vector<LoadedUtterance> out;
  out.reserve(entries.size());
  for (const ManifestEntry* e : entries) {
    LoadedUtterance u;
    u.entry = e;
    u.wav = io::read_wav(e->path);
    if (u.wav.sample_rate_hz != config.sample_rate_hz) {
      throw_state("utterance " + e->id + ": sample rate " + std::to_string(u.wav.sample_rate_hz) +
                  " does not match configured " + std::to_string(config.sample_rate_hz) +
                  " (resampling is out of scope)");
    }
    u.track = feat::extract_features(u.wav, config.extract_options(), e->speaker);
    out.push_back(std::move(u));
  }
  return out;
}

feat::NormalizationStats stats_of(const std::vector<LoadedUtterance>& utts) {
  std::vector<const feat::FeatureTrack*> tracks;
  tracks.reserve(utts.size());
  for (const LoadedUtterance& u : utts) tracks.push_back(&u.track);
  return feat::compute_norm_stats(tracks);
}

std::vector<PreparedUtterance> prepare_loaded(const std::vector<LoadedUtterance>& loaded,
                                              voc::VocoderKind kind,
                                              const feat::NormalizationStats& stats) {
  std::vector<PreparedUtterance> out;
  out.reserve(loaded.size());
  for (const LoadedUtterance& u : loaded) {
    PreparedUtterance p;
    p.id = u.entry->id;
    p.speaker = u.entry->speaker;
    p.targets = voc::prepare_targets(u.wav, u.track, kind, stats);
    out.push_back(std::move(p));
  }
  return out;
}

// Geometric mean of (true residual scale) / exp(mean voiced gain) over the
// training utterances; used to recover the residual dynamic at synthesis
// when no ground-truth excitation exists.
double fit_excitation_calibration(const std::vector<LoadedUtterance>& loaded,
                                  const std::vector<PreparedUtterance>& prepared) {
  double log_sum = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < prepared.size(); ++i) {
    const double predictor = voc::synthesis_excitation_scale(loaded[i].track, 1.0);
    const double scale = prepared[i].targets.excitation_scale;
    if (predictor > 0.0 && scale > 0.0) {
      log_sum += std::log(scale / predictor);
      ++count;
    }
  }
  return count > 0 ? std::exp(log_sum / static_cast<double>(count)) : 1.0;
}

}  // namespace

BatchStream::BatchStream(const std::vector<PreparedUtterance>& utts, long receptive_field,
                         int batch_target_samples, std::uint64_t seed)
    : seed_(seed) {
  if (batch_target_samples <= 0) throw_argument("BatchStream: batch_target_samples must be positive");
  const std::size_t batch = static_cast<std::size_t>(batch_target_samples);
  const std::size_t rf = static_cast<std::size_t>(receptive_field);

  for (std::size_t u = 0; u < utts.size(); ++u) {
    const std::size_t len = utts[u].targets.length();
    if (len < rf + 1) {
      log_warn("utterance " + utts[u].id + " shorter than receptive field + 1 (" +
               std::to_string(len) + " < " + std::to_string(rf + 1) + "), skipped");
      continue;
    }
    for (std::size_t begin = 0; begin < len; begin += batch) {
      Segment s;
      s.utterance = u;
      s.begin = begin;
      s.end = std::min(begin + batch, len);
      s.ctx_begin = begin > rf - 1 ? begin - (rf - 1) : 0;
      segments_.push_back(s);
    }
  }
  if (segments_.empty()) throw_argument("BatchStream: no usable training segments");
  order_.resize(segments_.size());
  reshuffle();
}

void BatchStream::reshuffle() {
  for (std::size_t i = 0; i < order_.size(); ++i) order_[i] = i;
  std::mt19937_64 rng(combine_seed(seed_, epoch_));
  deterministic_shuffle(order_, rng);
  cursor_ = 0;
}

const Segment& BatchStream::next() {
  if (cursor_ >= order_.size()) {
    ++epoch_;
    reshuffle();
  }
  return segments_[order_[cursor_++]];
}

std::vector<PreparedUtterance> prepare_corpus(const std::vector<const ManifestEntry*>& entries,
                                              const ToolkitConfig& config, voc::VocoderKind kind,
                                              const feat::NormalizationStats& stats) {
  return prepare_loaded(load_and_extract(entries, config), kind, stats);
}

namespace {

struct StepWorkspace {
  net::ForwardCache<float> cache;
  net::MatX<float> dlogits;
  net::Parameters<float> grads;
};

double run_step(const net::Parameters<float>& params, const PreparedUtterance& utt,
                const Segment& seg, StepWorkspace& ws, bool want_grads) {
  const std::vector<int> inputs = window_inputs(utt.targets.codes, seg.ctx_begin, seg.end);
  const Eigen::MatrixXf conditions = utt.targets.window(seg.ctx_begin, seg.end);
  net::forward(params, std::span<const int>(inputs), conditions, ws.cache);

  const std::span<const std::uint8_t> targets(utt.targets.codes.data() + seg.ctx_begin,
                                              seg.end - seg.ctx_begin);
  const Eigen::Index loss_begin = static_cast<Eigen::Index>(seg.begin - seg.ctx_begin);
  if (!want_grads) return net::nll_loss(ws.cache.logits, targets, loss_begin);

  const double loss = net::nll_loss_grad(ws.cache.logits, targets, loss_begin, ws.dlogits);
  net::backward(params, ws.cache, conditions, ws.dlogits, ws.grads);
  return loss;
}

double dev_nll_over(const net::Parameters<float>& params,
                    const std::vector<PreparedUtterance>& dev, long rf) {
  constexpr std::size_t kChunk = 16384;
  const std::size_t context = rf > 0 ? static_cast<std::size_t>(rf - 1) : 0;
  net::CompensatedSum total;
  std::size_t count = 0;
  StepWorkspace ws;
  for (const PreparedUtterance& u : dev) {
    const std::size_t len = u.targets.length();
    for (std::size_t begin = 0; begin < len; begin += kChunk) {
      Segment seg;
      seg.utterance = 0;
      seg.begin = begin;
      seg.end = std::min(begin + kChunk, len);
      seg.ctx_begin = begin > context ? begin - context : 0;
      const double nll = run_step(params, u, seg, ws, false);
      total.add(nll * static_cast<double>(seg.end - seg.begin));
      count += seg.end - seg.begin;
    }
  }
  if (count == 0) throw_argument("eval_nll: split has no samples");
  return total.value() / static_cast<double>(count);
}

TrainOutput train_loop(net::Parameters<float> params, const std::vector<PreparedUtterance>& train_utts,
                       const std::vector<PreparedUtterance>& dev_utts, const ToolkitConfig& config,
                       voc::VocoderKind kind, double excitation_calibration,
                       const feat::NormalizationStats& stats, Provenance provenance,
                       std::uint64_t seed) {
  const long rf = net::receptive_field(config.net);
  const int steps = config.train.steps;

  net::AdamState<float> adam = net::make_adam_state<float>(config.net, config.train.lr);

  TrainOutput out;
  out.checkpoint.config = config;
  out.checkpoint.kind = kind;
  out.checkpoint.stats = stats;
  out.checkpoint.excitation_calibration = excitation_calibration;
  out.checkpoint.provenance = std::move(provenance);

  net::Parameters<float> best_params = params;
  net::AdamState<float> best_adam = adam;
  std::int64_t best_step = 0;
  double best_dev = std::numeric_limits<double>::infinity();
  bool have_dev = !dev_utts.empty();

  if (steps > 0) {
    BatchStream batches(train_utts, rf, config.train.batch_target_samples, seed);
    StepWorkspace ws;
    ws.grads = net::zero_parameters<float>(config.net);

    for (int step = 1; step <= steps; ++step) {
      const Segment& seg = batches.next();
      ws.grads.set_zero();
      const double loss = run_step(params, train_utts[seg.utterance], seg, ws, true);
      if (!std::isfinite(loss)) {
        throw_numeric("training diverged: non-finite loss at step " + std::to_string(step) +
                      " (utterance " + train_utts[seg.utterance].id + ")");
      }
      net::adam_step(params, ws.grads, adam);

      NllPoint point;
      point.step = step;
      point.train_nll = loss;
      if (have_dev && (step % config.train.dev_eval_interval == 0 || step == steps)) {
        const double dev = dev_nll_over(params, dev_utts, rf);
        point.dev_nll = dev;
        if (dev < best_dev) {
          best_dev = dev;
          best_params = params;
          best_adam = adam;
          best_step = step;
        }
      }
      out.log.push_back(point);
    }
  }

  if (!have_dev || steps == 0) {
    best_params = std::move(params);
    best_adam = std::move(adam);
    best_step = steps;
  }

  out.checkpoint.params = std::move(best_params);
  out.checkpoint.adam = std::move(best_adam);
  out.checkpoint.step = best_step;
  if (!out.checkpoint.params.all_finite()) {
    throw_numeric("training produced non-finite parameters");
  }
  return out;
}

}  // namespace

TrainOutput train(const CorpusManifest& corpus, const ToolkitConfig& config, TrainMode mode,
                  const std::string& target_speaker, std::uint64_t seed) {
  config.validate();
  if (mode == TrainMode::SA) throw_argument("train: use adapt() for speaker-adaptive training");
  if (mode == TrainMode::SD && target_speaker.empty()) {
    throw_argument("train: speaker-dependent training needs a target speaker");
  }

  const std::string filter = mode == TrainMode::SI ? "" : target_speaker;
  const auto train_entries = corpus.select(Split::Train, filter);
  if (train_entries.empty()) throw_argument("train: no training utterances selected");
  const auto dev_entries = corpus.select(Split::Dev, filter);

  const voc::VocoderKind kind = config.train.vocoder;
  const auto loaded_train = load_and_extract(train_entries, config);
  const feat::NormalizationStats stats = stats_of(loaded_train);
  const auto prepared_train = prepare_loaded(loaded_train, kind, stats);
  const auto prepared_dev = prepare_corpus(dev_entries, config, kind, stats);

  const double calibration = kind == voc::VocoderKind::ExcitNet
                                 ? fit_excitation_calibration(loaded_train, prepared_train)
                                 : 1.0;

  Provenance prov;
  prov.mode = mode_name(mode);
  prov.speaker = mode == TrainMode::SI ? "" : target_speaker;
  prov.seed = seed;

  net::Parameters<float> params = net::xavier_init<float>(config.net, seed);
  return train_loop(std::move(params), prepared_train, prepared_dev, config, kind, calibration,
                    stats, std::move(prov), seed);
}

TrainOutput adapt(const Checkpoint& si_checkpoint, const CorpusManifest& corpus,
                  const ToolkitConfig& config, const std::string& target_speaker,
                  std::uint64_t seed) {
  config.validate();
  if (target_speaker.empty()) throw_argument("adapt: target speaker required");
  if (!(si_checkpoint.config.net == config.net)) {
    throw_state("adapt: checkpoint architecture does not match the configured architecture");
  }
  if (si_checkpoint.config.lpc_order != config.lpc_order) {
    throw_state("adapt: checkpoint lpc_order does not match configuration");
  }
  if (si_checkpoint.digest.empty()) {
    throw_state("adapt: SI checkpoint has no digest (was it loaded from disk?)");
  }

  const auto train_entries = corpus.select(Split::Train, target_speaker);
  if (train_entries.empty()) throw_argument("adapt: no training utterances for " + target_speaker);
  const auto dev_entries = corpus.select(Split::Dev, target_speaker);

  const voc::VocoderKind kind = si_checkpoint.kind;
  const auto loaded_train = load_and_extract(train_entries, config);
  // Normalization must match the data the model consumes: recomputed on the
  // target corpus and recorded in the new checkpoint.
  const feat::NormalizationStats stats = stats_of(loaded_train);
  const auto prepared_train = prepare_loaded(loaded_train, kind, stats);
  const auto prepared_dev = prepare_corpus(dev_entries, config, kind, stats);

  const double calibration = kind == voc::VocoderKind::ExcitNet
                                 ? fit_excitation_calibration(loaded_train, prepared_train)
                                 : si_checkpoint.excitation_calibration;

  Provenance prov;
  prov.mode = "sa";
  prov.parent_digest = si_checkpoint.digest;
  prov.speaker = target_speaker;
  prov.seed = seed;

  net::Parameters<float> params = si_checkpoint.params;  // all weights trainable
  return train_loop(std::move(params), prepared_train, prepared_dev, config, kind, calibration,
                    stats, std::move(prov), seed);
}

double eval_nll_prepared(const Checkpoint& ckpt, const std::vector<PreparedUtterance>& utts) {
  return dev_nll_over(ckpt.params, utts, net::receptive_field(ckpt.config.net));
}

double eval_nll(const Checkpoint& ckpt, const CorpusManifest& corpus, Split split,
                const std::string& speaker) {
  const auto entries = corpus.select(split, speaker);
  if (entries.empty()) throw_argument("eval_nll: no utterances in split");
  const auto prepared = prepare_corpus(entries, ckpt.config, ckpt.kind, ckpt.stats);
  return eval_nll_prepared(ckpt, prepared);
}

}  // namespace exknet::training
