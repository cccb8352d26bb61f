#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "toolkit_config.hpp"
#include "train/checkpoint.hpp"
#include "train/manifest.hpp"
#include "vocoder/vocoder.hpp"

namespace exknet::training {

enum class TrainMode { SD, SI, SA };

TrainMode parse_mode(const std::string& name);
std::string mode_name(TrainMode mode);

// One utterance, fully prepared for teacher forcing.
struct PreparedUtterance {
  std::string id;
  std::string speaker;
  voc::PreparedTargets targets;
};

// A training window: loss over utterance samples [begin, end), with
// receptive-field left context from [ctx_begin, begin).
struct Segment {
  std::size_t utterance = 0;
  std::size_t ctx_begin = 0;
  std::size_t begin = 0;
  std::size_t end = 0;
};

// Deterministic epoch stream: contiguous segments of batch_target_samples,
// re-shuffled across all utterances (and hence speakers) at each epoch with
// a seed derived from (seed, epoch). Utterances shorter than the receptive
// field + 1 are skipped with a warning.
class BatchStream {
 public:
  BatchStream(const std::vector<PreparedUtterance>& utts, long receptive_field,
              int batch_target_samples, std::uint64_t seed);

  const Segment& next();
  std::size_t segments_per_epoch() const { return order_.size(); }
  const std::vector<Segment>& segments() const { return segments_; }
  std::uint64_t epoch() const { return epoch_; }

 private:
  void reshuffle();

  std::vector<Segment> segments_;
  std::vector<std::size_t> order_;
  std::uint64_t seed_;
  std::uint64_t epoch_ = 0;
  std::size_t cursor_ = 0;
};

struct NllPoint {
  std::int64_t step = 0;
  double train_nll = 0.0;
  std::optional<double> dev_nll;
};

struct TrainOutput {
  Checkpoint checkpoint;
  std::vector<NllPoint> log;
};

// Feature extraction + target preparation for a set of utterances under
// fixed stats. Rejects sample-rate mismatches.
std::vector<PreparedUtterance> prepare_corpus(const std::vector<const ManifestEntry*>& entries,
                                              const ToolkitConfig& config, voc::VocoderKind kind,
                                              const feat::NormalizationStats& stats);

// SD/SI training from Xavier init. SD trains on `target_speaker`'s train
// split, SI on every speaker's. Model selection is best dev NLL (final
// parameters when the dev split is empty).
TrainOutput train(const CorpusManifest& corpus, const ToolkitConfig& config, TrainMode mode,
                  const std::string& target_speaker, std::uint64_t seed);

// SA fine-tuning: parameters start from the SI checkpoint, Adam moments are
// reset, stats are recomputed on the target corpus, every weight trains.
TrainOutput adapt(const Checkpoint& si_checkpoint, const CorpusManifest& corpus,
                  const ToolkitConfig& config, const std::string& target_speaker,
                  std::uint64_t seed);

// Teacher-forced NLL (nats/sample) over every sample of the split.
double eval_nll(const Checkpoint& ckpt, const CorpusManifest& corpus, Split split,
                const std::string& speaker = "");
double eval_nll_prepared(const Checkpoint& ckpt, const std::vector<PreparedUtterance>& utts);

}  // namespace exknet::training
