#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "toolkit_config.hpp"
#include "train/manifest.hpp"
#include "train/trainer.hpp"
#include "vocoder/vocoder.hpp"

namespace exknet::eval {

// A system under evaluation: a trained checkpoint, or one of the neural-free
// copy-synthesis controls ("copy:wavenet" / "copy:excitnet").
struct SystemSpec {
  std::string label;
  std::string checkpoint_path;  // empty for copy-synthesis controls
  voc::VocoderKind copy_kind = voc::VocoderKind::WaveNet;
  bool is_copy_synthesis = false;
};

SystemSpec parse_system_spec(const std::string& label, const std::string& target);

struct MetricRow {
  std::string speaker;
  std::string system;
  std::string utterance;  // "MEAN" for the per-system aggregate
  double lsd_db = 0.0;
  double f0_rmse_hz = 0.0;
};

struct F0ModRow {
  std::string speaker;
  std::string system;
  double factor = 1.0;
  double f0_rmse_hz = 0.0;
};

struct ComparisonOptions {
  double perturb_sigma = 0.0;  // > 0 emulates acoustic-model error on the conditions
  std::uint64_t seed = 0;
};

// Tables 2-3 protocol on the manifest's test split: per utterance, extract
// reference features, synthesize with every system from those (optionally
// perturbed) features, re-extract from the synthesized audio and score
// LSD / F0 RMSE against the reference. One aggregate (mean) row per
// speaker x system. Rows come back in sorted order.
std::vector<MetricRow> run_comparison(const training::CorpusManifest& corpus,
                                      const ToolkitConfig& config,
                                      const std::vector<SystemSpec>& systems,
                                      const ComparisonOptions& opt);

// Fig. 3 protocol: scale the reference F0 trajectory, synthesize, re-extract,
// score against the scaled trajectory. Copy-synthesis controls ignore the
// conditioning and are scored against the unscaled trajectory they actually
// reproduce. One row per speaker x system x factor (mean over utterances).
std::vector<F0ModRow> run_f0_modification(const training::CorpusManifest& corpus,
                                          const ToolkitConfig& config,
                                          const std::vector<SystemSpec>& systems,
                                          const std::vector<double>& factors, std::uint64_t seed);

std::string comparison_csv(const std::vector<MetricRow>& rows);
std::string f0_modification_csv(const std::vector<F0ModRow>& rows);

}  // namespace exknet::eval
