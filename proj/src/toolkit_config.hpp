#pragma once

#include <cstdint>
#include <string>

#include "dsp/types.hpp"
#include "features/features.hpp"
#include "net/config.hpp"
#include "vocoder/kind.hpp"

namespace exknet {

struct TrainConfig {
  int batch_target_samples = 30000;  // samples per training segment
  int steps = 1000;
  double lr = 1e-4;
  std::uint64_t seed = 0;
  int dev_eval_interval = 100;
  voc::VocoderKind vocoder = voc::VocoderKind::WaveNet;

  void validate() const {
    if (batch_target_samples <= 0 || steps < 0 || lr <= 0.0 || dev_eval_interval <= 0) {
      throw_argument("TrainConfig: all fields must be positive (steps may be zero)");
    }
  }
};

// Everything an experiment needs, loadable from one JSON file. Flag
// overrides use dotted keys ("train.steps=2000").
struct ToolkitConfig {
  int sample_rate_hz = 24000;
  dsp::FrameSpec frame;
  feat::F0Options f0;
  int lpc_order = 40;
  net::NetConfig net;
  TrainConfig train;

  feat::ExtractOptions extract_options() const {
    feat::ExtractOptions opt;
    opt.spec = frame;
    opt.lpc_order = lpc_order;
    opt.f0 = f0;
    return opt;
  }

  void validate() const {
    if (sample_rate_hz <= 0) throw_argument("ToolkitConfig: sample_rate_hz must be positive");
    if (lpc_order <= 0) throw_argument("ToolkitConfig: lpc_order must be positive");
    if (frame.hop <= 0 || frame.hop > frame.frame_len) {
      throw_argument("ToolkitConfig: require 0 < hop <= frame_len");
    }
    if (net.condition_dim != lpc_order + 3) {
      throw_argument("ToolkitConfig: net.condition_dim must equal lpc_order + 3");
    }
    net.validate();
    train.validate();
  }
};

// JSON round trip plus key=value overrides; see io/config_file.cpp for the
// schema.
ToolkitConfig load_config_file(const std::string& path);
void save_config_file(const ToolkitConfig& config, const std::string& path);
ToolkitConfig parse_config_json(const std::string& text, const std::string& origin);
std::string config_to_json(const ToolkitConfig& config);
void apply_config_override(ToolkitConfig& config, const std::string& dotted_key,
                           const std::string& value);

}  // namespace exknet
