#pragma once

#include <cstdint>
#include <string>

#include "features/features.hpp"
#include "net/network.hpp"
#include "toolkit_config.hpp"
#include "vocoder/kind.hpp"

namespace exknet::training {

inline constexpr std::uint32_t kCheckpointVersion = 1;

struct Provenance {
  std::string mode;           // "sd", "si" or "sa"
  std::string parent_digest;  // hex digest of the SI parent, "" otherwise
  std::string speaker;        // target speaker, "" for SI
  std::uint64_t seed = 0;
};

// Self-describing training state. File layout: magic "EXKT", u32 version,
// u32 metadata length + JSON metadata, then the parameter tensors followed
// by the Adam first/second moment tensors as little-endian float32 in the
// tensor_refs() order, and a trailing 32-byte SHA-256 over everything
// before it.
struct Checkpoint {
  ToolkitConfig config;  // net/frame/f0/lpc settings the model was trained with
  voc::VocoderKind kind = voc::VocoderKind::WaveNet;
  net::Parameters<float> params;
  net::AdamState<float> adam;
  feat::NormalizationStats stats;
  std::int64_t step = 0;
  double excitation_calibration = 1.0;  // residual scale per unit exp(mean voiced gain)
  Provenance provenance;
  std::string digest;  // hex, filled by save/load
};

void save_checkpoint(Checkpoint& ckpt, const std::string& path);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace exknet::training
