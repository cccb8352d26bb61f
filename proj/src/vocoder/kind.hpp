#pragma once

#include <string>

#include "util/error.hpp"

namespace exknet::voc {

// WaveNet models the speech samples directly; ExcitNet models the LP
// excitation and reconstructs speech through the LP synthesis filter.
enum class VocoderKind { WaveNet, ExcitNet };

inline std::string kind_name(VocoderKind k) {
  return k == VocoderKind::WaveNet ? "wavenet" : "excitnet";
}

inline VocoderKind parse_kind(const std::string& name) {
  if (name == "wavenet") return VocoderKind::WaveNet;
  if (name == "excitnet") return VocoderKind::ExcitNet;
  throw_argument("unknown vocoder kind '" + name + "' (expected wavenet or excitnet)");
}

}  // namespace exknet::voc
