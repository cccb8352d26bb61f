#pragma once

#include <string>

#include "features/features.hpp"

namespace exknet::io {

// "EXKF" feature file: magic, u32 version, u32 frame count, u32 dims,
// frame spec (u32 frame_len, u32 hop, u8 window), u32 sample rate,
// length-prefixed speaker id, then row-major little-endian float32 rows in
// the fixed dimension order lsf_1..lsf_p, f0_hz, gain, vuv.
inline constexpr std::uint32_t kFeatureFileVersion = 1;

void write_feature_file(const feat::FeatureTrack& t, const std::string& path,
                        bool json_sidecar = false);
feat::FeatureTrack read_feature_file(const std::string& path);

// NormalizationStats as a small JSON document.
void write_stats_file(const feat::NormalizationStats& stats, const std::string& path);
feat::NormalizationStats read_stats_file(const std::string& path);

}  // namespace exknet::io
