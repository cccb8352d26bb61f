#include "io/feature_file.hpp"

#include <cstring>
#include <json.hpp>
#include <string>

#include "io/atomic_file.hpp"
#include "util/error.hpp"

namespace exknet::io {

namespace {

void put_u32(std::string& b, std::uint32_t v) {
  b.push_back(char(v & 0xFF));
  b.push_back(char((v >> 8) & 0xFF));
  b.push_back(char((v >> 16) & 0xFF));
  b.push_back(char((v >> 24) & 0xFF));
}

void put_f32(std::string& b, float v) {
  std::uint32_t bits;
  std::memcpy(&bits, &v, 4);
  put_u32(b, bits);
}

struct Reader {
  const std::string& bytes;
  std::size_t pos = 0;
  const std::string& path;

  void need(std::size_t n) const {
    if (pos + n > bytes.size()) throw_format("feature file " + path + " is truncated");
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = std::uint32_t(std::uint8_t(bytes[pos])) |
                      std::uint32_t(std::uint8_t(bytes[pos + 1])) << 8 |
                      std::uint32_t(std::uint8_t(bytes[pos + 2])) << 16 |
                      std::uint32_t(std::uint8_t(bytes[pos + 3])) << 24;
    pos += 4;
    return v;
  }
  std::uint8_t u8() {
    need(1);
    return std::uint8_t(bytes[pos++]);
  }
  float f32() {
    const std::uint32_t bits = u32();
    float v;
    std::memcpy(&v, &bits, 4);
    return v;
  }
  std::string str() {
    const std::uint32_t n = u32();
    need(n);
    std::string s = bytes.substr(pos, n);
    pos += n;
    return s;
  }
};

}  // namespace

void write_feature_file(const feat::FeatureTrack& t, const std::string& path, bool json_sidecar) {
  std::string b;
  b += "EXKF";
  put_u32(b, kFeatureFileVersion);
  put_u32(b, static_cast<std::uint32_t>(t.size()));
  put_u32(b, static_cast<std::uint32_t>(t.dim()));
  put_u32(b, static_cast<std::uint32_t>(t.spec.frame_len));
  put_u32(b, static_cast<std::uint32_t>(t.spec.hop));
  b.push_back(t.spec.window == dsp::WindowKind::Hann ? char(1) : char(0));
  put_u32(b, static_cast<std::uint32_t>(t.sample_rate_hz));
  put_u32(b, static_cast<std::uint32_t>(t.speaker_id.size()));
  b += t.speaker_id;
  for (std::size_t i = 0; i < t.size(); ++i) {
    for (double v : t.row(i)) put_f32(b, static_cast<float>(v));
  }
  atomic_write(path, b);

  if (json_sidecar) {
    nlohmann::json j;
    j["frames"] = t.size();
    j["dims"] = t.dim();
    j["frame_len"] = t.spec.frame_len;
    j["hop"] = t.spec.hop;
    j["window"] = t.spec.window == dsp::WindowKind::Hann ? "hann" : "rectangular";
    j["sample_rate_hz"] = t.sample_rate_hz;
    j["speaker"] = t.speaker_id;
    nlohmann::json rows = nlohmann::json::array();
    for (std::size_t i = 0; i < t.size(); ++i) rows.push_back(t.row(i));
    j["rows"] = rows;
    atomic_write(path + ".json", j.dump(2) + "\n");
  }
}

feat::FeatureTrack read_feature_file(const std::string& path) {
  const std::string bytes = read_file(path);
  Reader r{bytes, 0, path};
  r.need(4);
  if (bytes.compare(0, 4, "EXKF") != 0) throw_format(path + " is not a feature file (bad magic)");
  r.pos = 4;
  const std::uint32_t version = r.u32();
  if (version != kFeatureFileVersion) {
    throw_format(path + ": unsupported feature file version " + std::to_string(version));
  }
  const std::uint32_t frames = r.u32();
  const std::uint32_t dims = r.u32();
  if (dims < 4) throw_format(path + ": implausible feature dimension " + std::to_string(dims));

  feat::FeatureTrack t;
  t.spec.frame_len = static_cast<int>(r.u32());
  t.spec.hop = static_cast<int>(r.u32());
  t.spec.window = r.u8() == 1 ? dsp::WindowKind::Hann : dsp::WindowKind::Rectangular;
  t.sample_rate_hz = static_cast<int>(r.u32());
  t.speaker_id = r.str();

  const std::size_t payload = std::size_t(frames) * dims * 4;
  if (r.pos + payload != bytes.size()) {
    throw_format(path + ": payload size inconsistent with header");
  }

  const int p = static_cast<int>(dims) - 3;
  t.frames.resize(frames);
  for (std::uint32_t i = 0; i < frames; ++i) {
    feat::AcousticFrame& f = t.frames[i];
    f.lsf.resize(p);
    for (int d = 0; d < p; ++d) f.lsf[d] = r.f32();
    f.f0_hz = r.f32();
    f.gain = r.f32();
    f.voiced = r.f32() > 0.5f;
  }
  return t;
}

void write_stats_file(const feat::NormalizationStats& stats, const std::string& path) {
  nlohmann::json j;
  j["mean"] = stats.mean;
  j["std"] = stats.std;
  atomic_write(path, j.dump(2) + "\n");
}

feat::NormalizationStats read_stats_file(const std::string& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw_format("stats file " + path + ": " + e.what());
  }
  feat::NormalizationStats stats;
  try {
    stats.mean = j.at("mean").get<std::vector<double>>();
    stats.std = j.at("std").get<std::vector<double>>();
  } catch (const nlohmann::json::exception& e) {
    throw_format("stats file " + path + ": " + e.what());
  }
  if (stats.mean.size() != stats.std.size()) {
    throw_format("stats file " + path + ": mean/std size mismatch");
  }
  return stats;
}

}  // namespace exknet::io
