#include "train/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <json.hpp>

#include "io/atomic_file.hpp"
#include "util/error.hpp"
#include "util/sha256.hpp"

namespace exknet::training {

namespace {

using nlohmann::json;

void put_u32(std::string& b, std::uint32_t v) {
  b.push_back(char(v & 0xFF));
  b.push_back(char((v >> 8) & 0xFF));
  b.push_back(char((v >> 16) & 0xFF));
  b.push_back(char((v >> 24) & 0xFF));
}

std::uint32_t read_u32(const std::string& b, std::size_t off) {
  return std::uint32_t(std::uint8_t(b[off])) | std::uint32_t(std::uint8_t(b[off + 1])) << 8 |
         std::uint32_t(std::uint8_t(b[off + 2])) << 16 | std::uint32_t(std::uint8_t(b[off + 3])) << 24;
}

void append_tensors(std::string& b, net::Parameters<float>& p) {
  for (auto& r : p.tensor_refs()) {
    const float* data = r.tensor->data();
    const std::size_t bytes = static_cast<std::size_t>(r.tensor->size()) * sizeof(float);
    // Little-endian hosts only; asserted at build time below.
    b.append(reinterpret_cast<const char*>(data), bytes);
  }
}

static_assert(std::endian::native == std::endian::little,
              "checkpoint serialization assumes a little-endian host");

void read_tensors(const std::string& b, std::size_t& pos, net::Parameters<float>& p,
                  const std::string& path) {
  for (auto& r : p.tensor_refs()) {
    const std::size_t bytes = static_cast<std::size_t>(r.tensor->size()) * sizeof(float);
    if (pos + bytes > b.size()) throw_format("checkpoint " + path + " is truncated");
    std::memcpy(r.tensor->data(), b.data() + pos, bytes);
    pos += bytes;
  }
}

}  // namespace

void save_checkpoint(Checkpoint& ckpt, const std::string& path) {
  json meta;
  meta["config"] = json::parse(config_to_json(ckpt.config));
  meta["vocoder"] = voc::kind_name(ckpt.kind);
  meta["step"] = ckpt.step;
  meta["excitation_calibration"] = ckpt.excitation_calibration;
  meta["stats"] = {{"mean", ckpt.stats.mean}, {"std", ckpt.stats.std}};
  meta["adam"] = {{"step", ckpt.adam.step},
                  {"lr", ckpt.adam.lr},
                  {"beta1", ckpt.adam.beta1},
                  {"beta2", ckpt.adam.beta2},
                  {"eps", ckpt.adam.eps}};
  meta["provenance"] = {{"mode", ckpt.provenance.mode},
                        {"parent_digest", ckpt.provenance.parent_digest},
                        {"speaker", ckpt.provenance.speaker},
                        {"seed", ckpt.provenance.seed}};
  json tensors = json::array();
  for (auto& r : ckpt.params.tensor_refs()) {
    tensors.push_back({{"name", r.name}, {"rows", r.tensor->rows()}, {"cols", r.tensor->cols()}});
  }
  meta["tensors"] = tensors;

  const std::string meta_text = meta.dump();

  std::string b;
  b += "EXKT";
  put_u32(b, kCheckpointVersion);
  put_u32(b, static_cast<std::uint32_t>(meta_text.size()));
  b += meta_text;
  append_tensors(b, ckpt.params);
  append_tensors(b, ckpt.adam.m);
  append_tensors(b, ckpt.adam.v);

  const auto digest = Sha256::digest(b.data(), b.size());
  b.append(reinterpret_cast<const char*>(digest.data()), digest.size());
  ckpt.digest = hex_string(digest);

  io::atomic_write(path, b);
}

Checkpoint load_checkpoint(const std::string& path) {
  const std::string b = io::read_file(path);
  if (b.size() < 12 + 32 || b.compare(0, 4, "EXKT") != 0) {
    throw_format(path + " is not a checkpoint file (bad magic)");
  }
  const std::uint32_t version = read_u32(b, 4);
  if (version != kCheckpointVersion) {
    throw_format(path + ": unsupported checkpoint version " + std::to_string(version));
  }

  // Verify the content digest before trusting anything else.
  const std::size_t body_len = b.size() - 32;
  const auto digest = Sha256::digest(b.data(), body_len);
  if (std::memcmp(digest.data(), b.data() + body_len, 32) != 0) {
    throw_format(path + ": content digest mismatch (corrupted checkpoint)");
  }

  const std::uint32_t meta_len = read_u32(b, 8);
  if (12 + std::size_t(meta_len) > body_len) throw_format(path + ": truncated metadata");

  json meta;
  try {
    meta = json::parse(b.substr(12, meta_len));
  } catch (const json::exception& e) {
    throw_format("checkpoint " + path + ": bad metadata: " + e.what());
  }

  Checkpoint ckpt;
  try {
    ckpt.config = parse_config_json(meta.at("config").dump(), path + " metadata");
    ckpt.kind = voc::parse_kind(meta.at("vocoder").get<std::string>());
    ckpt.step = meta.at("step").get<std::int64_t>();
    ckpt.excitation_calibration = meta.at("excitation_calibration").get<double>();
    ckpt.stats.mean = meta.at("stats").at("mean").get<std::vector<double>>();
    ckpt.stats.std = meta.at("stats").at("std").get<std::vector<double>>();
    ckpt.adam = net::make_adam_state<float>(ckpt.config.net, meta.at("adam").at("lr").get<double>());
    ckpt.adam.step = meta.at("adam").at("step").get<std::int64_t>();
    ckpt.adam.beta1 = meta.at("adam").at("beta1").get<double>();
    ckpt.adam.beta2 = meta.at("adam").at("beta2").get<double>();
    ckpt.adam.eps = meta.at("adam").at("eps").get<double>();
    ckpt.provenance.mode = meta.at("provenance").at("mode").get<std::string>();
    ckpt.provenance.parent_digest = meta.at("provenance").at("parent_digest").get<std::string>();
    ckpt.provenance.speaker = meta.at("provenance").at("speaker").get<std::string>();
    ckpt.provenance.seed = meta.at("provenance").at("seed").get<std::uint64_t>();
  } catch (const json::exception& e) {
    throw_format("checkpoint " + path + ": metadata field: " + e.what());
  }

  ckpt.params = net::zero_parameters<float>(ckpt.config.net);

  // Shape echo in the metadata must agree with the config-derived shapes.
  const json& tensors = meta.at("tensors");
  auto refs = ckpt.params.tensor_refs();
  if (tensors.size() != refs.size()) throw_format(path + ": tensor list mismatch");
  for (std::size_t i = 0; i < refs.size(); ++i) {
    if (tensors[i].at("name").get<std::string>() != refs[i].name ||
        tensors[i].at("rows").get<Eigen::Index>() != refs[i].tensor->rows() ||
        tensors[i].at("cols").get<Eigen::Index>() != refs[i].tensor->cols()) {
      throw_format(path + ": tensor layout mismatch at '" + refs[i].name + "'");
    }
  }

  std::size_t pos = 12 + meta_len;
  read_tensors(b, pos, ckpt.params, path);
  read_tensors(b, pos, ckpt.adam.m, path);
  read_tensors(b, pos, ckpt.adam.v, path);
  if (pos != body_len) throw_format(path + ": trailing bytes after tensor payload");

  ckpt.digest = hex_string(digest);
  return ckpt;
}

}  // namespace exknet::training
