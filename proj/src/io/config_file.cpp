#include <json.hpp>
#include <string>

#include "io/atomic_file.hpp"
#include "toolkit_config.hpp"
#include "util/error.hpp"

namespace exknet {

namespace {

using nlohmann::json;

std::string window_name(dsp::WindowKind k) {
  return k == dsp::WindowKind::Hann ? "hann" : "rectangular";
}

dsp::WindowKind parse_window(const std::string& name) {
  if (name == "hann") return dsp::WindowKind::Hann;
  if (name == "rectangular") return dsp::WindowKind::Rectangular;
  throw_format("config: unknown window '" + name + "'");
}

template <class T>
void maybe(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

std::string config_to_json(const ToolkitConfig& c) {
  json j;
  j["sample_rate_hz"] = c.sample_rate_hz;
  j["lpc_order"] = c.lpc_order;
  j["frame"] = {{"frame_len", c.frame.frame_len}, {"hop", c.frame.hop}, {"window", window_name(c.frame.window)}};
  j["f0"] = {{"min_hz", c.f0.f0_min_hz},
             {"max_hz", c.f0.f0_max_hz},
             {"voicing_threshold", c.f0.voicing_threshold},
             {"silence_floor_db", c.f0.silence_floor_db}};
  j["net"] = {{"blocks", c.net.blocks},
              {"layers_per_block", c.net.layers_per_block},
              {"residual_channels", c.net.residual_channels},
              {"skip_channels", c.net.skip_channels},
              {"quantization_channels", c.net.quantization_channels},
              {"condition_dim", c.net.condition_dim},
              {"kernel_size", c.net.kernel_size}};
  j["train"] = {{"batch_target_samples", c.train.batch_target_samples},
                {"steps", c.train.steps},
                {"lr", c.train.lr},
                {"seed", c.train.seed},
                {"dev_eval_interval", c.train.dev_eval_interval},
                {"vocoder", voc::kind_name(c.train.vocoder)}};
  return j.dump(2) + "\n";
}

ToolkitConfig parse_config_json(const std::string& text, const std::string& origin) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw_format("config " + origin + ": " + e.what());
  }

  ToolkitConfig c;
  try {
    maybe(j, "sample_rate_hz", c.sample_rate_hz);
    maybe(j, "lpc_order", c.lpc_order);
    if (j.contains("frame")) {
      const json& f = j.at("frame");
      maybe(f, "frame_len", c.frame.frame_len);
      maybe(f, "hop", c.frame.hop);
      if (f.contains("window")) c.frame.window = parse_window(f.at("window").get<std::string>());
    }
    if (j.contains("f0")) {
      const json& f = j.at("f0");
      maybe(f, "min_hz", c.f0.f0_min_hz);
      maybe(f, "max_hz", c.f0.f0_max_hz);
      maybe(f, "voicing_threshold", c.f0.voicing_threshold);
      maybe(f, "silence_floor_db", c.f0.silence_floor_db);
    }
    if (j.contains("net")) {
      const json& n = j.at("net");
      maybe(n, "blocks", c.net.blocks);
      maybe(n, "layers_per_block", c.net.layers_per_block);
      maybe(n, "residual_channels", c.net.residual_channels);
      maybe(n, "skip_channels", c.net.skip_channels);
      maybe(n, "quantization_channels", c.net.quantization_channels);
      maybe(n, "condition_dim", c.net.condition_dim);
      maybe(n, "kernel_size", c.net.kernel_size);
    }
    if (j.contains("train")) {
      const json& t = j.at("train");
      maybe(t, "batch_target_samples", c.train.batch_target_samples);
      maybe(t, "steps", c.train.steps);
      maybe(t, "lr", c.train.lr);
      maybe(t, "seed", c.train.seed);
      maybe(t, "dev_eval_interval", c.train.dev_eval_interval);
      if (t.contains("vocoder")) c.train.vocoder = voc::parse_kind(t.at("vocoder").get<std::string>());
    }
  } catch (const json::exception& e) {
    throw_format("config " + origin + ": " + e.what());
  }

  // Unless the file pinned it explicitly, the condition dimension follows
  // the feature layout.
  if (!(j.contains("net") && j.at("net").contains("condition_dim"))) {
    c.net.condition_dim = c.lpc_order + 3;
  }
  c.validate();
  return c;
}

ToolkitConfig load_config_file(const std::string& path) {
  return parse_config_json(io::read_file(path), path);
}

void save_config_file(const ToolkitConfig& config, const std::string& path) {
  io::atomic_write(path, config_to_json(config));
}

void apply_config_override(ToolkitConfig& config, const std::string& dotted_key,
                           const std::string& value) {
  json j = json::parse(config_to_json(config));
  json* node = &j;
  std::string key = dotted_key;
  std::size_t dot;
  while ((dot = key.find('.')) != std::string::npos) {
    const std::string head = key.substr(0, dot);
    if (!node->contains(head)) throw_argument("config override: unknown key '" + dotted_key + "'");
    node = &node->at(head);
    key = key.substr(dot + 1);
  }
  if (!node->contains(key)) throw_argument("config override: unknown key '" + dotted_key + "'");

  json& leaf = node->at(key);
  try {
    if (leaf.is_string()) {
      leaf = value;
    } else if (leaf.is_boolean()) {
      leaf = (value == "true" || value == "1");
    } else if (leaf.is_number_integer() || leaf.is_number_unsigned()) {
      leaf = json::parse(value);
      if (!leaf.is_number()) throw_argument("config override: expected a number for '" + dotted_key + "'");
    } else if (leaf.is_number_float()) {
      leaf = std::stod(value);
    } else {
      throw_argument("config override: key '" + dotted_key + "' is not a scalar");
    }
  } catch (const Error&) {
    throw;
  } catch (const std::exception&) {
    throw_argument("config override: cannot parse value '" + value + "' for '" + dotted_key + "'");
  }
  config = parse_config_json(j.dump(), "override " + dotted_key);
}

}  // namespace exknet
