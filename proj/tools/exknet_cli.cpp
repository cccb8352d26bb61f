// exknet command-line interface. Talks to the toolkit exclusively through
// the C API in include/exknet.h.

#include <CLI11.hpp>
#include <cstdint>
#include <cstdio>
#include <memory>
#include <string>
#include <vector>

#include "exknet.h"

namespace {

struct ConfigHandle {
  exk_config* cfg = nullptr;
  ~ConfigHandle() { exk_config_free(cfg); }
};

int fail(const char* op) {
  std::fprintf(stderr, "error: %s: %s\n", op, exk_last_error());
  return 1;
}

// --config file first, then --set key=value overrides, then dedicated flags.
int build_config(ConfigHandle& handle, const std::string& config_path,
                 const std::vector<std::string>& sets) {
  exk_status s = config_path.empty() ? exk_config_default(&handle.cfg)
                                     : exk_config_load(config_path.c_str(), &handle.cfg);
  if (s != EXK_OK) return fail("config");
  for (const std::string& kv : sets) {
    const std::size_t eq = kv.find('=');
    if (eq == std::string::npos) {
      std::fprintf(stderr, "error: --set expects key=value, got '%s'\n", kv.c_str());
      return 1;
    }
    if (exk_config_set(handle.cfg, kv.substr(0, eq).c_str(), kv.substr(eq + 1).c_str()) != EXK_OK) {
      return fail("config override");
    }
  }
  return 0;
}

struct SystemArgs {
  std::vector<std::string> labels;
  std::vector<std::string> targets;

  int parse(const std::vector<std::string>& raw) {
    for (const std::string& s : raw) {
      const std::size_t eq = s.find('=');
      if (eq == std::string::npos) {
        std::fprintf(stderr, "error: --system expects LABEL=TARGET, got '%s'\n", s.c_str());
        return 1;
      }
      labels.push_back(s.substr(0, eq));
      targets.push_back(s.substr(eq + 1));
    }
    return 0;
  }

  std::vector<const char*> label_ptrs() const {
    std::vector<const char*> v;
    for (const auto& s : labels) v.push_back(s.c_str());
    return v;
  }
  std::vector<const char*> target_ptrs() const {
    std::vector<const char*> v;
    for (const auto& s : targets) v.push_back(s.c_str());
    return v;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"exknet: WaveNet/ExcitNet vocoders with SD, SI and SA training"};
  app.require_subcommand(1);

  std::string config_path;
  std::string manifest;
  std::uint64_t seed = 0;
  std::vector<std::string> sets;
  app.add_option("--config", config_path, "toolkit config JSON file");
  app.add_option("--seed", seed, "random seed (default 0)");
  app.add_option("--manifest", manifest, "corpus manifest JSON file");
  app.add_option("--set", sets, "config override key=value (repeatable)")->take_all();

  // extract
  auto* extract = app.add_subcommand("extract", "wav -> feature file");
  std::string in_path, out_path, speaker;
  bool sidecar = false;
  extract->add_option("--in", in_path, "input wav")->required();
  extract->add_option("--out", out_path, "output feature file")->required();
  extract->add_option("--speaker", speaker, "speaker id recorded in the file");
  extract->add_flag("--sidecar", sidecar, "also write a JSON sidecar");

  // stats
  auto* stats_cmd = app.add_subcommand("stats", "feature files -> normalization stats");
  std::vector<std::string> stats_inputs;
  std::string stats_out;
  stats_cmd->add_option("--in", stats_inputs, "input feature files")->required()->take_all();
  stats_cmd->add_option("--out", stats_out, "output stats JSON")->required();

  // train
  auto* train_cmd = app.add_subcommand("train", "train an SD or SI vocoder");
  std::string mode, kind, ckpt_out, nll_log;
  train_cmd->add_option("--mode", mode, "sd or si")->required();
  train_cmd->add_option("--kind", kind, "wavenet or excitnet (overrides config)");
  train_cmd->add_option("--speaker", speaker, "target speaker (required for sd)");
  train_cmd->add_option("--out", ckpt_out, "output checkpoint")->required();
  train_cmd->add_option("--nll-log", nll_log, "write step,train_nll,dev_nll CSV");

  // adapt
  auto* adapt_cmd = app.add_subcommand("adapt", "fine-tune an SI checkpoint on a target speaker");
  std::string from_ckpt;
  adapt_cmd->add_option("--from", from_ckpt, "SI checkpoint to initialize from")->required();
  adapt_cmd->add_option("--speaker", speaker, "target speaker")->required();
  adapt_cmd->add_option("--out", ckpt_out, "output checkpoint")->required();
  adapt_cmd->add_option("--nll-log", nll_log, "write step,train_nll,dev_nll CSV");

  // synth
  auto* synth_cmd = app.add_subcommand("synth", "features + checkpoint -> wav");
  std::string synth_ckpt, features_path, synth_mode = "random";
  synth_cmd->add_option("--ckpt", synth_ckpt, "checkpoint")->required();
  synth_cmd->add_option("--features", features_path, "conditioning feature file")->required();
  synth_cmd->add_option("--kind", kind, "expected vocoder kind (wavenet or excitnet)");
  synth_cmd->add_option("--mode", synth_mode, "random or greedy (default random)");
  synth_cmd->add_option("--out", out_path, "output wav")->required();

  // copy-synth
  auto* copy_cmd = app.add_subcommand("copy-synth", "codec/filter round trip, no neural model");
  copy_cmd->add_option("--kind", kind, "wavenet or excitnet")->required();
  copy_cmd->add_option("--in", in_path, "input wav")->required();
  copy_cmd->add_option("--out", out_path, "output wav")->required();

  // eval
  auto* eval_cmd = app.add_subcommand("eval", "objective evaluation grids");
  eval_cmd->require_subcommand(1);
  auto* compare_cmd = eval_cmd->add_subcommand("compare", "LSD / F0 RMSE comparison table");
  std::vector<std::string> system_args;
  std::string csv_out;
  double perturb_sigma = 0.0;
  compare_cmd->add_option("--system", system_args, "LABEL=ckpt.exk or LABEL=copy:wavenet|copy:excitnet")
      ->required()
      ->take_all();
  compare_cmd->add_option("--out", csv_out, "output CSV")->required();
  compare_cmd->add_option("--perturb-sigma", perturb_sigma,
                          "feature noise in normalized space (SPSS emulation, default 0)");

  auto* f0mod_cmd = eval_cmd->add_subcommand("f0mod", "F0-scaling RMSE grid");
  std::vector<double> factors{0.6, 0.8, 1.0, 1.2};
  f0mod_cmd->add_option("--system", system_args, "LABEL=ckpt.exk or LABEL=copy:...")
      ->required()
      ->take_all();
  f0mod_cmd->add_option("--factors", factors, "scaling factors (default 0.6,0.8,1.0,1.2)")
      ->delimiter(',');
  f0mod_cmd->add_option("--out", csv_out, "output CSV")->required();

  // perturb
  auto* perturb_cmd = app.add_subcommand("perturb", "add seeded feature noise");
  std::string stats_path;
  double sigma = 0.1;
  perturb_cmd->add_option("--in", in_path, "input feature file")->required();
  perturb_cmd->add_option("--out", out_path, "output feature file")->required();
  perturb_cmd->add_option("--sigma", sigma, "noise std in normalized space (default 0.1)");
  perturb_cmd->add_option("--stats", stats_path, "stats JSON (default: stats of the input track)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  ConfigHandle cfg;
  if (int rc = build_config(cfg, config_path, sets)) return rc;

  if (extract->parsed()) {
    exk_waveform* w = nullptr;
    if (exk_wav_read(in_path.c_str(), &w) != EXK_OK) return fail("read_wav");
    exk_features* f = nullptr;
    if (exk_features_extract(w, cfg.cfg, speaker.c_str(), &f) != EXK_OK) {
      exk_waveform_free(w);
      return fail("extract");
    }
    const exk_status s = exk_features_write(f, out_path.c_str(), sidecar ? 1 : 0);
    exk_features_free(f);
    exk_waveform_free(w);
    if (s != EXK_OK) return fail("write features");
    std::printf("wrote %s\n", out_path.c_str());
    return 0;
  }

  if (stats_cmd->parsed()) {
    std::vector<exk_features*> tracks;
    auto cleanup = [&] {
      for (auto* t : tracks) exk_features_free(t);
    };
    for (const std::string& p : stats_inputs) {
      exk_features* f = nullptr;
      if (exk_features_read(p.c_str(), &f) != EXK_OK) {
        cleanup();
        return fail("read features");
      }
      tracks.push_back(f);
    }
    exk_stats* st = nullptr;
    const exk_status s = exk_stats_compute(
        const_cast<const exk_features* const*>(tracks.data()), tracks.size(), &st);
    cleanup();
    if (s != EXK_OK) return fail("stats");
    const exk_status s2 = exk_stats_write(st, stats_out.c_str());
    exk_stats_free(st);
    if (s2 != EXK_OK) return fail("write stats");
    std::printf("wrote %s\n", stats_out.c_str());
    return 0;
  }

  if (train_cmd->parsed()) {
    if (manifest.empty()) {
      std::fprintf(stderr, "error: train: --manifest is required\n");
      return 1;
    }
    if (!kind.empty() && exk_config_set(cfg.cfg, "train.vocoder", kind.c_str()) != EXK_OK) {
      return fail("config");
    }
    if (exk_train(manifest.c_str(), cfg.cfg, mode.c_str(),
                  speaker.empty() ? nullptr : speaker.c_str(), seed, ckpt_out.c_str(),
                  nll_log.empty() ? nullptr : nll_log.c_str()) != EXK_OK) {
      return fail("train");
    }
    exk_checkpoint* c = nullptr;
    if (exk_checkpoint_open(ckpt_out.c_str(), &c) == EXK_OK) {
      std::printf("wrote %s (digest %s)\n", ckpt_out.c_str(), exk_checkpoint_digest(c));
      exk_checkpoint_free(c);
    }
    return 0;
  }

  if (adapt_cmd->parsed()) {
    if (manifest.empty()) {
      std::fprintf(stderr, "error: adapt: --manifest is required\n");
      return 1;
    }
    if (exk_adapt(from_ckpt.c_str(), manifest.c_str(), cfg.cfg, speaker.c_str(), seed,
                  ckpt_out.c_str(), nll_log.empty() ? nullptr : nll_log.c_str()) != EXK_OK) {
      return fail("adapt");
    }
    exk_checkpoint* c = nullptr;
    if (exk_checkpoint_open(ckpt_out.c_str(), &c) == EXK_OK) {
      std::printf("wrote %s (digest %s)\n", ckpt_out.c_str(), exk_checkpoint_digest(c));
      exk_checkpoint_free(c);
    }
    return 0;
  }

  if (synth_cmd->parsed()) {
    exk_checkpoint* c = nullptr;
    if (exk_checkpoint_open(synth_ckpt.c_str(), &c) != EXK_OK) return fail("open checkpoint");
    exk_features* f = nullptr;
    if (exk_features_read(features_path.c_str(), &f) != EXK_OK) {
      exk_checkpoint_free(c);
      return fail("read features");
    }
    exk_waveform* w = nullptr;
    const exk_status s = exk_synthesize(c, f, synth_mode.c_str(), seed,
                                        kind.empty() ? nullptr : kind.c_str(), &w);
    exk_features_free(f);
    exk_checkpoint_free(c);
    if (s != EXK_OK) return fail("synthesize");
    const exk_status s2 = exk_wav_write(w, out_path.c_str());
    exk_waveform_free(w);
    if (s2 != EXK_OK) return fail("write wav");
    std::printf("wrote %s\n", out_path.c_str());
    return 0;
  }

  if (copy_cmd->parsed()) {
    exk_waveform* w = nullptr;
    if (exk_wav_read(in_path.c_str(), &w) != EXK_OK) return fail("read_wav");
    exk_waveform* y = nullptr;
    const exk_status s = exk_copy_synthesis(w, kind.c_str(), cfg.cfg, &y);
    exk_waveform_free(w);
    if (s != EXK_OK) return fail("copy-synth");
    const exk_status s2 = exk_wav_write(y, out_path.c_str());
    exk_waveform_free(y);
    if (s2 != EXK_OK) return fail("write wav");
    std::printf("wrote %s\n", out_path.c_str());
    return 0;
  }

  if (compare_cmd->parsed() || f0mod_cmd->parsed()) {
    if (manifest.empty()) {
      std::fprintf(stderr, "error: eval: --manifest is required\n");
      return 1;
    }
    SystemArgs systems;
    if (systems.parse(system_args)) return 1;
    const auto labels = systems.label_ptrs();
    const auto targets = systems.target_ptrs();
    exk_status s;
    if (compare_cmd->parsed()) {
      s = exk_eval_compare(manifest.c_str(), cfg.cfg, labels.data(), targets.data(),
                           labels.size(), perturb_sigma, seed, csv_out.c_str());
    } else {
      s = exk_eval_f0mod(manifest.c_str(), cfg.cfg, labels.data(), targets.data(), labels.size(),
                         factors.data(), factors.size(), seed, csv_out.c_str());
    }
    if (s != EXK_OK) return fail("eval");
    std::printf("wrote %s\n", csv_out.c_str());
    return 0;
  }

  if (perturb_cmd->parsed()) {
    exk_features* f = nullptr;
    if (exk_features_read(in_path.c_str(), &f) != EXK_OK) return fail("read features");
    exk_stats* st = nullptr;
    if (!stats_path.empty() && exk_stats_read(stats_path.c_str(), &st) != EXK_OK) {
      exk_features_free(f);
      return fail("read stats");
    }
    exk_features* out = nullptr;
    const exk_status s = exk_features_perturb(f, sigma, seed, st, cfg.cfg, &out);
    exk_features_free(f);
    exk_stats_free(st);
    if (s != EXK_OK) return fail("perturb");
    const exk_status s2 = exk_features_write(out, out_path.c_str(), 0);
    exk_features_free(out);
    if (s2 != EXK_OK) return fail("write features");
    std::printf("wrote %s\n", out_path.c_str());
    return 0;
  }

  std::fprintf(stderr, "error: no subcommand\n");
  return 2;
}
