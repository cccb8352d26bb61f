// extern "C" surface: thin translation between opaque handles / status codes
// and the C++ core. Every entry point catches and records exceptions.

#include "exknet.h"

#include <cstring>
#include <json.hpp>
#include <string>

#include "eval/experiments.hpp"
#include "eval/metrics.hpp"
#include "features/features.hpp"
#include "io/atomic_file.hpp"
#include "io/feature_file.hpp"
#include "io/wav.hpp"
#include "toolkit_config.hpp"
#include "train/checkpoint.hpp"
#include "train/manifest.hpp"
#include "train/trainer.hpp"
#include "util/error.hpp"
#include "vocoder/vocoder.hpp"

using namespace exknet;

struct exk_config {
  ToolkitConfig cfg;
};
struct exk_waveform {
  dsp::Waveform w;
};
struct exk_features {
  feat::FeatureTrack t;
};
struct exk_stats {
  feat::NormalizationStats s;
};
struct exk_checkpoint {
  training::Checkpoint c;
  std::string kind_name;
};

namespace {

thread_local std::string g_last_error = "no error";

exk_status record(const std::exception& e, exk_status code) {
  g_last_error = e.what();
  return code;
}

exk_status map_kind(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Argument: return EXK_ERR_ARGUMENT;
    case ErrorKind::Domain: return EXK_ERR_DOMAIN;
    case ErrorKind::Io: return EXK_ERR_IO;
    case ErrorKind::Format: return EXK_ERR_FORMAT;
    case ErrorKind::Numeric: return EXK_ERR_NUMERIC;
    case ErrorKind::Stability: return EXK_ERR_STABILITY;
    case ErrorKind::State: return EXK_ERR_STATE;
  }
  return EXK_ERR_INTERNAL;
}

template <class Fn>
exk_status guarded(Fn&& fn) {
  try {
    fn();
    return EXK_OK;
  } catch (const Error& e) {
    return record(e, map_kind(e.kind()));
  } catch (const std::exception& e) {
    return record(e, EXK_ERR_INTERNAL);
  } catch (...) {
    g_last_error = "unknown error";
    return EXK_ERR_INTERNAL;
  }
}

exk_status require(bool ok, const char* what) {
  if (!ok) {
    g_last_error = what;
    return EXK_ERR_ARGUMENT;
  }
  return EXK_OK;
}

std::vector<eval::SystemSpec> make_systems(const char* const* labels, const char* const* targets,
                                           size_t n) {
  std::vector<eval::SystemSpec> systems;
  for (size_t i = 0; i < n; ++i) {
    systems.push_back(eval::parse_system_spec(labels[i], targets[i]));
  }
  return systems;
}

void write_nll_log(const std::vector<training::NllPoint>& log, const char* path) {
  if (path == nullptr) return;
  std::string csv = "step,train_nll,dev_nll\n";
  for (const training::NllPoint& p : log) {
    csv += std::to_string(p.step) + "," + nlohmann::json(p.train_nll).dump() + ",";
    if (p.dev_nll) csv += nlohmann::json(*p.dev_nll).dump();
    csv += "\n";
  }
  io::atomic_write(path, csv);
}

}  // namespace

extern "C" {

const char* exk_last_error(void) { return g_last_error.c_str(); }

const char* exk_version(void) { return "0.1.0"; }

/* ---- configuration ---------------------------------------------------- */

exk_status exk_config_default(exk_config** out) {
  if (exk_status s = require(out != nullptr, "out is NULL")) return s;
  return guarded([&] { *out = new exk_config{ToolkitConfig{}}; });
}

exk_status exk_config_load(const char* path, exk_config** out) {
  if (exk_status s = require(path && out, "path/out is NULL")) return s;
  return guarded([&] { *out = new exk_config{load_config_file(path)}; });
}

exk_status exk_config_set(exk_config* cfg, const char* key, const char* value) {
  if (exk_status s = require(cfg && key && value, "cfg/key/value is NULL")) return s;
  return guarded([&] { apply_config_override(cfg->cfg, key, value); });
}

exk_status exk_config_save(const exk_config* cfg, const char* path) {
  if (exk_status s = require(cfg && path, "cfg/path is NULL")) return s;
  return guarded([&] { save_config_file(cfg->cfg, path); });
}

void exk_config_free(exk_config* cfg) { delete cfg; }

/* ---- audio ------------------------------------------------------------ */

exk_status exk_wav_read(const char* path, exk_waveform** out) {
  if (exk_status s = require(path && out, "path/out is NULL")) return s;
  return guarded([&] { *out = new exk_waveform{io::read_wav(path)}; });
}

exk_status exk_wav_write(const exk_waveform* w, const char* path) {
  if (exk_status s = require(w && path, "waveform/path is NULL")) return s;
  return guarded([&] { io::write_wav(w->w, path); });
}

exk_status exk_waveform_create(const double* samples, size_t count, int sample_rate_hz,
                               exk_waveform** out) {
  if (exk_status s = require(out && (samples || count == 0), "bad sample buffer")) return s;
  return guarded([&] {
    dsp::Waveform w;
    w.sample_rate_hz = sample_rate_hz;
    w.samples.assign(samples, samples + count);
    if (sample_rate_hz <= 0) throw_argument("sample rate must be positive");
    for (double v : w.samples) {
      if (!(v >= -1.0 && v <= 1.0)) throw_domain("samples must lie in [-1, 1]");
    }
    *out = new exk_waveform{std::move(w)};
  });
}

size_t exk_waveform_length(const exk_waveform* w) { return w ? w->w.samples.size() : 0; }

int exk_waveform_sample_rate(const exk_waveform* w) { return w ? w->w.sample_rate_hz : 0; }

size_t exk_waveform_copy(const exk_waveform* w, double* out, size_t count) {
  if (!w || !out) return 0;
  const size_t n = std::min(count, w->w.samples.size());
  std::memcpy(out, w->w.samples.data(), n * sizeof(double));
  return n;
}

void exk_waveform_free(exk_waveform* w) { delete w; }

/* ---- features ---------------------------------------------------------- */

exk_status exk_features_extract(const exk_waveform* w, const exk_config* cfg,
                                const char* speaker_id, exk_features** out) {
  if (exk_status s = require(w && cfg && out, "waveform/config/out is NULL")) return s;
  return guarded([&] {
    cfg->cfg.validate();
    if (w->w.sample_rate_hz != cfg->cfg.sample_rate_hz) {
      throw_state("waveform sample rate does not match configuration");
    }
    *out = new exk_features{
        feat::extract_features(w->w, cfg->cfg.extract_options(), speaker_id ? speaker_id : "")};
  });
}

exk_status exk_features_read(const char* path, exk_features** out) {
  if (exk_status s = require(path && out, "path/out is NULL")) return s;
  return guarded([&] { *out = new exk_features{io::read_feature_file(path)}; });
}

exk_status exk_features_write(const exk_features* f, const char* path, int json_sidecar) {
  if (exk_status s = require(f && path, "features/path is NULL")) return s;
  return guarded([&] { io::write_feature_file(f->t, path, json_sidecar != 0); });
}

size_t exk_features_frame_count(const exk_features* f) { return f ? f->t.size() : 0; }

int exk_features_dim(const exk_features* f) { return f ? f->t.dim() : 0; }

exk_status exk_features_scale_f0(const exk_features* f, double factor, exk_features** out) {
  if (exk_status s = require(f && out, "features/out is NULL")) return s;
  return guarded([&] { *out = new exk_features{feat::scale_f0(f->t, factor)}; });
}

exk_status exk_features_perturb(const exk_features* f, double sigma, uint64_t seed,
                                const exk_stats* stats, const exk_config* cfg,
                                exk_features** out) {
  if (exk_status s = require(f && out, "features/out is NULL")) return s;
  return guarded([&] {
    feat::NormalizationStats st;
    if (stats != nullptr) {
      st = stats->s;
    } else {
      std::vector<const feat::FeatureTrack*> one{&f->t};
      st = feat::compute_norm_stats(one);
    }
    const feat::F0Options f0 = cfg ? cfg->cfg.f0 : feat::F0Options{};
    *out = new exk_features{feat::perturb_features(f->t, sigma, seed, st, f0)};
  });
}

void exk_features_free(exk_features* f) { delete f; }

exk_status exk_stats_compute(const exk_features* const* tracks, size_t count, exk_stats** out) {
  if (exk_status s = require(tracks && out && count > 0, "need at least one track")) return s;
  return guarded([&] {
    std::vector<const feat::FeatureTrack*> ts;
    for (size_t i = 0; i < count; ++i) {
      if (!tracks[i]) throw_argument("stats: NULL track");
      ts.push_back(&tracks[i]->t);
    }
    *out = new exk_stats{feat::compute_norm_stats(ts)};
  });
}

exk_status exk_stats_read(const char* path, exk_stats** out) {
  if (exk_status s = require(path && out, "path/out is NULL")) return s;
  return guarded([&] { *out = new exk_stats{io::read_stats_file(path)}; });
}

exk_status exk_stats_write(const exk_stats* stats, const char* path) {
  if (exk_status s = require(stats && path, "stats/path is NULL")) return s;
  return guarded([&] { io::write_stats_file(stats->s, path); });
}

void exk_stats_free(exk_stats* stats) { delete stats; }

/* ---- training ---------------------------------------------------------- */

exk_status exk_train(const char* manifest_path, const exk_config* cfg, const char* mode,
                     const char* target_speaker, uint64_t seed, const char* out_ckpt_path,
                     const char* nll_log_path) {
  if (exk_status s = require(manifest_path && cfg && mode && out_ckpt_path, "NULL argument")) {
    return s;
  }
  return guarded([&] {
    const training::TrainMode m = training::parse_mode(mode);
    const training::CorpusManifest corpus = training::load_manifest(manifest_path);
    training::TrainOutput result =
        training::train(corpus, cfg->cfg, m, target_speaker ? target_speaker : "", seed);
    training::save_checkpoint(result.checkpoint, out_ckpt_path);
    write_nll_log(result.log, nll_log_path);
  });
}

exk_status exk_adapt(const char* si_ckpt_path, const char* manifest_path, const exk_config* cfg,
                     const char* target_speaker, uint64_t seed, const char* out_ckpt_path,
                     const char* nll_log_path) {
  if (exk_status s = require(si_ckpt_path && manifest_path && cfg && target_speaker &&
                                 out_ckpt_path,
                             "NULL argument")) {
    return s;
  }
  return guarded([&] {
    const training::Checkpoint si = training::load_checkpoint(si_ckpt_path);
    const training::CorpusManifest corpus = training::load_manifest(manifest_path);
    training::TrainOutput result = training::adapt(si, corpus, cfg->cfg, target_speaker, seed);
    training::save_checkpoint(result.checkpoint, out_ckpt_path);
    write_nll_log(result.log, nll_log_path);
  });
}

exk_status exk_checkpoint_open(const char* path, exk_checkpoint** out) {
  if (exk_status s = require(path && out, "path/out is NULL")) return s;
  return guarded([&] {
    auto* h = new exk_checkpoint{training::load_checkpoint(path), ""};
    h->kind_name = voc::kind_name(h->c.kind);
    *out = h;
  });
}

const char* exk_checkpoint_kind(const exk_checkpoint* ckpt) {
  return ckpt ? ckpt->kind_name.c_str() : "";
}

const char* exk_checkpoint_digest(const exk_checkpoint* ckpt) {
  return ckpt ? ckpt->c.digest.c_str() : "";
}

int64_t exk_checkpoint_step(const exk_checkpoint* ckpt) { return ckpt ? ckpt->c.step : -1; }

void exk_checkpoint_free(exk_checkpoint* ckpt) { delete ckpt; }

exk_status exk_eval_nll(const exk_checkpoint* ckpt, const char* manifest_path, const char* split,
                        const char* speaker, double* out_nll) {
  if (exk_status s = require(ckpt && manifest_path && split && out_nll, "NULL argument")) return s;
  return guarded([&] {
    const training::CorpusManifest corpus = training::load_manifest(manifest_path);
    *out_nll = training::eval_nll(ckpt->c, corpus, training::parse_split(split), speaker ? speaker : "");
  });
}

/* ---- synthesis --------------------------------------------------------- */

exk_status exk_synthesize(const exk_checkpoint* ckpt, const exk_features* f, const char* mode,
                          uint64_t seed, const char* expected_kind, exk_waveform** out) {
  if (exk_status s = require(ckpt && f && mode && out, "NULL argument")) return s;
  return guarded([&] {
    if (expected_kind != nullptr && voc::parse_kind(expected_kind) != ckpt->c.kind) {
      throw_state(std::string("checkpoint is a ") + voc::kind_name(ckpt->c.kind) +
                  " vocoder, not " + expected_kind);
    }
    net::SampleMode m;
    const std::string mode_s = mode;
    if (mode_s == "random") {
      m = net::SampleMode::Random;
    } else if (mode_s == "greedy") {
      m = net::SampleMode::Greedy;
    } else {
      throw_argument("unknown sampling mode '" + mode_s + "' (expected random or greedy)");
    }
    *out = new exk_waveform{voc::synthesize(ckpt->c, f->t, m, seed)};
  });
}

exk_status exk_copy_synthesis(const exk_waveform* w, const char* kind, const exk_config* cfg,
                              exk_waveform** out) {
  if (exk_status s = require(w && kind && cfg && out, "NULL argument")) return s;
  return guarded([&] {
    cfg->cfg.validate();
    *out = new exk_waveform{
        voc::copy_synthesis(w->w, voc::parse_kind(kind), cfg->cfg.extract_options())};
  });
}

/* ---- objective evaluation ---------------------------------------------- */

exk_status exk_lsd(const exk_waveform* reference, const exk_waveform* test, double* out_db) {
  if (exk_status s = require(reference && test && out_db, "NULL argument")) return s;
  return guarded([&] { *out_db = eval::lsd(reference->w, test->w); });
}

exk_status exk_f0_rmse(const exk_features* reference, const exk_features* test, double* out_hz) {
  if (exk_status s = require(reference && test && out_hz, "NULL argument")) return s;
  return guarded([&] { *out_hz = eval::f0_rmse(reference->t, test->t); });
}

exk_status exk_eval_compare(const char* manifest_path, const exk_config* cfg,
                            const char* const* labels, const char* const* targets,
                            size_t n_systems, double perturb_sigma, uint64_t seed,
                            const char* out_csv_path) {
  if (exk_status s = require(manifest_path && cfg && labels && targets && out_csv_path &&
                                 n_systems > 0,
                             "NULL argument or empty system list")) {
    return s;
  }
  return guarded([&] {
    const training::CorpusManifest corpus = training::load_manifest(manifest_path);
    eval::ComparisonOptions opt;
    opt.perturb_sigma = perturb_sigma;
    opt.seed = seed;
    const auto rows =
        eval::run_comparison(corpus, cfg->cfg, make_systems(labels, targets, n_systems), opt);
    io::atomic_write(out_csv_path, eval::comparison_csv(rows));
  });
}

exk_status exk_eval_f0mod(const char* manifest_path, const exk_config* cfg,
                          const char* const* labels, const char* const* targets, size_t n_systems,
                          const double* factors, size_t n_factors, uint64_t seed,
                          const char* out_csv_path) {
  if (exk_status s = require(manifest_path && cfg && labels && targets && out_csv_path &&
                                 factors && n_systems > 0 && n_factors > 0,
                             "NULL argument or empty grid")) {
    return s;
  }
  return guarded([&] {
    const training::CorpusManifest corpus = training::load_manifest(manifest_path);
    const std::vector<double> fs(factors, factors + n_factors);
    const auto rows = eval::run_f0_modification(
        corpus, cfg->cfg, make_systems(labels, targets, n_systems), fs, seed);
    io::atomic_write(out_csv_path, eval::f0_modification_csv(rows));
  });
}

}  // extern "C"
