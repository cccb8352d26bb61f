/* exknet — neural vocoding toolkit (WaveNet / ExcitNet with SD, SI and SA
 * training) behind a plain C interface.
 *
 * Conventions:
 *   - every function returns an exk_status; EXK_OK is 0
 *   - on failure, exk_last_error() describes what went wrong (thread-local)
 *   - objects are opaque handles released with the matching *_free()
 *   - all operations are deterministic in their inputs and explicit seeds
 */
#ifndef EXKNET_H
#define EXKNET_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined _WIN32
#define EXK_API __declspec(dllexport)
#else
#define EXK_API __attribute__((visibility("default")))
#endif

typedef enum exk_status {
  EXK_OK = 0,
  EXK_ERR_ARGUMENT = 1,  /* caller violated a precondition */
  EXK_ERR_DOMAIN = 2,    /* value outside an operation's domain */
  EXK_ERR_IO = 3,        /* filesystem failure */
  EXK_ERR_FORMAT = 4,    /* malformed or unsupported file */
  EXK_ERR_NUMERIC = 5,   /* numerical failure */
  EXK_ERR_STABILITY = 6, /* unstable synthesis filter */
  EXK_ERR_STATE = 7,     /* incompatible objects (kind/config mismatch) */
  EXK_ERR_INTERNAL = 8
} exk_status;

/* Message for the most recent failure on this thread; never NULL. */
EXK_API const char* exk_last_error(void);

EXK_API const char* exk_version(void);

typedef struct exk_config exk_config;
typedef struct exk_waveform exk_waveform;
typedef struct exk_features exk_features;
typedef struct exk_stats exk_stats;
typedef struct exk_checkpoint exk_checkpoint;

/* ---- configuration ---------------------------------------------------- */

EXK_API exk_status exk_config_default(exk_config** out);
EXK_API exk_status exk_config_load(const char* path, exk_config** out);
/* Dotted-key override, e.g. ("train.steps", "2000"). */
EXK_API exk_status exk_config_set(exk_config* cfg, const char* key, const char* value);
EXK_API exk_status exk_config_save(const exk_config* cfg, const char* path);
EXK_API void exk_config_free(exk_config* cfg);

/* ---- audio ------------------------------------------------------------ */

EXK_API exk_status exk_wav_read(const char* path, exk_waveform** out);
EXK_API exk_status exk_wav_write(const exk_waveform* w, const char* path);
EXK_API exk_status exk_waveform_create(const double* samples, size_t count, int sample_rate_hz,
                                       exk_waveform** out);
EXK_API size_t exk_waveform_length(const exk_waveform* w);
EXK_API int exk_waveform_sample_rate(const exk_waveform* w);
/* Copies up to `count` samples into `out`, returns the number copied. */
EXK_API size_t exk_waveform_copy(const exk_waveform* w, double* out, size_t count);
EXK_API void exk_waveform_free(exk_waveform* w);

/* ---- features ---------------------------------------------------------- */

EXK_API exk_status exk_features_extract(const exk_waveform* w, const exk_config* cfg,
                                        const char* speaker_id, exk_features** out);
EXK_API exk_status exk_features_read(const char* path, exk_features** out);
EXK_API exk_status exk_features_write(const exk_features* f, const char* path, int json_sidecar);
EXK_API size_t exk_features_frame_count(const exk_features* f);
EXK_API int exk_features_dim(const exk_features* f);
/* Voiced frames' F0 multiplied by `factor`. */
EXK_API exk_status exk_features_scale_f0(const exk_features* f, double factor, exk_features** out);
/* Seeded Gaussian perturbation in the normalized feature space of `stats`. */
EXK_API exk_status exk_features_perturb(const exk_features* f, double sigma, uint64_t seed,
                                        const exk_stats* stats, const exk_config* cfg,
                                        exk_features** out);
EXK_API void exk_features_free(exk_features* f);

EXK_API exk_status exk_stats_compute(const exk_features* const* tracks, size_t count,
                                     exk_stats** out);
EXK_API exk_status exk_stats_read(const char* path, exk_stats** out);
EXK_API exk_status exk_stats_write(const exk_stats* stats, const char* path);
EXK_API void exk_stats_free(exk_stats* stats);

/* ---- training ---------------------------------------------------------- */

/* mode: "sd" or "si"; target_speaker may be NULL for "si". Writes the
 * checkpoint to out_ckpt_path and, when nll_log_path is non-NULL, a
 * step,train_nll,dev_nll CSV. */
EXK_API exk_status exk_train(const char* manifest_path, const exk_config* cfg, const char* mode,
                             const char* target_speaker, uint64_t seed, const char* out_ckpt_path,
                             const char* nll_log_path);

/* Speaker-adaptive fine-tuning from an SI checkpoint. */
EXK_API exk_status exk_adapt(const char* si_ckpt_path, const char* manifest_path,
                             const exk_config* cfg, const char* target_speaker, uint64_t seed,
                             const char* out_ckpt_path, const char* nll_log_path);

EXK_API exk_status exk_checkpoint_open(const char* path, exk_checkpoint** out);
/* "wavenet" or "excitnet"; pointer valid while the checkpoint lives. */
EXK_API const char* exk_checkpoint_kind(const exk_checkpoint* ckpt);
EXK_API const char* exk_checkpoint_digest(const exk_checkpoint* ckpt);
EXK_API int64_t exk_checkpoint_step(const exk_checkpoint* ckpt);
EXK_API void exk_checkpoint_free(exk_checkpoint* ckpt);

/* Teacher-forced NLL (nats/sample) of a split: "train", "dev" or "test";
 * speaker may be NULL for all speakers. */
EXK_API exk_status exk_eval_nll(const exk_checkpoint* ckpt, const char* manifest_path,
                                const char* split, const char* speaker, double* out_nll);

/* ---- synthesis --------------------------------------------------------- */

/* mode: "random" or "greedy". The checkpoint's vocoder kind decides the
 * pipeline; pass expected_kind (may be NULL) to assert it. */
EXK_API exk_status exk_synthesize(const exk_checkpoint* ckpt, const exk_features* f,
                                  const char* mode, uint64_t seed, const char* expected_kind,
                                  exk_waveform** out);

/* Codec (+ LP filter) round trip without any neural model. kind: "wavenet"
 * or "excitnet". */
EXK_API exk_status exk_copy_synthesis(const exk_waveform* w, const char* kind,
                                      const exk_config* cfg, exk_waveform** out);

/* ---- objective evaluation ---------------------------------------------- */

EXK_API exk_status exk_lsd(const exk_waveform* reference, const exk_waveform* test, double* out_db);
EXK_API exk_status exk_f0_rmse(const exk_features* reference, const exk_features* test,
                               double* out_hz);

/* Comparison grid over the manifest's test split. Systems map labels to a
 * checkpoint path or "copy:wavenet" / "copy:excitnet". perturb_sigma > 0
 * runs the SPSS-emulation condition. Writes a CSV
 * (speaker,system,utterance,lsd_db,f0_rmse_hz). */
EXK_API exk_status exk_eval_compare(const char* manifest_path, const exk_config* cfg,
                                    const char* const* labels, const char* const* targets,
                                    size_t n_systems, double perturb_sigma, uint64_t seed,
                                    const char* out_csv_path);

/* F0-modification grid (speaker,system,factor,f0_rmse_hz). */
EXK_API exk_status exk_eval_f0mod(const char* manifest_path, const exk_config* cfg,
                                  const char* const* labels, const char* const* targets,
                                  size_t n_systems, const double* factors, size_t n_factors,
                                  uint64_t seed, const char* out_csv_path);

#ifdef __cplusplus
}
#endif

#endif /* EXKNET_H */
