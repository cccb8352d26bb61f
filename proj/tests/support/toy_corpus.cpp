#include "support/toy_corpus.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <random>

#include "io/wav.hpp"
#include "util/random.hpp"

namespace exknet::testsupport {

namespace {

struct Formant {
  double freq_hz;
  double bw_hz;
};

struct Biquad {
  double b0 = 1.0, a1 = 0.0, a2 = 0.0;
  double z1 = 0.0, z2 = 0.0;

  void tune(const Formant& f, int fs) {
    const double r = std::exp(-M_PI * f.bw_hz / fs);
    const double theta = 2.0 * M_PI * f.freq_hz / fs;
    a1 = -2.0 * r * std::cos(theta);
    a2 = r * r;
    b0 = (1.0 - r);  // rough unity gain at resonance
  }

  double run(double x) {
    const double y = b0 * x - a1 * z1 - a2 * z2;
    z2 = z1;
    z1 = y;
    return y;
  }
};

// Three-formant vowel inventory per speaker, drawn once from the timbre seed.
std::vector<std::array<Formant, 3>> make_vowels(std::uint64_t timbre_seed) {
  std::mt19937_64 rng(splitmix64(timbre_seed));
  std::vector<std::array<Formant, 3>> vowels;
  for (int v = 0; v < 3; ++v) {
    std::array<Formant, 3> f;
    f[0] = {uniform(rng, 350.0, 850.0), uniform(rng, 60.0, 110.0)};
    f[1] = {uniform(rng, 1000.0, 2200.0), uniform(rng, 90.0, 160.0)};
    f[2] = {uniform(rng, 2400.0, 3400.0), uniform(rng, 140.0, 220.0)};
    vowels.push_back(f);
  }
  return vowels;
}

enum class SegKind { Vowel, Fricative, Pause };

}  // namespace

dsp::Waveform toy_utterance(const ToySpeaker& speaker, int sample_rate_hz, std::uint64_t seed,
                            const ToyUtteranceOptions& opt) {
  const int fs = sample_rate_hz;
  const std::size_t total = static_cast<std::size_t>(std::llround(opt.duration_s * fs));
  std::mt19937_64 rng(combine_seed(seed, fnv1a64(speaker.id)));
  GaussianSampler gauss;

  const auto vowels = make_vowels(speaker.timbre_seed);

  dsp::Waveform w;
  w.sample_rate_hz = fs;
  w.samples.assign(total, 0.0);

  std::array<Biquad, 3> cascade;
  double lp1 = 0.0, lp2 = 0.0;      // glottal spectral tilt
  double fric_x1 = 0.0;             // fricative highpass state
  double hp_x1 = 0.0, hp_y1 = 0.0;  // DC blocker
  double f0_drift = 0.0;
  double next_pulse = 0.0;

  std::size_t n = 0;
  int vowel = static_cast<int>(rng() % vowels.size());
  while (n < total) {
    SegKind kind = SegKind::Vowel;
    double seg_s = uniform(rng, 0.25, 0.45);
    if (!opt.continuous_voicing) {
      const double roll = uniform01(rng);
      if (roll < 0.18) {
        kind = SegKind::Fricative;
        seg_s = uniform(rng, 0.08, 0.16);
      } else if (roll < 0.32) {
        kind = SegKind::Pause;
        seg_s = uniform(rng, 0.06, 0.15);
      }
    }
    const std::size_t seg_len = std::min(
        total - n, static_cast<std::size_t>(std::llround(seg_s * fs)) + 1);

    const int next_vowel = static_cast<int>(rng() % vowels.size());
    const std::size_t transition = std::min<std::size_t>(seg_len, std::size_t(fs) * 6 / 100);

    for (std::size_t i = 0; i < seg_len; ++i, ++n) {
      // Per-block (5 ms) coefficient updates keep this cheap.
      if (i % 120 == 0) {
        for (int k = 0; k < 3; ++k) {
          Formant f;
          const Formant& from = vowels[vowel][k];
          const Formant& to = vowels[next_vowel][k];
          f.freq_hz = from.freq_hz;
          f.bw_hz = from.bw_hz;
          if (kind == SegKind::Vowel && i + transition >= seg_len) {
            // ease toward the next vowel over the segment tail
            const double tail_mix = 1.0 - double(seg_len - i) / double(transition + 1);
            f.freq_hz = from.freq_hz + tail_mix * (to.freq_hz - from.freq_hz);
            f.bw_hz = from.bw_hz + tail_mix * (to.bw_hz - from.bw_hz);
          }
          cascade[k].tune(f, fs);
        }
      }

      double voiced_src = 1e-5 * gauss(rng);  // tiny analysis-friendly noise floor
      double fric_out = 0.0;
      if (kind == SegKind::Vowel) {
        if (i % 120 == 0) f0_drift = std::clamp(f0_drift + 0.01 * gauss(rng), -0.12, 0.12);
        const double vibrato = 0.02 * std::sin(2.0 * M_PI * 5.3 * double(n) / fs);
        const double f0 = speaker.f0_base_hz * (1.0 + f0_drift + vibrato);
        if (double(n) >= next_pulse) {
          voiced_src += 1.0;
          next_pulse = double(n) + double(fs) / f0;
        }
      } else if (kind == SegKind::Fricative) {
        // Broadband, outside the formant cascade: noise through a high-Q
        // resonator manufactures quasi-periodic frames no aperiodicity
        // detector can reject.
        const double noise = gauss(rng);
        fric_out = 0.004 * (noise - fric_x1);
        fric_x1 = noise;
      }

      // Glottal tilt: two one-pole lowpasses on the voiced source. The
      // cascade always runs so its state decays smoothly through pauses.
      lp1 = 0.3 * voiced_src + 0.7 * lp1;
      lp2 = 0.3 * lp1 + 0.7 * lp2;
      double x = lp2;
      for (Biquad& bq : cascade) x = bq.run(x);
      x += fric_out;

      // Segment attack/release so pauses do not click.
      double env = 1.0;
      const std::size_t ramp = std::size_t(fs) / 200;  // 5 ms
      if (kind == SegKind::Pause) {
        env = 0.0;
      } else {
        if (i < ramp) env = double(i) / ramp;
        if (seg_len - i <= ramp) env = std::min(env, double(seg_len - i) / ramp);
      }

      // DC blocker: y[n] = x[n] - x[n-1] + 0.995 y[n-1].
      const double dc_in = x * env + 1e-6 * gauss(rng);
      const double y = dc_in - hp_x1 + 0.995 * hp_y1;
      hp_x1 = dc_in;
      hp_y1 = y;
      w.samples[n] = y;
    }
    vowel = next_vowel;
  }

  double peak = 1e-12;
  for (double v : w.samples) peak = std::max(peak, std::fabs(v));
  const double g = opt.peak / peak;
  for (double& v : w.samples) v *= g;
  return w;
}

std::vector<ToySpeaker> toy_si_speakers() {
  return {{"spk1", 115.0, 11}, {"spk2", 145.0, 22}, {"spk3", 185.0, 33}, {"spk4", 235.0, 44}};
}

ToySpeaker toy_target_speaker() { return {"target", 165.0, 99}; }

std::string make_toy_corpus(const std::string& dir, std::uint64_t seed,
                            const ToyCorpusLayout& layout) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);

  training::CorpusManifest manifest;
  std::uint64_t counter = 0;

  auto add = [&](const ToySpeaker& spk, training::Split split, double seconds, double utt_seconds,
                 bool continuous) {
    int index = 0;
    for (double remaining = seconds; remaining > 1e-9; remaining -= utt_seconds, ++index) {
      ToyUtteranceOptions opt;
      opt.duration_s = std::min(utt_seconds, remaining);
      opt.continuous_voicing = continuous;
      const std::string id =
          spk.id + "_" + training::split_name(split) + "_" + std::to_string(index);
      const dsp::Waveform w =
          toy_utterance(spk, layout.sample_rate_hz, combine_seed(seed, counter++), opt);
      const std::string path = (fs::path(dir) / (id + ".wav")).string();
      io::write_wav(w, path);
      manifest.entries.push_back({id, id + ".wav", spk.id, split});
    }
  };

  for (const ToySpeaker& spk : toy_si_speakers()) {
    add(spk, training::Split::Train, layout.si_train_seconds_per_speaker, layout.utterance_seconds,
        false);
    add(spk, training::Split::Dev, layout.si_dev_seconds_per_speaker, layout.utterance_seconds,
        false);
  }
  const ToySpeaker target = toy_target_speaker();
  add(target, training::Split::Train, layout.target_train_seconds, layout.utterance_seconds, false);
  add(target, training::Split::Dev, layout.target_dev_seconds, layout.utterance_seconds / 2, false);
  add(target, training::Split::Test, layout.target_test_seconds, layout.test_utterance_seconds,
      false);

  const std::string manifest_path = (fs::path(dir) / "manifest.json").string();
  training::save_manifest(manifest, manifest_path);
  return manifest_path;
}

}  // namespace exknet::testsupport
