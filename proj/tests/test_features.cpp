#include <doctest.h>

#include <cmath>
#include <random>

#include "features/features.hpp"
#include "support/toy_corpus.hpp"
#include "util/error.hpp"
#include "util/random.hpp"

using namespace exknet;
using namespace exknet::feat;

namespace {

double db_to_log_gain(double db) { return db / 20.0 * std::log(10.0); }

dsp::Waveform sine(double freq, double seconds, int rate, double amp = 0.5) {
  dsp::Waveform w;
  w.sample_rate_hz = rate;
  const std::size_t n = static_cast<std::size_t>(seconds * rate);
  w.samples.resize(n);
  for (std::size_t i = 0; i < n; ++i) w.samples[i] = amp * std::sin(2.0 * M_PI * freq * i / rate);
  return w;
}

dsp::Waveform sawtooth(double freq, double seconds, int rate, double amp = 0.5) {
  dsp::Waveform w;
  w.sample_rate_hz = rate;
  const std::size_t n = static_cast<std::size_t>(seconds * rate);
  w.samples.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double phase = std::fmod(freq * i / rate, 1.0);
    w.samples[i] = amp * (2.0 * phase - 1.0);
  }
  return w;
}

}  // namespace

TEST_CASE("f0 estimation on a 100 Hz sine") {
  const dsp::Waveform w = sine(100.0, 0.02, 24000);
  const F0Estimate est = estimate_f0(w.samples, 24000);
  CHECK(est.f0_hz > 99.0);
  CHECK(est.f0_hz < 101.0);
  CHECK(est.periodicity > 0.8);
}

TEST_CASE("f0 estimation degenerate inputs") {
  std::vector<double> zeros(480, 0.0);
  const F0Estimate est = estimate_f0(zeros, 24000);
  CHECK(est.f0_hz == 0.0);
  CHECK(est.periodicity == 0.0);
}

TEST_CASE("seeded white noise is aperiodic") {
  std::mt19937_64 rng(2024);
  GaussianSampler gauss;
  std::vector<double> noise(960);
  for (double& v : noise) v = 0.3 * gauss(rng);
  const F0Estimate est = estimate_f0(noise, 24000);
  CHECK(est.periodicity < 0.3);
  CHECK_FALSE(detect_voicing(est.periodicity, db_to_log_gain(-10.0)));
}

TEST_CASE("voicing gates") {
  CHECK(detect_voicing(0.9, db_to_log_gain(-10.0)));
  CHECK_FALSE(detect_voicing(0.1, db_to_log_gain(-10.0)));
  CHECK_FALSE(detect_voicing(0.9, db_to_log_gain(-70.0)));  // silence gate dominates
}

TEST_CASE("extract_features frame count and determinism") {
  const auto spk = testsupport::toy_target_speaker();
  testsupport::ToyUtteranceOptions topt;
  topt.duration_s = 1.0;
  const dsp::Waveform w = testsupport::toy_utterance(spk, 24000, 3, topt);
  REQUIRE(w.samples.size() == 24000);

  ExtractOptions opt;
  const FeatureTrack a = extract_features(w, opt, "spk");
  CHECK(a.size() == 197);
  CHECK(a.dim() == 43);

  const FeatureTrack b = extract_features(w, opt, "spk");
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a.row(i) == b.row(i));  // bitwise deterministic
  }
}

TEST_CASE("sawtooth is voiced at the generator frequency") {
  const dsp::Waveform w = sawtooth(100.0, 1.0, 24000);
  ExtractOptions opt;
  const FeatureTrack t = extract_features(w, opt);
  std::size_t voiced = 0;
  for (std::size_t i = 4; i + 4 < t.size(); ++i) {
    const AcousticFrame& f = t.frames[i];
    if (f.voiced) {
      ++voiced;
      CHECK(f.f0_hz == doctest::Approx(100.0).epsilon(0.02));
    }
  }
  CHECK(voiced > t.size() - 12);
}

TEST_CASE("silence extracts as unvoiced with floor gain") {
  dsp::Waveform w;
  w.sample_rate_hz = 24000;
  w.samples.assign(24000, 0.0);
  ExtractOptions opt;
  const FeatureTrack t = extract_features(w, opt);
  for (const AcousticFrame& f : t.frames) {
    CHECK_FALSE(f.voiced);
    CHECK(f.f0_hz == 0.0);
    CHECK(f.gain == doctest::Approx(std::log(1e-9)).epsilon(1e-9));
  }
}

TEST_CASE("vuv implies f0 consistency on extracted tracks") {
  const auto spk = testsupport::toy_si_speakers()[1];
  const dsp::Waveform w = testsupport::toy_utterance(spk, 24000, 17, {});
  const FeatureTrack t = extract_features(w, {});
  for (const AcousticFrame& f : t.frames) {
    if (f.voiced) {
      CHECK(f.f0_hz >= 50.0);
      CHECK(f.f0_hz <= 500.0);
    } else {
      CHECK(f.f0_hz == 0.0);
    }
    for (std::size_t d = 1; d < f.lsf.size(); ++d) CHECK(f.lsf[d] > f.lsf[d - 1]);
  }
}

TEST_CASE("normalization stats: z-scored continuous dims, vuv exempt") {
  const auto spk = testsupport::toy_target_speaker();
  const dsp::Waveform w = testsupport::toy_utterance(spk, 24000, 5, {});
  const FeatureTrack t = extract_features(w, {});

  std::vector<const FeatureTrack*> one{&t};
  const NormalizationStats stats = compute_norm_stats(one);
  REQUIRE(stats.dim() == 43);
  CHECK(stats.mean[42] == 0.0);
  CHECK(stats.std[42] == 1.0);

  const FeatureTrack n = normalize_track(t, stats);
  const int dim = t.dim();
  for (int d = 0; d < dim - 1; ++d) {  // continuous dims only
    double mean = 0.0, var = 0.0;
    for (std::size_t i = 0; i < n.size(); ++i) mean += n.row(i)[d];
    mean /= static_cast<double>(n.size());
    for (std::size_t i = 0; i < n.size(); ++i) {
      const double v = n.row(i)[d] - mean;
      var += v * v;
    }
    var /= static_cast<double>(n.size());
    CHECK(std::fabs(mean) < 1e-6);
    if (stats.std[d] > 1e-5) CHECK(var == doctest::Approx(1.0).epsilon(1e-3));
  }

  // vuv dimension passes through untouched
  for (std::size_t i = 0; i < n.size(); ++i) {
    CHECK(n.row(i)[42] == t.row(i)[42]);
  }

  // two identical tracks give the same stats as one
  std::vector<const FeatureTrack*> two{&t, &t};
  const NormalizationStats stats2 = compute_norm_stats(two);
  for (int d = 0; d < dim; ++d) {
    CHECK(stats2.mean[d] == doctest::Approx(stats.mean[d]).epsilon(1e-12));
    CHECK(stats2.std[d] == doctest::Approx(stats.std[d]).epsilon(1e-12));
  }
}

TEST_CASE("constant dimension hits the std floor") {
  FeatureTrack t;
  t.frames.resize(10);
  for (auto& f : t.frames) {
    f.lsf = {0.5, 1.0};
    f.f0_hz = 0.0;
    f.gain = -2.0;
    f.voiced = false;
  }
  std::vector<const FeatureTrack*> one{&t};
  const NormalizationStats stats = compute_norm_stats(one);
  CHECK(stats.std[0] == 1e-6);
  const FeatureTrack n = normalize_track(t, stats);
  CHECK(n.frames[0].lsf[0] == 0.0);
}

TEST_CASE("normalize/denormalize round trip") {
  const auto spk = testsupport::toy_si_speakers()[0];
  const dsp::Waveform w = testsupport::toy_utterance(spk, 24000, 9, {});
  const FeatureTrack t = extract_features(w, {});
  std::vector<const FeatureTrack*> one{&t};
  const NormalizationStats stats = compute_norm_stats(one);

  const FeatureTrack back = denormalize_track(normalize_track(t, stats), stats);
  for (std::size_t i = 0; i < t.size(); ++i) {
    const auto a = t.row(i), b = back.row(i);
    for (std::size_t d = 0; d < a.size(); ++d) CHECK(std::fabs(a[d] - b[d]) < 1e-9);
  }
}

TEST_CASE("upsample duplicates each frame hop times") {
  FeatureTrack t;
  t.spec.hop = 120;
  t.frames.resize(3);
  for (std::size_t i = 0; i < 3; ++i) {
    t.frames[i].lsf = {0.1 * (i + 1), 0.2 * (i + 1)};
    t.frames[i].f0_hz = 100.0 * i;
    t.frames[i].gain = -1.0 * i;
    t.frames[i].voiced = i > 0;
  }
  const Eigen::MatrixXd m = upsample_features(t);
  REQUIRE(m.cols() == 360);
  REQUIRE(m.rows() == 5);
  for (int col = 0; col < 360; ++col) {
    const auto expect = t.row(col / 120);
    for (int d = 0; d < 5; ++d) CHECK(m(d, col) == expect[d]);
  }
}

TEST_CASE("scale_f0 semantics") {
  const auto spk = testsupport::toy_target_speaker();
  const dsp::Waveform w = testsupport::toy_utterance(spk, 24000, 11, {});
  const FeatureTrack t = extract_features(w, {});

  const FeatureTrack same = scale_f0(t, 1.0);
  for (std::size_t i = 0; i < t.size(); ++i) CHECK(same.row(i) == t.row(i));

  FeatureTrack manual = t;
  manual.frames[0].voiced = true;
  manual.frames[0].f0_hz = 200.0;
  manual.frames[1].voiced = false;
  manual.frames[1].f0_hz = 0.0;
  const FeatureTrack scaled = scale_f0(manual, 0.6);
  CHECK(scaled.frames[0].f0_hz == doctest::Approx(120.0));
  CHECK(scaled.frames[1].f0_hz == 0.0);

  // composition on voiced frames
  const FeatureTrack ab = scale_f0(scale_f0(t, 0.8), 1.2);
  const FeatureTrack prod = scale_f0(t, 0.8 * 1.2);
  for (std::size_t i = 0; i < t.size(); ++i) {
    CHECK(std::fabs(ab.frames[i].f0_hz - prod.frames[i].f0_hz) < 1e-9);
  }

  CHECK_THROWS_AS(scale_f0(t, 0.0), Error);
  CHECK_THROWS_AS(scale_f0(t, -1.0), Error);
}

TEST_CASE("interpolate_unvoiced_f0 bridges gaps") {
  FeatureTrack t;
  t.frames.resize(5);
  for (auto& f : t.frames) f.lsf = {1.0};
  t.frames[0].voiced = false;
  t.frames[1].voiced = true;
  t.frames[1].f0_hz = 100.0;
  t.frames[2].voiced = false;
  t.frames[3].voiced = true;
  t.frames[3].f0_hz = 200.0;
  t.frames[4].voiced = false;

  const FeatureTrack out = interpolate_unvoiced_f0(t);
  CHECK(out.frames[0].f0_hz == 100.0);  // leading edge takes nearest
  CHECK(out.frames[2].f0_hz == doctest::Approx(150.0));
  CHECK(out.frames[4].f0_hz == 200.0);
  CHECK_FALSE(out.frames[0].voiced);  // flags keep the truth
}

TEST_CASE("perturb_features: identity, determinism and invariants") {
  const auto spk = testsupport::toy_target_speaker();
  const dsp::Waveform w = testsupport::toy_utterance(spk, 24000, 13, {});
  const FeatureTrack t = extract_features(w, {});
  std::vector<const FeatureTrack*> one{&t};
  const NormalizationStats stats = compute_norm_stats(one);

  const FeatureTrack same = perturb_features(t, 0.0, 7, stats);
  for (std::size_t i = 0; i < t.size(); ++i) CHECK(same.row(i) == t.row(i));

  const FeatureTrack p1 = perturb_features(t, 0.1, 7, stats);
  const FeatureTrack p2 = perturb_features(t, 0.1, 7, stats);
  bool changed = false;
  for (std::size_t i = 0; i < t.size(); ++i) {
    CHECK(p1.row(i) == p2.row(i));  // same seed, same output
    if (p1.row(i) != t.row(i)) changed = true;
    const AcousticFrame& f = p1.frames[i];
    for (std::size_t d = 1; d < f.lsf.size(); ++d) CHECK(f.lsf[d] > f.lsf[d - 1]);
    CHECK(f.lsf.front() > 0.0);
    CHECK(f.lsf.back() < M_PI);
    CHECK(f.voiced == t.frames[i].voiced);
    if (!f.voiced) CHECK(f.f0_hz == 0.0);
  }
  CHECK(changed);

  const FeatureTrack p3 = perturb_features(t, 0.1, 8, stats);
  bool differs = false;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (p1.row(i) != p3.row(i)) differs = true;
  }
  CHECK(differs);
}
