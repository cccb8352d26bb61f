#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <random>

#include "dsp/fft.hpp"
#include "dsp/framing.hpp"
#include "dsp/lpc.hpp"
#include "dsp/mulaw.hpp"
#include "support/toy_corpus.hpp"
#include "util/error.hpp"
#include "util/random.hpp"

using namespace exknet;
using namespace exknet::dsp;

TEST_CASE("mulaw compress fixed points and direct evaluation") {
  CHECK(mulaw_compress(0.0) == 0.0);
  CHECK(mulaw_compress(1.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(mulaw_compress(-1.0) == doctest::Approx(-1.0).epsilon(1e-15));
  // 0.1 -> ln(1 + 255*0.1)/ln(256) = ln(26.5)/ln(256) = 0.5909906...
  const double expected = std::log(26.5) / std::log(256.0);
  CHECK(mulaw_compress(0.1) == doctest::Approx(expected).epsilon(1e-14));
  CHECK(mulaw_compress(0.1) == doctest::Approx(0.59099).epsilon(1e-4));
  CHECK_THROWS_AS(mulaw_compress(1.0001), Error);
  CHECK_THROWS_AS(mulaw_expand(-1.5), Error);
}

TEST_CASE("mulaw round trip, oddness and monotonicity on a 1e5 grid") {
  const int n = 100000;
  double prev = -2.0;
  for (int i = 0; i <= n; ++i) {
    const double x = -1.0 + 2.0 * i / n;
    const double y = mulaw_compress(x);
    CHECK(std::fabs(mulaw_expand(y) - x) < 1e-9);
    CHECK(std::fabs(mulaw_compress(-x) + y) < 1e-15);  // odd
    CHECK(y > prev);                                   // strictly monotone
    prev = y;
  }
}

TEST_CASE("256-way quantizer bins and idempotence") {
  CHECK(quantize_256(-1.0) == 0);
  CHECK(quantize_256(1.0) == 255);
  CHECK(quantize_256(0.0) == 128);
  for (int c = 0; c < 256; ++c) {
    CHECK(quantize_256(dequantize_256(static_cast<std::uint8_t>(c))) == c);
  }
  // codec error bound in the companded domain
  std::mt19937_64 rng(7);
  for (int i = 0; i < 1000; ++i) {
    const double y = uniform(rng, -1.0, 1.0);
    CHECK(std::fabs(dequantize_256(quantize_256(y)) - y) <= 1.0 / 256.0);
  }
}

TEST_CASE("frame counts") {
  FrameSpec spec;  // 480 / 120
  CHECK(frame_count(480, spec) == 1);
  CHECK(frame_count(720, spec) == 3);
  CHECK(frame_count(24000, spec) == 197);
  CHECK(frame_count(100, spec) == 1);  // zero-padded tail frame
  CHECK(frame_count(0, spec) == 0);

  Waveform w;
  w.samples.assign(720, 1.0);
  spec.window = WindowKind::Rectangular;
  const auto frames = frame_signal(w, spec);
  REQUIRE(frames.size() == 3);
  CHECK(frames[2][479] == 1.0);

  // tail zero padding
  Waveform small;
  small.samples.assign(100, 1.0);
  const auto padded = frame_signal(small, spec);
  REQUIRE(padded.size() == 1);
  CHECK(padded[0][99] == 1.0);
  CHECK(padded[0][100] == 0.0);
}

TEST_CASE("autocorrelation basics") {
  CHECK(autocorrelation({0, 0, 0}, 2) == std::vector<double>{0, 0, 0});
  CHECK(autocorrelation({1, 0, 0}, 2) == std::vector<double>{1, 0, 0});
  CHECK(autocorrelation({1, 1}, 1) == std::vector<double>{2, 1});
  CHECK_THROWS_AS(autocorrelation({1, 1}, 2), Error);
}

TEST_CASE("levinson-durbin on known systems") {
  const auto one = levinson_durbin({1.0, 0.5}, 1);
  CHECK(one.a[0] == doctest::Approx(0.5).epsilon(1e-8));
  CHECK(one.prediction_error_power == doctest::Approx(0.75).epsilon(1e-6));

  const auto two = levinson_durbin({1.0, 0.5, 0.25}, 2);
  CHECK(two.a[0] == doctest::Approx(0.5).epsilon(1e-8));
  CHECK(two.a[1] == doctest::Approx(0.0).epsilon(1e-8));
  CHECK(two.prediction_error_power == doctest::Approx(0.75).epsilon(1e-6));

  const auto white = levinson_durbin({1.0, 0.0, 0.0, 0.0, 0.0}, 4);
  for (double a : white.a) CHECK(std::fabs(a) < 1e-8);
  CHECK(white.prediction_error_power == doctest::Approx(1.0).epsilon(1e-6));
}

// Independent oracle: dense Toeplitz solve with full-pivot LU.
static std::vector<double> dense_lpc(const std::vector<double>& r, int p) {
  Eigen::MatrixXd R(p, p);
  Eigen::VectorXd rhs(p);
  for (int i = 0; i < p; ++i) {
    rhs(i) = r[i + 1];
    for (int j = 0; j < p; ++j) R(i, j) = r[std::abs(i - j)];
  }
  const Eigen::VectorXd a = R.fullPivLu().solve(rhs);
  return {a.data(), a.data() + p};
}

TEST_CASE("levinson-durbin matches a dense Toeplitz solve (orders up to 40)") {
  std::mt19937_64 rng(1234);
  for (int trial = 0; trial < 100; ++trial) {
    const int order = 1 + static_cast<int>(rng() % 40);
    const int n = 512;
    // random signal through a light smoother: positive definite autocorrelation
    std::vector<double> x(n);
    GaussianSampler gauss;
    double state = 0.0;
    for (int i = 0; i < n; ++i) {
      state = 0.6 * state + gauss(rng);
      x[i] = state;
    }
    std::vector<double> r = autocorrelation(x, order);
    r[0] *= 1.0 + 1e-6;  // ridge for the dense solve too

    const auto fast = levinson_durbin(r, order);
    const auto slow = dense_lpc(r, order);
    for (int k = 0; k < order; ++k) {
      CHECK(fast.a[k] == doctest::Approx(slow[k]).epsilon(1e-8));
    }
  }
}

TEST_CASE("lp analysis: identity and impulse") {
  FrameSpec spec;
  Waveform w;
  w.samples.assign(480, 0.0);
  w.samples[0] = 1.0;

  LpcCoefficients zero;
  zero.order = 4;
  zero.a.assign(4, 0.0);
  const Waveform e0 = lp_analysis_filter(w, {zero}, spec);
  CHECK(e0.samples == w.samples);  // bit-exact identity

  LpcCoefficients ar1;
  ar1.order = 1;
  ar1.a = {0.9};
  const Waveform e1 = lp_analysis_filter(w, {ar1}, spec);
  CHECK(e1.samples[0] == doctest::Approx(1.0));
  CHECK(e1.samples[1] == doctest::Approx(-0.9));
  for (std::size_t i = 2; i < e1.samples.size(); ++i) CHECK(e1.samples[i] == 0.0);
}

TEST_CASE("lp synthesis: geometric impulse response and inverse") {
  FrameSpec spec;
  Waveform e;
  e.samples.assign(480, 0.0);
  e.samples[0] = 1.0;

  LpcCoefficients ar1;
  ar1.order = 1;
  ar1.a = {0.9};
  const Waveform x = lp_synthesis_filter(e, {ar1}, spec);
  for (int i = 0; i < 20; ++i) {
    CHECK(x.samples[i] == doctest::Approx(std::pow(0.9, i)).epsilon(1e-12));
  }

  LpcCoefficients unstable;
  unstable.order = 1;
  unstable.a = {1.1};
  CHECK_THROWS_AS(lp_synthesis_filter(e, {unstable}, spec), Error);
}

TEST_CASE("lp analysis -> synthesis is identity on 10 s of speech-like signal") {
  const auto spk = testsupport::toy_target_speaker();
  testsupport::ToyUtteranceOptions opt;
  opt.duration_s = 10.0;
  const Waveform w = testsupport::toy_utterance(spk, 24000, 42, opt);

  FrameSpec spec;
  const std::size_t frames = frame_count(w.samples.size(), spec);
  const auto hann = make_window(WindowKind::Hann, spec.frame_len);

  std::vector<LpcCoefficients> lpcs;
  for (std::size_t i = 0; i < frames; ++i) {
    std::vector<double> frame = extract_frame(w.samples, i * spec.hop, spec.frame_len);
    for (int k = 0; k < spec.frame_len; ++k) frame[k] *= hann[k];
    lpcs.push_back(levinson_durbin(autocorrelation(frame, 40), 40));
  }

  const Waveform e = lp_analysis_filter(w, lpcs, spec);
  const Waveform back = lp_synthesis_filter(e, lpcs, spec);
  double max_err = 0.0;
  for (std::size_t i = 0; i < w.samples.size(); ++i) {
    max_err = std::max(max_err, std::fabs(back.samples[i] - w.samples[i]));
  }
  CHECK(max_err < 1e-6);
}

// Naive DFT oracle.
static std::vector<std::complex<double>> naive_dft(const std::vector<std::complex<double>>& x) {
  const std::size_t n = x.size();
  std::vector<std::complex<double>> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    std::complex<double> acc = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
      acc += x[t] * std::polar(1.0, -2.0 * M_PI * double(k * t) / double(n));
    }
    out[k] = acc;
  }
  return out;
}

TEST_CASE("fft matches the naive DFT") {
  std::mt19937_64 rng(5);
  std::vector<std::complex<double>> x(128);
  for (auto& v : x) v = {uniform(rng, -1.0, 1.0), uniform(rng, -1.0, 1.0)};
  auto got = x;
  fft(got);
  const auto want = naive_dft(x);
  for (std::size_t k = 0; k < x.size(); ++k) {
    CHECK(std::abs(got[k] - want[k]) < 1e-9);
  }

  // inverse round trip
  fft(got, true);
  for (std::size_t k = 0; k < x.size(); ++k) CHECK(std::abs(got[k] - x[k]) < 1e-12);

  std::vector<std::complex<double>> bad(3);
  CHECK_THROWS_AS(fft(bad), Error);
}
