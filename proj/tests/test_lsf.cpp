#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "dsp/lpc.hpp"
#include "dsp/lsf.hpp"
#include "util/error.hpp"
#include "util/random.hpp"

using namespace exknet;
using namespace exknet::dsp;

namespace {

// Step-up recursion: reflection coefficients -> predictor. Any |k| < 1 set
// yields a minimum-phase filter, which makes it a handy generator of valid
// random inputs.
LpcCoefficients from_reflection(const std::vector<double>& ks) {
  LpcCoefficients lpc;
  lpc.order = static_cast<int>(ks.size());
  std::vector<double> a;
  for (double k : ks) {
    std::vector<double> next(a.size() + 1);
    for (std::size_t i = 0; i < a.size(); ++i) next[i] = a[i] - k * a[a.size() - 1 - i];
    next[a.size()] = k;
    a = std::move(next);
  }
  lpc.a = a;
  lpc.prediction_error_power = 1.0;
  return lpc;
}

// Brute-force oracle: evaluate the (undeflated) sum/difference polynomials
// on the unit circle with direct complex arithmetic, scan 1e4 grid points,
// bisect sign changes. Completely independent of the Chebyshev machinery.
std::vector<double> lsf_oracle(const LpcCoefficients& lpc) {
  const int p = lpc.order;
  std::vector<double> c(p + 2, 0.0);
  c[0] = 1.0;
  for (int k = 1; k <= p; ++k) c[k] = -lpc.a[k - 1];

  std::vector<double> sum(p + 2), diff(p + 2);
  for (int j = 0; j <= p + 1; ++j) {
    sum[j] = c[j] + c[p + 1 - j];
    diff[j] = c[j] - c[p + 1 - j];
  }

  const double half = 0.5 * (p + 1);
  auto real_part = [&](const std::vector<double>& poly, double w) {
    std::complex<double> acc = 0.0;
    for (int j = 0; j <= p + 1; ++j) acc += poly[j] * std::polar(1.0, (half - j) * w);
    return acc.real();
  };
  auto imag_part = [&](const std::vector<double>& poly, double w) {
    std::complex<double> acc = 0.0;
    for (int j = 0; j <= p + 1; ++j) acc += poly[j] * std::polar(1.0, (half - j) * w);
    return acc.imag();
  };

  auto find_roots = [&](auto&& f, const std::vector<double>& poly) {
    std::vector<double> roots;
    const int grid = 10000;
    const double eps = 1e-6;
    double prev_w = eps;
    double prev_v = f(poly, prev_w);
    for (int i = 1; i <= grid; ++i) {
      const double w = eps + (M_PI - 2 * eps) * i / grid;
      const double v = f(poly, w);
      if (prev_v * v < 0.0) {
        double lo = prev_w, hi = w, flo = prev_v;
        for (int it = 0; it < 100; ++it) {
          const double mid = 0.5 * (lo + hi);
          const double fm = f(poly, mid);
          if (flo * fm <= 0.0) {
            hi = mid;
          } else {
            lo = mid;
            flo = fm;
          }
        }
        roots.push_back(0.5 * (lo + hi));
      }
      prev_w = w;
      prev_v = v;
    }
    return roots;
  };

  // palindromic sum -> real part vanishes; antipalindromic diff -> imaginary
  std::vector<double> roots = find_roots(real_part, sum);
  const std::vector<double> qroots = find_roots(imag_part, diff);
  roots.insert(roots.end(), qroots.begin(), qroots.end());
  std::sort(roots.begin(), roots.end());
  return roots;
}

}  // namespace

TEST_CASE("flat predictor has analytic LSFs at pi/3 and 2pi/3") {
  LpcCoefficients lpc;
  lpc.order = 2;
  lpc.a = {0.0, 0.0};
  const LsfVector lsf = lpc_to_lsf(lpc);
  REQUIRE(lsf.freqs.size() == 2);
  CHECK(lsf.freqs[0] == doctest::Approx(M_PI / 3).epsilon(1e-10));
  CHECK(lsf.freqs[1] == doctest::Approx(2 * M_PI / 3).epsilon(1e-10));
}

TEST_CASE("order-1 predictor matches the brute-force root oracle") {
  LpcCoefficients lpc;
  lpc.order = 1;
  lpc.a = {0.5};
  const LsfVector lsf = lpc_to_lsf(lpc);
  const std::vector<double> oracle = lsf_oracle(lpc);
  REQUIRE(lsf.freqs.size() == 1);
  REQUIRE(oracle.size() == 1);
  CHECK(lsf.freqs[0] == doctest::Approx(oracle[0]).epsilon(1e-9));
}

TEST_CASE("random stable filters match the oracle (several orders)") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 12; ++trial) {
    const int order = 1 + static_cast<int>(rng() % 12);
    std::vector<double> ks(order);
    for (double& k : ks) k = uniform(rng, -0.8, 0.8);
    const LpcCoefficients lpc = from_reflection(ks);

    const LsfVector lsf = lpc_to_lsf(lpc);
    const std::vector<double> oracle = lsf_oracle(lpc);
    REQUIRE(static_cast<int>(lsf.freqs.size()) == order);
    REQUIRE(oracle.size() == lsf.freqs.size());
    for (std::size_t i = 0; i < oracle.size(); ++i) {
      CHECK(lsf.freqs[i] == doctest::Approx(oracle[i]).epsilon(1e-8));
    }
  }
}

TEST_CASE("LSFs ascend strictly and round trip to the predictor (order 40 included)") {
  std::mt19937_64 rng(4321);
  for (int trial = 0; trial < 40; ++trial) {
    const int order = trial < 20 ? 1 + static_cast<int>(rng() % 16) : 40;
    // Reflection coefficients decay with stage index, as extracted vocal
    // tract filters do; flat +/-0.9 at order 40 manufactures root pairs
    // separated by ~1e-13 rad, beyond double-precision root resolution.
    std::vector<double> ks(order);
    for (int i = 0; i < order; ++i) ks[i] = uniform(rng, -0.95, 0.95) * std::pow(0.92, i);
    const LpcCoefficients lpc = from_reflection(ks);

    const LsfVector lsf = lpc_to_lsf(lpc);
    for (std::size_t i = 0; i < lsf.freqs.size(); ++i) {
      CHECK(lsf.freqs[i] > (i == 0 ? 0.0 : lsf.freqs[i - 1]));
      CHECK(lsf.freqs[i] < M_PI);
    }

    const LpcCoefficients back = lsf_to_lpc(lsf);
    for (int k = 0; k < order; ++k) {
      CHECK(std::fabs(back.a[k] - lpc.a[k]) < 1e-8);
    }
  }
}

TEST_CASE("non-minimum-phase input is rejected") {
  LpcCoefficients bad;
  bad.order = 1;
  bad.a = {1.2};
  CHECK_THROWS_AS(lpc_to_lsf(bad), Error);
}

TEST_CASE("non-ascending frequencies are rejected") {
  LsfVector lsf;
  lsf.order = 2;
  lsf.freqs = {2.0, 1.0};
  CHECK_THROWS_AS(lsf_to_lpc(lsf), Error);
  lsf.freqs = {0.5, 0.5};
  CHECK_THROWS_AS(lsf_to_lpc(lsf), Error);
  lsf.freqs = {-0.1, 0.5};
  CHECK_THROWS_AS(lsf_to_lpc(lsf), Error);
}
