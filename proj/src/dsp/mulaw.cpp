#include "dsp/mulaw.hpp"

#include <cmath>
#include <string>

#include "util/error.hpp"

namespace exknet::dsp {

namespace {
void check_unit_range(double v, const char* who) {
  if (!(std::fabs(v) <= 1.0)) {
    throw_domain(std::string(who) + ": |value| must be <= 1, got " + std::to_string(v));
  }
}
}  // namespace

double mulaw_compress(double x, int mu) {
  check_unit_range(x, "mulaw_compress");
  const double m = static_cast<double>(mu);
  const double y = std::log1p(m * std::fabs(x)) / std::log1p(m);
  return std::copysign(y, x);
}

double mulaw_expand(double y, int mu) {
  check_unit_range(y, "mulaw_expand");
  const double m = static_cast<double>(mu);
  const double x = (std::pow(1.0 + m, std::fabs(y)) - 1.0) / m;
  return std::copysign(x, y);
}

std::uint8_t quantize_256(double y) {
  check_unit_range(y, "quantize_256");
  int code = static_cast<int>(std::floor((y + 1.0) * 0.5 * 256.0));
  if (code < 0) code = 0;
  if (code > 255) code = 255;
  return static_cast<std::uint8_t>(code);
}

double dequantize_256(std::uint8_t code) {
  return (static_cast<double>(code) + 0.5) / 128.0 - 1.0;
}

std::uint8_t encode_sample(double x, int mu) { return quantize_256(mulaw_compress(x, mu)); }

double decode_sample(std::uint8_t code, int mu) { return mulaw_expand(dequantize_256(code), mu); }

CodeStream encode_waveform(const std::vector<double>& x, int mu) {
  CodeStream codes(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) codes[i] = encode_sample(x[i], mu);
  return codes;
}

std::vector<double> decode_codes(const CodeStream& codes, int mu) {
  std::vector<double> x(codes.size());
  for (std::size_t i = 0; i < codes.size(); ++i) x[i] = decode_sample(codes[i], mu);
  return x;
}

}  // namespace exknet::dsp
