#include "io/wav.hpp"

#include <cmath>
#include <cstdint>
#include <cstring>
#include <string>

#include "io/atomic_file.hpp"
#include "util/error.hpp"

namespace exknet::io {

namespace {

std::uint32_t read_u32(const std::string& b, std::size_t off) {
  return std::uint32_t(std::uint8_t(b[off])) | std::uint32_t(std::uint8_t(b[off + 1])) << 8 |
         std::uint32_t(std::uint8_t(b[off + 2])) << 16 | std::uint32_t(std::uint8_t(b[off + 3])) << 24;
}

std::uint16_t read_u16(const std::string& b, std::size_t off) {
  return std::uint16_t(std::uint8_t(b[off])) | std::uint16_t(std::uint8_t(b[off + 1])) << 8;
}

void put_u32(std::string& b, std::uint32_t v) {
  b.push_back(char(v & 0xFF));
  b.push_back(char((v >> 8) & 0xFF));
  b.push_back(char((v >> 16) & 0xFF));
  b.push_back(char((v >> 24) & 0xFF));
}

void put_u16(std::string& b, std::uint16_t v) {
  b.push_back(char(v & 0xFF));
  b.push_back(char((v >> 8) & 0xFF));
}

}  // namespace

dsp::Waveform read_wav(const std::string& path) {
  const std::string bytes = read_file(path);
  if (bytes.size() < 12 || bytes.compare(0, 4, "RIFF") != 0 || bytes.compare(8, 4, "WAVE") != 0) {
    throw_format("read_wav: " + path + " is not a RIFF/WAVE file");
  }

  bool have_fmt = false;
  std::uint16_t format = 0, channels = 0, bits = 0;
  std::uint32_t rate = 0;
  std::size_t data_off = 0, data_len = 0;

  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const std::string id = bytes.substr(pos, 4);
    const std::uint32_t len = read_u32(bytes, pos + 4);
    const std::size_t body = pos + 8;
    if (id == "fmt ") {
      if (body + 16 > bytes.size()) throw_format("read_wav: truncated fmt chunk in " + path);
      format = read_u16(bytes, body);
      channels = read_u16(bytes, body + 2);
      rate = read_u32(bytes, body + 4);
      bits = read_u16(bytes, body + 14);
      have_fmt = true;
    } else if (id == "data") {
      data_off = body;
      data_len = len;
      break;
    }
    pos = body + len + (len & 1);  // chunks are word-aligned
  }

  if (!have_fmt || data_off == 0) throw_format("read_wav: missing fmt/data chunk in " + path);
  if (format != 1) throw_format("read_wav: " + path + " is not PCM (format tag " + std::to_string(format) + ")");
  if (channels != 1) throw_format("read_wav: " + path + " has " + std::to_string(channels) + " channels, expected mono");
  if (bits != 16) throw_format("read_wav: " + path + " has " + std::to_string(bits) + " bits per sample, expected 16");
  if (data_off + data_len > bytes.size()) {
    throw_format("read_wav: data chunk of " + path + " claims " + std::to_string(data_len) +
                 " bytes but only " + std::to_string(bytes.size() - data_off) + " present");
  }

  dsp::Waveform w;
  w.sample_rate_hz = static_cast<int>(rate);
  const std::size_t n = data_len / 2;
  w.samples.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint16_t u = read_u16(bytes, data_off + 2 * i);
    const std::int16_t s = static_cast<std::int16_t>(u);
    w.samples[i] = static_cast<double>(s) / 32768.0;
  }
  return w;
}

void write_wav(const dsp::Waveform& w, const std::string& path) {
  if (w.sample_rate_hz <= 0) throw_argument("write_wav: sample rate must be positive");
  const std::uint32_t data_len = static_cast<std::uint32_t>(w.samples.size() * 2);

  std::string b;
  b.reserve(44 + data_len);
  b += "RIFF";
  put_u32(b, 36 + data_len);
  b += "WAVE";
  b += "fmt ";
  put_u32(b, 16);
  put_u16(b, 1);  // PCM
  put_u16(b, 1);  // mono
  put_u32(b, static_cast<std::uint32_t>(w.sample_rate_hz));
  put_u32(b, static_cast<std::uint32_t>(w.sample_rate_hz) * 2);
  put_u16(b, 2);   // block align
  put_u16(b, 16);  // bits
  b += "data";
  put_u32(b, data_len);
  for (double v : w.samples) {
    double clamped = v < -1.0 ? -1.0 : (v > 1.0 ? 1.0 : v);
    int s = static_cast<int>(std::lrint(clamped * 32768.0));
    if (s > 32767) s = 32767;
    if (s < -32768) s = -32768;
    put_u16(b, static_cast<std::uint16_t>(static_cast<std::int16_t>(s)));
  }
  atomic_write(path, b);
}

}  // namespace exknet::io
