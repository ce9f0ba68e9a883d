#include "qsound/wav.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstring>
#include <fstream>

#include "qsound/error.hpp"

namespace qsound {
namespace {

void put_u16(std::vector<char>& out, std::uint16_t v) {
  out.push_back(static_cast<char>(v & 0xff));
  out.push_back(static_cast<char>((v >> 8) & 0xff));
}

void put_u32(std::vector<char>& out, std::uint32_t v) {
  for (int shift = 0; shift < 32; shift += 8) out.push_back(static_cast<char>((v >> shift) & 0xff));
}

void put_tag(std::vector<char>& out, const char (&tag)[5]) { out.insert(out.end(), tag, tag + 4); }

std::uint32_t get_u32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

std::uint16_t get_u16(const unsigned char* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

}  // namespace

std::vector<std::int16_t> quantize_pcm16(std::span<const double> samples, double peak) {
  if (!(peak > 0.0 && peak <= 1.0)) throw InvalidArgument("wav: peak level must be in (0, 1]");
  double max_abs = 0.0;
  for (double s : samples) {
    if (!std::isfinite(s)) throw InvalidArgument("wav: non-finite sample");
    max_abs = std::max(max_abs, std::abs(s));
  }
  std::vector<std::int16_t> pcm(samples.size(), 0);
  if (max_abs == 0.0) return pcm;
  const double gain = peak * 32767.0 / max_abs;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double v = std::clamp(std::round(samples[i] * gain), -32767.0, 32767.0);
    pcm[i] = static_cast<std::int16_t>(v);
  }
  return pcm;
}

void write_wav(const std::filesystem::path& path, std::span<const double> samples,
               std::uint32_t sample_rate, double peak) {
  if (samples.empty()) throw InvalidArgument("wav: refusing to write an empty signal");
  if (sample_rate == 0) throw InvalidArgument("wav: sample rate must be positive");
  const auto pcm = quantize_pcm16(samples, peak);

  const std::uint32_t data_bytes = static_cast<std::uint32_t>(pcm.size() * 2);
  std::vector<char> out;
  out.reserve(44 + data_bytes);
  put_tag(out, "RIFF");
  put_u32(out, 36 + data_bytes);
  put_tag(out, "WAVE");
  put_tag(out, "fmt ");
  put_u32(out, 16);
  put_u16(out, 1);  // PCM
  put_u16(out, 1);  // mono
  put_u32(out, sample_rate);
  put_u32(out, sample_rate * 2);
  put_u16(out, 2);
  put_u16(out, 16);
  put_tag(out, "data");
  put_u32(out, data_bytes);
  for (std::int16_t s : pcm) put_u16(out, static_cast<std::uint16_t>(s));

  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("wav: cannot open " + path.string() + " for writing");
  f.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!f) throw IoError("wav: write failed for " + path.string());
}

WavData read_wav(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("wav: cannot open " + path.string());
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0)
    throw IoError("wav: not a RIFF/WAVE file: " + path.string());

  WavData wav;
  bool have_fmt = false;
  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const std::uint32_t size = get_u32(&bytes[pos + 4]);
    const unsigned char* body = &bytes[pos + 8];
    if (pos + 8 + size > bytes.size()) throw IoError("wav: truncated chunk in " + path.string());
    if (std::memcmp(&bytes[pos], "fmt ", 4) == 0 && size >= 16) {
      if (get_u16(body) != 1) throw IoError("wav: only PCM is supported");
      wav.channels = get_u16(body + 2);
      wav.sample_rate = get_u32(body + 4);
      wav.bits_per_sample = get_u16(body + 14);
      have_fmt = true;
    } else if (std::memcmp(&bytes[pos], "data", 4) == 0) {
      if (!have_fmt || wav.bits_per_sample != 16) throw IoError("wav: expected 16-bit PCM");
      wav.samples.resize(size / 2);
      for (std::size_t i = 0; i < wav.samples.size(); ++i)
        wav.samples[i] = static_cast<std::int16_t>(get_u16(body + 2 * i));
    }
    pos += 8 + size + (size & 1);
  }
  if (!have_fmt) throw IoError("wav: missing fmt chunk in " + path.string());
  return wav;
}

}  // namespace qsound
