#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace qsound {

/// -1 dBFS, the default peak level for exported audio.
inline constexpr double kDefaultPeak = 0.891;

struct WavData {
  std::uint32_t sample_rate = 0;
  std::uint16_t channels = 0;
  std::uint16_t bits_per_sample = 0;
  std::vector<std::int16_t> samples;

  double duration_s() const {
    return sample_rate == 0 ? 0.0
                            : static_cast<double>(samples.size()) / channels / sample_rate;
  }
};

/// Quantizes to 16-bit PCM so that the largest magnitude maps to
/// `peak`·32767. An all-zero signal stays silent.
std::vector<std::int16_t> quantize_pcm16(std::span<const double> samples, double peak);

/// Writes a mono 16-bit PCM RIFF/WAVE file. Throws on empty input or I/O failure.
void write_wav(const std::filesystem::path& path, std::span<const double> samples,
               std::uint32_t sample_rate, double peak = kDefaultPeak);

/// Reads back a PCM16 WAV file (only the subset this toolkit writes).
WavData read_wav(const std::filesystem::path& path);

}  // namespace qsound
