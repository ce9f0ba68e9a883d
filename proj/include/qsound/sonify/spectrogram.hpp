#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace qsound::sonify {

struct SpectrogramParams {
  std::size_t window_len = 1024;
  std::size_t hop = 256;
  double fmin_hz = 440.0;
  double fmax_hz = 520.0;
};

/// Magnitude STFT cropped to [fmin, fmax]. magnitudes[frame][bin].
struct SpectrogramData {
  std::vector<double> times;  ///< frame centres, seconds
  std::vector<double> freqs;  ///< Hz
  std::vector<std::vector<double>> magnitudes;
  std::size_t window_len = 0;
  std::size_t hop = 0;
  double sample_rate = 0.0;

  std::size_t frames() const { return times.size(); }
  double bin_width_hz() const { return sample_rate / static_cast<double>(window_len); }
};

/// Periodic Hann window of length n.
std::vector<double> hann_window(std::size_t n);

/// Hann-windowed STFT magnitude, scaled so a unit-amplitude sinusoid centred
/// on a bin reads 1. Throws if the window is longer than the signal.
SpectrogramData spectrogram(std::span<const double> signal, double sample_rate,
                            const SpectrogramParams& params = {});

/// Per-frame frequency of the largest magnitude.
std::vector<double> dominant_frequency_track(const SpectrogramData& sg);

/// First row: frequency axis; first column: time axis.
std::string format_spectrogram_csv(const SpectrogramData& sg);
void write_spectrogram_csv(const std::filesystem::path& path, const SpectrogramData& sg);

/// Renders magnitudes as an 8-bit RGB PNG, time left to right and frequency
/// bottom to top. Wide spectrograms are reduced by taking the per-column max.
void write_spectrogram_png(const std::filesystem::path& path, const SpectrogramData& sg,
                           std::size_t max_width = 4096, std::size_t row_height = 4);

struct SwitchDetectParams {
  double jump_threshold_hz = 15.0;
  std::size_t baseline_frames = 10;
  /// The median of this many frames starting at the jump must also clear
  /// the threshold, so a faded frame of a random-phase tone is not an event.
  std::size_t confirm_frames = 10;
  /// Power is averaged over this many frames (centred) before the argmax.
  std::size_t smooth_frames = 1;
  /// Detections closer than this to the previous event are merged into it.
  double min_separation_s = 0.0;
};

struct FrequencySwitch {
  double time_s = 0.0;
  double delta_hz = 0.0;
};

/// Reports frames whose dominant frequency differs by at least the threshold
/// from the median of the preceding `baseline_frames` frames.
std::vector<FrequencySwitch> detect_frequency_switch(const SpectrogramData& sg,
                                                     const SwitchDetectParams& params = {});

std::string format_events_csv(std::span<const FrequencySwitch> events);

}  // namespace qsound::sonify
