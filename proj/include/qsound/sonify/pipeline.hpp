#pragma once

#include <cstdint>
#include <vector>

#include "qsound/sonify/filter.hpp"
#include "qsound/sonify/spectrogram.hpp"
#include "qsound/sonify/spectrum.hpp"

namespace qsound::sonify {

struct TimeSeries {
  std::vector<double> samples;
  double sample_rate = 2015.0;

  double duration_s() const { return static_cast<double>(samples.size()) / sample_rate; }
};

struct SonifyConfig {
  std::size_t window = 10;                 ///< moving-average length in files
  IndexRange noise_floor_range{1500, 1800};
  double sample_rate = 2015.0;
  double band_low_hz = 400.0;
  double band_high_hz = 550.0;
  bool apply_bandpass = true;
  std::uint64_t seed = 0;

  void validate(std::size_t points_per_file) const;
  BandpassSpec bandpass_spec() const;
};

/// Samples produced per averaged spectrum of M points: 2M - 1.
constexpr std::size_t samples_per_file(std::size_t points) { return 2 * points - 1; }

/// Total playback length of a series of `n_files` spectra, without rendering.
double sonification_duration_s(std::size_t n_files, std::size_t points_per_file,
                               std::size_t window, double sample_rate);

/// One averaged spectrum to time samples: noise-floor subtraction, random
/// phases from the stream of (seed, file index), Hermitian extension,
/// inverse DFT and real part.
std::vector<double> sonify_file(const SpectrumFile& averaged, const SonifyConfig& cfg);

/// Full chain: moving average, per-file synthesis (parallel when `threads`
/// > 1, with identical output), concatenation and bandpass.
TimeSeries sonify_series(const SpectrumSeries& series, const SonifyConfig& cfg, unsigned threads = 1);

/// Detector settings scaled to the playback length of one averaged file:
/// power is smoothed over one file and events closer than `window` files
/// merge into one.
SwitchDetectParams switch_detect_params(const SonifyConfig& cfg, std::size_t points_per_file,
                                        const SpectrogramParams& sg, double jump_threshold_hz = 15.0);

/// Mean phonon number 1/(exp(h f0 / kB T) - 1).
double thermal_occupation(double f0_hz, double temperature_k);

inline constexpr double kPlanck = 6.626e-34;     // J·s
inline constexpr double kBoltzmann = 1.38e-23;   // J/K

}  // namespace qsound::sonify
