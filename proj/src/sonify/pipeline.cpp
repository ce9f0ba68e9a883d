#include "qsound/sonify/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "qsound/error.hpp"
#include "qsound/rng.hpp"
#include "qsound/sonify/spectral.hpp"

namespace qsound::sonify {

void SonifyConfig::validate(std::size_t points_per_file) const {
  if (window == 0) throw InvalidArgument("sonify: window must be at least 1");
  if (!(sample_rate > 0.0)) throw InvalidArgument("sonify: sample rate must be positive");
  if (!(band_low_hz >= 0.0 && band_low_hz < band_high_hz && band_high_hz < sample_rate / 2.0))
    throw InvalidArgument("sonify: band must satisfy 0 <= low < high < sample_rate/2");
  if (noise_floor_range.last < noise_floor_range.first)
    throw InvalidArgument("sonify: noise floor range is empty");
  if (points_per_file != 0 && noise_floor_range.last >= points_per_file)
    throw InvalidArgument("sonify: noise floor range exceeds the " + std::to_string(points_per_file) +
                          "-point spectra");
}

BandpassSpec SonifyConfig::bandpass_spec() const {
  BandpassSpec spec;
  spec.sample_rate = sample_rate;
  spec.low_hz = band_low_hz;
  spec.high_hz = band_high_hz;
  return spec;
}

double sonification_duration_s(std::size_t n_files, std::size_t points_per_file,
                               std::size_t window, double sample_rate) {
  if (window == 0 || n_files < window) return 0.0;
  const auto averaged = static_cast<double>(n_files - window + 1);
  return averaged * static_cast<double>(samples_per_file(points_per_file)) / sample_rate;
}

std::vector<double> sonify_file(const SpectrumFile& averaged, const SonifyConfig& cfg) {
  const auto floored = subtract_noise_floor(averaged, cfg.noise_floor_range);
  Rng rng(derive_stream_seed(cfg.seed, averaged.index));
  const auto phased = assign_random_phases(floored.amps, rng);
  const auto full = hermitian_extend(phased);
  return real_signal(inverse_dft(full));
}

TimeSeries sonify_series(const SpectrumSeries& series, const SonifyConfig& cfg, unsigned threads) {
  if (series.empty()) throw InvalidArgument("sonify: empty spectrum series");
  cfg.validate(series.points_per_file());
  const auto averaged = moving_average(series, cfg.window);
  const std::size_t n = averaged.size();
  const std::size_t per_file = samples_per_file(averaged.points_per_file());

  TimeSeries ts;
  ts.sample_rate = cfg.sample_rate;
  ts.samples.assign(n * per_file, 0.0);

  auto work = [&](std::size_t begin, std::size_t step) {
    for (std::size_t i = begin; i < n; i += step) {
      const auto chunk = sonify_file(averaged.files[i], cfg);
      std::copy(chunk.begin(), chunk.end(), ts.samples.begin() + static_cast<std::ptrdiff_t>(i * per_file));
    }
  };
  const unsigned t = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(n)));
  if (t == 1) {
    work(0, 1);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < t; ++w) pool.emplace_back(work, w, t);
  }

  if (cfg.apply_bandpass) ts.samples = bandpass(ts.samples, cfg.bandpass_spec());
  return ts;
}

SwitchDetectParams switch_detect_params(const SonifyConfig& cfg, std::size_t points_per_file,
                                        const SpectrogramParams& sg, double jump_threshold_hz) {
  if (sg.hop == 0) throw InvalidArgument("spectrogram hop must be at least 1");
  const double file_s = static_cast<double>(samples_per_file(points_per_file)) / cfg.sample_rate;
  SwitchDetectParams p;
  p.jump_threshold_hz = jump_threshold_hz;
  p.confirm_frames = 1;
  p.smooth_frames = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::lround(file_s * cfg.sample_rate / static_cast<double>(sg.hop))));
  p.min_separation_s = static_cast<double>(cfg.window) * file_s;
  return p;
}

double thermal_occupation(double f0_hz, double temperature_k) {
  if (!(f0_hz > 0.0) || !(temperature_k > 0.0))
    throw InvalidArgument("thermal_occupation: frequency and temperature must be positive");
  const double x = kPlanck * f0_hz / (kBoltzmann * temperature_k);
  return 1.0 / std::expm1(x);
}

}  // namespace qsound::sonify
