#pragma once

#include <span>
#include <vector>

namespace qsound::sonify {

struct BandpassSpec {
  double sample_rate = 2015.0;
  double low_hz = 400.0;
  double high_hz = 550.0;
  double transition_hz = 25.0;    ///< Kaiser design transition width
  double attenuation_db = 40.0;   ///< stopband attenuation target

  void validate() const;
};

/// Kaiser-window shape parameter β for a stopband attenuation in dB.
double kaiser_beta(double attenuation_db);

/// Zeroth-order modified Bessel function of the first kind.
double bessel_i0(double x);

/// Odd-length linear-phase windowed-sinc bandpass taps with cutoffs at the
/// band edges.
std::vector<double> design_bandpass(const BandpassSpec& spec);

/// Magnitude response of FIR taps at `freq_hz`.
double fir_gain(std::span<const double> taps, double freq_hz, double sample_rate);

/// Zero-padded convolution with group-delay compensation; output length
/// equals input length. `taps` must have odd length.
std::vector<double> apply_fir_same(std::span<const double> signal, std::span<const double> taps);

/// Designs and applies the bandpass.
std::vector<double> bandpass(std::span<const double> signal, const BandpassSpec& spec);

/// Band-limited rational resampling (polyphase Kaiser-windowed sinc).
/// Rates must be positive integers.
std::vector<double> resample(std::span<const double> signal, unsigned in_rate, unsigned out_rate);

}  // namespace qsound::sonify
