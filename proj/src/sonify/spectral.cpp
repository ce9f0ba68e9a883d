#include "qsound/sonify/spectral.hpp"

#include <cmath>
#include <numbers>

#include "fft.hpp"
#include "qsound/error.hpp"

namespace qsound::sonify {

ComplexSpectrum assign_random_phases(std::span<const double> amps, Rng& rng) {
  ComplexSpectrum out;
  out.reserve(amps.size());
  for (double a : amps) {
    const double phi = 2.0 * std::numbers::pi * rng.uniform_open01();
    out.push_back(std::polar(a, phi));
  }
  return out;
}

ComplexSpectrum hermitian_extend(std::span<const Complex> half) {
  const std::size_t m = half.size();
  if (m < 2) throw InvalidArgument("hermitian_extend needs at least two bins");
  ComplexSpectrum out(half.begin(), half.end());
  out.reserve(2 * m - 1);
  for (std::size_t k = m - 1; k >= 1; --k) out.push_back(std::conj(half[k]));
  return out;
}

std::vector<Complex> inverse_dft(std::span<const Complex> spectrum) {
  const std::size_t n = spectrum.size();
  if (n == 0) return {};
  std::vector<Complex> out(n);
  detail::BackwardDft dft(n);
  dft.execute(spectrum, out);
  const double inv = 1.0 / static_cast<double>(n);
  for (auto& v : out) v *= inv;
  return out;
}

std::vector<double> real_signal(std::span<const Complex> x) {
  std::vector<double> out;
  out.reserve(x.size());
  for (const auto& v : x) out.push_back(v.real());
  return out;
}

double audio_frequency_for_bin(double bin, std::size_t points, double sample_rate) {
  return bin * sample_rate / static_cast<double>(2 * points - 1);
}

double bin_for_audio_frequency(double freq_hz, std::size_t points, double sample_rate) {
  return freq_hz * static_cast<double>(2 * points - 1) / sample_rate;
}

}  // namespace qsound::sonify
