#pragma once

#include <complex>
#include <span>
#include <vector>

#include "qsound/rng.hpp"
#include "qsound/sonify/spectrum.hpp"

namespace qsound::sonify {

using Complex = std::complex<double>;
using ComplexSpectrum = std::vector<Complex>;

/// values[k] = amps[k]·exp(iφ_k), φ_k uniform on (0, 2π).
ComplexSpectrum assign_random_phases(std::span<const double> amps, Rng& rng);
inline ComplexSpectrum assign_random_phases(const SpectrumFile& s, Rng& rng) {
  return assign_random_phases(s.amps, rng);
}

/// [X0..X(M-1), conj X(M-1), ..., conj X1]; length 2M-1. Requires M >= 2.
ComplexSpectrum hermitian_extend(std::span<const Complex> half);

/// x[n] = (1/L) Σ_k X[k] exp(+2πi·kn/L), any length L.
std::vector<Complex> inverse_dft(std::span<const Complex> spectrum);

/// Componentwise real part.
std::vector<double> real_signal(std::span<const Complex> x);

/// Audio frequency of spectral bin `bin` once a file of `points` bins is
/// played back at `sample_rate`.
double audio_frequency_for_bin(double bin, std::size_t points, double sample_rate);
double bin_for_audio_frequency(double freq_hz, std::size_t points, double sample_rate);

}  // namespace qsound::sonify
