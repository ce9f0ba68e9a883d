#include "qsound/sonify/filter.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "qsound/error.hpp"

namespace qsound::sonify {
namespace {

double sinc(double x) {
  if (x == 0.0) return 1.0;
  const double px = std::numbers::pi * x;
  return std::sin(px) / px;
}

}  // namespace

void BandpassSpec::validate() const {
  if (!(sample_rate > 0.0)) throw InvalidArgument("bandpass: sample rate must be positive");
  if (!(low_hz >= 0.0 && low_hz < high_hz && high_hz < sample_rate / 2.0))
    throw InvalidArgument("bandpass: need 0 <= low < high < sample_rate/2");
  if (!(transition_hz > 0.0)) throw InvalidArgument("bandpass: transition width must be positive");
  if (!(attenuation_db > 0.0)) throw InvalidArgument("bandpass: attenuation must be positive");
}

double bessel_i0(double x) {
  // Power series; converges quickly for the β range used in filter design.
  double sum = 1.0;
  double term = 1.0;
  const double half_sq = x * x / 4.0;
  for (int k = 1; k < 200; ++k) {
    term *= half_sq / (static_cast<double>(k) * static_cast<double>(k));
    sum += term;
    if (term < sum * 1e-17) break;
  }
  return sum;
}

double kaiser_beta(double attenuation_db) {
  const double a = attenuation_db;
  if (a > 50.0) return 0.1102 * (a - 8.7);
  if (a >= 21.0) return 0.5842 * std::pow(a - 21.0, 0.4) + 0.07886 * (a - 21.0);
  return 0.0;
}

std::vector<double> design_bandpass(const BandpassSpec& spec) {
  spec.validate();
  const double dw = 2.0 * std::numbers::pi * spec.transition_hz / spec.sample_rate;
  auto n = static_cast<std::size_t>(std::ceil((spec.attenuation_db - 7.95) / (2.285 * dw))) + 1;
  if (n % 2 == 0) ++n;
  const double beta = kaiser_beta(spec.attenuation_db);
  const double i0_beta = bessel_i0(beta);
  const double mid = static_cast<double>(n - 1) / 2.0;
  const double fl = spec.low_hz / spec.sample_rate;
  const double fh = spec.high_hz / spec.sample_rate;

  std::vector<double> taps(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) - mid;
    const double r = t / mid;
    const double w = bessel_i0(beta * std::sqrt(std::max(0.0, 1.0 - r * r))) / i0_beta;
    taps[i] = w * (2.0 * fh * sinc(2.0 * fh * t) - 2.0 * fl * sinc(2.0 * fl * t));
  }
  // Unity gain at band centre.
  const double g = fir_gain(taps, 0.5 * (spec.low_hz + spec.high_hz), spec.sample_rate);
  for (double& t : taps) t /= g;
  return taps;
}

double fir_gain(std::span<const double> taps, double freq_hz, double sample_rate) {
  const double w = 2.0 * std::numbers::pi * freq_hz / sample_rate;
  double re = 0.0, im = 0.0;
  for (std::size_t i = 0; i < taps.size(); ++i) {
    re += taps[i] * std::cos(w * static_cast<double>(i));
    im -= taps[i] * std::sin(w * static_cast<double>(i));
  }
  return std::hypot(re, im);
}

std::vector<double> apply_fir_same(std::span<const double> signal, std::span<const double> taps) {
  if (taps.size() % 2 == 0) throw InvalidArgument("apply_fir_same: tap count must be odd");
  const auto n = static_cast<std::ptrdiff_t>(signal.size());
  const auto nt = static_cast<std::ptrdiff_t>(taps.size());
  const std::ptrdiff_t delay = nt / 2;
  std::vector<double> out(signal.size(), 0.0);
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    // out[i] = Σ_k taps[k] · x[i + delay - k]
    const std::ptrdiff_t k_lo = std::max<std::ptrdiff_t>(0, i + delay - (n - 1));
    const std::ptrdiff_t k_hi = std::min<std::ptrdiff_t>(nt - 1, i + delay);
    double acc = 0.0;
    for (std::ptrdiff_t k = k_lo; k <= k_hi; ++k) acc += taps[k] * signal[i + delay - k];
    out[i] = acc;
  }
  return out;
}

std::vector<double> bandpass(std::span<const double> signal, const BandpassSpec& spec) {
  const auto taps = design_bandpass(spec);
  return apply_fir_same(signal, taps);
}

std::vector<double> resample(std::span<const double> signal, unsigned in_rate, unsigned out_rate) {
  if (in_rate == 0 || out_rate == 0) throw InvalidArgument("resample: rates must be positive");
  if (in_rate == out_rate) return {signal.begin(), signal.end()};
  const unsigned g = std::gcd(in_rate, out_rate);
  const std::size_t up = out_rate / g;
  const std::size_t down = in_rate / g;

  constexpr int kHalfTaps = 16;
  constexpr double kBeta = 8.0;
  // Cutoff relative to the input Nyquist; below 1 when decimating.
  const double cutoff = 0.95 * std::min(1.0, static_cast<double>(out_rate) / in_rate);
  const double i0_beta = bessel_i0(kBeta);

  // table[p][i] is the weight of input sample n0 + i - kHalfTaps + 1 for phase p.
  std::vector<double> table(up * 2 * kHalfTaps);
  for (std::size_t p = 0; p < up; ++p) {
    const double frac = static_cast<double>(p) / static_cast<double>(up);
    for (int i = 0; i < 2 * kHalfTaps; ++i) {
      const double u = static_cast<double>(i - kHalfTaps + 1) - frac;
      const double r = u / kHalfTaps;
      const double w = std::abs(r) >= 1.0 ? 0.0 : bessel_i0(kBeta * std::sqrt(1.0 - r * r)) / i0_beta;
      table[p * 2 * kHalfTaps + i] = cutoff * sinc(cutoff * u) * w;
    }
  }

  const std::size_t n_out = (signal.size() * up + down - 1) / down;
  const auto n_in = static_cast<std::ptrdiff_t>(signal.size());
  std::vector<double> out(n_out);
  for (std::size_t j = 0; j < n_out; ++j) {
    const std::size_t num = j * down;
    const auto n0 = static_cast<std::ptrdiff_t>(num / up);
    const double* h = &table[(num % up) * 2 * kHalfTaps];
    double acc = 0.0;
    for (int i = 0; i < 2 * kHalfTaps; ++i) {
      const std::ptrdiff_t idx = n0 + i - kHalfTaps + 1;
      if (idx >= 0 && idx < n_in) acc += h[i] * signal[idx];
    }
    out[j] = acc;
  }
  return out;
}

}  // namespace qsound::sonify
