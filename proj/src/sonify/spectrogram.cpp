#include "qsound/sonify/spectrogram.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>
#include <memory>
#include <numbers>

#include "fft.hpp"
#include "qsound/error.hpp"

namespace qsound::sonify {
namespace {

std::string fmt(const char* spec, double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

double median(std::vector<double> v) {
  const std::size_t n = v.size();
  std::nth_element(v.begin(), v.begin() + n / 2, v.end());
  const double hi = v[n / 2];
  if (n % 2 == 1) return hi;
  const double lo = *std::max_element(v.begin(), v.begin() + n / 2);
  return 0.5 * (lo + hi);
}

struct Rgb {
  unsigned char r, g, b;
};

Rgb hot_colormap(double v) {
  auto c = [](double x) { return static_cast<unsigned char>(std::lround(255.0 * std::clamp(x, 0.0, 1.0))); };
  return Rgb{c(3.0 * v), c(3.0 * v - 1.0), c(3.0 * v - 2.0)};
}

std::vector<double> smoothed_track(const SpectrogramData& sg, std::size_t width) {
  const std::size_t n = sg.frames();
  const std::size_t nf = sg.freqs.size();
  // Prefix sums of power per bin, then a centred window clipped at the ends.
  std::vector<double> prefix((n + 1) * nf, 0.0);
  for (std::size_t f = 0; f < n; ++f)
    for (std::size_t k = 0; k < nf; ++k)
      prefix[(f + 1) * nf + k] = prefix[f * nf + k] + sg.magnitudes[f][k] * sg.magnitudes[f][k];
  std::vector<double> track(n);
  for (std::size_t f = 0; f < n; ++f) {
    const std::size_t lo = f >= width / 2 ? f - width / 2 : 0;
    const std::size_t hi = std::min(n, lo + width);
    std::size_t best = 0;
    double best_p = -1.0;
    for (std::size_t k = 0; k < nf; ++k) {
      const double p = prefix[hi * nf + k] - prefix[lo * nf + k];
      if (p > best_p) {
        best_p = p;
        best = k;
      }
    }
    track[f] = sg.freqs[best];
  }
  return track;
}

}  // namespace

std::vector<double> hann_window(std::size_t n) {
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i)
    w[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n));
  return w;
}

SpectrogramData spectrogram(std::span<const double> signal, double sample_rate,
                            const SpectrogramParams& params) {
  if (params.window_len < 2) throw InvalidArgument("spectrogram: window too short");
  if (params.hop == 0) throw InvalidArgument("spectrogram: hop must be at least 1");
  if (params.window_len > signal.size())
    throw InvalidArgument("spectrogram: window of " + std::to_string(params.window_len) +
                          " samples is longer than the signal (" + std::to_string(signal.size()) + ")");
  if (!(sample_rate > 0.0)) throw InvalidArgument("spectrogram: sample rate must be positive");
  if (!(params.fmax_hz >= params.fmin_hz)) throw InvalidArgument("spectrogram: fmax below fmin");

  const std::size_t w = params.window_len;
  const auto window = hann_window(w);
  double wsum = 0.0;
  for (double v : window) wsum += v;
  const double scale = 2.0 / wsum;

  SpectrogramData sg;
  sg.window_len = w;
  sg.hop = params.hop;
  sg.sample_rate = sample_rate;

  std::size_t k_lo = w / 2 + 1, k_hi = 0;
  for (std::size_t k = 0; k <= w / 2; ++k) {
    const double f = static_cast<double>(k) * sample_rate / static_cast<double>(w);
    if (f >= params.fmin_hz && f <= params.fmax_hz) {
      k_lo = std::min(k_lo, k);
      k_hi = std::max(k_hi, k);
      sg.freqs.push_back(f);
    }
  }
  if (sg.freqs.empty()) throw InvalidArgument("spectrogram: no bins inside the frequency range");

  const std::size_t n_frames = 1 + (signal.size() - w) / params.hop;
  detail::RealForwardDft dft(w);
  std::vector<double> frame(w);
  std::vector<std::complex<double>> bins(dft.bins());
  sg.times.reserve(n_frames);
  sg.magnitudes.reserve(n_frames);
  for (std::size_t f = 0; f < n_frames; ++f) {
    const std::size_t start = f * params.hop;
    for (std::size_t i = 0; i < w; ++i) frame[i] = signal[start + i] * window[i];
    dft.execute(frame, bins);
    std::vector<double> row;
    row.reserve(k_hi - k_lo + 1);
    for (std::size_t k = k_lo; k <= k_hi; ++k) row.push_back(std::abs(bins[k]) * scale);
    sg.times.push_back((static_cast<double>(start) + static_cast<double>(w) / 2.0) / sample_rate);
    sg.magnitudes.push_back(std::move(row));
  }
  return sg;
}

std::vector<double> dominant_frequency_track(const SpectrogramData& sg) {
  std::vector<double> track;
  track.reserve(sg.frames());
  for (const auto& row : sg.magnitudes) {
    const auto it = std::max_element(row.begin(), row.end());
    track.push_back(sg.freqs[static_cast<std::size_t>(it - row.begin())]);
  }
  return track;
}

std::string format_spectrogram_csv(const SpectrogramData& sg) {
  std::string out = "time_s\\freq_hz";
  for (double f : sg.freqs) out += "," + fmt("%.4f", f);
  out += "\n";
  for (std::size_t i = 0; i < sg.frames(); ++i) {
    out += fmt("%.6f", sg.times[i]);
    for (double m : sg.magnitudes[i]) out += "," + fmt("%.6e", m);
    out += "\n";
  }
  return out;
}

void write_spectrogram_csv(const std::filesystem::path& path, const SpectrogramData& sg) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open " + path.string() + " for writing");
  f << format_spectrogram_csv(sg);
  if (!f) throw IoError("write failed for " + path.string());
}

void write_spectrogram_png(const std::filesystem::path& path, const SpectrogramData& sg,
                           std::size_t max_width, std::size_t row_height) {
  if (sg.frames() == 0 || sg.freqs.empty()) throw InvalidArgument("spectrogram png: nothing to draw");
  const std::size_t frames = sg.frames();
  const std::size_t nf = sg.freqs.size();
  const std::size_t width = std::min(frames, std::max<std::size_t>(max_width, 1));
  const std::size_t height = nf * std::max<std::size_t>(row_height, 1);

  // Column c covers frames [c·frames/width, (c+1)·frames/width).
  std::vector<double> cells(width * nf, 0.0);
  double peak = 0.0;
  for (std::size_t c = 0; c < width; ++c) {
    const std::size_t f0 = c * frames / width;
    const std::size_t f1 = std::max(f0 + 1, (c + 1) * frames / width);
    for (std::size_t f = f0; f < f1; ++f)
      for (std::size_t k = 0; k < nf; ++k)
        cells[c * nf + k] = std::max(cells[c * nf + k], sg.magnitudes[f][k]);
  }
  for (double v : cells) peak = std::max(peak, v);

  std::vector<unsigned char> image(width * height * 3);
  for (std::size_t y = 0; y < height; ++y) {
    const std::size_t k = nf - 1 - y / std::max<std::size_t>(row_height, 1);
    for (std::size_t x = 0; x < width; ++x) {
      const Rgb px = hot_colormap(peak > 0.0 ? cells[x * nf + k] / peak : 0.0);
      unsigned char* p = &image[(y * width + x) * 3];
      p[0] = px.r;
      p[1] = px.g;
      p[2] = px.b;
    }
  }

  std::unique_ptr<FILE, int (*)(FILE*)> fp(std::fopen(path.string().c_str(), "wb"), &std::fclose);
  if (!fp) throw IoError("cannot open " + path.string() + " for writing");
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (png == nullptr) throw IoError("png: cannot create write struct");
  png_infop info = png_create_info_struct(png);
  if (info == nullptr) {
    png_destroy_write_struct(&png, nullptr);
    throw IoError("png: cannot create info struct");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw IoError("png: write failed for " + path.string());
  }
  png_init_io(png, fp.get());
  png_set_IHDR(png, info, static_cast<png_uint_32>(width), static_cast<png_uint_32>(height), 8,
               PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  for (std::size_t y = 0; y < height; ++y) png_write_row(png, &image[y * width * 3]);
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

std::vector<FrequencySwitch> detect_frequency_switch(const SpectrogramData& sg,
                                                     const SwitchDetectParams& params) {
  std::vector<FrequencySwitch> events;
  const auto track = params.smooth_frames > 1 ? smoothed_track(sg, params.smooth_frames)
                                              : dominant_frequency_track(sg);
  const std::size_t b = std::max<std::size_t>(params.baseline_frames, 1);
  double last_hit = -1e300;
  std::size_t last_hit_frame = 0;
  for (std::size_t i = b; i < track.size(); ++i) {
    const double base = median(std::vector<double>(track.begin() + static_cast<std::ptrdiff_t>(i - b),
                                                   track.begin() + static_cast<std::ptrdiff_t>(i)));
    const double delta = track[i] - base;
    if (std::abs(delta) < params.jump_threshold_hz) continue;
    if (params.confirm_frames > 1) {
      const std::size_t end = std::min(track.size(), i + params.confirm_frames);
      const double ahead = median(std::vector<double>(track.begin() + static_cast<std::ptrdiff_t>(i),
                                                      track.begin() + static_cast<std::ptrdiff_t>(end)));
      if (std::abs(ahead - base) < params.jump_threshold_hz) continue;
    }
    const double t = sg.times[i];
    // A run of consecutive exceeding frames is one event.
    const bool continues_run = !events.empty() && last_hit_frame + 1 == i;
    if (!continues_run && (events.empty() || t - last_hit >= params.min_separation_s))
      events.push_back({t, delta});
    last_hit = t;
    last_hit_frame = i;
  }
  return events;
}

std::string format_events_csv(std::span<const FrequencySwitch> events) {
  std::string out = "time_s,delta_hz\n";
  for (const auto& e : events) out += fmt("%.6f", e.time_s) + "," + fmt("%.4f", e.delta_hz) + "\n";
  return out;
}

}  // namespace qsound::sonify
