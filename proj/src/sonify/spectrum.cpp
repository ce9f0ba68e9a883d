#include "qsound/sonify/spectrum.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>

#include "qsound/error.hpp"
#include "qsound/rng.hpp"

namespace qsound::sonify {
namespace {

std::optional<std::uint64_t> numeric_stem(const std::filesystem::path& p) {
  const std::string stem = p.stem().string();
  if (stem.empty()) return std::nullopt;
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(stem.data(), stem.data() + stem.size(), v);
  if (ec != std::errc{} || ptr != stem.data() + stem.size()) return std::nullopt;
  return v;
}

bool parse_double(std::string_view field, double& out) {
  while (!field.empty() && (field.front() == ' ' || field.front() == '\r')) field.remove_prefix(1);
  while (!field.empty() && (field.back() == ' ' || field.back() == '\r')) field.remove_suffix(1);
  if (field.empty()) return false;
  // from_chars rejects a leading '+', which some exporters emit.
  if (field.front() == '+') field.remove_prefix(1);
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), out);
  return ec == std::errc{} && ptr == field.data() + field.size() && std::isfinite(out);
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t pos = 0;
  while (true) {
    auto tab = line.find('\t', pos);
    fields.push_back(line.substr(pos, tab == std::string_view::npos ? line.npos : tab - pos));
    if (tab == std::string_view::npos) break;
    pos = tab + 1;
  }
  return fields;
}

}  // namespace

SpectrumFile load_spectrum_file(const std::filesystem::path& path, const LoadOptions& options) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read spectrum file " + path.string());
  const std::size_t needed = std::max(options.columns.freq_col, options.columns.amp_col) + 1;

  SpectrumFile file;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no <= options.skip_rows) continue;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split_fields(line);
    if (fields.size() < needed)
      throw ParseError(path.string(), line_no,
                       "expected at least " + std::to_string(needed) + " tab-separated fields, got " +
                           std::to_string(fields.size()));
    double f = 0.0, a = 0.0;
    if (!parse_double(fields[options.columns.freq_col], f) ||
        !parse_double(fields[options.columns.amp_col], a))
      throw ParseError(path.string(), line_no, "non-numeric field");
    file.freqs.push_back(f);
    file.amps.push_back(a);
  }
  if (file.amps.size() < 2) throw ParseError(path.string(), line_no, "spectrum needs at least two rows");
  validate_grid(file, options.grid_tolerance, path.string());
  return file;
}

void validate_grid(const SpectrumFile& file, double tolerance, const std::string& source) {
  if (file.freqs.size() != file.amps.size())
    throw InvalidArgument(source + ": frequency and amplitude columns differ in length");
  const std::size_t n = file.freqs.size();
  if (n < 2) return;
  const double step = (file.freqs.back() - file.freqs.front()) / static_cast<double>(n - 1);
  if (!(step > 0.0)) throw InvalidArgument(source + ": frequencies must be strictly increasing");
  for (std::size_t i = 1; i < n; ++i) {
    const double d = file.freqs[i] - file.freqs[i - 1];
    if (!(d > 0.0)) throw InvalidArgument(source + ": frequencies must be strictly increasing");
    if (std::abs(d - step) > tolerance * step)
      throw InvalidArgument(source + ": non-uniform frequency grid at row " + std::to_string(i + 1));
  }
}

void validate_series(const SpectrumSeries& series, double tolerance) {
  if (series.empty()) return;
  const auto& ref = series.files.front();
  const std::size_t n = ref.size();
  const double step = n > 1 ? (ref.freqs.back() - ref.freqs.front()) / static_cast<double>(n - 1) : 1.0;
  for (const auto& f : series.files) {
    if (f.size() != n)
      throw InvalidArgument("spectrum file " + std::to_string(f.index) + " has " +
                            std::to_string(f.size()) + " points, expected " + std::to_string(n));
    if (std::abs(f.freqs.front() - ref.freqs.front()) > tolerance * step ||
        std::abs(f.freqs.back() - ref.freqs.back()) > tolerance * step)
      throw InvalidArgument("spectrum file " + std::to_string(f.index) +
                            " uses a different frequency grid");
  }
}

SpectrumSeries load_spectra(const std::filesystem::path& directory, const LoadOptions& options) {
  if (!std::filesystem::is_directory(directory))
    throw IoError("not a directory: " + directory.string());
  std::vector<std::pair<std::uint64_t, std::filesystem::path>> entries;
  for (const auto& e : std::filesystem::directory_iterator(directory)) {
    if (!e.is_regular_file()) continue;
    if (auto stem = numeric_stem(e.path())) entries.emplace_back(*stem, e.path());
  }
  if (entries.empty()) throw InvalidArgument("no integer-named spectrum files in " + directory.string());
  std::sort(entries.begin(), entries.end());

  SpectrumSeries series;
  series.files.reserve(entries.size());
  for (const auto& [stem, path] : entries) {
    auto file = load_spectrum_file(path, options);
    file.index = static_cast<std::size_t>(stem);
    series.files.push_back(std::move(file));
  }
  validate_series(series, options.grid_tolerance);
  return series;
}

SpectrumSeries moving_average(const SpectrumSeries& series, std::size_t window) {
  if (window == 0) throw InvalidArgument("moving_average: window must be at least 1");
  if (window > series.size())
    throw InvalidArgument("moving_average: window " + std::to_string(window) + " exceeds " +
                          std::to_string(series.size()) + " files");
  const std::size_t m = series.points_per_file();
  const std::size_t n_out = series.size() - window + 1;
  SpectrumSeries out;
  out.files.reserve(n_out);
  const double inv = 1.0 / static_cast<double>(window);
  for (std::size_t n = 0; n < n_out; ++n) {
    SpectrumFile avg;
    avg.freqs = series.files[n].freqs;
    avg.amps.assign(m, 0.0);
    avg.index = n;
    for (std::size_t i = 0; i < window; ++i) {
      const auto& src = series.files[n + i].amps;
      if (src.size() != m) throw InvalidArgument("moving_average: inconsistent file lengths");
      for (std::size_t k = 0; k < m; ++k) avg.amps[k] += src[k];
    }
    for (double& a : avg.amps) a *= inv;
    out.files.push_back(std::move(avg));
  }
  return out;
}

SpectrumFile subtract_noise_floor(const SpectrumFile& spectrum, IndexRange range) {
  if (range.last < range.first) throw InvalidArgument("noise floor range is empty");
  if (range.last >= spectrum.size())
    throw InvalidArgument("noise floor range [" + std::to_string(range.first) + ", " +
                          std::to_string(range.last) + "] exceeds spectrum length " +
                          std::to_string(spectrum.size()));
  double sum = 0.0;
  for (std::size_t k = range.first; k <= range.last; ++k) sum += spectrum.amps[k];
  const double floor = sum / static_cast<double>(range.last - range.first + 1);
  SpectrumFile out = spectrum;
  for (double& a : out.amps) a -= floor;
  return out;
}

void write_spectrum_file(const std::filesystem::path& path, const SpectrumFile& spectrum) {
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw IoError("cannot open " + path.string() + " for writing");
  char buf[96];
  for (std::size_t k = 0; k < spectrum.size(); ++k) {
    std::snprintf(buf, sizeof buf, "%.6f\t%.9g\n", spectrum.freqs[k], spectrum.amps[k]);
    f << buf;
  }
  if (!f) throw IoError("write failed for " + path.string());
}

void SyntheticConfig::validate() const {
  if (n_files == 0) throw InvalidArgument("synthetic: n_files must be positive");
  if (points_per_file < 2) throw InvalidArgument("synthetic: need at least two points per file");
  if (!(bin_spacing_hz > 0.0)) throw InvalidArgument("synthetic: bin spacing must be positive");
  if (!(peak_center_bin >= 0.0 && peak_center_bin <= static_cast<double>(points_per_file - 1)))
    throw InvalidArgument("synthetic: peak center outside the spectrum");
  if (!(peak_linewidth_bins > 0.0)) throw InvalidArgument("synthetic: linewidth must be positive");
  if (peak_amp < 0.0 || noise_floor_amp < 0.0)
    throw InvalidArgument("synthetic: amplitudes must be nonnegative");
  if (floor_jitter < 0.0 || floor_jitter > 1.0)
    throw InvalidArgument("synthetic: floor jitter must lie in [0, 1]");
  for (const auto& s : switches) {
    if (s.file_index >= n_files) throw InvalidArgument("synthetic: switch beyond last file");
    const double c = peak_center_bin + s.bin_shift;
    if (c < 0.0 || c > static_cast<double>(points_per_file - 1))
      throw InvalidArgument("synthetic: switch moves the peak outside the spectrum");
  }
}

double synthetic_peak_center(const SyntheticConfig& cfg, std::size_t index) {
  double center = cfg.peak_center_bin;
  for (const auto& s : cfg.switches) {
    if (index < s.file_index) continue;
    const std::size_t since = index - s.file_index;
    if (s.relaxation_files == 0) {
      center += s.bin_shift;
    } else if (since < s.relaxation_files) {
      center += s.bin_shift *
                (1.0 - static_cast<double>(since) / static_cast<double>(s.relaxation_files));
    }
  }
  return center;
}

SpectrumSeries generate_synthetic(const SyntheticConfig& cfg) {
  cfg.validate();
  const std::size_t m = cfg.points_per_file;
  // Zero-centred grid, like demodulated acquisitions.
  std::vector<double> freqs(m);
  const double mid = static_cast<double>(m - 1) / 2.0;
  for (std::size_t k = 0; k < m; ++k) freqs[k] = (static_cast<double>(k) - mid) * cfg.bin_spacing_hz;

  SpectrumSeries series;
  series.files.reserve(cfg.n_files);
  for (std::size_t i = 0; i < cfg.n_files; ++i) {
    Rng rng(derive_stream_seed(cfg.seed, i));
    const double center = synthetic_peak_center(cfg, i);
    SpectrumFile f;
    f.freqs = freqs;
    f.index = i;
    f.amps.resize(m);
    for (std::size_t k = 0; k < m; ++k) {
      const double x = (static_cast<double>(k) - center) / cfg.peak_linewidth_bins;
      const double jitter = cfg.floor_jitter * (2.0 * rng.uniform01() - 1.0);
      f.amps[k] = cfg.noise_floor_amp * (1.0 + jitter) + cfg.peak_amp / (1.0 + x * x);
    }
    series.files.push_back(std::move(f));
  }
  return series;
}

}  // namespace qsound::sonify
