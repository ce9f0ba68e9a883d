#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace qsound::sonify {

/// One voltage-vs-frequency spectrum. Frequencies are uniformly spaced.
struct SpectrumFile {
  std::vector<double> freqs;
  std::vector<double> amps;
  std::size_t index = 0;

  std::size_t size() const { return amps.size(); }
};

/// Ordered spectra sharing one frequency grid.
struct SpectrumSeries {
  std::vector<SpectrumFile> files;

  std::size_t size() const { return files.size(); }
  bool empty() const { return files.empty(); }
  std::size_t points_per_file() const { return files.empty() ? 0 : files.front().size(); }
};

/// Which tab-separated column holds what. Columns are 0-based.
struct ColumnMap {
  std::size_t freq_col = 0;
  std::size_t amp_col = 1;
};

struct LoadOptions {
  ColumnMap columns;
  /// Leading rows to ignore in every file (e.g. a header row).
  std::size_t skip_rows = 0;
  /// Allowed deviation of each frequency step from the mean step, relative.
  double grid_tolerance = 1e-2;
};

/// Loads every file with an integer stem (e.g. "17.txt") from `directory`,
/// ordered by numeric stem. Throws ParseError with file/line context for
/// malformed rows and InvalidArgument for grid inconsistencies.
SpectrumSeries load_spectra(const std::filesystem::path& directory, const LoadOptions& options = {});

/// Parses a single spectrum file.
SpectrumFile load_spectrum_file(const std::filesystem::path& path, const LoadOptions& options = {});

/// Throws unless freqs are strictly increasing and uniformly spaced.
void validate_grid(const SpectrumFile& file, double tolerance, const std::string& source);

/// Throws unless all files share the first file's length and grid.
void validate_series(const SpectrumSeries& series, double tolerance = 1e-2);

/// Output file n is the amplitude-wise mean of input files n..n+window-1.
SpectrumSeries moving_average(const SpectrumSeries& series, std::size_t window);

/// Inclusive 0-based index range [first, last].
struct IndexRange {
  std::size_t first = 0;
  std::size_t last = 0;
};

/// Subtracts the mean amplitude over `range` from every point.
SpectrumFile subtract_noise_floor(const SpectrumFile& spectrum, IndexRange range);

/// Writes one spectrum as tab-separated "freq\tamp" rows.
void write_spectrum_file(const std::filesystem::path& path, const SpectrumFile& spectrum);

// --- synthetic data -------------------------------------------------------

struct SwitchEvent {
  std::size_t file_index = 0;
  double bin_shift = 0.0;
  /// Files over which the shift decays linearly back to zero; 0 keeps it.
  std::size_t relaxation_files = 0;
};

struct SyntheticConfig {
  std::size_t n_files = 200;
  std::size_t points_per_file = 4095;
  double bin_spacing_hz = 6.706;
  double peak_center_bin = 2047.0;
  double peak_linewidth_bins = 2.0;  ///< Lorentzian half-width at half maximum
  double peak_amp = 1.0;
  double noise_floor_amp = 0.05;
  double floor_jitter = 0.1;  ///< relative uniform jitter of the floor
  std::vector<SwitchEvent> switches;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Peak center of file `index`, including any active switch offsets.
double synthetic_peak_center(const SyntheticConfig& cfg, std::size_t index);

/// Noise floor plus a Lorentzian mechanical peak per file; deterministic per seed.
SpectrumSeries generate_synthetic(const SyntheticConfig& cfg);

}  // namespace qsound::sonify
