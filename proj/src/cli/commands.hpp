#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "qsound/lg.hpp"
#include "qsound/qmusic.hpp"
#include "qsound/sonify/pipeline.hpp"
#include "qsound/sonify/spectrum.hpp"

namespace qsound::cli {

namespace fs = std::filesystem;

/// Parses "1/3", "0.712" or "1" into a number.
double parse_fraction(const std::string& text);

struct LgRunOptions {
  double theta_over_pi = 1.0 / 3.0;
  std::size_t shots = lg::kDefaultShots;
  std::uint64_t seed = 0;
  std::optional<double> noise_p;
  fs::path out_dir = "lg_run";
};

/// Writes C21.csv, C32.csv, C31.csv, k_report.txt, cumulative_k.csv and manifest.txt.
lg::KStatistic cmd_lg_run(const LgRunOptions& opt);

struct LgTableOptions {
  std::size_t shots = lg::kDefaultShots;
  std::uint64_t seed = 0;
  std::optional<double> noise_p;
  fs::path out = "k_table.csv";
};

/// Writes the table CSV plus `<stem>.manifest.txt` beside it.
std::vector<lg::TableRow> cmd_lg_table(const LgTableOptions& opt);

struct LgAnalyzeOptions {
  fs::path c21, c32, c31;
  std::optional<double> theta_over_pi;
  fs::path out_dir = "lg_analysis";
};

/// K analysis of imported record CSVs (e.g. hardware runs).
lg::KStatistic cmd_lg_analyze(const LgAnalyzeOptions& opt);

struct SonifyOptions {
  std::optional<fs::path> in_dir;
  std::optional<sonify::SyntheticConfig> synthetic;
  sonify::SonifyConfig config;
  sonify::LoadOptions load;
  sonify::SpectrogramParams spectrogram;
  double jump_threshold_hz = 15.0;
  /// Detector overrides; 0 keeps the defaults scaled to the file duration.
  std::size_t confirm_frames = 0;
  std::size_t smooth_frames = 0;
  std::optional<unsigned> resample_to;
  unsigned threads = 1;
  bool metadata_only = false;
  fs::path out_dir = "sonify_out";
};

struct SonifySummary {
  std::size_t n_files = 0;
  std::size_t points_per_file = 0;
  double duration_s = 0.0;
  double median_dominant_hz = 0.0;
  std::vector<sonify::FrequencySwitch> events;
};

/// Writes sound.wav, spectrogram.csv, spectrogram.png, events.csv,
/// summary.txt and manifest.txt (only the last two with metadata_only).
SonifySummary cmd_sonify(const SonifyOptions& opt);

struct GenSynthOptions {
  sonify::SyntheticConfig synthetic;
  fs::path out_dir = "synthetic";
};

/// Writes 0.txt … (n-1).txt and manifest.txt.
void cmd_gen_synth(const GenSynthOptions& opt);

struct MovementSource {
  std::string name;
  std::array<fs::path, 3> records;  ///< C21, C32, C31
};

/// Record paths inside an lg-run output directory.
MovementSource movement_from_lg_run(const fs::path& dir);

struct ComposeOptions {
  std::vector<MovementSource> movements;
  std::size_t shots = 0;  ///< 0: use every shot in the files
  bool truncate = false;  ///< allow longer files and play the first `shots`
  std::string scale = "eb-dorian";
  qmusic::ShepardParams params;
  double gap_s = 2.0;
  bool shuffle = false;
  std::uint64_t seed = 0;
  fs::path out_dir = "compose_out";
};

/// Writes movement_<i>.wav per movement, composition.wav and manifest.txt.
qmusic::Composition cmd_compose(const ComposeOptions& opt);

/// Entry point of the `qsound` binary. Returns the process exit code.
int run_cli(int argc, char** argv);

}  // namespace qsound::cli
