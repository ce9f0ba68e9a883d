#include "commands.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include "manifest.hpp"
#include "qsound/error.hpp"
#include "qsound/sonify/spectral.hpp"
#include "qsound/wav.hpp"

namespace qsound::cli {
namespace {

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw IoError("cannot create output directory " + dir.string());
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open " + path.string() + " for writing");
  f << text;
  if (!f) throw IoError("write failed for " + path.string());
}

std::string fmt(const char* spec, double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

double parse_number(const std::string& text) {
  double v = 0.0;
  const char* b = text.data();
  const char* e = b + text.size();
  auto [ptr, ec] = std::from_chars(b, e, v);
  if (ec != std::errc{} || ptr != e || !std::isfinite(v))
    throw InvalidArgument("not a number: '" + text + "'");
  return v;
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  std::istringstream ss(text);
  while (std::getline(ss, cur, sep)) parts.push_back(cur);
  if (!text.empty() && text.back() == sep) parts.emplace_back();
  return parts;
}

std::pair<double, double> parse_pair(const std::string& text, const char* what) {
  const auto parts = split(text, ':');
  if (parts.size() != 2) throw InvalidArgument(std::string(what) + " must look like A:B, got '" + text + "'");
  return {parse_number(parts[0]), parse_number(parts[1])};
}

std::size_t to_index(double v, const char* what) {
  if (v < 0.0 || v != std::floor(v)) throw InvalidArgument(std::string(what) + " must be a nonnegative integer");
  return static_cast<std::size_t>(v);
}

std::string join_indices(const std::vector<std::size_t>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + std::to_string(v[i]);
  return out;
}

std::vector<int> read_voice_bits(const fs::path& path, std::size_t shots, bool truncate) {
  if (!fs::exists(path)) throw IoError("missing voice record file: " + path.string());
  if (shots == 0) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open measurement file " + path.string());
    std::stringstream ss;
    ss << f.rdbuf();
    return lg::parse_record_bits(ss.str(), path.string());
  }
  if (!truncate) return qmusic::parse_measurement_csv(path, shots);
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open measurement file " + path.string());
  std::stringstream ss;
  ss << f.rdbuf();
  auto bits = lg::parse_record_bits(ss.str(), path.string());
  if (bits.size() < shots)
    throw ParseError(path.string(), 2 * bits.size(),
                     "file holds " + std::to_string(bits.size()) + " shots, fewer than " +
                         std::to_string(shots));
  bits.resize(shots);
  return bits;
}

struct SeriesShape {
  std::size_t n_files = 0;
  std::size_t points = 0;
};

SeriesShape probe_directory(const fs::path& dir, const sonify::LoadOptions& load) {
  if (!fs::is_directory(dir)) throw IoError("not a directory: " + dir.string());
  std::vector<std::pair<std::uint64_t, fs::path>> entries;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (!e.is_regular_file()) continue;
    const auto stem = e.path().stem().string();
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(stem.data(), stem.data() + stem.size(), v);
    if (!stem.empty() && ec == std::errc{} && ptr == stem.data() + stem.size()) entries.emplace_back(v, e.path());
  }
  if (entries.empty()) throw InvalidArgument("no integer-named spectrum files in " + dir.string());
  std::sort(entries.begin(), entries.end());
  return SeriesShape{entries.size(), sonify::load_spectrum_file(entries.front().second, load).size()};
}

}  // namespace

double parse_fraction(const std::string& text) {
  const auto slash = text.find('/');
  if (slash == std::string::npos) return parse_number(text);
  const double num = parse_number(text.substr(0, slash));
  const double den = parse_number(text.substr(slash + 1));
  if (den == 0.0) throw InvalidArgument("zero denominator in '" + text + "'");
  return num / den;
}

lg::KStatistic cmd_lg_run(const LgRunOptions& opt) {
  lg::ExperimentConfig cfg{lg::RotationAngle::from_pi_fraction(opt.theta_over_pi), opt.shots, opt.seed,
                           opt.noise_p};
  cfg.validate();
  ensure_dir(opt.out_dir);
  const auto records = lg::run_experiment(cfg, /*parallel=*/true);
  const auto k = lg::k_statistic(records);
  const double k_theor = lg::k_theoretical(cfg.theta);

  RunManifest manifest("lg-run");
  manifest.set("theta_over_pi", opt.theta_over_pi)
      .set("shots", std::to_string(opt.shots))
      .set("seed", std::to_string(opt.seed))
      .set("noise_p", opt.noise_p ? fmt("%.10g", *opt.noise_p) : "none");
  for (const auto* rs : {&records.c21, &records.c32, &records.c31}) {
    const auto label = std::string(lg::to_string(rs->label));
    const auto path = opt.out_dir / (label + ".csv");
    lg::write_record_csv(path, *rs);
    manifest.set("stream_seed." + label, std::to_string(lg::stream_seed(opt.seed, rs->label)));
    manifest.add_output(path);
  }
  write_text(opt.out_dir / "k_report.txt", lg::format_k_report(opt.theta_over_pi, k, k_theor, opt.shots));
  write_text(opt.out_dir / "cumulative_k.csv",
             lg::format_cumulative_csv(lg::cumulative_k(records.c21, records.c32, records.c31)));
  manifest.add_output(opt.out_dir / "k_report.txt").add_output(opt.out_dir / "cumulative_k.csv");
  manifest.set("k_exp", k.k).set("k_theor", k_theor);
  manifest.write(opt.out_dir / "manifest.txt");
  return k;
}

std::vector<lg::TableRow> cmd_lg_table(const LgTableOptions& opt) {
  if (opt.shots == 0) throw InvalidArgument("shots must be at least 1");
  if (opt.noise_p && !(*opt.noise_p >= 0.0 && *opt.noise_p <= 1.0))
    throw InvalidArgument("noise_p must lie in [0, 1]");
  const auto rows = lg::run_table(opt.shots, opt.seed, opt.noise_p);
  if (opt.out.has_parent_path()) ensure_dir(opt.out.parent_path());
  write_text(opt.out, lg::format_table_csv(rows));

  RunManifest manifest("lg-table");
  manifest.set("shots", std::to_string(opt.shots))
      .set("seed", std::to_string(opt.seed))
      .set("noise_p", opt.noise_p ? fmt("%.10g", *opt.noise_p) : "none")
      .add_output(opt.out);
  auto mpath = opt.out;
  mpath.replace_filename(opt.out.stem().string() + ".manifest.txt");
  manifest.write(mpath);
  return rows;
}

lg::KStatistic cmd_lg_analyze(const LgAnalyzeOptions& opt) {
  const auto c21 = lg::read_record_csv(opt.c21, lg::IntervalLabel::C21);
  const auto c32 = lg::read_record_csv(opt.c32, lg::IntervalLabel::C32);
  const auto c31 = lg::read_record_csv(opt.c31, lg::IntervalLabel::C31);
  const auto k = lg::k_statistic(lg::ExperimentRecords{c21, c32, c31});
  ensure_dir(opt.out_dir);

  const double theta = opt.theta_over_pi.value_or(std::nan(""));
  const double k_theor = opt.theta_over_pi ? lg::k_theoretical(lg::RotationAngle::from_pi_fraction(theta))
                                           : std::nan("");
  write_text(opt.out_dir / "k_report.txt", lg::format_k_report(theta, k, k_theor, c21.shots.size()));
  RunManifest manifest("lg-analyze");
  manifest.add_input(opt.c21).add_input(opt.c32).add_input(opt.c31).set("seed", "none");
  if (c21.shots.size() == c32.shots.size() && c21.shots.size() == c31.shots.size()) {
    write_text(opt.out_dir / "cumulative_k.csv", lg::format_cumulative_csv(lg::cumulative_k(c21, c32, c31)));
    manifest.add_output(opt.out_dir / "cumulative_k.csv");
  }
  manifest.add_output(opt.out_dir / "k_report.txt").set("k_exp", k.k);
  manifest.write(opt.out_dir / "manifest.txt");
  return k;
}

SonifySummary cmd_sonify(const SonifyOptions& opt) {
  if (opt.in_dir.has_value() == opt.synthetic.has_value())
    throw InvalidArgument("sonify needs exactly one input: --in DIR or --synthetic");
  ensure_dir(opt.out_dir);
  RunManifest manifest("sonify");
  const auto& cfg = opt.config;
  manifest.set("window", std::to_string(cfg.window))
      .set("noise_floor_range", std::to_string(cfg.noise_floor_range.first) + ":" +
                                    std::to_string(cfg.noise_floor_range.last))
      .set("sample_rate", cfg.sample_rate)
      .set("band", fmt("%g", cfg.band_low_hz) + ":" + fmt("%g", cfg.band_high_hz))
      .set("seed", std::to_string(cfg.seed))
      .set("skip_rows", std::to_string(opt.load.skip_rows))
      .set("column_map", std::to_string(opt.load.columns.freq_col) + ":" +
                             std::to_string(opt.load.columns.amp_col));
  if (opt.in_dir) manifest.add_input(*opt.in_dir);
  if (opt.synthetic) {
    manifest.set("input", "synthetic")
        .set("synthetic.n_files", std::to_string(opt.synthetic->n_files))
        .set("synthetic.points_per_file", std::to_string(opt.synthetic->points_per_file))
        .set("synthetic.peak_center_bin", opt.synthetic->peak_center_bin)
        .set("synthetic.seed", std::to_string(opt.synthetic->seed));
  }

  SonifySummary summary;
  if (opt.metadata_only) {
    SeriesShape shape;
    if (opt.in_dir) shape = probe_directory(*opt.in_dir, opt.load);
    else shape = SeriesShape{opt.synthetic->n_files, opt.synthetic->points_per_file};
    cfg.validate(shape.points);
    summary.n_files = shape.n_files;
    summary.points_per_file = shape.points;
    summary.duration_s = sonify::sonification_duration_s(shape.n_files, shape.points, cfg.window, cfg.sample_rate);
  } else {
    const auto series = opt.in_dir ? sonify::load_spectra(*opt.in_dir, opt.load)
                                   : sonify::generate_synthetic(*opt.synthetic);
    const auto ts = sonify::sonify_series(series, cfg, opt.threads);
    summary.n_files = series.size();
    summary.points_per_file = series.points_per_file();
    summary.duration_s = ts.duration_s();

    const auto sg = sonify::spectrogram(ts.samples, ts.sample_rate, opt.spectrogram);
    auto track = sonify::dominant_frequency_track(sg);
    std::nth_element(track.begin(), track.begin() + static_cast<std::ptrdiff_t>(track.size() / 2), track.end());
    summary.median_dominant_hz = track[track.size() / 2];

    auto detect = sonify::switch_detect_params(cfg, summary.points_per_file, opt.spectrogram,
                                               opt.jump_threshold_hz);
    if (opt.confirm_frames > 0) detect.confirm_frames = opt.confirm_frames;
    if (opt.smooth_frames > 0) detect.smooth_frames = opt.smooth_frames;
    summary.events = sonify::detect_frequency_switch(sg, detect);

    const auto wav_path = opt.out_dir / "sound.wav";
    if (opt.resample_to) {
      const auto rate = static_cast<unsigned>(std::lround(cfg.sample_rate));
      if (std::abs(cfg.sample_rate - rate) > 1e-9) throw InvalidArgument("--resample needs an integer sample rate");
      write_wav(wav_path, sonify::resample(ts.samples, rate, *opt.resample_to), *opt.resample_to);
      manifest.set("wav_rate", std::to_string(*opt.resample_to));
    } else {
      write_wav(wav_path, ts.samples, static_cast<std::uint32_t>(std::lround(cfg.sample_rate)));
      manifest.set("wav_rate", cfg.sample_rate);
    }
    sonify::write_spectrogram_csv(opt.out_dir / "spectrogram.csv", sg);
    sonify::write_spectrogram_png(opt.out_dir / "spectrogram.png", sg);
    write_text(opt.out_dir / "events.csv", sonify::format_events_csv(summary.events));
    manifest.add_output(wav_path)
        .add_output(opt.out_dir / "spectrogram.csv")
        .add_output(opt.out_dir / "spectrogram.png")
        .add_output(opt.out_dir / "events.csv");
  }

  std::string text;
  text += "n_files=" + std::to_string(summary.n_files) + "\n";
  text += "points_per_file=" + std::to_string(summary.points_per_file) + "\n";
  text += "samples_per_file=" + std::to_string(sonify::samples_per_file(summary.points_per_file)) + "\n";
  text += "duration_s=" + fmt("%.3f", summary.duration_s) + "\n";
  text += "duration_h=" + fmt("%.3f", summary.duration_s / 3600.0) + "\n";
  if (!opt.metadata_only) {
    text += "median_dominant_hz=" + fmt("%.3f", summary.median_dominant_hz) + "\n";
    text += "events=" + std::to_string(summary.events.size()) + "\n";
  }
  write_text(opt.out_dir / "summary.txt", text);
  manifest.set("metadata_only", opt.metadata_only ? "true" : "false")
      .set("duration_s", summary.duration_s)
      .add_output(opt.out_dir / "summary.txt");
  manifest.write(opt.out_dir / "manifest.txt");
  return summary;
}

void cmd_gen_synth(const GenSynthOptions& opt) {
  const auto series = sonify::generate_synthetic(opt.synthetic);
  ensure_dir(opt.out_dir);
  for (const auto& f : series.files)
    sonify::write_spectrum_file(opt.out_dir / (std::to_string(f.index) + ".txt"), f);
  RunManifest manifest("gen-synth");
  const auto& s = opt.synthetic;
  manifest.set("n_files", std::to_string(s.n_files))
      .set("points_per_file", std::to_string(s.points_per_file))
      .set("bin_spacing_hz", s.bin_spacing_hz)
      .set("peak_center_bin", s.peak_center_bin)
      .set("peak_linewidth_bins", s.peak_linewidth_bins)
      .set("peak_amp", s.peak_amp)
      .set("noise_floor_amp", s.noise_floor_amp)
      .set("floor_jitter", s.floor_jitter)
      .set("seed", std::to_string(s.seed));
  for (std::size_t i = 0; i < s.switches.size(); ++i) {
    const auto& sw = s.switches[i];
    manifest.set("switch." + std::to_string(i), std::to_string(sw.file_index) + ":" + fmt("%g", sw.bin_shift) +
                                                   ":" + std::to_string(sw.relaxation_files));
  }
  manifest.write(opt.out_dir / "manifest.txt");
}

MovementSource movement_from_lg_run(const fs::path& dir) {
  return MovementSource{dir.filename().string(), {dir / "C21.csv", dir / "C32.csv", dir / "C31.csv"}};
}

qmusic::Composition cmd_compose(const ComposeOptions& opt) {
  if (opt.movements.empty()) throw InvalidArgument("compose needs at least one movement");
  const auto ring = qmusic::ScaleRing::parse(opt.scale);
  opt.params.validate();

  std::vector<qmusic::Movement> movements;
  RunManifest manifest("compose");
  for (const auto& src : opt.movements) {
    const auto b21 = read_voice_bits(src.records[0], opt.shots, opt.truncate);
    const auto b32 = read_voice_bits(src.records[1], opt.shots, opt.truncate);
    const auto b31 = read_voice_bits(src.records[2], opt.shots, opt.truncate);
    movements.push_back(qmusic::make_movement(src.name, b21, b32, b31));
    for (const auto& p : src.records) manifest.add_input(p);
  }

  std::optional<std::uint64_t> shuffle_seed;
  if (opt.shuffle) shuffle_seed = opt.seed;
  auto comp = qmusic::compose(movements, ring, opt.params, opt.gap_s, shuffle_seed);

  ensure_dir(opt.out_dir);
  const auto rate = static_cast<std::uint32_t>(std::lround(opt.params.render_rate));
  for (std::size_t i = 0; i < movements.size(); ++i) {
    const auto path = opt.out_dir / ("movement_" + std::to_string(i) + ".wav");
    write_wav(path, comp.movement_audio[i], rate);
    manifest.set("movement." + std::to_string(i) + ".name", movements[i].name)
        .set("movement." + std::to_string(i) + ".k", movements[i].k_label)
        .set("movement." + std::to_string(i) + ".shots", std::to_string(movements[i].n_shots))
        .add_output(path);
  }
  write_wav(opt.out_dir / "composition.wav", comp.samples, rate);
  manifest.add_output(opt.out_dir / "composition.wav")
      .set("scale", opt.scale)
      .set("tempo_s", opt.params.note_dur_s)
      .set("center_midi", opt.params.center_midi)
      .set("octaves", std::to_string(opt.params.octave_lo) + ":" + std::to_string(opt.params.octave_hi))
      .set("gap_s", opt.gap_s)
      .set("shuffle", opt.shuffle ? "true" : "false")
      .set("seed", std::to_string(opt.seed))
      .set("order", join_indices(comp.order))
      .set("duration_s", static_cast<double>(comp.samples.size()) / opt.params.render_rate);
  manifest.write(opt.out_dir / "manifest.txt");
  return comp;
}

namespace {

struct SynthFlags {
  std::size_t n_files = 200;
  std::size_t points = 4095;
  double bin_spacing = 6.706;
  std::optional<double> peak_hz;
  std::optional<double> peak_bin;
  double linewidth = 2.0;
  double peak_amp = 1.0;
  double floor_amp = 0.05;
  double floor_jitter = 0.1;
  std::vector<std::string> switches;  // file:shift_hz[:relax_files]
  std::optional<std::uint64_t> seed;

  void add_to(CLI::App* app) {
    app->add_option("--n-files", n_files, "Number of synthetic spectra")->check(CLI::PositiveNumber);
    app->add_option("--points", points, "Points per spectrum")->check(CLI::Range(2, 1 << 24));
    app->add_option("--bin-spacing", bin_spacing, "Frequency step of the spectra (Hz)");
    app->add_option("--peak-hz", peak_hz, "Audio frequency the peak lands on after playback");
    app->add_option("--peak-bin", peak_bin, "Peak centre as a spectral bin index");
    app->add_option("--linewidth-bins", linewidth, "Lorentzian half-width (bins)");
    app->add_option("--peak-amp", peak_amp, "Peak amplitude");
    app->add_option("--floor-amp", floor_amp, "Noise-floor amplitude");
    app->add_option("--floor-jitter", floor_jitter, "Relative noise-floor jitter");
    app->add_option("--switch", switches, "Frequency switch FILE:SHIFT_HZ[:RELAX_FILES] (audio Hz)");
    app->add_option("--synth-seed", seed, "Seed for the synthetic series (defaults to --seed)");
  }

  sonify::SyntheticConfig build(double sample_rate, std::uint64_t fallback_seed) const {
    sonify::SyntheticConfig c;
    c.n_files = n_files;
    c.points_per_file = points;
    c.bin_spacing_hz = bin_spacing;
    if (peak_hz && peak_bin) throw InvalidArgument("give either --peak-hz or --peak-bin, not both");
    if (peak_hz) c.peak_center_bin = sonify::bin_for_audio_frequency(*peak_hz, points, sample_rate);
    else if (peak_bin) c.peak_center_bin = *peak_bin;
    else c.peak_center_bin = static_cast<double>(points - 1) / 2.0;
    c.peak_linewidth_bins = linewidth;
    c.peak_amp = peak_amp;
    c.noise_floor_amp = floor_amp;
    c.floor_jitter = floor_jitter;
    c.seed = seed.value_or(fallback_seed);
    for (const auto& s : switches) {
      const auto parts = split(s, ':');
      if (parts.size() < 2 || parts.size() > 3) throw InvalidArgument("--switch must be FILE:SHIFT_HZ[:RELAX_FILES]");
      sonify::SwitchEvent ev;
      ev.file_index = to_index(parse_number(parts[0]), "switch file index");
      ev.bin_shift = sonify::bin_for_audio_frequency(parse_number(parts[1]), points, sample_rate);
      if (parts.size() == 3) ev.relaxation_files = to_index(parse_number(parts[2]), "relaxation files");
      c.switches.push_back(ev);
    }
    return c;
  }
};

void add_config_option(CLI::App* sub) {
  sub->add_option("--config", "Flat key=value config file (keys are long flag names); flags override it");
}

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// Flat config file to flag tokens: "key = value" becomes "--key value",
// "key = true" becomes "--key" and "key = false" is dropped.
std::vector<std::string> config_tokens(const fs::path& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open config file " + path.string());
  std::vector<std::string> out;
  std::string line;
  std::size_t n = 0;
  while (std::getline(f, line)) {
    ++n;
    line = trim(line);
    if (line.empty() || line[0] == '#' || line[0] == ';') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError(path.string(), n, "expected key=value");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.rfind("--", 0) == 0) key = key.substr(2);
    if (key.empty() || key == "config") throw ParseError(path.string(), n, "bad key '" + key + "'");
    if (value.size() >= 2 && (value.front() == '"' || value.front() == '\'') && value.back() == value.front())
      value = value.substr(1, value.size() - 2);
    if (value == "false") continue;
    out.push_back("--" + key);
    if (value != "true") out.push_back(value);
  }
  return out;
}

// Splices the tokens of a subcommand's --config file in front of its flags.
std::vector<std::string> expand_config(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  std::optional<std::string> file;
  std::vector<std::string> rest;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      file = args[++i];
    } else if (args[i].rfind("--config=", 0) == 0) {
      file = args[i].substr(9);
    } else {
      rest.push_back(args[i]);
    }
  }
  if (!file || rest.empty()) return args;
  const auto tokens = config_tokens(*file);
  rest.insert(rest.begin() + 1, tokens.begin(), tokens.end());
  return rest;
}

}  // namespace

int run_cli(int argc, char** argv) {
  CLI::App app{"qsound: Leggett-Garg qubit simulation, data sonification and Shepard-tone composition"};
  app.require_subcommand(1);
  // A value given twice (config file, then flag) keeps the flag's.
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.set_version_flag("--version", tool_version());

  // lg-run
  LgRunOptions run_opt;
  std::string run_theta = "1/3";
  auto* run = app.add_subcommand("lg-run", "Simulate one LG experiment and write records and K report");
  add_config_option(run);
  run->add_option("--theta", run_theta, "Interval ΩΔt as a multiple of π (e.g. 1/3, 0.712)");
  run->add_option("--shots", run_opt.shots, "Shots per record set")->check(CLI::PositiveNumber);
  run->add_option("--seed", run_opt.seed, "RNG seed");
  run->add_option("--noise-p", run_opt.noise_p, "Depolarizing probability at measurement")->check(CLI::Range(0.0, 1.0));
  run->add_option("--out", run_opt.out_dir, "Output directory");

  // lg-table
  LgTableOptions table_opt;
  auto* table = app.add_subcommand("lg-table", "Run all four reported intervals and write the K table");
  add_config_option(table);
  table->add_option("--shots", table_opt.shots, "Shots per record set")->check(CLI::PositiveNumber);
  table->add_option("--seed", table_opt.seed, "RNG seed");
  table->add_option("--noise-p", table_opt.noise_p, "Depolarizing probability")->check(CLI::Range(0.0, 1.0));
  table->add_option("--out", table_opt.out, "Output CSV path");

  // lg-analyze
  LgAnalyzeOptions analyze_opt;
  std::optional<std::string> analyze_theta;
  auto* analyze = app.add_subcommand("lg-analyze", "Compute K from existing record CSVs");
  analyze->add_option("--c21", analyze_opt.c21, "C21 record CSV")->required();
  analyze->add_option("--c32", analyze_opt.c32, "C32 record CSV")->required();
  analyze->add_option("--c31", analyze_opt.c31, "C31 record CSV")->required();
  analyze->add_option("--theta", analyze_theta, "Interval as a multiple of π, for K_theor");
  analyze->add_option("--out", analyze_opt.out_dir, "Output directory");

  // sonify
  SonifyOptions son_opt;
  SynthFlags son_synth;
  bool son_synthetic = false;
  std::string son_nfr = "1500:1800", son_band = "400:550", son_colmap = "0:1";
  std::optional<std::string> son_in;
  auto* son = app.add_subcommand("sonify", "Turn a spectrum series into audio, spectrogram and events");
  add_config_option(son);
  son->add_option("--in", son_in, "Directory of integer-named spectrum files");
  son->add_flag("--synthetic", son_synthetic, "Use a generated series instead of --in");
  son->add_option("--window", son_opt.config.window, "Moving-average length (files)")->check(CLI::PositiveNumber);
  son->add_option("--noise-floor-range", son_nfr, "Inclusive index range FIRST:LAST");
  son->add_option("--sample-rate", son_opt.config.sample_rate, "Playback sample rate (Hz)");
  son->add_option("--band", son_band, "Bandpass LOW:HIGH (Hz)");
  son->add_flag("!--no-bandpass", son_opt.config.apply_bandpass, "Skip the bandpass stage");
  son->add_option("--seed", son_opt.config.seed, "Phase RNG seed");
  son->add_option("--skip-rows", son_opt.load.skip_rows, "Header rows to skip per file");
  son->add_option("--column-map", son_colmap, "FREQ_COL:AMP_COL (0-based)");
  son->add_option("--resample", son_opt.resample_to, "Also resample the WAV to this rate (e.g. 44100)");
  son->add_option("--window-len", son_opt.spectrogram.window_len, "Spectrogram window (samples)");
  son->add_option("--hop", son_opt.spectrogram.hop, "Spectrogram hop (samples)");
  son->add_option("--fmin", son_opt.spectrogram.fmin_hz, "Spectrogram lower frequency (Hz)");
  son->add_option("--fmax", son_opt.spectrogram.fmax_hz, "Spectrogram upper frequency (Hz)");
  son->add_option("--jump-threshold", son_opt.jump_threshold_hz, "Switch detection threshold (Hz)");
  son->add_option("--confirm-frames", son_opt.confirm_frames, "Frames a jump must persist (median) to count");
  son->add_option("--smooth-frames", son_opt.smooth_frames, "Frames of power smoothing (0 = one file duration)");
  son->add_option("--threads", son_opt.threads, "Worker threads for per-file synthesis");
  son->add_flag("--metadata-only", son_opt.metadata_only, "Report durations without rendering audio");
  son->add_option("--out", son_opt.out_dir, "Output directory");
  son_synth.add_to(son);

  // gen-synth
  GenSynthOptions gen_opt;
  SynthFlags gen_synth;
  double gen_rate = 2015.0;
  std::uint64_t gen_seed = 0;
  auto* gen = app.add_subcommand("gen-synth", "Write a synthetic spectrum series to disk");
  add_config_option(gen);
  gen->add_option("--sample-rate", gen_rate, "Playback rate used to convert --peak-hz/--switch");
  gen->add_option("--seed", gen_seed, "RNG seed");
  gen->add_option("--out", gen_opt.out_dir, "Output directory");
  gen_synth.add_to(gen);

  // compose
  ComposeOptions comp_opt;
  std::vector<std::string> comp_from, comp_records;
  std::string comp_octaves = "1:9", comp_volumes = "1,1,2";
  auto* comp = app.add_subcommand("compose", "Render measurement records as a Shepard-tone composition");
  add_config_option(comp);
  comp->add_option("--from-lg-run", comp_from, "lg-run output directory (one per movement)");
  comp->add_option("--records", comp_records, "C21,C32,C31 record CSVs for one movement");
  comp->add_option("--shots", comp_opt.shots, "Shots per voice (0 = all in file)");
  comp->add_flag("--truncate", comp_opt.truncate, "Play the first --shots of longer files");
  comp->add_option("--scale", comp_opt.scale, "Scale name or 7 comma-separated pitch classes");
  comp->add_option("--tempo", comp_opt.params.note_dur_s, "Seconds per note")->check(CLI::PositiveNumber);
  comp->add_option("--center-midi", comp_opt.params.center_midi, "Centre of the Shepard spectral envelope");
  comp->add_option("--octaves", comp_octaves, "Octave range LO:HI");
  comp->add_option("--voice-volumes", comp_volumes, "Volumes of the C21,C32,C31 voices");
  comp->add_option("--gap", comp_opt.gap_s, "Silence between movements (s)");
  comp->add_flag("--shuffle", comp_opt.shuffle, "Randomize movement order (logged)");
  comp->add_option("--seed", comp_opt.seed, "Shuffle seed");
  comp->add_option("--out", comp_opt.out_dir, "Output directory");

  std::vector<std::string> args;
  try {
    args = expand_config(argc, argv);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  try {
    // CLI11 wants the arguments reversed when given as a vector.
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*run) {
      run_opt.theta_over_pi = parse_fraction(run_theta);
      const auto k = cmd_lg_run(run_opt);
      std::cout << "K_exp=" << fmt("%.6f", k.k) << " K_theor="
                << fmt("%.6f", lg::k_theoretical(lg::RotationAngle::from_pi_fraction(run_opt.theta_over_pi)))
                << " (" << lg::to_string(k.classification) << ")\n";
    } else if (*table) {
      const auto rows = cmd_lg_table(table_opt);
      std::cout << lg::format_table_csv(rows);
    } else if (*analyze) {
      if (analyze_theta) analyze_opt.theta_over_pi = parse_fraction(*analyze_theta);
      const auto k = cmd_lg_analyze(analyze_opt);
      std::cout << "K_exp=" << fmt("%.6f", k.k) << " (" << lg::to_string(k.classification) << ")\n";
    } else if (*son) {
      const auto [f0, f1] = parse_pair(son_nfr, "--noise-floor-range");
      son_opt.config.noise_floor_range = {to_index(f0, "noise floor index"), to_index(f1, "noise floor index")};
      const auto [lo, hi] = parse_pair(son_band, "--band");
      son_opt.config.band_low_hz = lo;
      son_opt.config.band_high_hz = hi;
      const auto [cf, ca] = parse_pair(son_colmap, "--column-map");
      son_opt.load.columns = {to_index(cf, "column"), to_index(ca, "column")};
      if (son_in) son_opt.in_dir = *son_in;
      if (son_synthetic) son_opt.synthetic = son_synth.build(son_opt.config.sample_rate, son_opt.config.seed);
      const auto s = cmd_sonify(son_opt);
      std::cout << "files=" << s.n_files << " duration_s=" << fmt("%.1f", s.duration_s);
      if (!son_opt.metadata_only)
        std::cout << " dominant_hz=" << fmt("%.2f", s.median_dominant_hz) << " events=" << s.events.size();
      std::cout << "\n";
    } else if (*gen) {
      gen_opt.synthetic = gen_synth.build(gen_rate, gen_seed);
      cmd_gen_synth(gen_opt);
      std::cout << "wrote " << gen_opt.synthetic.n_files << " spectra to " << gen_opt.out_dir.string() << "\n";
    } else if (*comp) {
      for (const auto& d : comp_from) comp_opt.movements.push_back(movement_from_lg_run(d));
      for (const auto& r : comp_records) {
        const auto parts = split(r, ',');
        if (parts.size() != 3) throw InvalidArgument("--records needs three comma-separated paths");
        comp_opt.movements.push_back(
            MovementSource{fs::path(parts[0]).stem().string(), {parts[0], parts[1], parts[2]}});
      }
      const auto [olo, ohi] = parse_pair(comp_octaves, "--octaves");
      comp_opt.params.octave_lo = static_cast<int>(olo);
      comp_opt.params.octave_hi = static_cast<int>(ohi);
      const auto vols = split(comp_volumes, ',');
      if (vols.size() != 3) throw InvalidArgument("--voice-volumes needs three values");
      for (std::size_t i = 0; i < 3; ++i) comp_opt.params.voice_volumes[i] = parse_number(vols[i]);
      const auto c = cmd_compose(comp_opt);
      std::cout << "movements=" << comp_opt.movements.size() << " order=" << join_indices(c.order)
                << " duration_s=" << fmt("%.2f", static_cast<double>(c.samples.size()) / comp_opt.params.render_rate)
                << "\n";
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}

}  // namespace qsound::cli
