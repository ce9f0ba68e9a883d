// Acceptance gate: one PASS/FAIL line per criterion. Exit status is the
// number of failures.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <iterator>
#include <numbers>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "commands.hpp"
#include "qsound/lg.hpp"
#include "qsound/qmusic.hpp"
#include "qsound/rng.hpp"
#include "qsound/sonify/pipeline.hpp"
#include "qsound/sonify/spectral.hpp"
#include "qsound/sonify/spectrogram.hpp"

namespace fs = std::filesystem;
using namespace qsound;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

char buf[512];

template <typename... A>
std::string fmt(const char* f, A... a) {
  std::snprintf(buf, sizeof buf, f, a...);
  return buf;
}

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

lg::ExperimentConfig at(double over_pi, std::size_t shots, std::uint64_t seed,
                        std::optional<double> noise = std::nullopt) {
  return lg::ExperimentConfig{lg::RotationAngle::from_pi_fraction(over_pi), shots, seed, noise};
}

Outcome theory_table() {
  const auto t0 = Clock::now();
  const double want[] = {1.5, 1.0, -1.0, -3.0};
  double worst = 0;
  for (int i = 0; i < 4; ++i)
    worst = std::max(worst, std::abs(lg::k_theoretical(lg::RotationAngle::from_pi_fraction(lg::kTableThetaOverPi[i])) - want[i]));
  const double ms = ms_since(t0);
  return {worst <= 2e-3 && ms < 1.0, fmt("max |K_theor - table| = %.2e (tol 2e-3), %.4f ms (< 1 ms)", worst, ms)};
}

Outcome ideal_violation() {
  const auto t0 = Clock::now();
  double sum = 0;
  int above = 0;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    const double k = lg::k_statistic(lg::run_experiment(at(1.0 / 3.0, 500, seed))).k;
    sum += k;
    above += k > 1.0;
  }
  const double ms = ms_since(t0);
  const double mean = sum / 100;
  return {std::abs(mean - 1.5) <= 0.05 && above >= 99 && ms < 1000,
          fmt("mean K = %.4f (1.5 +/- 0.05), K > 1 in %d/100 (>= 99), %.1f ms (< 1 s)", mean, above, ms)};
}

Outcome noise_emulation() {
  const double p = 0.107;
  double sum = 0;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) sum += lg::k_statistic(lg::run_experiment(at(1.0 / 3.0, 500, seed, p))).k;
  const double mean = sum / 100;
  const double target = (1 - p) * 1.5;
  return {std::abs(mean - target) <= 0.05, fmt("mean K = %.4f, target (1 - p)*1.5 = %.4f +/- 0.05; hardware 1.339", mean, target)};
}

Outcome cumulative_convergence() {
  const auto t0 = Clock::now();
  int good = 0;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    const auto r = lg::run_experiment(at(1.0 / 3.0, 500, seed));
    const auto series = lg::cumulative_k(r.c21, r.c32, r.c31);
    good += std::all_of(series.begin() + 149, series.end(), [](const auto& p) { return p.k > 1.0; });
  }
  const double ms = ms_since(t0);
  return {good >= 95 && ms < 2000, fmt("K(m) > 1 for all m >= 150 in %d/100 runs (>= 95), %.1f ms (< 2 s)", good, ms)};
}

Outcome deterministic_limits() {
  const double k_pi = lg::k_statistic(lg::run_experiment(at(1.0, 500, 1))).k;
  const double k_0 = lg::k_statistic(lg::run_experiment(at(0.0, 500, 1))).k;
  return {k_pi == -3.0 && k_0 == 1.0, fmt("K(theta=pi) = %.17g, K(theta=0) = %.17g", k_pi, k_0)};
}

sonify::SyntheticConfig synthetic_470(std::uint64_t seed) {
  sonify::SyntheticConfig sc;
  sc.n_files = 200;
  sc.peak_center_bin = sonify::bin_for_audio_frequency(470.0, sc.points_per_file, 2015.0);
  sc.seed = seed;
  return sc;
}

Outcome tone_recovery() {
  const auto t0 = Clock::now();
  sonify::SonifyConfig cfg;
  cfg.seed = 11;
  const auto ts = sonify::sonify_series(sonify::generate_synthetic(synthetic_470(5)), cfg, 4);
  const auto sg = sonify::spectrogram(ts.samples, ts.sample_rate, {});
  auto track = sonify::dominant_frequency_track(sg);
  std::nth_element(track.begin(), track.begin() + static_cast<std::ptrdiff_t>(track.size() / 2), track.end());
  const double median = track[track.size() / 2];
  const double ms = ms_since(t0);
  return {std::abs(median - 470.0) <= 7.0 && ms < 10000,
          fmt("median dominant frequency %.2f Hz (470 +/- 7), %.0f ms (< 10 s)", median, ms)};
}

Outcome switch_detection() {
  auto sc = synthetic_470(6);
  const std::size_t s = 100;
  sc.switches = {{s, sonify::bin_for_audio_frequency(30.0, sc.points_per_file, 2015.0), 0}};
  sonify::SonifyConfig cfg;
  cfg.seed = 12;
  const auto ts = sonify::sonify_series(sonify::generate_synthetic(sc), cfg, 4);
  const sonify::SpectrogramParams sp;
  const auto sg = sonify::spectrogram(ts.samples, ts.sample_rate, sp);
  const auto events = sonify::detect_frequency_switch(sg, sonify::switch_detect_params(cfg, sc.points_per_file, sp));
  // Averaged file j covers input files j..j+w-1; the shifted peak holds half
  // the window during averaged file s - w/2, centred at (s - (w-1)/2)·D.
  const double file_s = static_cast<double>(sonify::samples_per_file(sc.points_per_file)) / cfg.sample_rate;
  const double t_ref = (static_cast<double>(s) - (static_cast<double>(cfg.window) - 1) / 2) * file_s;
  const double err = events.size() == 1 ? events[0].time_s - t_ref : std::nan("");
  return {events.size() == 1 && std::abs(err) <= 2 * file_s,
          fmt("%zu event(s); t = %.2f s vs %.2f s, error %.2f s (tol %.2f s), delta %.1f Hz", events.size(),
              events.empty() ? 0.0 : events[0].time_s, t_ref, err, 2 * file_s, events.empty() ? 0.0 : events[0].delta_hz)};
}

Outcome realness() {
  Rng rng(20240);
  double worst = 0, worst_oracle = 0;
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t m = 2 + rng.below(31);  // L = 2M - 1 <= 63
    std::vector<sonify::Complex> half(m);
    for (auto& v : half) v = {2 * rng.uniform01() - 1, 2 * rng.uniform01() - 1};
    const auto full = sonify::hermitian_extend(half);
    const std::size_t n = full.size();
    const auto x = sonify::inverse_dft(full);
    const double want = half[0].imag() / static_cast<double>(n);
    for (std::size_t t = 0; t < n; ++t) {
      std::complex<double> acc = 0;
      for (std::size_t k = 0; k < n; ++k)
        acc += full[k] * std::polar(1.0, 2 * std::numbers::pi * static_cast<double>(k * t % n) / static_cast<double>(n));
      acc /= static_cast<double>(n);
      worst_oracle = std::max(worst_oracle, std::abs(acc - x[t]));
      worst = std::max(worst, std::abs(x[t].imag() - want));
    }
  }
  return {worst <= 1e-9 && worst_oracle <= 1e-9,
          fmt("max |Im x - Im X0/L| = %.2e, max |x - brute DFT| = %.2e (tol 1e-9)", worst, worst_oracle)};
}

Outcome duration_arithmetic() {
  const auto dir = fs::temp_directory_path() / "qsound_accept_meta";
  cli::SonifyOptions opt;
  sonify::SyntheticConfig sc;
  sc.n_files = 11930;
  opt.synthetic = sc;
  opt.metadata_only = true;
  opt.out_dir = dir;
  const auto summary = cli::cmd_sonify(opt);
  const bool audio = fs::exists(dir / "sound.wav");
  fs::remove_all(dir);
  const double rel = std::abs(summary.duration_s - 4.8e4) / 4.8e4;
  return {rel <= 0.02 && !audio, fmt("%.1f s = %.2f h (4.8e4 +/- 2%%: %.2f%%), no audio rendered", summary.duration_s,
                                     summary.duration_s / 3600, 100 * rel)};
}

Outcome shepard() {
  qmusic::ShepardParams p;
  const qmusic::Envelope flat{0.0, 0.5, 0.0};
  std::vector<double> db;
  for (const auto& pc : qmusic::ScaleRing::eb_dorian().pitch_classes()) {
    const auto x = qmusic::shepard_tone(pc, p, 1.0, flat);
    double s = 0;
    for (double v : x) s += v * v;
    db.push_back(10 * std::log10(s / static_cast<double>(x.size())));
  }
  const double mean = std::accumulate(db.begin(), db.end(), 0.0) / static_cast<double>(db.size());
  double spread = 0;
  for (double d : db) spread = std::max(spread, std::abs(d - mean));

  Rng rng(3);
  auto bits = [&] {
    std::vector<int> b(500);
    for (auto& v : b) v = static_cast<int>(rng.below(2));
    return b;
  };
  const auto b21 = bits(), b32 = bits(), b31 = bits();
  const auto audio = qmusic::render_movement(qmusic::make_movement("m", b21, b32, b31), qmusic::ScaleRing::eb_dorian(), p);
  const double dur = static_cast<double>(audio.size()) / p.render_rate;
  const double law = 500 * p.note_dur_s + p.final_note.total_s();
  return {spread <= 1.5 && std::abs(dur - law) <= 0.05,
          fmt("RMS spread +/- %.2f dB (<= 1.5); movement %.3f s vs law %.3f s (tol 0.05)", spread, dur, law)};
}

Outcome walk_oracle() {
  Rng rng(1000);
  const auto ring = qmusic::ScaleRing::eb_dorian();
  int matched = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<int> data;  // CSV lines: placeholder, bit, placeholder, bit, ...
    const std::size_t shots = 1 + rng.below(64);
    for (std::size_t i = 0; i < shots; ++i) {
      data.push_back(0);
      data.push_back(static_cast<int>(rng.below(2)));
    }
    std::vector<int> played;
    std::size_t n = 1;
    long long note = 0;
    for (std::size_t i = 0; i < shots; ++i) {
      played.push_back(ring.at(note).value);
      note = data[n] == 0 ? note - 1 : note + 1;
      n += 2;
    }
    played.push_back(ring.at(note).value);

    std::vector<int> bits;
    for (std::size_t i = 1; i < data.size(); i += 2) bits.push_back(data[i]);
    const auto walk = qmusic::walk_from_bits(bits);
    std::vector<int> got;
    for (auto idx : walk.indices) got.push_back(ring.at(idx).value);
    got.push_back(ring.at(walk.final_index).value);
    matched += got == played;
  }
  return {matched == 1000, fmt("%d/1000 random records match element-for-element", matched)};
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

Outcome determinism() {
  const auto root = fs::temp_directory_path() / "qsound_accept_det";
  fs::remove_all(root);
  auto run_all = [&](const fs::path& d) {
    std::vector<std::vector<std::string>> cmds = {
        {"lg-run", "--theta", "1/3", "--seed", "21", "--noise-p", "0.107", "--out", (d / "lg").string()},
        {"lg-table", "--seed", "21", "--out", (d / "table" / "k_table.csv").string()},
        {"gen-synth", "--n-files", "30", "--points", "1200", "--peak-hz", "470", "--switch", "15:30", "--seed", "4",
         "--out", (d / "spec").string()},
        {"sonify", "--in", (d / "spec").string(), "--noise-floor-range", "0:200", "--seed", "9", "--threads", "4",
         "--resample", "44100", "--out", (d / "son").string()},
        {"compose", "--from-lg-run", (d / "lg").string(), "--shuffle", "--seed", "2", "--out", (d / "comp").string()}};
    for (auto& c : cmds) {
      c.insert(c.begin(), "qsound");
      std::vector<char*> argv;
      for (auto& a : c) argv.push_back(a.data());
      std::ostringstream sink;
      auto* old = std::cout.rdbuf(sink.rdbuf());
      const int rc = cli::run_cli(static_cast<int>(argv.size()), argv.data());
      std::cout.rdbuf(old);
      if (rc != 0) return false;
    }
    return true;
  };
  if (!run_all(root / "a") || !run_all(root / "b")) {
    fs::remove_all(root);
    return {false, "a seeded command failed"};
  }
  std::size_t compared = 0, differing = 0;
  for (const auto& e : fs::recursive_directory_iterator(root / "a")) {
    if (!e.is_regular_file()) continue;
    const auto name = e.path().filename().string();
    if (name.find("manifest") != std::string::npos) continue;
    const auto other = root / "b" / fs::relative(e.path(), root / "a");
    ++compared;
    differing += slurp(e.path()) != slurp(other);
  }
  fs::remove_all(root);
  return {compared > 0 && differing == 0, fmt("%zu CSV/WAV/text artifacts compared, %zu differ", compared, differing)};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"theory table", theory_table},
      {"ideal-simulator violation", ideal_violation},
      {"noise emulation", noise_emulation},
      {"cumulative convergence", cumulative_convergence},
      {"deterministic limits", deterministic_limits},
      {"sonification tone recovery", tone_recovery},
      {"switch-event detection", switch_detection},
      {"realness property", realness},
      {"duration arithmetic", duration_arithmetic},
      {"Shepard equal loudness and duration", shepard},
      {"walk oracle", walk_oracle},
      {"full-suite determinism", determinism},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += !o.pass;
    std::printf("%s  %2zu  %-38s %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(), o.detail.c_str());
  }
  std::printf("%d of %zu criteria failed\n", failures, criteria.size());
  return failures;
}
