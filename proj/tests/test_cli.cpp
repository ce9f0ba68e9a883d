#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "commands.hpp"
#include "manifest.hpp"
#include "qsound/error.hpp"
#include "qsound/wav.hpp"

namespace fs = std::filesystem;
using namespace qsound;
using namespace qsound::cli;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

int run(std::vector<std::string> args) {
  args.insert(args.begin(), "qsound");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  return run_cli(static_cast<int>(argv.size()), argv.data());
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream f(p, std::ios::binary);
  f << text;
}

std::string value_of(const std::string& kv_text, const std::string& key) {
  std::istringstream in(kv_text);
  std::string line;
  while (std::getline(in, line))
    if (line.rfind(key + "=", 0) == 0) return line.substr(key.size() + 1);
  return {};
}

}  // namespace

TEST_CASE("fractions") {
  CHECK(parse_fraction("1/3") == doctest::Approx(1.0 / 3.0));
  CHECK(parse_fraction("0.712") == 0.712);
  CHECK(parse_fraction("1") == 1.0);
  CHECK_THROWS_AS(parse_fraction("1/0"), InvalidArgument);
  CHECK_THROWS_AS(parse_fraction("abc"), InvalidArgument);
}

TEST_CASE("lg-run writes records, report, cumulative series and manifest") {
  TempDir dir("qsound_cli_lgrun");
  const auto out = dir.path / "run";
  REQUIRE(run({"lg-run", "--theta", "1/3", "--shots", "500", "--seed", "7", "--out", out.string()}) == 0);
  for (const char* f : {"C21.csv", "C32.csv", "C31.csv", "k_report.txt", "cumulative_k.csv", "manifest.txt"})
    CHECK(fs::exists(out / f));
  const auto report = slurp(out / "k_report.txt");
  CHECK(value_of(report, "n_shots") == "500");
  CHECK(value_of(report, "k_theor") == "1.500000");
  const auto manifest = slurp(out / "manifest.txt");
  CHECK(value_of(manifest, "command") == "lg-run");
  CHECK(value_of(manifest, "seed") == "7");
  CHECK_FALSE(value_of(manifest, "tool_version").empty());
  CHECK_FALSE(value_of(manifest, "timestamp").empty());
}

TEST_CASE("seeded commands are byte-identical when repeated") {
  TempDir dir("qsound_cli_det");
  const auto a = dir.path / "a", b = dir.path / "b";
  for (const auto& d : {a, b}) {
    REQUIRE(run({"lg-run", "--theta", "0.712", "--seed", "3", "--noise-p", "0.1", "--out", (d / "lg").string()}) == 0);
    REQUIRE(run({"sonify", "--synthetic", "--n-files", "14", "--points", "600", "--noise-floor-range", "0:100",
                 "--seed", "5", "--threads", "3", "--out", (d / "son").string()}) == 0);
    REQUIRE(run({"compose", "--from-lg-run", (d / "lg").string(), "--out", (d / "comp").string()}) == 0);
  }
  for (const char* f : {"lg/C21.csv", "lg/C32.csv", "lg/C31.csv", "lg/cumulative_k.csv", "lg/k_report.txt",
                        "son/sound.wav", "son/spectrogram.csv", "son/events.csv", "son/summary.txt",
                        "comp/composition.wav", "comp/movement_0.wav"}) {
    INFO(f);
    CHECK(slurp(a / f) == slurp(b / f));
    CHECK_FALSE(slurp(a / f).empty());
  }
}

TEST_CASE("lg-analyze reads hardware-format records") {
  TempDir dir("qsound_cli_analyze");
  // Bits as a provider export would write them: 0 placeholder, measured bit.
  write_file(dir.path / "h21.csv", "0\n0\n0\n0\n0\n1\n0\n0\n");
  write_file(dir.path / "h32.csv", "0\n0\n0\n0\n0\n0\n0\n0\n");
  write_file(dir.path / "h31.csv", "0\n1\n0\n1\n0\n1\n0\n0\n");
  LgAnalyzeOptions opt{dir.path / "h21.csv", dir.path / "h32.csv", dir.path / "h31.csv", 1.0 / 3.0,
                       dir.path / "out"};
  const auto k = cmd_lg_analyze(opt);
  CHECK(k.c21 == doctest::Approx(0.5));
  CHECK(k.c32 == doctest::Approx(1.0));
  CHECK(k.c31 == doctest::Approx(-0.5));
  CHECK(k.k == doctest::Approx(2.0));
  CHECK(fs::exists(dir.path / "out" / "cumulative_k.csv"));
  CHECK(value_of(slurp(dir.path / "out" / "k_report.txt"), "classification") == "violates_upper");

  write_file(dir.path / "bad.csv", "0\n1\n1\n1\n");
  opt.c31 = dir.path / "bad.csv";
  CHECK_THROWS_AS(cmd_lg_analyze(opt), ParseError);
  CHECK(run({"lg-analyze", "--c21", (dir.path / "h21.csv").string(), "--c32", (dir.path / "h32.csv").string(),
             "--c31", (dir.path / "bad.csv").string(), "--out", (dir.path / "o2").string()}) == 1);
}

TEST_CASE("lg-table writes the table and its manifest") {
  TempDir dir("qsound_cli_table");
  const auto out = dir.path / "k_table.csv";
  REQUIRE(run({"lg-table", "--shots", "200", "--seed", "1", "--out", out.string()}) == 0);
  const auto csv = slurp(out);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 5);
  CHECK(fs::exists(dir.path / "k_table.manifest.txt"));
}

TEST_CASE("sonify from a directory of spectra and from a config file") {
  TempDir dir("qsound_cli_sonify");
  REQUIRE(run({"gen-synth", "--n-files", "12", "--points", "500", "--peak-hz", "470", "--seed", "2", "--out",
               (dir.path / "spec").string()}) == 0);
  CHECK(fs::exists(dir.path / "spec" / "11.txt"));
  write_file(dir.path / "son.cfg", "noise-floor-range=0:80\nwindow=4\nseed=8\n");
  REQUIRE(run({"sonify", "--config", (dir.path / "son.cfg").string(), "--in", (dir.path / "spec").string(),
               "--resample", "44100", "--out", (dir.path / "out").string()}) == 0);
  const auto summary = slurp(dir.path / "out" / "summary.txt");
  CHECK(value_of(summary, "n_files") == "12");
  const auto wav = read_wav(dir.path / "out" / "sound.wav");
  CHECK(wav.sample_rate == 44100);
  CHECK(wav.duration_s() == doctest::Approx(9.0 * 999 / 2015).epsilon(1e-3));
  CHECK(value_of(slurp(dir.path / "out" / "manifest.txt"), "window") == "4");
  for (const char* f : {"spectrogram.csv", "spectrogram.png", "events.csv"}) CHECK(fs::exists(dir.path / "out" / f));
}

TEST_CASE("flags override the config file") {
  TempDir dir("qsound_cli_override");
  write_file(dir.path / "c.cfg", "# comment\nwindow = 4\nmetadata-only = true\nsynthetic = true\n");
  REQUIRE(run({"sonify", "--config", (dir.path / "c.cfg").string(), "--window", "6", "--out", dir.path.string()}) == 0);
  CHECK(value_of(slurp(dir.path / "manifest.txt"), "window") == "6");
  write_file(dir.path / "bad.cfg", "no-such-key = 1\n");
  CHECK(run({"sonify", "--config", (dir.path / "bad.cfg").string(), "--synthetic", "--out", dir.path.string()}) != 0);
  write_file(dir.path / "junk.cfg", "just words\n");
  CHECK(run({"sonify", "--config", (dir.path / "junk.cfg").string(), "--out", dir.path.string()}) == 1);
}

TEST_CASE("sonify metadata-only reports the duration without audio") {
  TempDir dir("qsound_cli_meta");
  REQUIRE(run({"sonify", "--synthetic", "--n-files", "11930", "--metadata-only", "--out", dir.path.string()}) == 0);
  CHECK(fs::exists(dir.path / "summary.txt"));
  CHECK_FALSE(fs::exists(dir.path / "sound.wav"));
  const double d = std::stod(value_of(slurp(dir.path / "summary.txt"), "duration_s"));
  CHECK(d == doctest::Approx(48447.2).epsilon(1e-4));
}

TEST_CASE("compose accepts explicit record paths and checks shot counts") {
  TempDir dir("qsound_cli_compose");
  REQUIRE(run({"lg-run", "--shots", "64", "--seed", "1", "--out", (dir.path / "a").string()}) == 0);
  const auto recs = (dir.path / "a" / "C21.csv").string() + "," + (dir.path / "a" / "C32.csv").string() + "," +
                    (dir.path / "a" / "C31.csv").string();
  CHECK(run({"compose", "--records", recs, "--shots", "64", "--out", (dir.path / "c").string()}) == 0);
  CHECK(run({"compose", "--records", recs, "--shots", "500", "--out", (dir.path / "d").string()}) == 1);
  CHECK(run({"compose", "--records", recs, "--shots", "32", "--truncate", "--out", (dir.path / "e").string()}) == 0);
  const auto wav = read_wav(dir.path / "e" / "composition.wav");
  CHECK(wav.duration_s() == doctest::Approx(32 * 0.15 + 1.4).epsilon(1e-3));
}

TEST_CASE("argument errors return nonzero") {
  CHECK(run({}) != 0);
  CHECK(run({"lg-run", "--shots", "0"}) != 0);
  CHECK(run({"lg-run", "--noise-p", "2"}) != 0);
  CHECK(run({"sonify", "--out", "/tmp/qsound_never"}) == 1);
  CHECK(run({"sonify", "--synthetic", "--band", "600:400", "--metadata-only", "--out", "/tmp/qsound_never"}) == 1);
  CHECK(run({"no-such-command"}) != 0);
  fs::remove_all("/tmp/qsound_never");
}

TEST_CASE("manifest format") {
  RunManifest m("x");
  m.set("a", "1").set("b", 0.25).add_output("out.wav");
  const auto text = m.format();
  CHECK(value_of(text, "command") == "x");
  CHECK(value_of(text, "a") == "1");
  CHECK(value_of(text, "b") == "0.25");
  CHECK(value_of(text, "output.0") == "out.wav");
}
