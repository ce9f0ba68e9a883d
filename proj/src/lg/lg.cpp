#include "qsound/lg.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <future>
#include <numbers>
#include <sstream>

#include "qsound/error.hpp"
#include "qsound/rng.hpp"

namespace qsound::lg {
namespace {

std::string fmt_double(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

}  // namespace

RotationAngle RotationAngle::from_pi_fraction(double fraction) {
  return RotationAngle{fraction * std::numbers::pi};
}

double RotationAngle::over_pi() const { return radians / std::numbers::pi; }

std::string_view to_string(IntervalLabel label) {
  switch (label) {
    case IntervalLabel::C21: return "C21";
    case IntervalLabel::C32: return "C32";
    case IntervalLabel::C31: return "C31";
  }
  return "?";
}

IntervalLabel parse_interval_label(std::string_view text) {
  for (auto label : kAllLabels)
    if (to_string(label) == text) return label;
  throw InvalidArgument("unknown interval label '" + std::string(text) + "'");
}

std::string_view to_string(Classification c) {
  switch (c) {
    case Classification::Classical: return "classical";
    case Classification::ViolatesUpper: return "violates_upper";
    case Classification::ViolatesLower: return "violates_lower";
  }
  return "?";
}

std::vector<int> RecordSet::bits() const {
  std::vector<int> out;
  out.reserve(shots.size());
  for (const auto& s : shots) out.push_back((s.q2 + 1) / 2);
  return out;
}

RecordSet record_set_from_bits(IntervalLabel label, std::span<const int> bits,
                               std::optional<std::uint64_t> seed) {
  if (bits.empty()) throw InvalidArgument("record set must contain at least one shot");
  RecordSet rs{label, {}, seed};
  rs.shots.reserve(bits.size());
  for (int b : bits) {
    if (b != 0 && b != 1) throw InvalidArgument("measured bit must be 0 or 1");
    rs.shots.push_back(ShotRecord{-1, spin_from_bit(b)});
  }
  return rs;
}

void ExperimentConfig::validate() const {
  if (n_shots == 0) throw InvalidArgument("n_shots must be at least 1");
  if (!std::isfinite(theta.radians)) throw InvalidArgument("theta must be finite");
  if (noise_p && !(*noise_p >= 0.0 && *noise_p <= 1.0))
    throw InvalidArgument("noise_p must lie in [0, 1]");
}

QubitState prepare_initial() { return QubitState{{1.0, 0.0}, {0.0, 0.0}}; }

QubitState rx_apply(const QubitState& state, RotationAngle theta) {
  const double c = std::cos(theta.radians / 2.0);
  const double s = std::sin(theta.radians / 2.0);
  const Amplitude mis{0.0, -s};
  return QubitState{c * state.amp0 + mis * state.amp1, mis * state.amp0 + c * state.amp1};
}

double prob_plus(const QubitState& state) { return std::norm(state.amp1); }

std::uint64_t stream_seed(std::uint64_t seed, IntervalLabel label) {
  constexpr std::uint64_t kLabelConstants[] = {0x43323100a5a5a5a5ULL, 0x433332005a5a5a5aULL,
                                               0x43333100c3c3c3c3ULL};
  return seed ^ kLabelConstants[static_cast<int>(label)];
}

RecordSet run_record_set(const ExperimentConfig& config, IntervalLabel label) {
  config.validate();
  const RotationAngle angle{config.theta.radians * interval_multiple(label)};
  // Every shot re-prepares the same state, so the outcome probability is fixed.
  const double p1 = prob_plus(rx_apply(prepare_initial(), angle));
  const double flip_p = config.noise_p ? *config.noise_p / 2.0 : 0.0;

  Rng rng(stream_seed(config.seed, label));
  RecordSet rs{label, {}, config.seed};
  rs.shots.reserve(config.n_shots);
  for (std::size_t i = 0; i < config.n_shots; ++i) {
    int q2 = spin_from_bit(rng.bernoulli(p1) ? 1 : 0);
    if (config.noise_p && rng.bernoulli(flip_p)) q2 = -q2;
    rs.shots.push_back(ShotRecord{-1, q2});
  }
  return rs;
}

ExperimentRecords run_experiment(const ExperimentConfig& config, bool parallel) {
  config.validate();
  if (!parallel) {
    return ExperimentRecords{run_record_set(config, IntervalLabel::C21),
                             run_record_set(config, IntervalLabel::C32),
                             run_record_set(config, IntervalLabel::C31)};
  }
  auto f21 = std::async(std::launch::async, run_record_set, config, IntervalLabel::C21);
  auto f32 = std::async(std::launch::async, run_record_set, config, IntervalLabel::C32);
  auto f31 = std::async(std::launch::async, run_record_set, config, IntervalLabel::C31);
  return ExperimentRecords{f21.get(), f32.get(), f31.get()};
}

CorrelationEstimate estimate_correlation(const RecordSet& records) {
  if (records.shots.empty()) throw InvalidArgument("cannot estimate a correlation from zero shots");
  long long sum = 0;
  for (const auto& s : records.shots) sum += s.q1 * s.q2;
  const auto n = records.shots.size();
  return CorrelationEstimate{static_cast<double>(sum) / static_cast<double>(n), n, sum};
}

double correlation_theoretical(RotationAngle theta) { return std::cos(theta.radians); }

Classification classify(double k) {
  if (k > 1.0) return Classification::ViolatesUpper;
  if (k < -3.0) return Classification::ViolatesLower;
  return Classification::Classical;
}

KStatistic k_statistic(const CorrelationEstimate& c21, const CorrelationEstimate& c32,
                       const CorrelationEstimate& c31) {
  KStatistic ks{c21.value, c32.value, c31.value, 0.0, Classification::Classical};
  ks.k = ks.c21 + ks.c32 - ks.c31;
  ks.classification = classify(ks.k);
  return ks;
}

KStatistic k_statistic(const ExperimentRecords& records) {
  return k_statistic(estimate_correlation(records.c21), estimate_correlation(records.c32),
                     estimate_correlation(records.c31));
}

double k_theoretical(RotationAngle theta) {
  return 2.0 * std::cos(theta.radians) - std::cos(2.0 * theta.radians);
}

std::vector<CumulativePoint> cumulative_k(const RecordSet& c21, const RecordSet& c32,
                                          const RecordSet& c31) {
  const auto n = c21.shots.size();
  if (c32.shots.size() != n || c31.shots.size() != n)
    throw InvalidArgument("cumulative_k: record sets differ in length");
  std::vector<CumulativePoint> series;
  series.reserve(n);
  long long s21 = 0, s32 = 0, s31 = 0;
  for (std::size_t m = 1; m <= n; ++m) {
    s21 += c21.shots[m - 1].q1 * c21.shots[m - 1].q2;
    s32 += c32.shots[m - 1].q1 * c32.shots[m - 1].q2;
    s31 += c31.shots[m - 1].q1 * c31.shots[m - 1].q2;
    const double dm = static_cast<double>(m);
    // Same arithmetic as k_statistic so the last point matches it exactly.
    const double k = static_cast<double>(s21) / dm + static_cast<double>(s32) / dm -
                     static_cast<double>(s31) / dm;
    series.push_back(CumulativePoint{m, k});
  }
  return series;
}

std::string format_record_csv(const RecordSet& records) {
  std::string out;
  out.reserve(records.shots.size() * 4);
  for (const auto& s : records.shots) {
    out += "0\n";
    out += s.q2 > 0 ? "1\n" : "0\n";
  }
  return out;
}

void write_record_csv(const std::filesystem::path& path, const RecordSet& records) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open " + path.string() + " for writing");
  f << format_record_csv(records);
  if (!f) throw IoError("write failed for " + path.string());
}

std::vector<int> parse_record_bits(std::string_view text, const std::string& source) {
  std::vector<std::string_view> lines;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    lines.push_back(text.substr(pos, end - pos));
    pos = end + 1;
  }
  if (lines.empty()) throw ParseError(source, 1, "no measurement records");
  if (lines.size() % 2 != 0)
    throw ParseError(source, lines.size(), "odd number of lines; last shot has no measured bit");

  std::vector<int> bits;
  bits.reserve(lines.size() / 2);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    std::string_view line = lines[i];
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ' || line.back() == '\t'))
      line.remove_suffix(1);
    while (!line.empty() && (line.front() == ' ' || line.front() == '\t')) line.remove_prefix(1);
    if (line != "0" && line != "1")
      throw ParseError(source, i + 1, "expected 0 or 1, got '" + std::string(line) + "'");
    const int v = line[0] - '0';
    if (i % 2 == 0) {
      if (v != 0) throw ParseError(source, i + 1, "prepared-state placeholder must be 0");
    } else {
      bits.push_back(v);
    }
  }
  return bits;
}

RecordSet read_record_csv(const std::filesystem::path& path, IntervalLabel label) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open record file " + path.string());
  std::stringstream ss;
  ss << f.rdbuf();
  const auto bits = parse_record_bits(ss.str(), path.string());
  return record_set_from_bits(label, bits, std::nullopt);
}

std::vector<TableRow> run_table(std::size_t n_shots, std::uint64_t seed,
                                std::optional<double> noise_p) {
  std::vector<TableRow> rows;
  for (double frac : kTableThetaOverPi) {
    ExperimentConfig cfg{RotationAngle::from_pi_fraction(frac), n_shots, seed, noise_p};
    const auto records = run_experiment(cfg);
    rows.push_back(TableRow{frac, k_statistic(records), k_theoretical(cfg.theta)});
  }
  return rows;
}

std::string format_table_csv(std::span<const TableRow> rows) {
  std::string out = "theta_over_pi,k_exp,k_theor\n";
  for (const auto& r : rows) {
    out += fmt_double("%.6g", r.theta_over_pi) + "," + fmt_double("%.6f", r.measured.k) + "," +
           fmt_double("%.6f", r.k_theor) + "\n";
  }
  return out;
}

std::string format_cumulative_csv(std::span<const CumulativePoint> series) {
  std::string out = "shot_count,k\n";
  for (const auto& p : series) out += std::to_string(p.shots) + "," + fmt_double("%.9f", p.k) + "\n";
  return out;
}

std::string format_k_report(double theta_over_pi, const KStatistic& k, double k_theor,
                            std::size_t n_shots) {
  std::string out;
  out += "theta_over_pi=" + fmt_double("%.6g", theta_over_pi) + "\n";
  out += "n_shots=" + std::to_string(n_shots) + "\n";
  out += "c21=" + fmt_double("%.6f", k.c21) + "\n";
  out += "c32=" + fmt_double("%.6f", k.c32) + "\n";
  out += "c31=" + fmt_double("%.6f", k.c31) + "\n";
  out += "k_exp=" + fmt_double("%.6f", k.k) + "\n";
  out += "k_theor=" + fmt_double("%.6f", k_theor) + "\n";
  out += "classification=" + std::string(to_string(k.classification)) + "\n";
  return out;
}

}  // namespace qsound::lg
