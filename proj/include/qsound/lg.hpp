#pragma once

// Leggett-Garg test on a single evolving qubit: exact two-level simulation,
// shot sampling, correlation and K estimation, and closed-form predictions.

#include <complex>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace qsound::lg {

using Amplitude = std::complex<double>;

/// Pure state of one qubit. Basis state 0 is the prepared Q = -1 state.
struct QubitState {
  Amplitude amp0{1.0, 0.0};
  Amplitude amp1{0.0, 0.0};

  double norm_squared() const { return std::norm(amp0) + std::norm(amp1); }
  friend bool operator==(const QubitState&, const QubitState&) = default;
};

/// Dimensionless rotation ΩΔt in radians; only the product enters.
struct RotationAngle {
  double radians = 0.0;

  static RotationAngle from_pi_fraction(double fraction);
  double over_pi() const;
};

/// Spin value Q from a computational-basis bit: Q = 2·bit - 1.
constexpr int spin_from_bit(int bit) { return 2 * bit - 1; }

struct ShotRecord {
  int q1 = -1;  ///< prepared value, always -1
  int q2 = -1;  ///< measured value, ±1

  friend bool operator==(const ShotRecord&, const ShotRecord&) = default;
};

enum class IntervalLabel { C21, C32, C31 };

std::string_view to_string(IntervalLabel label);
IntervalLabel parse_interval_label(std::string_view text);

/// 1 for the two Δt intervals, 2 for C31 (interval 2Δt).
constexpr int interval_multiple(IntervalLabel label) { return label == IntervalLabel::C31 ? 2 : 1; }

inline constexpr IntervalLabel kAllLabels[] = {IntervalLabel::C21, IntervalLabel::C32,
                                               IntervalLabel::C31};

struct RecordSet {
  IntervalLabel label = IntervalLabel::C21;
  std::vector<ShotRecord> shots;
  std::optional<std::uint64_t> seed;  ///< empty for imported hardware data

  int multiple() const { return interval_multiple(label); }
  /// Measured bits (0/1) in shot order.
  std::vector<int> bits() const;

  friend bool operator==(const RecordSet&, const RecordSet&) = default;
};

/// Builds a record set from measured bits. Throws on empty input or non-binary bits.
RecordSet record_set_from_bits(IntervalLabel label, std::span<const int> bits,
                               std::optional<std::uint64_t> seed = std::nullopt);

struct CorrelationEstimate {
  double value = 0.0;
  std::size_t n_shots = 0;
  /// Σ q1·q2; value = sum / n_shots.
  long long sum = 0;
};

enum class Classification { Classical, ViolatesUpper, ViolatesLower };

std::string_view to_string(Classification c);

struct KStatistic {
  double c21 = 0.0;
  double c32 = 0.0;
  double c31 = 0.0;
  double k = 0.0;
  Classification classification = Classification::Classical;
};

/// Default shot count; reported K values average over 500 shots.
inline constexpr std::size_t kDefaultShots = 500;

struct ExperimentConfig {
  RotationAngle theta;
  std::size_t n_shots = kDefaultShots;
  std::uint64_t seed = 0;
  /// Depolarizing probability applied at measurement. Emulation knob only.
  std::optional<double> noise_p;

  void validate() const;
};

/// The four intervals ΩΔt/π used for the reported table.
inline constexpr double kTableThetaOverPi[] = {1.0 / 3.0, 0.5, 0.712, 1.0};

// --- state evolution -------------------------------------------------------

QubitState prepare_initial();

/// Applies exp(-iθσx/2).
QubitState rx_apply(const QubitState& state, RotationAngle theta);

/// Born probability of measuring bit 1 (spin +1).
double prob_plus(const QubitState& state);

// --- sampling and estimation ----------------------------------------------

/// Seed of the RNG stream used for one interval of an experiment.
std::uint64_t stream_seed(std::uint64_t seed, IntervalLabel label);

RecordSet run_record_set(const ExperimentConfig& config, IntervalLabel label);

struct ExperimentRecords {
  RecordSet c21;
  RecordSet c32;
  RecordSet c31;
};

/// All three record sets of one experiment. The sets use independent derived
/// streams, so `parallel` only changes scheduling, never results.
ExperimentRecords run_experiment(const ExperimentConfig& config, bool parallel = false);

CorrelationEstimate estimate_correlation(const RecordSet& records);

double correlation_theoretical(RotationAngle theta);

Classification classify(double k);

KStatistic k_statistic(const CorrelationEstimate& c21, const CorrelationEstimate& c32,
                       const CorrelationEstimate& c31);
KStatistic k_statistic(const ExperimentRecords& records);

/// 2cos θ - cos 2θ.
double k_theoretical(RotationAngle theta);

struct CumulativePoint {
  std::size_t shots = 0;
  double k = 0.0;
};

/// K from the first m shots of each set, for m = 1..N.
std::vector<CumulativePoint> cumulative_k(const RecordSet& c21, const RecordSet& c32,
                                          const RecordSet& c31);

// --- measurement-record CSV ------------------------------------------------
//
// One integer per line, 2·N lines. Even 0-based lines hold the literal 0
// placeholder for the prepared state, odd lines hold the measured bit.

std::string format_record_csv(const RecordSet& records);
void write_record_csv(const std::filesystem::path& path, const RecordSet& records);

/// Parses the CSV text; `source` names the input in error messages.
std::vector<int> parse_record_bits(std::string_view text, const std::string& source = "<memory>");

/// Reads a record CSV as an imported (seedless) record set.
RecordSet read_record_csv(const std::filesystem::path& path, IntervalLabel label);

// --- reports ---------------------------------------------------------------

struct TableRow {
  double theta_over_pi = 0.0;
  KStatistic measured;
  double k_theor = 0.0;
};

/// Runs the experiment at every reported interval.
std::vector<TableRow> run_table(std::size_t n_shots, std::uint64_t seed,
                                std::optional<double> noise_p = std::nullopt);

std::string format_table_csv(std::span<const TableRow> rows);
std::string format_cumulative_csv(std::span<const CumulativePoint> series);
std::string format_k_report(double theta_over_pi, const KStatistic& k, double k_theor,
                            std::size_t n_shots);

}  // namespace qsound::lg
