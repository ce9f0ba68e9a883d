#pragma once

// Measurement records to music: each voice walks a seven-note scale ring
// (down on a measured -1, up on +1) and every note is a Shepard tone.

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace qsound::qmusic {

/// Pitch class, C = 0 … B = 11.
struct PitchClass {
  int value = 0;

  friend bool operator==(const PitchClass&, const PitchClass&) = default;
};

/// Parses "Eb", "D#", "Ds", "Gb", "C" … (flats as b, sharps as # or s).
PitchClass parse_pitch_class(std::string_view name);
/// Flat spelling, e.g. 3 -> "Eb".
std::string pitch_class_name(PitchClass pc);

/// Seven pitch classes, ascending from the first within one octave.
class ScaleRing {
 public:
  explicit ScaleRing(std::array<PitchClass, 7> pitch_classes);

  static ScaleRing eb_dorian();
  /// Comma-separated names, or the name "eb-dorian".
  static ScaleRing parse(std::string_view text);

  /// ring[index mod 7] with a nonnegative modulo.
  PitchClass at(long long index) const;
  const std::array<PitchClass, 7>& pitch_classes() const { return pcs_; }

 private:
  std::array<PitchClass, 7> pcs_;
};

inline PitchClass scale_pitch(long long index, const ScaleRing& ring) { return ring.at(index); }

/// Scale positions visited by a voice. indices[t] is the note played at
/// step t; final_index is where the walk ends up after the last step.
struct NoteWalk {
  std::vector<long long> indices;
  long long final_index = 0;
};

/// Play-then-update walk: start at 0, bit 1 moves up one step, bit 0 down.
NoteWalk walk_from_bits(std::span<const int> bits);

/// Reads a measurement-record CSV expecting exactly `n_shots` shots.
std::vector<int> parse_measurement_csv(const std::filesystem::path& path, std::size_t n_shots);

struct Envelope {
  double attack_s = 0.02;
  double sustain_s = 0.15;
  double release_s = 0.02;

  double total_s() const { return attack_s + sustain_s + release_s; }
};

struct ShepardParams {
  double note_dur_s = 0.15;
  double attack_s = 0.02;
  double release_s = 0.02;
  std::array<double, 3> voice_volumes{1.0, 1.0, 2.0};
  double center_midi = 68.0;
  int octave_lo = 1;
  int octave_hi = 9;
  Envelope final_note{0.2, 0.7, 0.5};
  /// Volume of the closing long note (every voice closes at 1.0).
  double final_volume = 1.0;
  double render_rate = 44100.0;

  Envelope note_envelope() const { return Envelope{attack_s, note_dur_s, release_s}; }
  void validate() const;
};

/// MIDI number of a pitch class in an octave: 12·(octave + 1) + pc.
constexpr int midi_number(PitchClass pc, int octave) { return 12 * (octave + 1) + pc.value; }

/// Equal-temperament frequency, A4 = MIDI 69 = 440 Hz.
double midi_to_hz(double midi);

/// Amplitude of the partial at MIDI number m: (30 / m^1.5)·volume·2^(-((m - c)/10.7)^2 / 10).
double shepard_partial_amplitude(double midi, double center_midi, double volume);

/// Linear attack, flat sustain, linear release.
double envelope_gain(const Envelope& env, double t);

std::size_t envelope_samples(const Envelope& env, double rate);

/// Octave-spaced sines over the configured octaves for one pitch class.
std::vector<double> shepard_tone(PitchClass pc, const ShepardParams& params, double volume,
                                 const Envelope& env);
inline std::vector<double> shepard_tone(PitchClass pc, const ShepardParams& params, double volume) {
  return shepard_tone(pc, params, volume, params.note_envelope());
}

/// Notes spaced by note_dur (tails overlap additively) plus a closing note.
std::vector<double> render_voice(const NoteWalk& walk, const ScaleRing& ring,
                                 const ShepardParams& params, double volume);

/// Length in samples of a rendered voice with `n_notes` steps.
std::size_t voice_length_samples(std::size_t n_notes, const ShepardParams& params);

/// Zero-padded sample-wise sum.
std::vector<double> sum_voices(std::span<const std::vector<double>> voices);

/// Peak-normalizes to `peak` (default -1 dBFS); silence stays silent.
std::vector<double> normalize_peak(std::vector<double> signal, double peak = 0.891);

/// Sum of the three voices, peak-normalized.
std::vector<double> mix_movement(const std::vector<double>& v1, const std::vector<double>& v2,
                                 const std::vector<double>& v3);

struct Movement {
  std::string name;
  double k_label = 0.0;
  std::size_t n_shots = 0;
  std::array<NoteWalk, 3> walks;  ///< C21, C32 and C31 (the 2Δt voice)
};

/// Builds a movement from the three measured bit sequences.
Movement make_movement(std::string name, std::span<const int> bits21, std::span<const int> bits32,
                       std::span<const int> bits31);

std::vector<double> render_movement(const Movement& m, const ScaleRing& ring,
                                    const ShepardParams& params);

struct Composition {
  std::vector<double> samples;
  std::vector<std::size_t> order;  ///< indices into the input movements
  std::vector<std::vector<double>> movement_audio;  ///< per input movement
};

/// Movements sorted by ascending K (or shuffled with `shuffle_seed`) and
/// joined with `gap_s` of silence.
Composition compose(std::span<const Movement> movements, const ScaleRing& ring,
                    const ShepardParams& params, double gap_s = 2.0,
                    std::optional<std::uint64_t> shuffle_seed = std::nullopt);

/// Movement order for `compose`.
std::vector<std::size_t> movement_order(std::span<const Movement> movements,
                                        std::optional<std::uint64_t> shuffle_seed);

}  // namespace qsound::qmusic
