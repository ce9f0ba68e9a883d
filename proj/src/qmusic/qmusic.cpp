#include "qsound/qmusic.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <numeric>
#include <sstream>

#include "qsound/error.hpp"
#include "qsound/lg.hpp"
#include "qsound/rng.hpp"

namespace qsound::qmusic {
namespace {

std::string trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return std::string(s);
}

long long floor_mod(long long a, long long m) {
  const long long r = a % m;
  return r < 0 ? r + m : r;
}

}  // namespace

PitchClass parse_pitch_class(std::string_view name) {
  const std::string s = trim(name);
  if (s.empty()) throw InvalidArgument("empty pitch-class name");
  static constexpr int kNatural[] = {9, 11, 0, 2, 4, 5, 7};  // A..G
  const char letter = static_cast<char>(std::toupper(static_cast<unsigned char>(s[0])));
  if (letter < 'A' || letter > 'G') throw InvalidArgument("bad pitch-class name '" + s + "'");
  int pc = kNatural[letter - 'A'];
  for (std::size_t i = 1; i < s.size(); ++i) {
    const char c = s[i];
    if (c == 'b') --pc;
    else if (c == '#' || c == 's') ++pc;
    else throw InvalidArgument("bad accidental in pitch-class name '" + s + "'");
  }
  return PitchClass{static_cast<int>(floor_mod(pc, 12))};
}

std::string pitch_class_name(PitchClass pc) {
  static constexpr const char* kNames[] = {"C", "Db", "D", "Eb", "E", "F",
                                           "Gb", "G", "Ab", "A", "Bb", "B"};
  return kNames[floor_mod(pc.value, 12)];
}

ScaleRing::ScaleRing(std::array<PitchClass, 7> pitch_classes) : pcs_(pitch_classes) {
  int prev = -1;
  for (const auto& pc : pcs_) {
    if (pc.value < 0 || pc.value > 11) throw InvalidArgument("pitch class out of range");
    const int rel = static_cast<int>(floor_mod(pc.value - pcs_[0].value, 12));
    if (rel <= prev) throw InvalidArgument("scale pitch classes must ascend within one octave");
    prev = rel;
  }
}

ScaleRing ScaleRing::eb_dorian() {
  return ScaleRing({PitchClass{3}, PitchClass{5}, PitchClass{6}, PitchClass{8}, PitchClass{10},
                    PitchClass{0}, PitchClass{1}});
}

ScaleRing ScaleRing::parse(std::string_view text) {
  std::string lowered = trim(text);
  std::transform(lowered.begin(), lowered.end(), lowered.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lowered == "eb-dorian" || lowered == "eb_dorian") return eb_dorian();

  std::array<PitchClass, 7> pcs{};
  std::size_t count = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto comma = text.find(',', pos);
    if (comma == std::string_view::npos) comma = text.size();
    if (count == 7) throw InvalidArgument("scale must list exactly 7 pitch classes");
    pcs[count++] = parse_pitch_class(text.substr(pos, comma - pos));
    pos = comma + 1;
  }
  if (count != 7) throw InvalidArgument("scale must list exactly 7 pitch classes");
  return ScaleRing(pcs);
}

PitchClass ScaleRing::at(long long index) const { return pcs_[floor_mod(index, 7)]; }

NoteWalk walk_from_bits(std::span<const int> bits) {
  if (bits.empty()) throw InvalidArgument("walk_from_bits: no bits");
  NoteWalk walk;
  walk.indices.reserve(bits.size());
  long long idx = 0;
  for (int b : bits) {
    walk.indices.push_back(idx);
    idx += b != 0 ? 1 : -1;
  }
  walk.final_index = idx;
  return walk;
}

std::vector<int> parse_measurement_csv(const std::filesystem::path& path, std::size_t n_shots) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open measurement file " + path.string());
  std::stringstream ss;
  ss << f.rdbuf();
  auto bits = lg::parse_record_bits(ss.str(), path.string());
  if (bits.size() != n_shots)
    throw ParseError(path.string(), 2 * bits.size(),
                     "expected " + std::to_string(2 * n_shots) + " lines (" + std::to_string(n_shots) +
                         " shots), found " + std::to_string(2 * bits.size()));
  return bits;
}

void ShepardParams::validate() const {
  if (!(note_dur_s > 0.0 && attack_s >= 0.0 && release_s >= 0.0))
    throw InvalidArgument("shepard: note durations must be positive");
  if (!(final_note.sustain_s > 0.0 && final_note.attack_s >= 0.0 && final_note.release_s >= 0.0))
    throw InvalidArgument("shepard: closing-note durations must be positive");
  if (octave_lo > octave_hi) throw InvalidArgument("shepard: octave range is empty");
  if (!(render_rate > 0.0)) throw InvalidArgument("shepard: render rate must be positive");
}

double midi_to_hz(double midi) { return 440.0 * std::pow(2.0, (midi - 69.0) / 12.0); }

double shepard_partial_amplitude(double midi, double center_midi, double volume) {
  const double equal_amp = 30.0 / std::pow(midi, 1.5) * volume;
  const double middle = (midi - center_midi) / 10.7;
  return equal_amp * std::pow(2.0, -(middle * middle) / 10.0);
}

double envelope_gain(const Envelope& env, double t) {
  if (t < 0.0) return 0.0;
  if (t < env.attack_s) return t / env.attack_s;
  t -= env.attack_s;
  if (t < env.sustain_s) return 1.0;
  t -= env.sustain_s;
  if (t < env.release_s) return 1.0 - t / env.release_s;
  return 0.0;
}

std::size_t envelope_samples(const Envelope& env, double rate) {
  return static_cast<std::size_t>(std::llround(env.total_s() * rate));
}

std::vector<double> shepard_tone(PitchClass pc, const ShepardParams& params, double volume,
                                 const Envelope& env) {
  params.validate();
  const std::size_t n = envelope_samples(env, params.render_rate);
  std::vector<double> out(n, 0.0);
  for (int octave = params.octave_lo; octave <= params.octave_hi; ++octave) {
    const int m = midi_number(pc, octave);
    if (m <= 0) continue;
    const double f = midi_to_hz(m);
    if (f >= params.render_rate / 2.0) continue;
    const double amp = shepard_partial_amplitude(m, params.center_midi, volume);
    const double w = 2.0 * std::numbers::pi * f / params.render_rate;
    for (std::size_t i = 0; i < n; ++i) out[i] += amp * std::sin(w * static_cast<double>(i));
  }
  for (std::size_t i = 0; i < n; ++i)
    out[i] *= envelope_gain(env, static_cast<double>(i) / params.render_rate);
  return out;
}

std::size_t voice_length_samples(std::size_t n_notes, const ShepardParams& params) {
  const double rate = params.render_rate;
  const auto start = [&](std::size_t i) {
    return static_cast<std::size_t>(std::llround(static_cast<double>(i) * params.note_dur_s * rate));
  };
  std::size_t len = start(n_notes) + envelope_samples(params.final_note, rate);
  if (n_notes > 0) len = std::max(len, start(n_notes - 1) + envelope_samples(params.note_envelope(), rate));
  return len;
}

std::vector<double> render_voice(const NoteWalk& walk, const ScaleRing& ring,
                                 const ShepardParams& params, double volume) {
  params.validate();
  const double rate = params.render_rate;
  std::vector<double> out(voice_length_samples(walk.indices.size(), params), 0.0);

  // Only seven distinct notes exist per voice, so render each once.
  std::map<int, std::vector<double>> cache;
  auto add = [&](const std::vector<double>& tone, std::size_t at) {
    for (std::size_t i = 0; i < tone.size() && at + i < out.size(); ++i) out[at + i] += tone[i];
  };
  for (std::size_t i = 0; i < walk.indices.size(); ++i) {
    const PitchClass pc = ring.at(walk.indices[i]);
    auto it = cache.find(pc.value);
    if (it == cache.end()) it = cache.emplace(pc.value, shepard_tone(pc, params, volume)).first;
    add(it->second, static_cast<std::size_t>(std::llround(static_cast<double>(i) * params.note_dur_s * rate)));
  }
  const auto closing = shepard_tone(ring.at(walk.final_index), params, params.final_volume, params.final_note);
  add(closing, static_cast<std::size_t>(
                   std::llround(static_cast<double>(walk.indices.size()) * params.note_dur_s * rate)));
  return out;
}

std::vector<double> sum_voices(std::span<const std::vector<double>> voices) {
  std::size_t len = 0;
  for (const auto& v : voices) len = std::max(len, v.size());
  std::vector<double> out(len, 0.0);
  for (const auto& v : voices)
    for (std::size_t i = 0; i < v.size(); ++i) out[i] += v[i];
  return out;
}

std::vector<double> normalize_peak(std::vector<double> signal, double peak) {
  double max_abs = 0.0;
  for (double s : signal) max_abs = std::max(max_abs, std::abs(s));
  if (max_abs == 0.0) return signal;
  const double g = peak / max_abs;
  for (double& s : signal) s *= g;
  return signal;
}

std::vector<double> mix_movement(const std::vector<double>& v1, const std::vector<double>& v2,
                                 const std::vector<double>& v3) {
  const std::vector<double> voices[] = {v1, v2, v3};
  return normalize_peak(sum_voices(voices));
}

Movement make_movement(std::string name, std::span<const int> bits21, std::span<const int> bits32,
                       std::span<const int> bits31) {
  using lg::IntervalLabel;
  const auto k = lg::k_statistic(lg::ExperimentRecords{
      lg::record_set_from_bits(IntervalLabel::C21, bits21),
      lg::record_set_from_bits(IntervalLabel::C32, bits32),
      lg::record_set_from_bits(IntervalLabel::C31, bits31)});
  Movement m;
  m.name = std::move(name);
  m.k_label = k.k;
  m.n_shots = bits21.size();
  m.walks = {walk_from_bits(bits21), walk_from_bits(bits32), walk_from_bits(bits31)};
  return m;
}

std::vector<double> render_movement(const Movement& m, const ScaleRing& ring,
                                    const ShepardParams& params) {
  return mix_movement(render_voice(m.walks[0], ring, params, params.voice_volumes[0]),
                      render_voice(m.walks[1], ring, params, params.voice_volumes[1]),
                      render_voice(m.walks[2], ring, params, params.voice_volumes[2]));
}

std::vector<std::size_t> movement_order(std::span<const Movement> movements,
                                        std::optional<std::uint64_t> shuffle_seed) {
  if (shuffle_seed) {
    Rng rng(*shuffle_seed);
    return random_permutation(movements.size(), rng);
  }
  std::vector<std::size_t> order(movements.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return movements[a].k_label < movements[b].k_label;
  });
  return order;
}

Composition compose(std::span<const Movement> movements, const ScaleRing& ring,
                    const ShepardParams& params, double gap_s,
                    std::optional<std::uint64_t> shuffle_seed) {
  if (movements.empty()) throw InvalidArgument("compose: need at least one movement");
  if (!(gap_s >= 0.0)) throw InvalidArgument("compose: gap must be nonnegative");
  Composition c;
  c.order = movement_order(movements, shuffle_seed);
  c.movement_audio.reserve(movements.size());
  for (const auto& m : movements) c.movement_audio.push_back(render_movement(m, ring, params));

  const auto gap = static_cast<std::size_t>(std::llround(gap_s * params.render_rate));
  for (std::size_t i = 0; i < c.order.size(); ++i) {
    if (i > 0) c.samples.insert(c.samples.end(), gap, 0.0);
    const auto& audio = c.movement_audio[c.order[i]];
    c.samples.insert(c.samples.end(), audio.begin(), audio.end());
  }
  c.samples = normalize_peak(std::move(c.samples));
  return c;
}

}  // namespace qsound::qmusic
