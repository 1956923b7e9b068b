#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "aedkit/types.hpp"

namespace aed {

struct Partial {
  double freq_hz = 0.0;
  double amplitude = 1.0;
};

// A decaying sum of sinusoids. Phases are always drawn per rendering; the
// jitter fields add per-rendering variation in level, tuning and decay so
// repeated exemplars resemble takes of a real instrument instead of copies.
struct Timbre {
  std::vector<Partial> partials;
  double decay_rate = 3.0;     // 1/s exponential amplitude decay
  double amp_jitter = 0.0;     // per partial: amplitude *= uniform(1-a, 1+a)
  double detune_cents = 0.0;   // per partial: freq *= 2^(uniform(-c, c)/1200)
  double decay_jitter = 0.0;   // per rendering: decay *= uniform(1-d, 1+d)
};

// Harmonic stack: harmonics 1..n at multiples of f0 with amplitude 1/n.
Timbre harmonic_timbre(double f0_hz, int harmonics, double decay_rate = 3.0);

AudioClip render_tone(const Timbre& timbre, double duration_s,
                      double sample_rate, std::uint64_t seed, double peak = 0.9);

// A two-mode sound event with a hidden data-size imbalance: many long
// exemplars of a chord next to a single short exemplar of one of its notes.
// The chord jitters give every take a new voicing/level/tuning, so the chord
// sub-event spans a genuine spectral manifold rather than one fixed shape.
// The single note is kept spectrally reproducible (phase and decay vary, the
// shape does not) so reconstruction of the held-out take measures whether a
// dictionary actually carries a single-note atom.
struct PianoSynthSpec {
  double sample_rate = 8000.0;
  int chord_exemplars = 10;
  double chord_duration_s = 1.0;
  int single_exemplars = 1;
  double single_duration_s = 0.5;
  int harmonics = 3;
  double decay_rate = 3.0;
  double chord_amp_jitter = 0.8;
  double chord_detune_cents = 20.0;
  double chord_note_gain_jitter = 0.9;  // note gains: uniform(1 - j, 1)
  double decay_jitter = 0.3;            // applies to every take
  // C4, E4, G4 at A4 = 440 Hz equal temperament
  double chord_f0s[3] = {261.63, 329.63, 392.00};
  double single_f0 = 261.63;
};

struct PianoDataset {
  AnnotatedRecording event;  // concatenated exemplars, labelled chord/single
  AudioClip held_out_single; // fresh single-note clip for reconstruction scoring
};

// Deterministic per seed (phase jitter is seeded). The annotation labels are
// "chord" and "single"; their audio-second ratio is exactly
// chord_exemplars*chord_duration : single_exemplars*single_duration.
PianoDataset synth_piano_dataset(const PianoSynthSpec& spec, std::uint64_t seed);

struct ScheduleItem {
  double onset_s = 0.0;
  double duration_s = 0.0;
  std::string label;
};

// Additive mixture of scheduled events plus white noise at snr_db (relative
// to the clean mixture RMS; +inf disables noise). Overlapping intervals of
// the same label merge into one annotation. The clip is rescaled only if its
// peak would exceed 1.
AnnotatedRecording synth_polyphonic_mixture(
    const std::map<std::string, Timbre>& event_defs,
    const std::vector<ScheduleItem>& schedule, double snr_db,
    double sample_rate, std::uint64_t seed);

}  // namespace aed
