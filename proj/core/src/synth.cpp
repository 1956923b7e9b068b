#include "aedkit/synth.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "aedkit/errors.hpp"
#include "aedkit/rng.hpp"

namespace aed {

namespace {

constexpr double kTwoPi = 6.283185307179586;

void add_tone(std::vector<double>& buf, std::size_t offset, const Timbre& timbre,
              double duration_s, double sample_rate, Rng& rng, double peak) {
  const auto n = static_cast<std::size_t>(std::llround(duration_s * sample_rate));
  std::vector<double> tone(n, 0.0);
  const double decay =
      timbre.decay_rate * (1.0 + timbre.decay_jitter * (2.0 * rng.uniform01() - 1.0));
  for (const Partial& p : timbre.partials) {
    const double detune =
        std::pow(2.0, timbre.detune_cents * (2.0 * rng.uniform01() - 1.0) / 1200.0);
    const double amp =
        p.amplitude * (1.0 + timbre.amp_jitter * (2.0 * rng.uniform01() - 1.0));
    const double freq = p.freq_hz * detune;
    if (freq >= sample_rate / 2.0)
      throw ConfigError("synth: partial above Nyquist");
    const double phase0 = rng.uniform01() * kTwoPi;
    for (std::size_t i = 0; i < n; ++i) {
      const double t = i / sample_rate;
      tone[i] += amp * std::sin(kTwoPi * freq * t + phase0) * std::exp(-decay * t);
    }
  }
  double mx = 0.0;
  for (double v : tone) mx = std::max(mx, std::abs(v));
  const double scale = mx > 0.0 ? peak / mx : 0.0;
  for (std::size_t i = 0; i < n && offset + i < buf.size(); ++i)
    buf[offset + i] += tone[i] * scale;
}

double rms(const std::vector<double>& x) {
  if (x.empty()) return 0.0;
  double acc = 0.0;
  for (double v : x) acc += v * v;
  return std::sqrt(acc / static_cast<double>(x.size()));
}

}  // namespace

Timbre harmonic_timbre(double f0_hz, int harmonics, double decay_rate) {
  Timbre t;
  t.decay_rate = decay_rate;
  for (int h = 1; h <= harmonics; ++h)
    t.partials.push_back({f0_hz * h, 1.0 / h});
  return t;
}

AudioClip render_tone(const Timbre& timbre, double duration_s,
                      double sample_rate, std::uint64_t seed, double peak) {
  AudioClip clip;
  clip.sample_rate = sample_rate;
  clip.samples.assign(
      static_cast<std::size_t>(std::llround(duration_s * sample_rate)), 0.0);
  Rng rng(seed);
  add_tone(clip.samples, 0, timbre, duration_s, sample_rate, rng, peak);
  return clip;
}

PianoDataset synth_piano_dataset(const PianoSynthSpec& spec, std::uint64_t seed) {
  Timbre single = harmonic_timbre(spec.single_f0, spec.harmonics, spec.decay_rate);
  single.decay_jitter = spec.decay_jitter;

  PianoDataset ds;
  ds.event.id = "piano";
  ds.event.clip.sample_rate = spec.sample_rate;

  const auto chord_samples = static_cast<std::size_t>(
      std::llround(spec.chord_duration_s * spec.sample_rate));
  const auto single_samples = static_cast<std::size_t>(
      std::llround(spec.single_duration_s * spec.sample_rate));
  ds.event.clip.samples.assign(
      chord_samples * static_cast<std::size_t>(spec.chord_exemplars) +
          single_samples * static_cast<std::size_t>(spec.single_exemplars),
      0.0);

  std::size_t at = 0;
  int exemplar = 0;
  for (int i = 0; i < spec.chord_exemplars; ++i, ++exemplar) {
    Rng rng(derive_seed(seed, 0x70, static_cast<std::uint64_t>(exemplar)));
    // fresh voicing per take: each note's level is drawn separately
    Timbre chord;
    chord.decay_rate = spec.decay_rate;
    chord.amp_jitter = spec.chord_amp_jitter;
    chord.detune_cents = spec.chord_detune_cents;
    chord.decay_jitter = spec.decay_jitter;
    for (double f0 : spec.chord_f0s) {
      const double gain = 1.0 - spec.chord_note_gain_jitter * rng.uniform01();
      for (int h = 1; h <= spec.harmonics; ++h)
        chord.partials.push_back({f0 * h, gain / h});
    }
    add_tone(ds.event.clip.samples, at, chord, spec.chord_duration_s,
             spec.sample_rate, rng, 0.9);
    ds.event.events.push_back({at / spec.sample_rate,
                               (at + chord_samples) / spec.sample_rate, "chord"});
    at += chord_samples;
  }
  for (int i = 0; i < spec.single_exemplars; ++i, ++exemplar) {
    Rng rng(derive_seed(seed, 0x70, static_cast<std::uint64_t>(exemplar)));
    add_tone(ds.event.clip.samples, at, single, spec.single_duration_s,
             spec.sample_rate, rng, 0.9);
    ds.event.events.push_back({at / spec.sample_rate,
                               (at + single_samples) / spec.sample_rate, "single"});
    at += single_samples;
  }

  ds.held_out_single = render_tone(single, spec.single_duration_s,
                                   spec.sample_rate,
                                   derive_seed(seed, 0x71), 0.9);
  return ds;
}

AnnotatedRecording synth_polyphonic_mixture(
    const std::map<std::string, Timbre>& event_defs,
    const std::vector<ScheduleItem>& schedule, double snr_db,
    double sample_rate, std::uint64_t seed) {
  double end = 0.0;
  for (const auto& item : schedule)
    end = std::max(end, item.onset_s + item.duration_s);
  if (end <= 0.0) throw InputError("synth: empty schedule");

  AnnotatedRecording rec;
  rec.clip.sample_rate = sample_rate;
  rec.clip.samples.assign(
      static_cast<std::size_t>(std::llround(end * sample_rate)), 0.0);

  int item_idx = 0;
  for (const auto& item : schedule) {
    const auto def = event_defs.find(item.label);
    if (def == event_defs.end())
      throw InputError("synth: schedule references undefined event '" +
                       item.label + "'");
    Rng rng(derive_seed(seed, 0x72, static_cast<std::uint64_t>(item_idx++)));
    add_tone(rec.clip.samples,
             static_cast<std::size_t>(std::llround(item.onset_s * sample_rate)),
             def->second, item.duration_s, sample_rate, rng, 0.5);
  }

  if (std::isfinite(snr_db)) {
    const double signal_rms = rms(rec.clip.samples);
    const double noise_rms = signal_rms * std::pow(10.0, -snr_db / 20.0);
    Rng rng(derive_seed(seed, 0x73));
    for (double& s : rec.clip.samples) s += noise_rms * rng.normal();
  }

  double peak = 0.0;
  for (double s : rec.clip.samples) peak = std::max(peak, std::abs(s));
  if (peak > 1.0)
    for (double& s : rec.clip.samples) s *= 0.99 / peak;

  // annotations: schedule intervals, same-label overlaps merged
  std::vector<ScheduleItem> items = schedule;
  std::sort(items.begin(), items.end(), [](const auto& a, const auto& b) {
    return a.label != b.label ? a.label < b.label : a.onset_s < b.onset_s;
  });
  for (const auto& item : items) {
    const double onset = item.onset_s;
    const double offset = item.onset_s + item.duration_s;
    if (!rec.events.empty() && rec.events.back().label == item.label &&
        onset <= rec.events.back().offset) {
      rec.events.back().offset = std::max(rec.events.back().offset, offset);
    } else {
      rec.events.push_back({onset, offset, item.label});
    }
  }
  std::sort(rec.events.begin(), rec.events.end(),
            [](const EventInterval& a, const EventInterval& b) {
              return a.onset != b.onset ? a.onset < b.onset : a.label < b.label;
            });
  return rec;
}

}  // namespace aed
