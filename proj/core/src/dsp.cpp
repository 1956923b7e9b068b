#include "aedkit/dsp.hpp"

#include <cmath>
#include <string>

#include "aedkit/errors.hpp"

namespace aed {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kLogFloor = 1e-10;

Vector make_window(StftConfig::Window kind, int n) {
  Vector w(n);
  switch (kind) {
    case StftConfig::Window::Hann:
      for (int i = 0; i < n; ++i)
        w(i) = 0.5 - 0.5 * std::cos(2.0 * kPi * i / n);
      break;
    case StftConfig::Window::Hamming:
      for (int i = 0; i < n; ++i)
        w(i) = 0.54 - 0.46 * std::cos(2.0 * kPi * i / n);
      break;
    case StftConfig::Window::Rect:
      w.setOnes();
      break;
  }
  return w;
}

double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
double mel_to_hz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

}  // namespace

Spectrogram magnitude_spectrogram(const AudioClip& clip, const StftConfig& cfg) {
  if (clip.sample_rate <= 0.0) throw InputError("spectrogram: sample_rate <= 0");
  const int frame_len =
      static_cast<int>(std::lround(cfg.frame_len_ms * clip.sample_rate / 1000.0));
  const int hop =
      static_cast<int>(std::lround(cfg.hop_ms * clip.sample_rate / 1000.0));
  if (frame_len < 1 || hop < 1)
    throw ConfigError("spectrogram: frame/hop shorter than one sample");
  if (hop > frame_len)
    throw ConfigError("spectrogram: hop must not exceed frame length");
  const auto n_samples = static_cast<long long>(clip.samples.size());
  if (n_samples < frame_len)
    throw InputError("spectrogram: clip shorter than one frame");

  const int n_frames = static_cast<int>(1 + (n_samples - frame_len) / hop);
  const int n_bins = frame_len / 2 + 1;

  const Vector window = make_window(cfg.window, frame_len);

  Matrix framed(frame_len, n_frames);
  for (int t = 0; t < n_frames; ++t) {
    const long long start = static_cast<long long>(t) * hop;
    for (int i = 0; i < frame_len; ++i)
      framed(i, t) = clip.samples[static_cast<std::size_t>(start + i)] * window(i);
  }

  // Real DFT as two dense matrix products. Frame lengths here are a few
  // hundred samples, so this beats managing an FFT plan and keeps the output
  // deterministic down to the last bit.
  Matrix cos_basis(n_bins, frame_len);
  Matrix sin_basis(n_bins, frame_len);
  for (int b = 0; b < n_bins; ++b) {
    for (int i = 0; i < frame_len; ++i) {
      const double phase = 2.0 * kPi * b * i / frame_len;
      cos_basis(b, i) = std::cos(phase);
      sin_basis(b, i) = -std::sin(phase);
    }
  }

  Matrix re = cos_basis * framed;
  Matrix im = sin_basis * framed;

  Spectrogram spec;
  spec.values = (re.array().square() + im.array().square()).sqrt();
  spec.sample_rate = clip.sample_rate;
  spec.frame_len = frame_len;
  spec.hop = hop;
  return spec;
}

Matrix mel_filterbank(int bins, int frame_len, double sample_rate,
                      const MfccConfig& cfg) {
  if (cfg.n_mel_filters < 1) throw ConfigError("mfcc: n_mel_filters < 1");
  const double nyquist = sample_rate / 2.0;
  const double fmax = cfg.fmax_hz > 0.0 ? cfg.fmax_hz : nyquist;
  if (fmax > nyquist + 1e-9)
    throw ConfigError("mfcc: fmax exceeds Nyquist");
  if (cfg.fmin_hz < 0.0 || cfg.fmin_hz >= fmax)
    throw ConfigError("mfcc: need 0 <= fmin < fmax");

  const int n_mel = cfg.n_mel_filters;
  const double mel_lo = hz_to_mel(cfg.fmin_hz);
  const double mel_hi = hz_to_mel(fmax);

  std::vector<double> edges(static_cast<std::size_t>(n_mel) + 2);
  for (int k = 0; k < n_mel + 2; ++k)
    edges[static_cast<std::size_t>(k)] =
        mel_to_hz(mel_lo + (mel_hi - mel_lo) * k / (n_mel + 1));

  Matrix fb = Matrix::Zero(n_mel, bins);
  for (int m = 0; m < n_mel; ++m) {
    const double lo = edges[static_cast<std::size_t>(m)];
    const double peak = edges[static_cast<std::size_t>(m) + 1];
    const double hi = edges[static_cast<std::size_t>(m) + 2];
    for (int b = 0; b < bins; ++b) {
      const double f = b * sample_rate / frame_len;  // bin center frequency
      double w = 0.0;
      if (f >= lo && f <= peak && peak > lo)
        w = (f - lo) / (peak - lo);
      else if (f > peak && f <= hi && hi > peak)
        w = (hi - f) / (hi - peak);
      fb(m, b) = std::max(w, 0.0);
    }
    if (fb.row(m).sum() <= 0.0)
      throw ConfigError("mfcc: mel filter " + std::to_string(m) +
                        " covers no FFT bin; reduce n_mel_filters");
  }
  return fb;
}

Matrix mfcc(const Spectrogram& spec, const MfccConfig& cfg) {
  if (cfg.n_coeffs < 1) throw ConfigError("mfcc: n_coeffs < 1");
  if (cfg.n_coeffs >= cfg.n_mel_filters)
    throw ConfigError("mfcc: n_coeffs must be < n_mel_filters");
  if (spec.bins() != spec.frame_len / 2 + 1)
    throw DimensionError("mfcc: spectrogram bins inconsistent with frame_len");

  const Matrix fb =
      mel_filterbank(spec.bins(), spec.frame_len, spec.sample_rate, cfg);

  Matrix mel_energy = fb * spec.values;              // n_mel x frames
  Matrix log_mel =
      mel_energy.cwiseMax(kLogFloor).array().log().matrix();

  // DCT-II rows for coefficients 1..n_coeffs (the 0th is dropped).
  const int n_mel = cfg.n_mel_filters;
  Matrix dct(cfg.n_coeffs, n_mel);
  for (int k = 1; k <= cfg.n_coeffs; ++k)
    for (int m = 0; m < n_mel; ++m)
      dct(k - 1, m) = std::cos(kPi * k * (m + 0.5) / n_mel);

  return dct * log_mel;
}

}  // namespace aed
