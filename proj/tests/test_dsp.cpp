#include <doctest.h>

#include <cmath>

#include "aedkit/dsp.hpp"
#include "aedkit/errors.hpp"

using namespace aed;

namespace {

AudioClip sine_clip(double freq, double seconds, double fs) {
  AudioClip c;
  c.sample_rate = fs;
  const auto n = static_cast<std::size_t>(seconds * fs);
  c.samples.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    c.samples[i] = std::sin(2.0 * 3.14159265358979323846 * freq * i / fs);
  return c;
}

}  // namespace

TEST_CASE("spectrogram: 8 kHz framing gives 320/80 samples and 161 bins") {
  const AudioClip clip = sine_clip(440.0, 1.0, 8000.0);
  const Spectrogram spec = magnitude_spectrogram(clip, StftConfig{});
  CHECK(spec.frame_len == 320);
  CHECK(spec.hop == 80);
  CHECK(spec.bins() == 161);
  CHECK(spec.frames() == 1 + (8000 - 320) / 80);  // 97
  CHECK(spec.frames() == 97);
  CHECK((spec.values.array() >= 0.0).all());
}

TEST_CASE("spectrogram: frame timing metadata maps back to samples") {
  const AudioClip clip = sine_clip(440.0, 0.5, 8000.0);
  const Spectrogram spec = magnitude_spectrogram(clip, StftConfig{});
  CHECK(spec.frame_onset_seconds(0) == 0.0);
  CHECK(spec.frame_onset_seconds(3) == doctest::Approx(3 * 80 / 8000.0));
  CHECK(spec.hop_seconds() == doctest::Approx(0.010));
}

TEST_CASE("spectrogram: a pure 1 kHz tone peaks in bin 40 with a rect window") {
  const AudioClip clip = sine_clip(1000.0, 0.3, 8000.0);
  StftConfig cfg;
  cfg.window = StftConfig::Window::Rect;
  const Spectrogram spec = magnitude_spectrogram(clip, cfg);
  for (int t = 0; t < spec.frames(); ++t) {
    Eigen::Index peak;
    spec.values.col(t).maxCoeff(&peak);
    CHECK(peak == 40);  // round(1000 / 8000 * 320)
  }
}

TEST_CASE("spectrogram: clip shorter than one frame is an input error") {
  AudioClip clip;
  clip.sample_rate = 8000.0;
  clip.samples.assign(300, 0.0);  // < 320
  CHECK_THROWS_AS(magnitude_spectrogram(clip, StftConfig{}), InputError);
}

TEST_CASE("spectrogram: hop larger than the frame is a config error") {
  AudioClip clip = sine_clip(440.0, 0.5, 8000.0);
  StftConfig cfg;
  cfg.hop_ms = 80.0;
  CHECK_THROWS_AS(magnitude_spectrogram(clip, cfg), ConfigError);
}

TEST_CASE("mel_filterbank: rows are non-negative with positive sums") {
  MfccConfig cfg;
  const Matrix fb = mel_filterbank(161, 320, 8000.0, cfg);
  CHECK(fb.rows() == 40);
  CHECK(fb.cols() == 161);
  CHECK((fb.array() >= 0.0).all());
  for (int m = 0; m < fb.rows(); ++m) CHECK(fb.row(m).sum() > 0.0);
}

TEST_CASE("mel_filterbank: config violations throw") {
  MfccConfig cfg;
  cfg.fmax_hz = 5000.0;  // above Nyquist for 8 kHz
  CHECK_THROWS_AS(mel_filterbank(161, 320, 8000.0, cfg), ConfigError);
  MfccConfig narrow;
  narrow.n_mel_filters = 400;  // far finer than 161 bins
  CHECK_THROWS_AS(mel_filterbank(161, 320, 8000.0, narrow), ConfigError);
}

TEST_CASE("mfcc: spectrally flat frames give near-zero retained coefficients") {
  Spectrogram spec;
  spec.sample_rate = 8000.0;
  spec.frame_len = 320;
  spec.hop = 80;
  spec.values = Matrix::Constant(161, 4, 0.7);
  MfccConfig cfg;
  const Matrix coeffs = mfcc(spec, cfg);

  // reference scale: the dropped 0th coefficient of the same log-mel vector
  const Matrix fb = mel_filterbank(161, 320, 8000.0, cfg);
  const Vector log_mel =
      (fb * spec.values.col(0)).cwiseMax(1e-10).array().log().matrix();
  const double c0 = log_mel.sum();
  CHECK(std::abs(c0) > 0.0);
  CHECK((coeffs.array().abs() < 1e-6 * std::abs(c0)).all());
}

TEST_CASE("mfcc: keeps the configured number of coefficients") {
  Spectrogram spec;
  spec.sample_rate = 8000.0;
  spec.frame_len = 320;
  spec.hop = 80;
  spec.values = Matrix::Random(161, 5).cwiseAbs();
  MfccConfig cfg;
  cfg.n_coeffs = 25;
  CHECK(mfcc(spec, cfg).rows() == 25);
  CHECK(mfcc(spec, cfg).cols() == 5);
}

TEST_CASE("mfcc: identical spectra give identical coefficient vectors") {
  Spectrogram spec;
  spec.sample_rate = 8000.0;
  spec.frame_len = 320;
  spec.hop = 80;
  spec.values.resize(161, 2);
  spec.values.col(0) = Matrix::Random(161, 1).cwiseAbs();
  spec.values.col(1) = spec.values.col(0);
  const Matrix coeffs = mfcc(spec, MfccConfig{});
  CHECK(coeffs.col(0) == coeffs.col(1));
}

TEST_CASE("mfcc: coefficient count must stay below the filter count") {
  Spectrogram spec;
  spec.sample_rate = 8000.0;
  spec.frame_len = 320;
  spec.hop = 80;
  spec.values = Matrix::Constant(161, 2, 1.0);
  MfccConfig cfg;
  cfg.n_coeffs = 40;
  CHECK_THROWS_AS(mfcc(spec, cfg), ConfigError);
}
