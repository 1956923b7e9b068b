#pragma once

#include "aedkit/types.hpp"

namespace aed {

struct StftConfig {
  enum class Window { Hann, Hamming, Rect };

  double frame_len_ms = 40.0;
  double hop_ms = 10.0;
  Window window = Window::Hann;
};

struct MfccConfig {
  int n_coeffs = 23;       // retained coefficients; the 0th is always dropped
  int n_mel_filters = 40;
  double fmin_hz = 0.0;
  double fmax_hz = 0.0;    // 0 means Nyquist
};

// Magnitude spectrogram with frame_len/2 + 1 bins and
// 1 + floor((samples - frame_len) / hop) frames.
Spectrogram magnitude_spectrogram(const AudioClip& clip, const StftConfig& cfg);

// Triangular mel filterbank, n_mel_filters x bins. Rows are non-negative and
// every row has positive sum; a filter narrower than the bin spacing is a
// configuration error.
Matrix mel_filterbank(int bins, int frame_len, double sample_rate,
                      const MfccConfig& cfg);

// Per frame: mel energies -> log (floored at 1e-10) -> DCT-II -> drop the 0th
// coefficient -> keep coefficients 1..n_coeffs. Output is n_coeffs x frames.
Matrix mfcc(const Spectrogram& spec, const MfccConfig& cfg);

}  // namespace aed
