#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

namespace aed {

// Dense double matrices everywhere; Eigen's default column-major layout is
// also the on-disk layout of the binary container (see container_io.hpp).
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using BinaryMatrix = Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic>;

// Magnitude spectrogram (bins x frames) plus the framing that produced it.
// Frame i covers samples [i*hop, i*hop + frame_len).
struct Spectrogram {
  Matrix values;
  double sample_rate = 0.0;
  int frame_len = 0;  // samples per analysis frame
  int hop = 0;        // samples between frame starts

  int bins() const { return static_cast<int>(values.rows()); }
  int frames() const { return static_cast<int>(values.cols()); }
  double hop_seconds() const { return hop / sample_rate; }
  double frame_onset_seconds(int i) const { return i * hop / sample_rate; }
  double frame_center_seconds(int i) const {
    return (i * hop + 0.5 * frame_len) / sample_rate;
  }
};

struct EventInterval {
  double onset = 0.0;   // seconds
  double offset = 0.0;  // seconds, exclusive
  std::string label;
};

using EventList = std::vector<EventInterval>;

// Binary event activity matrix, one row per event label.
struct EventRoll {
  BinaryMatrix active;              // events x frames
  std::vector<std::string> labels;  // row order
  double frame_hop = 0.0;           // seconds between frame starts

  int events() const { return static_cast<int>(active.rows()); }
  int frames() const { return static_cast<int>(active.cols()); }
};

struct AudioClip {
  std::vector<double> samples;  // mono, nominally in [-1, 1]
  double sample_rate = 0.0;

  double duration_seconds() const {
    return sample_rate > 0 ? samples.size() / sample_rate : 0.0;
  }
};

struct AnnotatedRecording {
  AudioClip clip;
  EventList events;
  std::string id;
};

}  // namespace aed
