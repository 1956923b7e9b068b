#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "aedkit/types.hpp"

namespace aed {

// One evaluated recording: reference and hypothesis event lists plus the
// recording duration that bounds rasterization.
struct RecordingPair {
  EventList reference;
  EventList hypothesis;
  double duration_s = 0.0;
  std::string id;
};

struct MetricCounts {
  long long tp = 0, fp = 0, fn = 0;
  double precision() const { return tp + fp > 0 ? double(tp) / (tp + fp) : 0.0; }
  double recall() const { return tp + fn > 0 ? double(tp) / (tp + fn) : 0.0; }
  double f_measure() const {
    const double p = precision(), r = recall();
    return p + r > 0.0 ? 2.0 * p * r / (p + r) : 0.0;
  }
};

struct RecordingMetric {
  std::string id;
  MetricCounts counts;
  double precision = 0.0, recall = 0.0, f_measure = 0.0;
};

struct ClassMetric {
  MetricCounts counts;
  double precision = 0.0, recall = 0.0, f_measure = 0.0;
  bool in_reference = false;  // classes absent from refs are excluded from the mean
};

struct MetricReport {
  double precision = 0.0;
  double recall = 0.0;
  double f_measure = 0.0;
  MetricCounts counts;                           // pooled, where meaningful
  std::vector<RecordingMetric> per_recording;    // frame-based only
  std::map<std::string, ClassMetric> per_class;  // class-wise only
  long long spurious_fp = 0;  // FPs on classes never seen in the references
};

// Event times are quantized to integer microseconds before rasterization, so
// unit activity ("any overlap") is decided in exact integer arithmetic.

// Per recording: rasterize at `frame_s`, pool counts over events and frames,
// compute P/R/F for the recording; the report carries the unweighted means
// over recordings plus the per-recording breakdown.
MetricReport frame_based_f(const std::vector<RecordingPair>& pairs,
                           double frame_s = 0.010);

// Counts pooled over all segments, events and recordings (micro-average).
MetricReport segment_based_f(const std::vector<RecordingPair>& pairs,
                             double segment_s = 0.100);

// Per class: segment counts pooled over the database; the report F is the
// unweighted mean over classes present in the references. Hypothesis-only
// classes contribute spurious_fp and a per_class entry, not the mean.
MetricReport class_wise_segment_f(const std::vector<RecordingPair>& pairs,
                                  double segment_s = 0.100);

std::string report_to_json(const MetricReport& fb, const MetricReport& sb,
                           const MetricReport& cwsb);
std::string report_table(const MetricReport& fb, const MetricReport& sb,
                         const MetricReport& cwsb);

}  // namespace aed
