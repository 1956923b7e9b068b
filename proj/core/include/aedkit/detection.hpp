#pragma once

#include <utility>

#include "aedkit/dictionary.hpp"
#include "aedkit/nmf.hpp"
#include "aedkit/svm.hpp"
#include "aedkit/types.hpp"

namespace aed {

struct PostProcessConfig {
  int median_len = 3;             // frames, odd
  double max_gap_s = 0.250;       // fill zero-runs strictly shorter than this
  double min_duration_s = 0.200;  // keep events strictly longer than this
};

// Per event row, in order: median filter (edge replication), fill gaps
// strictly shorter than max_gap_s that lie between two active runs, convert
// runs to intervals, drop intervals not strictly longer than min_duration_s,
// regenerate the roll from the survivors. Idempotent.
std::pair<EventRoll, EventList> postprocess(const EventRoll& roll,
                                            const PostProcessConfig& cfg);

// Active runs to (onset, offset, label) with onset = start*hop and
// offset = (end+1)*hop; events sorted by onset, then row order.
EventList roll_to_events(const EventRoll& roll);

EventRoll events_to_roll(const EventList& events,
                         const std::vector<std::string>& labels,
                         double frame_hop_seconds, int frames);

struct DetectionResult {
  EventList events;
  EventRoll raw;        // classifier output before post-processing
  EventRoll processed;
};

// Full inference for one recording: semi-supervised decomposition on the
// dictionary (noise activations are discarded), frame classification, then
// post-processing. Throws ConfigError when the model was trained against a
// different dictionary.
DetectionResult detect(const Spectrogram& test_spec, const Dictionary& dict,
                       const ClassifierModel& model, int noise_rank,
                       const NmfConfig& nmf_cfg, const PostProcessConfig& pp_cfg);

}  // namespace aed
