#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "aedkit/detection.hpp"
#include "aedkit/dictionary.hpp"
#include "aedkit/manifest.hpp"
#include "aedkit/metrics.hpp"
#include "aedkit/run_config.hpp"
#include "aedkit/svm.hpp"
#include "aedkit/synth.hpp"

namespace aed {

// Loads every isolated recording of a manifest and concatenates the magnitude
// spectrograms per label, in vocabulary order. Labels without any recording
// produce empty spectrograms (skipped downstream with a warning).
std::vector<Spectrogram> event_spectra_from_manifest(const Manifest& manifest,
                                                     const RunConfig& cfg);

struct TrainOutput {
  ClassifierModel model;
  std::vector<long> positive_frames;  // per event id
};

// Supervised decomposition of every annotated development recording on the
// fixed dictionary, then one-vs-rest classifier training on the activation
// columns. A frame is positive for an event when the annotation interval
// covers the frame center.
TrainOutput train_model(const Manifest& dev, const Dictionary& dict,
                        const RunConfig& cfg);

struct RecordingDetection {
  std::string id;
  EventList events;
  EventList reference;  // empty when the manifest has no annotations
  double duration_s = 0.0;
};

std::vector<RecordingDetection> detect_manifest(const Manifest& test,
                                                const Dictionary& dict,
                                                const ClassifierModel& model,
                                                const RunConfig& cfg);

struct EvaluationOutput {
  MetricReport frame_based;
  MetricReport segment_based;
  MetricReport class_wise;
};

EvaluationOutput evaluate_pairs(const std::vector<RecordingPair>& pairs,
                                const RunConfig& cfg);

// ---- dictionary-imbalance experiment -------------------------------------

struct PianoExperimentResult {
  std::vector<double> scores_dl, scores_cndl, scores_csdl;  // per seed
  std::vector<double> reduced_match_cosine;  // best cosine of the 2-atom
                                             // reduction vs a single-note basis
  double bin_edges[6] = {0};                 // pooled equal-width bins, best first
  long histogram[3][5] = {{0}};              // rows: dl, cndl, csdl
  double success_rate_dl = 0.0;
  double success_rate_cndl = 0.0;
  double success_rate_csdl = 0.0;
  Dictionary reduced_example;                // 2-atom reduction of seed 0
};

// For every seed: learn the dictionary with each strategy on the fixed
// imbalanced two-mode dataset, score the held-out single-note exemplar, and
// measure how well the min-correlation 2-atom reduction recovers a dedicated
// single-note basis. Seeds run concurrently; results are ordered by seed.
PianoExperimentResult run_piano_experiment(const RunConfig& cfg, int threads = 0);

}  // namespace aed
