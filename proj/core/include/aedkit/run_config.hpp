#pragma once

#include <cstdint>
#include <filesystem>

#include "aedkit/detection.hpp"
#include "aedkit/dictionary.hpp"
#include "aedkit/dsp.hpp"
#include "aedkit/svm.hpp"

namespace aed {

// Knobs of the dictionary-imbalance experiment (two-mode piano event,
// three learning strategies, held-out single-note reconstruction).
struct PianoExperimentConfig {
  int seeds = 100;
  int mfcc_coeffs = 25;
  int clusters = 2;
  int atoms_per_cluster = 2;
  int dl_rank = 2;
  int histogram_bins = 5;
  std::uint64_t base_seed = 0;
};

// Every tunable of the pipeline in one place. Defaults follow the deployed
// configuration: 40 ms frames / 10 ms hop, 23 MFCCs, 2-component GMM, 3 atoms
// per sub-dictionary, positive class weight 3, noise rank 1, median length 3,
// 250 ms gap fill, 200 ms minimum duration.
struct RunConfig {
  StftConfig stft;
  MfccConfig mfcc;
  GmmConfig gmm;
  NmfConfig nmf;
  DictLearnConfig dictionary;
  SvmTrainConfig svm;
  int noise_rank = 1;
  PostProcessConfig postprocess;
  double eval_frame_s = 0.010;
  double eval_segment_s = 0.100;
  PianoExperimentConfig piano;
  std::uint64_t seed = 0;

  // Re-derives the sub-config seeds and cross-links shared parameters
  // (mfcc/gmm/nmf into the dictionary config). Call after any mutation.
  void propagate();
};

RunConfig default_run_config();

// Reads a JSON config file and overlays it on the defaults. Unknown keys are
// rejected with their path. Call propagate() afterwards if fields are then
// changed by hand.
RunConfig load_run_config(const std::filesystem::path& path);

}  // namespace aed
