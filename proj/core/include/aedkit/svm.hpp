#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "aedkit/types.hpp"

namespace aed {

enum class FeatureScaling { None, PerDimMax, LogCompress };

FeatureScaling scaling_from_string(const std::string& name);
std::string to_string(FeatureScaling s);

struct SvmTrainConfig {
  double regularization_c = 1.0;
  double positive_class_weight = 3.0;  // multiplies the hinge loss of positives
  int max_epochs = 100;
  FeatureScaling scaling = FeatureScaling::PerDimMax;
  // Training is deterministic full-batch descent; the seed is accepted for
  // interface stability but does not influence the result.
  std::uint64_t seed = 0;
};

struct LinearClassifier {
  Vector weights;
  double bias = 0.0;
  int event = -1;
  std::vector<double> objective_trace;  // regularized hinge objective per epoch
};

// One-vs-rest linear classifiers over activation columns plus the feature
// scaling learned from the training set.
struct ClassifierModel {
  std::vector<LinearClassifier> classifiers;
  std::vector<std::string> event_labels;  // full vocabulary; row order of rolls
  FeatureScaling scaling = FeatureScaling::PerDimMax;
  Vector scale_divisors;          // per-dim, only for PerDimMax
  std::string dict_fingerprint;
  std::vector<int> skipped_events;  // events without both classes in training

  const LinearClassifier* find(int event) const;
};

// frame_labels[t] lists the event ids present in frame t. Events with no
// positive or no negative frame are skipped and recorded. Hinge loss of
// positive frames is weighted by cfg.positive_class_weight.
ClassifierModel train_ovr(const Matrix& activations,
                          const std::vector<std::vector<int>>& frame_labels,
                          const std::vector<std::string>& event_labels,
                          const SvmTrainConfig& cfg,
                          const std::string& dict_fingerprint = "");

// Multi-label frame prediction: roll(e, t) = 1 iff w_e . x_t + b_e > 0.
// Events without a trained classifier produce all-zero rows.
EventRoll predict_frames(const ClassifierModel& model, const Matrix& activations,
                         double frame_hop_seconds);

// The scaling transform applied at train and test time.
Matrix apply_scaling(const ClassifierModel& model, const Matrix& activations);

}  // namespace aed
