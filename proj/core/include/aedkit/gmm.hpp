#pragma once

#include <cstdint>
#include <vector>

#include "aedkit/types.hpp"

namespace aed {

struct GmmConfig {
  int components = 2;              // K
  int max_em_iters = 100;
  int kmeans_iters = 10;           // Lloyd steps after k-means++ seeding
  double tolerance = 1e-6;         // relative log-likelihood change stop
  double variance_floor_rel = 1e-4;  // times the mean per-dimension variance
  std::uint64_t seed = 0;
};

// Diagonal-covariance Gaussian mixture over feature columns.
struct GmmModel {
  Vector weights;    // K, sums to 1
  Matrix means;      // K x d
  Matrix variances;  // K x d, floored
  std::vector<double> loglik_trace;  // data log-likelihood per EM iteration
  int iterations_run = 0;

  int components() const { return static_cast<int>(weights.size()); }
  int dim() const { return static_cast<int>(means.cols()); }
};

// EM fit on features (d x T). Initialization: k-means++ seeding, a few Lloyd
// steps, then EM. Deterministic for a given seed. Throws InputError when
// T < K or features are not finite.
GmmModel fit_gmm(const Matrix& features, const GmmConfig& cfg);

// Posterior responsibilities, K x T; every column sums to 1.
Matrix responsibilities(const GmmModel& model, const Matrix& features);

// Argmax-posterior component per frame; exact ties go to the lower index.
std::vector<int> hard_assign(const GmmModel& model, const Matrix& features);

// Partition spectrogram columns by cluster label, preserving frame order
// within each part. Empty clusters come back with zero frames.
std::vector<Spectrogram> split_spectra(const Spectrogram& spec,
                                       const std::vector<int>& labels, int k);

}  // namespace aed
