#pragma once

#include <filesystem>

#include "aedkit/dictionary.hpp"
#include "aedkit/gmm.hpp"
#include "aedkit/svm.hpp"
#include "aedkit/types.hpp"

namespace aed {

// Binary containers. Layout is 8 magic bytes, little-endian u64 dimensions,
// then little-endian f64 payload; matrices are stored column-major.
//   matrix  "AEDKMAT1" rows cols values
//   gmm     "AEDKGMM1" K d weights means(row per component) variances
void save_matrix(const std::filesystem::path& path, const Matrix& m);
Matrix load_matrix(const std::filesystem::path& path);

void save_matrix_csv(const std::filesystem::path& path, const Matrix& m);

void save_gmm(const std::filesystem::path& path, const GmmModel& m);
GmmModel load_gmm(const std::filesystem::path& path);

// Dictionary = matrix container + JSON-lines sidecar at `path + ".tags.jsonl"`.
// The sidecar starts with one meta record carrying the label vocabulary,
// followed by one record per atom: {"event", "cluster", "index", "label"}.
void save_dictionary(const std::filesystem::path& path, const Dictionary& d);
Dictionary load_dictionary(const std::filesystem::path& path);

// Classifier model as a single JSON document (weights, biases, scaling,
// dictionary fingerprint).
void save_model(const std::filesystem::path& path, const ClassifierModel& m);
ClassifierModel load_model(const std::filesystem::path& path);

}  // namespace aed
