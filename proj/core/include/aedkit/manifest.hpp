#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace aed {

// One dataset entry. Isolated training recordings carry `label`; polyphonic
// development/test recordings carry `annotations` instead.
struct ManifestEntry {
  std::filesystem::path audio;
  std::filesystem::path annotations;  // empty for isolated recordings
  std::string label;                  // empty for annotated recordings
  std::string id;
};

struct Manifest {
  std::vector<std::string> labels;  // event vocabulary, defines event ids
  double sample_rate = 0.0;         // 0 = accept whatever the files carry
  std::vector<ManifestEntry> recordings;
};

// JSON manifest:
//   {"labels": [...], "sample_rate": 8000,
//    "recordings": [{"audio": "a.wav", "label": "alarm"},
//                   {"audio": "b.wav", "annotations": "b.txt", "id": "b"}]}
// Relative paths resolve against the manifest's directory. Unknown keys are
// rejected.
Manifest load_manifest(const std::filesystem::path& path);

void save_manifest(const std::filesystem::path& path, const Manifest& manifest);

}  // namespace aed
