#include "aedkit/run_config.hpp"

#include <fstream>
#include <set>

#include <json.hpp>

#include "aedkit/errors.hpp"
#include "aedkit/rng.hpp"

namespace aed {

namespace {

using nlohmann::json;

void reject_unknown(const json& obj, const std::set<std::string>& known,
                    const std::string& where) {
  for (const auto& [key, _] : obj.items())
    if (!known.count(key))
      throw ConfigError("config: unknown key '" + where + "." + key + "'");
}

StftConfig::Window window_from_string(const std::string& name) {
  if (name == "hann") return StftConfig::Window::Hann;
  if (name == "hamming") return StftConfig::Window::Hamming;
  if (name == "rect") return StftConfig::Window::Rect;
  throw ConfigError("config: unknown window '" + name + "'");
}

}  // namespace

void RunConfig::propagate() {
  dictionary.mfcc = mfcc;
  dictionary.gmm = gmm;
  dictionary.nmf = nmf;
  dictionary.seed = derive_seed(seed, 0x01);
  svm.seed = derive_seed(seed, 0x02);
  nmf.seed = derive_seed(seed, 0x03);
  dictionary.nmf.seed = 0;  // overridden per factorization inside learning
  piano.base_seed = seed;
}

RunConfig default_run_config() {
  RunConfig c;
  c.propagate();
  return c;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path.string() + "'");
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw ConfigError("config: '" + path.string() + "': " + e.what());
  }
  if (!doc.is_object()) throw ConfigError("config: top level must be an object");
  reject_unknown(doc,
                 {"stft", "mfcc", "gmm", "nmf", "dictionary", "svm", "detection",
                  "postprocess", "evaluation", "piano", "seed"},
                 "$");

  RunConfig c = default_run_config();
  c.seed = doc.value("seed", std::uint64_t{0});

  if (doc.contains("stft")) {
    const auto& j = doc["stft"];
    reject_unknown(j, {"frame_len_ms", "hop_ms", "window"}, "stft");
    c.stft.frame_len_ms = j.value("frame_len_ms", c.stft.frame_len_ms);
    c.stft.hop_ms = j.value("hop_ms", c.stft.hop_ms);
    if (j.contains("window"))
      c.stft.window = window_from_string(j["window"].get<std::string>());
  }
  if (doc.contains("mfcc")) {
    const auto& j = doc["mfcc"];
    reject_unknown(j, {"coeffs", "mel_filters", "fmin_hz", "fmax_hz"}, "mfcc");
    c.mfcc.n_coeffs = j.value("coeffs", c.mfcc.n_coeffs);
    c.mfcc.n_mel_filters = j.value("mel_filters", c.mfcc.n_mel_filters);
    c.mfcc.fmin_hz = j.value("fmin_hz", c.mfcc.fmin_hz);
    c.mfcc.fmax_hz = j.value("fmax_hz", c.mfcc.fmax_hz);
  }
  if (doc.contains("gmm")) {
    const auto& j = doc["gmm"];
    reject_unknown(j,
                   {"components", "max_iters", "kmeans_iters", "tolerance",
                    "variance_floor_rel"},
                   "gmm");
    c.gmm.components = j.value("components", c.gmm.components);
    c.gmm.max_em_iters = j.value("max_iters", c.gmm.max_em_iters);
    c.gmm.kmeans_iters = j.value("kmeans_iters", c.gmm.kmeans_iters);
    c.gmm.tolerance = j.value("tolerance", c.gmm.tolerance);
    c.gmm.variance_floor_rel =
        j.value("variance_floor_rel", c.gmm.variance_floor_rel);
  }
  if (doc.contains("nmf")) {
    const auto& j = doc["nmf"];
    reject_unknown(j, {"max_iters", "tolerance", "epsilon_floor"}, "nmf");
    c.nmf.max_iters = j.value("max_iters", c.nmf.max_iters);
    c.nmf.tolerance = j.value("tolerance", c.nmf.tolerance);
    c.nmf.epsilon_floor = j.value("epsilon_floor", c.nmf.epsilon_floor);
  }
  if (doc.contains("dictionary")) {
    const auto& j = doc["dictionary"];
    reject_unknown(
        j, {"strategy", "clusters", "atoms_per_cluster", "dl_rank", "enmf_rank"},
        "dictionary");
    if (j.contains("strategy"))
      c.dictionary.strategy =
          dict_strategy_from_string(j["strategy"].get<std::string>());
    c.dictionary.clusters = j.value("clusters", c.dictionary.clusters);
    c.dictionary.atoms_per_cluster =
        j.value("atoms_per_cluster", c.dictionary.atoms_per_cluster);
    c.dictionary.dl_rank = j.value("dl_rank", c.dictionary.dl_rank);
    c.dictionary.enmf_rank = j.value("enmf_rank", c.dictionary.enmf_rank);
  }
  if (doc.contains("svm")) {
    const auto& j = doc["svm"];
    reject_unknown(
        j, {"C", "positive_class_weight", "max_epochs", "scaling"}, "svm");
    c.svm.regularization_c = j.value("C", c.svm.regularization_c);
    c.svm.positive_class_weight =
        j.value("positive_class_weight", c.svm.positive_class_weight);
    c.svm.max_epochs = j.value("max_epochs", c.svm.max_epochs);
    if (j.contains("scaling"))
      c.svm.scaling = scaling_from_string(j["scaling"].get<std::string>());
  }
  if (doc.contains("detection")) {
    const auto& j = doc["detection"];
    reject_unknown(j, {"noise_rank"}, "detection");
    c.noise_rank = j.value("noise_rank", c.noise_rank);
  }
  if (doc.contains("postprocess")) {
    const auto& j = doc["postprocess"];
    reject_unknown(j, {"median_len", "max_gap_ms", "min_duration_ms"},
                   "postprocess");
    c.postprocess.median_len = j.value("median_len", c.postprocess.median_len);
    if (j.contains("max_gap_ms"))
      c.postprocess.max_gap_s = j["max_gap_ms"].get<double>() / 1000.0;
    if (j.contains("min_duration_ms"))
      c.postprocess.min_duration_s = j["min_duration_ms"].get<double>() / 1000.0;
  }
  if (doc.contains("evaluation")) {
    const auto& j = doc["evaluation"];
    reject_unknown(j, {"frame_ms", "segment_ms"}, "evaluation");
    if (j.contains("frame_ms")) c.eval_frame_s = j["frame_ms"].get<double>() / 1000.0;
    if (j.contains("segment_ms"))
      c.eval_segment_s = j["segment_ms"].get<double>() / 1000.0;
  }
  if (doc.contains("piano")) {
    const auto& j = doc["piano"];
    reject_unknown(j,
                   {"seeds", "mfcc_coeffs", "clusters", "atoms_per_cluster",
                    "dl_rank", "histogram_bins"},
                   "piano");
    c.piano.seeds = j.value("seeds", c.piano.seeds);
    c.piano.mfcc_coeffs = j.value("mfcc_coeffs", c.piano.mfcc_coeffs);
    c.piano.clusters = j.value("clusters", c.piano.clusters);
    c.piano.atoms_per_cluster =
        j.value("atoms_per_cluster", c.piano.atoms_per_cluster);
    c.piano.dl_rank = j.value("dl_rank", c.piano.dl_rank);
    c.piano.histogram_bins = j.value("histogram_bins", c.piano.histogram_bins);
  }

  c.propagate();
  return c;
}

}  // namespace aed
