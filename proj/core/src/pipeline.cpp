#include "aedkit/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <thread>

#include "aedkit/annotations.hpp"
#include "aedkit/audio_io.hpp"
#include "aedkit/dsp.hpp"
#include "aedkit/errors.hpp"
#include "aedkit/rng.hpp"

namespace aed {

namespace {

constexpr std::uint64_t kTrainStream = 0x7211;
constexpr std::uint64_t kDetectStream = 0x7212;
constexpr std::uint64_t kPianoData = 0x7250;
constexpr std::uint64_t kPianoLearn = 0x7251;
constexpr std::uint64_t kPianoScore = 0x7252;
constexpr std::uint64_t kPianoRef = 0x7253;

AudioClip load_audio_checked(const ManifestEntry& entry, const Manifest& manifest) {
  AudioClip clip = load_wav(entry.audio);
  if (manifest.sample_rate > 0.0 &&
      std::abs(clip.sample_rate - manifest.sample_rate) > 1e-9)
    throw InputError("pipeline: '" + entry.id + "' has sample rate " +
                     std::to_string(clip.sample_rate) + ", manifest expects " +
                     std::to_string(manifest.sample_rate));
  return clip;
}

int event_id_of(const std::vector<std::string>& labels, const std::string& name) {
  const auto it = std::find(labels.begin(), labels.end(), name);
  if (it == labels.end()) return -1;
  return static_cast<int>(it - labels.begin());
}

}  // namespace

std::vector<Spectrogram> event_spectra_from_manifest(const Manifest& manifest,
                                                     const RunConfig& cfg) {
  std::vector<std::vector<Matrix>> blocks(manifest.labels.size());
  Spectrogram meta;  // framing carried over to the concatenated spectra
  bool any = false;
  for (const auto& entry : manifest.recordings) {
    if (entry.label.empty()) continue;  // annotated recordings are not isolated
    const int ev = event_id_of(manifest.labels, entry.label);
    if (ev < 0)
      throw InputError("pipeline: recording '" + entry.id + "' has label '" +
                       entry.label + "' missing from the vocabulary");
    const AudioClip clip = load_audio_checked(entry, manifest);
    Spectrogram spec = magnitude_spectrogram(clip, cfg.stft);
    meta = spec;
    any = true;
    blocks[static_cast<std::size_t>(ev)].push_back(std::move(spec.values));
  }
  if (!any)
    throw InputError("pipeline: manifest has no isolated (labelled) recordings");

  const Eigen::Index bins = meta.values.rows();
  std::vector<Spectrogram> out(manifest.labels.size());
  for (std::size_t ev = 0; ev < blocks.size(); ++ev) {
    auto& spec = out[ev];
    spec.sample_rate = meta.sample_rate;
    spec.frame_len = meta.frame_len;
    spec.hop = meta.hop;
    Eigen::Index total = 0;
    for (const auto& b : blocks[ev]) {
      if (b.rows() != bins)
        throw DimensionError("pipeline: recordings disagree on bin count");
      total += b.cols();
    }
    spec.values.resize(bins, total);
    Eigen::Index at = 0;
    for (const auto& b : blocks[ev]) {
      spec.values.middleCols(at, b.cols()) = b;
      at += b.cols();
    }
  }
  return out;
}

TrainOutput train_model(const Manifest& dev, const Dictionary& dict,
                        const RunConfig& cfg) {
  std::vector<Matrix> h_blocks;
  std::vector<std::vector<int>> frame_labels;
  int rec_idx = 0;
  for (const auto& entry : dev.recordings) {
    if (entry.annotations.empty())
      throw InputError("pipeline: development recording '" + entry.id +
                       "' has no annotations");
    const AudioClip clip = load_audio_checked(entry, dev);
    const EventList events = parse_annotations(entry.annotations);
    const Spectrogram spec = magnitude_spectrogram(clip, cfg.stft);

    NmfConfig nc = cfg.nmf;
    nc.seed = derive_seed(cfg.seed, kTrainStream, static_cast<std::uint64_t>(rec_idx++));
    const SupervisedNmfResult sup = nmf_supervised(spec.values, dict.basis, nc);

    for (int t = 0; t < spec.frames(); ++t) {
      const double center = spec.frame_center_seconds(t);
      std::vector<int> present;
      for (const auto& ev : events) {
        if (ev.onset <= center && center < ev.offset) {
          const int id = event_id_of(dev.labels, ev.label);
          if (id < 0)
            throw InputError("pipeline: annotation label '" + ev.label +
                             "' missing from the vocabulary");
          if (std::find(present.begin(), present.end(), id) == present.end())
            present.push_back(id);
        }
      }
      frame_labels.push_back(std::move(present));
    }
    h_blocks.push_back(sup.activations);
  }
  if (h_blocks.empty()) throw InputError("pipeline: no development recordings");

  Eigen::Index total = 0;
  for (const auto& b : h_blocks) total += b.cols();
  Matrix h_dev(h_blocks[0].rows(), total);
  Eigen::Index at = 0;
  for (const auto& b : h_blocks) {
    h_dev.middleCols(at, b.cols()) = b;
    at += b.cols();
  }

  TrainOutput out;
  out.model =
      train_ovr(h_dev, frame_labels, dev.labels, cfg.svm, dict.fingerprint());
  out.positive_frames.assign(dev.labels.size(), 0);
  for (const auto& labs : frame_labels)
    for (int id : labs) ++out.positive_frames[static_cast<std::size_t>(id)];
  return out;
}

std::vector<RecordingDetection> detect_manifest(const Manifest& test,
                                                const Dictionary& dict,
                                                const ClassifierModel& model,
                                                const RunConfig& cfg) {
  std::vector<RecordingDetection> out;
  int rec_idx = 0;
  for (const auto& entry : test.recordings) {
    const AudioClip clip = load_audio_checked(entry, test);
    const Spectrogram spec = magnitude_spectrogram(clip, cfg.stft);

    NmfConfig nc = cfg.nmf;
    nc.seed = derive_seed(cfg.seed, kDetectStream, static_cast<std::uint64_t>(rec_idx++));
    DetectionResult det =
        detect(spec, dict, model, cfg.noise_rank, nc, cfg.postprocess);

    RecordingDetection rd;
    rd.id = entry.id;
    rd.events = std::move(det.events);
    rd.duration_s = clip.duration_seconds();
    if (!entry.annotations.empty())
      rd.reference = parse_annotations(entry.annotations);
    out.push_back(std::move(rd));
  }
  return out;
}

EvaluationOutput evaluate_pairs(const std::vector<RecordingPair>& pairs,
                                const RunConfig& cfg) {
  EvaluationOutput out;
  out.frame_based = frame_based_f(pairs, cfg.eval_frame_s);
  out.segment_based = segment_based_f(pairs, cfg.eval_segment_s);
  out.class_wise = class_wise_segment_f(pairs, cfg.eval_segment_s);
  return out;
}

namespace {

struct PianoSeedResult {
  double dl = 0.0, cndl = 0.0, csdl = 0.0;
  double reduced_cos = 0.0;
  Dictionary reduced;
};

DictLearnConfig piano_dict_config(const RunConfig& cfg) {
  DictLearnConfig dc = cfg.dictionary;
  dc.clusters = cfg.piano.clusters;
  dc.atoms_per_cluster = cfg.piano.atoms_per_cluster;
  dc.dl_rank = cfg.piano.dl_rank;
  dc.mfcc = cfg.mfcc;
  dc.mfcc.n_coeffs = cfg.piano.mfcc_coeffs;
  dc.gmm = cfg.gmm;
  dc.nmf = cfg.nmf;
  return dc;
}

double atom_cosine(const Vector& a, const Vector& b) {
  const double na = a.norm(), nb = b.norm();
  if (na < 1e-15 || nb < 1e-15) return 0.0;
  return a.dot(b) / (na * nb);
}

PianoSeedResult run_piano_seed(const std::vector<Spectrogram>& event_spectra,
                               const Spectrogram& held_out,
                               const Vector& reference_atom,
                               const RunConfig& cfg, int seed_idx) {
  const auto s = static_cast<std::uint64_t>(seed_idx);
  DictLearnConfig dc = piano_dict_config(cfg);
  dc.seed = derive_seed(cfg.piano.base_seed, kPianoLearn, s);

  const std::vector<std::string> labels{"piano"};
  dc.strategy = DictStrategy::CSDL;
  const Dictionary d_csdl = learn_csdl(event_spectra, labels, dc);
  dc.strategy = DictStrategy::CNDL;
  const Dictionary d_cndl = learn_baseline(event_spectra, labels, dc);
  dc.strategy = DictStrategy::DL;
  const Dictionary d_dl = learn_baseline(event_spectra, labels, dc);

  NmfConfig score_cfg = cfg.nmf;
  score_cfg.seed = derive_seed(cfg.piano.base_seed, kPianoScore, s);

  PianoSeedResult r;
  r.csdl = reconstruction_score(held_out, d_csdl, score_cfg);
  r.cndl = reconstruction_score(held_out, d_cndl, score_cfg);
  r.dl = reconstruction_score(held_out, d_dl, score_cfg);

  r.reduced = reduce_min_correlation(d_csdl, 2);
  for (int a = 0; a < r.reduced.atoms(); ++a)
    r.reduced_cos =
        std::max(r.reduced_cos, atom_cosine(r.reduced.basis.col(a), reference_atom));
  return r;
}

}  // namespace

PianoExperimentResult run_piano_experiment(const RunConfig& cfg, int threads) {
  if (cfg.piano.seeds < 1) throw ConfigError("piano experiment: seeds must be >= 1");
  if (cfg.piano.histogram_bins != 5)
    throw ConfigError("piano experiment: histogram uses 5 bins");

  PianoSynthSpec spec;
  const PianoDataset ds =
      synth_piano_dataset(spec, derive_seed(cfg.piano.base_seed, kPianoData));
  StftConfig stft = cfg.stft;
  const std::vector<Spectrogram> event_spectra{
      magnitude_spectrogram(ds.event.clip, stft)};
  const Spectrogram held_out = magnitude_spectrogram(ds.held_out_single, stft);

  // Rank-1 basis of the held-out exemplar alone: the shape a dedicated
  // single-note atom should match.
  NmfConfig ref_cfg = cfg.nmf;
  ref_cfg.rank = 1;
  ref_cfg.seed = derive_seed(cfg.piano.base_seed, kPianoRef);
  const Vector reference_atom =
      nmf_factorize(held_out.values, ref_cfg).basis.col(0);

  const int n = cfg.piano.seeds;
  std::vector<PianoSeedResult> results(static_cast<std::size_t>(n));

  if (threads <= 0)
    threads = static_cast<int>(std::thread::hardware_concurrency());
  threads = std::clamp(threads, 1, n);

  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(threads));
  for (int w = 0; w < threads; ++w) {
    pool.emplace_back([&, w]() {
      for (int i = w; i < n; i += threads)
        results[static_cast<std::size_t>(i)] =
            run_piano_seed(event_spectra, held_out, reference_atom, cfg, i);
    });
  }
  for (auto& t : pool) t.join();

  PianoExperimentResult out;
  out.scores_dl.reserve(static_cast<std::size_t>(n));
  for (const auto& r : results) {
    out.scores_dl.push_back(r.dl);
    out.scores_cndl.push_back(r.cndl);
    out.scores_csdl.push_back(r.csdl);
    out.reduced_match_cosine.push_back(r.reduced_cos);
  }
  out.reduced_example = results[0].reduced;

  // Scores are negated per-frame KL costs, and the cost of a failed
  // reconstruction is orders of magnitude above an accurate one. Binning the
  // pooled range on a log-cost axis keeps the first bin meaning "accurate"
  // instead of "within a fifth of the worst failure".
  auto log_cost = [](double score) {
    return std::log10(std::max(-score, 1e-12));
  };
  double lo = log_cost(out.scores_dl[0]), hi = lo;
  auto fold = [&](const std::vector<double>& v) {
    for (double x : v) {
      lo = std::min(lo, log_cost(x));
      hi = std::max(hi, log_cost(x));
    }
  };
  fold(out.scores_dl);
  fold(out.scores_cndl);
  fold(out.scores_csdl);

  const double width = (hi - lo) / 5.0;
  auto bin_of = [&](double score) {
    if (width <= 0.0) return 0;
    return std::clamp(static_cast<int>((log_cost(score) - lo) / width), 0, 4);
  };
  for (int b = 0; b <= 5; ++b) out.bin_edges[b] = -std::pow(10.0, lo + width * b);

  const std::vector<double>* rows[3] = {&out.scores_dl, &out.scores_cndl,
                                        &out.scores_csdl};
  for (int m = 0; m < 3; ++m)
    for (double s : *rows[m]) ++out.histogram[m][bin_of(s)];

  out.success_rate_dl = static_cast<double>(out.histogram[0][0]) / n;
  out.success_rate_cndl = static_cast<double>(out.histogram[1][0]) / n;
  out.success_rate_csdl = static_cast<double>(out.histogram[2][0]) / n;
  return out;
}

}  // namespace aed
