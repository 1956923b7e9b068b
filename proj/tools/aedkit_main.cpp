#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "aedkit/annotations.hpp"
#include "aedkit/container_io.hpp"
#include "aedkit/errors.hpp"
#include "aedkit/metrics.hpp"
#include "aedkit/pipeline.hpp"

namespace fs = std::filesystem;
using namespace aed;

namespace {

struct CommonOpts {
  std::string config_path;
  std::uint64_t seed = 0;
  bool seed_set = false;
  bool force = false;
};

RunConfig make_config(const CommonOpts& opts) {
  RunConfig cfg = opts.config_path.empty() ? default_run_config()
                                           : load_run_config(opts.config_path);
  if (opts.seed_set) {
    cfg.seed = opts.seed;
    cfg.propagate();
  }
  return cfg;
}

void refuse_existing(const fs::path& path, bool force) {
  if (!force && fs::exists(path))
    throw Error("output '" + path.string() +
                "' already exists; pass --force to overwrite");
}

void add_common(CLI::App* cmd, CommonOpts& opts) {
  cmd->add_option("--config", opts.config_path, "JSON config file");
  cmd->add_option("--seed", opts.seed, "base random seed")
      ->each([&opts](const std::string&) { opts.seed_set = true; });
  cmd->add_flag("--force", opts.force, "overwrite existing outputs");
}

int cmd_learn_dict(const std::string& manifest_path, const std::string& strategy,
                   const std::string& out_path, const CommonOpts& opts) {
  RunConfig cfg = make_config(opts);
  if (!strategy.empty())
    cfg.dictionary.strategy = dict_strategy_from_string(strategy);
  refuse_existing(out_path, opts.force);

  const Manifest manifest = load_manifest(manifest_path);
  const auto spectra = event_spectra_from_manifest(manifest, cfg);
  const Dictionary dict = learn_dictionary(spectra, manifest.labels, cfg.dictionary);
  save_dictionary(out_path, dict);

  std::cout << "strategy: " << to_string(cfg.dictionary.strategy) << "\n";
  std::cout << "atoms: " << dict.atoms() << "\n";
  std::map<int, int> per_event;
  for (const auto& t : dict.tags) ++per_event[t.event];
  for (const auto& [event, count] : per_event) {
    if (event < 0)
      std::cout << "  pooled: " << count << " atoms\n";
    else
      std::cout << "  event " << event << " '" << manifest.labels[event]
                << "': " << count << " atoms\n";
  }
  std::cout << "wrote " << out_path << " (+ .tags.jsonl)\n";
  return 0;
}

int cmd_train(const std::string& manifest_path, const std::string& dict_path,
              const std::string& out_path, const CommonOpts& opts) {
  RunConfig cfg = make_config(opts);
  refuse_existing(out_path, opts.force);

  const Manifest dev = load_manifest(manifest_path);
  const Dictionary dict = load_dictionary(dict_path);
  std::cout << "positive class weight: " << cfg.svm.positive_class_weight << "\n";
  const TrainOutput out = train_model(dev, dict, cfg);
  save_model(out_path, out.model);

  for (std::size_t e = 0; e < dev.labels.size(); ++e)
    std::cout << "  event " << e << " '" << dev.labels[e]
              << "': " << out.positive_frames[e] << " positive frames\n";
  std::cout << "classifiers: " << out.model.classifiers.size() << " (skipped "
            << out.model.skipped_events.size() << ")\n";
  std::cout << "wrote " << out_path << "\n";
  return 0;
}

std::vector<RecordingDetection> run_detection(const Manifest& test,
                                              const std::string& dict_path,
                                              const std::string& model_path,
                                              const RunConfig& cfg) {
  const Dictionary dict = load_dictionary(dict_path);
  const ClassifierModel model = load_model(model_path);
  return detect_manifest(test, dict, model, cfg);
}

void write_detections(const fs::path& out_dir,
                      const std::vector<RecordingDetection>& dets, bool force) {
  fs::create_directories(out_dir);
  for (const auto& d : dets) {
    const fs::path p = out_dir / (d.id + ".txt");
    refuse_existing(p, force);
    write_annotations(p, d.events);
    std::cout << "  " << d.id << ": " << d.events.size() << " events -> "
              << p.string() << "\n";
  }
}

int cmd_detect(const std::string& manifest_path, const std::string& model_path,
               const std::string& dict_path, const std::string& out_dir,
               const CommonOpts& opts) {
  RunConfig cfg = make_config(opts);
  const Manifest test = load_manifest(manifest_path);
  const auto dets = run_detection(test, dict_path, model_path, cfg);
  write_detections(out_dir, dets, opts.force);
  return 0;
}

int cmd_evaluate(const std::string& manifest_path, const std::string& model_path,
                 const std::string& dict_path, const std::string& hyp_dir,
                 const std::string& out_dir, const CommonOpts& opts) {
  RunConfig cfg = make_config(opts);
  const Manifest test = load_manifest(manifest_path);

  std::vector<RecordingPair> pairs;
  if (!hyp_dir.empty()) {
    // score pre-computed hypothesis files named <id>.txt
    for (const auto& entry : test.recordings) {
      if (entry.annotations.empty())
        throw InputError("evaluate: recording '" + entry.id +
                         "' has no reference annotations");
      RecordingPair p;
      p.id = entry.id;
      p.reference = parse_annotations(entry.annotations);
      p.hypothesis = parse_annotations(fs::path(hyp_dir) / (entry.id + ".txt"));
      double end = 0.0;
      for (const auto& ev : p.reference) end = std::max(end, ev.offset);
      for (const auto& ev : p.hypothesis) end = std::max(end, ev.offset);
      p.duration_s = end;
      pairs.push_back(std::move(p));
    }
  } else {
    if (model_path.empty() || dict_path.empty())
      throw ConfigError("evaluate: need --model and --dict (or --hyp-dir)");
    const auto dets = run_detection(test, dict_path, model_path, cfg);
    write_detections(fs::path(out_dir) / "detections", dets, opts.force);
    for (const auto& d : dets) {
      if (d.reference.empty() && !d.events.empty())
        std::cout << "  note: '" << d.id << "' has no reference; skipped in metrics\n";
      RecordingPair p;
      p.id = d.id;
      p.reference = d.reference;
      p.hypothesis = d.events;
      p.duration_s = d.duration_s;
      pairs.push_back(std::move(p));
    }
  }

  const EvaluationOutput ev = evaluate_pairs(pairs, cfg);
  const std::string json =
      report_to_json(ev.frame_based, ev.segment_based, ev.class_wise);
  const std::string table =
      report_table(ev.frame_based, ev.segment_based, ev.class_wise);

  fs::create_directories(out_dir);
  const fs::path jp = fs::path(out_dir) / "report.json";
  const fs::path tp = fs::path(out_dir) / "report.txt";
  refuse_existing(jp, opts.force);
  refuse_existing(tp, opts.force);
  std::ofstream(jp) << json;
  std::ofstream(tp) << table;
  std::cout << table;
  std::cout << "wrote " << jp.string() << "\n";
  return 0;
}

int cmd_piano_experiment(int seeds, const std::string& out_dir,
                         const CommonOpts& opts) {
  RunConfig cfg = make_config(opts);
  cfg.piano.seeds = seeds;

  fs::create_directories(out_dir);
  const fs::path scores_p = fs::path(out_dir) / "scores.csv";
  const fs::path hist_p = fs::path(out_dir) / "histogram.txt";
  const fs::path summary_p = fs::path(out_dir) / "summary.json";
  const fs::path reduced_p = fs::path(out_dir) / "reduced_csdl.aedm";
  for (const auto& p : {scores_p, hist_p, summary_p, reduced_p})
    refuse_existing(p, opts.force);

  const PianoExperimentResult res = run_piano_experiment(cfg);

  {
    std::ofstream f(scores_p);
    f.precision(10);
    f << "seed,dl,cndl,csdl,reduced_match_cosine\n";
    for (int s = 0; s < seeds; ++s)
      f << s << ',' << res.scores_dl[s] << ',' << res.scores_cndl[s] << ','
        << res.scores_csdl[s] << ',' << res.reduced_match_cosine[s] << "\n";
  }

  std::ostringstream hist;
  hist << "bin           ";
  for (int b = 0; b < 5; ++b) hist << "  [" << b << "]";
  hist << "\n";
  const char* names[3] = {"dl   ", "cndl ", "csdl "};
  if (seeds > 1) {
    for (int m = 0; m < 3; ++m) {
      hist << "method " << names[m] << " ";
      for (int b = 0; b < 5; ++b) hist << "  " << res.histogram[m][b];
      hist << "\n";
    }
    hist << "(bin [0] holds the best reconstructions, bin [4] the failed ones)\n";
  } else {
    hist << "(single seed; histogram statistics omitted)\n";
  }
  std::ofstream(hist_p) << hist.str();

  {
    std::ofstream f(summary_p);
    f.precision(10);
    f << "{\n  \"seeds\": " << seeds << ",\n";
    f << "  \"success_rate\": {\"csdl\": " << res.success_rate_csdl
      << ", \"cndl\": " << res.success_rate_cndl
      << ", \"dl\": " << res.success_rate_dl << "},\n";
    f << "  \"bin_edges\": [";
    for (int b = 0; b <= 5; ++b) f << (b ? ", " : "") << res.bin_edges[b];
    f << "]\n}\n";
  }

  save_dictionary(reduced_p, res.reduced_example);

  std::cout << hist.str();
  std::cout << "success rates: csdl " << res.success_rate_csdl << ", cndl "
            << res.success_rate_cndl << ", dl " << res.success_rate_dl << "\n";
  std::cout << "wrote " << out_dir << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"aedkit: sound event dictionaries, detection and evaluation"};
  app.require_subcommand(1);

  CommonOpts opts;

  std::string manifest_path, dict_path, model_path, out_path, hyp_dir;
  std::string strategy;
  int seeds = 100;

  auto* learn = app.add_subcommand(
      "learn-dict", "learn an event dictionary from isolated recordings");
  learn->add_option("--manifest", manifest_path)->required();
  learn->add_option("--strategy", strategy)
      ->check(CLI::IsMember({"dl", "enmf", "cndl", "csdl"}));
  learn->add_option("--out", out_path)->required();
  add_common(learn, opts);

  auto* train = app.add_subcommand(
      "train", "train frame classifiers on a development set");
  train->add_option("--manifest", manifest_path)->required();
  train->add_option("--dict", dict_path)->required();
  train->add_option("--out", out_path)->required();
  add_common(train, opts);

  auto* detect = app.add_subcommand("detect", "detect events in test recordings");
  detect->add_option("--manifest", manifest_path)->required();
  detect->add_option("--model", model_path)->required();
  detect->add_option("--dict", dict_path)->required();
  detect->add_option("--out", out_path)->required();
  add_common(detect, opts);

  auto* evaluate = app.add_subcommand(
      "evaluate", "detect (or take --hyp-dir) and score against references");
  evaluate->add_option("--manifest", manifest_path)->required();
  evaluate->add_option("--model", model_path);
  evaluate->add_option("--dict", dict_path);
  evaluate->add_option("--hyp-dir", hyp_dir,
                       "directory of <id>.txt hypothesis files");
  evaluate->add_option("--out", out_path)->required();
  add_common(evaluate, opts);

  auto* piano = app.add_subcommand(
      "piano-experiment",
      "dictionary-imbalance study: 3 strategies, seeded reruns, histogram");
  piano->add_option("--seeds", seeds)->check(CLI::PositiveNumber);
  piano->add_option("--out", out_path)->required();
  add_common(piano, opts);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (learn->parsed())
      return cmd_learn_dict(manifest_path, strategy, out_path, opts);
    if (train->parsed()) return cmd_train(manifest_path, dict_path, out_path, opts);
    if (detect->parsed())
      return cmd_detect(manifest_path, model_path, dict_path, out_path, opts);
    if (evaluate->parsed())
      return cmd_evaluate(manifest_path, model_path, dict_path, hyp_dir,
                          out_path, opts);
    if (piano->parsed()) return cmd_piano_experiment(seeds, out_path, opts);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const FormatError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
