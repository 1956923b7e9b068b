#include "aedkit/detection.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "aedkit/errors.hpp"

namespace aed {

namespace {

struct Run {
  int start;  // first active frame
  int end;    // last active frame, inclusive
  int length() const { return end - start + 1; }
};

std::vector<Run> find_runs(const std::vector<std::uint8_t>& row) {
  std::vector<Run> runs;
  const int n = static_cast<int>(row.size());
  int i = 0;
  while (i < n) {
    if (row[static_cast<std::size_t>(i)]) {
      int j = i;
      while (j + 1 < n && row[static_cast<std::size_t>(j) + 1]) ++j;
      runs.push_back({i, j});
      i = j + 1;
    } else {
      ++i;
    }
  }
  return runs;
}

// Binary median with edge replication: a window position is active when
// more than half of its (replicated) samples are.
std::vector<std::uint8_t> median_filter(const std::vector<std::uint8_t>& row,
                                        int len) {
  const int n = static_cast<int>(row.size());
  const int half = len / 2;
  std::vector<std::uint8_t> out(static_cast<std::size_t>(n), 0);
  for (int t = 0; t < n; ++t) {
    int ones = 0;
    for (int k = -half; k <= half; ++k) {
      const int idx = std::clamp(t + k, 0, n - 1);
      ones += row[static_cast<std::size_t>(idx)];
    }
    out[static_cast<std::size_t>(t)] = ones > half ? 1 : 0;
  }
  return out;
}

// Frame-count thresholds. The comparisons are strict in seconds; the small
// slack only absorbs floating-point noise in max_gap / hop ratios.
bool gap_fillable(int frames, double hop, double max_gap_s) {
  return static_cast<double>(frames) < max_gap_s / hop - 1e-6;
}

bool duration_keepable(int frames, double hop, double min_duration_s) {
  return static_cast<double>(frames) > min_duration_s / hop + 1e-6;
}

}  // namespace

std::pair<EventRoll, EventList> postprocess(const EventRoll& roll,
                                            const PostProcessConfig& cfg) {
  if (cfg.median_len < 1 || cfg.median_len % 2 == 0)
    throw ConfigError("postprocess: median_len must be odd and >= 1");
  if (cfg.max_gap_s < 0.0 || cfg.min_duration_s < 0.0)
    throw ConfigError("postprocess: durations must be >= 0");
  if (roll.frame_hop <= 0.0)
    throw ConfigError("postprocess: roll has no frame hop");

  EventRoll out;
  out.labels = roll.labels;
  out.frame_hop = roll.frame_hop;
  out.active = BinaryMatrix::Zero(roll.active.rows(), roll.active.cols());

  const int n = roll.frames();
  for (int e = 0; e < roll.events(); ++e) {
    std::vector<std::uint8_t> row(static_cast<std::size_t>(n));
    for (int t = 0; t < n; ++t) row[static_cast<std::size_t>(t)] = roll.active(e, t);

    row = median_filter(row, cfg.median_len);

    // fill short gaps bounded by active runs on both sides
    std::vector<Run> runs = find_runs(row);
    for (std::size_t r = 1; r < runs.size(); ++r) {
      const int gap = runs[r].start - runs[r - 1].end - 1;
      if (gap_fillable(gap, roll.frame_hop, cfg.max_gap_s))
        for (int t = runs[r - 1].end + 1; t < runs[r].start; ++t)
          row[static_cast<std::size_t>(t)] = 1;
    }

    // drop too-short events, regenerate the row
    runs = find_runs(row);
    for (const Run& run : runs) {
      if (!duration_keepable(run.length(), roll.frame_hop, cfg.min_duration_s))
        continue;
      for (int t = run.start; t <= run.end; ++t) out.active(e, t) = 1;
    }
  }
  return {out, roll_to_events(out)};
}

EventList roll_to_events(const EventRoll& roll) {
  struct Item {
    double onset, offset;
    int row;
  };
  std::vector<Item> items;
  const int n = roll.frames();
  for (int e = 0; e < roll.events(); ++e) {
    std::vector<std::uint8_t> row(static_cast<std::size_t>(n));
    for (int t = 0; t < n; ++t) row[static_cast<std::size_t>(t)] = roll.active(e, t);
    for (const Run& run : find_runs(row))
      items.push_back({run.start * roll.frame_hop,
                       (run.end + 1) * roll.frame_hop, e});
  }
  std::sort(items.begin(), items.end(), [](const Item& a, const Item& b) {
    return a.onset != b.onset ? a.onset < b.onset : a.row < b.row;
  });
  EventList events;
  events.reserve(items.size());
  for (const auto& it : items)
    events.push_back({it.onset, it.offset, roll.labels[static_cast<std::size_t>(it.row)]});
  return events;
}

EventRoll events_to_roll(const EventList& events,
                         const std::vector<std::string>& labels,
                         double frame_hop_seconds, int frames) {
  if (frame_hop_seconds <= 0.0)
    throw ConfigError("events_to_roll: frame hop must be > 0");
  EventRoll roll;
  roll.labels = labels;
  roll.frame_hop = frame_hop_seconds;
  roll.active = BinaryMatrix::Zero(static_cast<Eigen::Index>(labels.size()), frames);
  for (const auto& ev : events) {
    const auto it = std::find(labels.begin(), labels.end(), ev.label);
    if (it == labels.end())
      throw InputError("events_to_roll: unknown label '" + ev.label + "'");
    const auto row = static_cast<Eigen::Index>(it - labels.begin());
    // inverse of roll_to_events' frame -> time mapping
    const int first = static_cast<int>(std::lround(ev.onset / frame_hop_seconds));
    const int last = static_cast<int>(std::lround(ev.offset / frame_hop_seconds)) - 1;
    for (int t = std::max(first, 0); t <= std::min(last, frames - 1); ++t)
      roll.active(row, t) = 1;
  }
  return roll;
}

DetectionResult detect(const Spectrogram& test_spec, const Dictionary& dict,
                       const ClassifierModel& model, int noise_rank,
                       const NmfConfig& nmf_cfg, const PostProcessConfig& pp_cfg) {
  if (!model.dict_fingerprint.empty() &&
      model.dict_fingerprint != dict.fingerprint())
    throw ConfigError("detect: classifier model was trained against a different "
                      "dictionary (fingerprint mismatch)");

  const SemiSupervisedNmfResult dec =
      nmf_semi_supervised(test_spec.values, dict.basis, noise_rank, nmf_cfg);

  DetectionResult res;
  res.raw = predict_frames(model, dec.event_activations, test_spec.hop_seconds());
  auto [processed, events] = postprocess(res.raw, pp_cfg);
  res.processed = std::move(processed);
  res.events = std::move(events);
  return res;
}

}  // namespace aed
