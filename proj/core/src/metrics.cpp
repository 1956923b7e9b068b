#include "aedkit/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "aedkit/errors.hpp"

namespace aed {

namespace {

long long to_us(double seconds) {
  return static_cast<long long>(std::llround(seconds * 1e6));
}

// Event activity per unit of `step_us`, decided in integer microseconds:
// unit u is active iff [onset, offset) overlaps [u*step, (u+1)*step).
std::map<std::string, std::vector<std::uint8_t>> rasterize(
    const EventList& events, long long duration_us, long long step_us) {
  const auto n_units =
      static_cast<std::size_t>((duration_us + step_us - 1) / step_us);
  std::map<std::string, std::vector<std::uint8_t>> grid;
  for (const auto& ev : events) {
    const long long on = std::max(to_us(ev.onset), 0LL);
    const long long off = std::min(to_us(ev.offset), duration_us);
    if (off <= on) continue;
    auto& row = grid[ev.label];
    if (row.empty()) row.assign(n_units, 0);
    const auto first = static_cast<std::size_t>(on / step_us);
    const auto last = static_cast<std::size_t>((off - 1) / step_us);
    for (std::size_t u = first; u <= last && u < n_units; ++u) row[u] = 1;
  }
  return grid;
}

std::set<std::string> labels_of(const EventList& events) {
  std::set<std::string> out;
  for (const auto& ev : events) out.insert(ev.label);
  return out;
}

// TP/FP/FN over every (label, unit) cell of one recording, optionally
// restricted to a single class.
MetricCounts count_units(const EventList& ref, const EventList& hyp,
                         long long duration_us, long long step_us,
                         const std::string* only_class = nullptr) {
  const auto ref_grid = rasterize(ref, duration_us, step_us);
  const auto hyp_grid = rasterize(hyp, duration_us, step_us);
  std::set<std::string> classes;
  for (const auto& [label, _] : ref_grid) classes.insert(label);
  for (const auto& [label, _] : hyp_grid) classes.insert(label);

  MetricCounts c;
  static const std::vector<std::uint8_t> kEmpty;
  for (const auto& label : classes) {
    if (only_class && label != *only_class) continue;
    const auto rit = ref_grid.find(label);
    const auto hit = hyp_grid.find(label);
    const auto& r = rit != ref_grid.end() ? rit->second : kEmpty;
    const auto& h = hit != hyp_grid.end() ? hit->second : kEmpty;
    const std::size_t n = std::max(r.size(), h.size());
    for (std::size_t u = 0; u < n; ++u) {
      const bool in_r = u < r.size() && r[u];
      const bool in_h = u < h.size() && h[u];
      if (in_r && in_h) ++c.tp;
      else if (in_h) ++c.fp;
      else if (in_r) ++c.fn;
    }
  }
  return c;
}

void check_pairs(const std::vector<RecordingPair>& pairs, double step_s) {
  if (step_s <= 0.0) throw ConfigError("metrics: step must be > 0");
  for (const auto& p : pairs)
    if (p.duration_s <= 0.0)
      throw InputError("metrics: recording '" + p.id + "' has no duration");
}

}  // namespace

MetricReport frame_based_f(const std::vector<RecordingPair>& pairs,
                           double frame_s) {
  check_pairs(pairs, frame_s);
  const long long step_us = to_us(frame_s);
  MetricReport rep;
  for (const auto& p : pairs) {
    RecordingMetric rm;
    rm.id = p.id;
    rm.counts =
        count_units(p.reference, p.hypothesis, to_us(p.duration_s), step_us);
    rm.precision = rm.counts.precision();
    rm.recall = rm.counts.recall();
    rm.f_measure = rm.counts.f_measure();
    rep.counts.tp += rm.counts.tp;
    rep.counts.fp += rm.counts.fp;
    rep.counts.fn += rm.counts.fn;
    rep.per_recording.push_back(std::move(rm));
  }
  if (!rep.per_recording.empty()) {
    for (const auto& rm : rep.per_recording) {
      rep.precision += rm.precision;
      rep.recall += rm.recall;
      rep.f_measure += rm.f_measure;
    }
    rep.precision /= static_cast<double>(rep.per_recording.size());
    rep.recall /= static_cast<double>(rep.per_recording.size());
    rep.f_measure /= static_cast<double>(rep.per_recording.size());
  }
  return rep;
}

MetricReport segment_based_f(const std::vector<RecordingPair>& pairs,
                             double segment_s) {
  check_pairs(pairs, segment_s);
  const long long step_us = to_us(segment_s);
  MetricReport rep;
  for (const auto& p : pairs) {
    const MetricCounts c =
        count_units(p.reference, p.hypothesis, to_us(p.duration_s), step_us);
    rep.counts.tp += c.tp;
    rep.counts.fp += c.fp;
    rep.counts.fn += c.fn;
  }
  rep.precision = rep.counts.precision();
  rep.recall = rep.counts.recall();
  rep.f_measure = rep.counts.f_measure();
  return rep;
}

MetricReport class_wise_segment_f(const std::vector<RecordingPair>& pairs,
                                  double segment_s) {
  check_pairs(pairs, segment_s);
  const long long step_us = to_us(segment_s);

  std::set<std::string> ref_classes, all_classes;
  for (const auto& p : pairs) {
    const auto r = labels_of(p.reference);
    const auto h = labels_of(p.hypothesis);
    ref_classes.insert(r.begin(), r.end());
    all_classes.insert(r.begin(), r.end());
    all_classes.insert(h.begin(), h.end());
  }

  MetricReport rep;
  double f_sum = 0.0, p_sum = 0.0, r_sum = 0.0;
  for (const auto& label : all_classes) {
    ClassMetric cm;
    cm.in_reference = ref_classes.count(label) > 0;
    for (const auto& p : pairs) {
      const MetricCounts c = count_units(p.reference, p.hypothesis,
                                         to_us(p.duration_s), step_us, &label);
      cm.counts.tp += c.tp;
      cm.counts.fp += c.fp;
      cm.counts.fn += c.fn;
    }
    cm.precision = cm.counts.precision();
    cm.recall = cm.counts.recall();
    cm.f_measure = cm.counts.f_measure();
    if (cm.in_reference) {
      f_sum += cm.f_measure;
      p_sum += cm.precision;
      r_sum += cm.recall;
      rep.counts.tp += cm.counts.tp;
      rep.counts.fp += cm.counts.fp;
      rep.counts.fn += cm.counts.fn;
    } else {
      rep.spurious_fp += cm.counts.fp;
    }
    rep.per_class.emplace(label, std::move(cm));
  }
  if (!ref_classes.empty()) {
    const auto n = static_cast<double>(ref_classes.size());
    rep.precision = p_sum / n;
    rep.recall = r_sum / n;
    rep.f_measure = f_sum / n;
  }
  return rep;
}

namespace {

void append_metric_json(std::ostringstream& os, const char* name,
                        const MetricReport& r) {
  os << "  \"" << name << "\": {\"precision\": " << r.precision
     << ", \"recall\": " << r.recall << ", \"f_measure\": " << r.f_measure
     << ", \"tp\": " << r.counts.tp << ", \"fp\": " << r.counts.fp
     << ", \"fn\": " << r.counts.fn << "}";
}

}  // namespace

std::string report_to_json(const MetricReport& fb, const MetricReport& sb,
                           const MetricReport& cwsb) {
  std::ostringstream os;
  os.precision(10);
  os << "{\n";
  append_metric_json(os, "F_fb", fb);
  os << ",\n";
  append_metric_json(os, "F_sb", sb);
  os << ",\n";
  append_metric_json(os, "F_cwsb", cwsb);
  os << ",\n  \"class_wise\": {";
  bool first = true;
  for (const auto& [label, cm] : cwsb.per_class) {
    if (!first) os << ", ";
    first = false;
    os << "\"" << label << "\": {\"f_measure\": " << cm.f_measure
       << ", \"in_reference\": " << (cm.in_reference ? "true" : "false") << "}";
  }
  os << "},\n  \"spurious_fp\": " << cwsb.spurious_fp << "\n}\n";
  return os.str();
}

std::string report_table(const MetricReport& fb, const MetricReport& sb,
                         const MetricReport& cwsb) {
  std::ostringstream os;
  os.precision(4);
  os << std::fixed;
  os << "metric   precision  recall     f-measure\n";
  os << "F_fb     " << fb.precision << "     " << fb.recall << "     "
     << fb.f_measure << "\n";
  os << "F_sb     " << sb.precision << "     " << sb.recall << "     "
     << sb.f_measure << "\n";
  os << "F_cwsb   " << cwsb.precision << "     " << cwsb.recall << "     "
     << cwsb.f_measure << "\n";
  return os.str();
}

}  // namespace aed
