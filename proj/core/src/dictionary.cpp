#include "aedkit/dictionary.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <limits>

#include "aedkit/errors.hpp"
#include "aedkit/rng.hpp"

namespace aed {

namespace {

// Seed stream tags: one per learning stage so that per-event / per-cluster
// randomness stays independent of list order elsewhere.
constexpr std::uint64_t kGmmStream = 0x67;
constexpr std::uint64_t kNmfStream = 0xD1C7;

std::uint64_t cluster_item(int event, int cluster) {
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(event)) << 32) |
         static_cast<std::uint32_t>(cluster);
}

struct AtomSink {
  std::vector<Matrix> blocks;
  std::vector<AtomTag> tags;
  Eigen::Index rows = 0;

  void add(const Matrix& basis, int event, int cluster) {
    rows = basis.rows();
    blocks.push_back(basis);
    for (Eigen::Index a = 0; a < basis.cols(); ++a)
      tags.push_back({event, cluster, static_cast<int>(a)});
  }

  Dictionary finish(std::vector<std::string> labels) const {
    Eigen::Index total = 0;
    for (const auto& b : blocks) total += b.cols();
    if (total == 0) throw InputError("dictionary: no atoms could be learned");
    Dictionary d;
    d.basis.resize(rows, total);
    Eigen::Index at = 0;
    for (const auto& b : blocks) {
      d.basis.middleCols(at, b.cols()) = b;
      at += b.cols();
    }
    d.tags = tags;
    d.event_labels = std::move(labels);
    return d;
  }
};

// Rank usable for a sub-spectrogram of q_c frames given the r < min(p, q)
// bound; 0 means the cluster cannot be factorized at all.
int effective_rank(int requested, Eigen::Index p, Eigen::Index q_c) {
  const auto bound = static_cast<int>(std::min(p, q_c)) - 1;
  return std::max(std::min(requested, bound), 0);
}

NmfConfig with_rank_seed(const NmfConfig& base, int rank, std::uint64_t seed) {
  NmfConfig c = base;
  c.rank = rank;
  c.seed = seed;
  return c;
}

void check_event_inputs(const std::vector<Spectrogram>& spectra,
                        const std::vector<std::string>& labels) {
  if (spectra.empty()) throw InputError("dictionary: no event spectra");
  if (labels.size() != spectra.size())
    throw DimensionError("dictionary: label count != event count");
  for (std::size_t m = 1; m < spectra.size(); ++m)
    if (spectra[m].values.rows() != spectra[0].values.rows())
      throw DimensionError("dictionary: event spectra differ in bin count");
}

// Shared by CSDL and CNDL: MFCC -> GMM -> hard labels -> column split.
std::vector<Spectrogram> cluster_event(const Spectrogram& spec, int event,
                                       const DictLearnConfig& cfg) {
  GmmConfig gc = cfg.gmm;
  gc.components = cfg.clusters;
  gc.seed = derive_seed(cfg.seed, kGmmStream, static_cast<std::uint64_t>(event));
  if (spec.frames() < cfg.clusters) {
    std::cerr << "[aedkit] dictionary: event " << event
              << " has fewer frames than clusters; using a single cluster\n";
    std::vector<Spectrogram> one{spec};
    return one;
  }
  const Matrix features = mfcc(spec, cfg.mfcc);
  const GmmModel model = fit_gmm(features, gc);
  const std::vector<int> labels = hard_assign(model, features);
  return split_spectra(spec, labels, cfg.clusters);
}

bool cluster_usable(const Spectrogram& part, int event, int cluster,
                    int requested_rank, int* rank_out) {
  if (part.frames() == 0) return false;
  if (part.values.sum() <= 0.0) {
    std::cerr << "[aedkit] dictionary: event " << event << " cluster " << cluster
              << " is silent; skipped\n";
    return false;
  }
  const int r = effective_rank(requested_rank, part.values.rows(), part.frames());
  if (r < 1) {
    std::cerr << "[aedkit] dictionary: event " << event << " cluster " << cluster
              << " has too few frames to factorize; skipped\n";
    return false;
  }
  *rank_out = r;
  return true;
}

}  // namespace

DictStrategy dict_strategy_from_string(const std::string& name) {
  if (name == "dl") return DictStrategy::DL;
  if (name == "enmf") return DictStrategy::ENMF;
  if (name == "cndl") return DictStrategy::CNDL;
  if (name == "csdl") return DictStrategy::CSDL;
  throw ConfigError("unknown dictionary strategy '" + name +
                    "' (expected dl, enmf, cndl or csdl)");
}

std::string to_string(DictStrategy s) {
  switch (s) {
    case DictStrategy::DL: return "dl";
    case DictStrategy::ENMF: return "enmf";
    case DictStrategy::CNDL: return "cndl";
    case DictStrategy::CSDL: return "csdl";
  }
  return "?";
}

std::string Dictionary::fingerprint() const {
  // FNV-1a over dims, tags and labels
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto feed = [&h](std::uint64_t v) {
    for (int b = 0; b < 8; ++b) {
      h ^= (v >> (8 * b)) & 0xff;
      h *= 0x100000001b3ULL;
    }
  };
  feed(static_cast<std::uint64_t>(basis.rows()));
  feed(static_cast<std::uint64_t>(basis.cols()));
  for (const auto& t : tags) {
    feed(static_cast<std::uint64_t>(static_cast<std::int64_t>(t.event)));
    feed(static_cast<std::uint64_t>(static_cast<std::int64_t>(t.cluster)));
    feed(static_cast<std::uint64_t>(static_cast<std::int64_t>(t.index)));
  }
  for (const auto& l : event_labels) {
    for (char c : l) feed(static_cast<unsigned char>(c));
    feed(0x1f);  // separator
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return std::string(buf);
}

Dictionary learn_csdl(const std::vector<Spectrogram>& event_spectra,
                      const std::vector<std::string>& event_labels,
                      const DictLearnConfig& cfg) {
  check_event_inputs(event_spectra, event_labels);
  AtomSink sink;
  for (std::size_t m = 0; m < event_spectra.size(); ++m) {
    const auto& spec = event_spectra[m];
    const int event = static_cast<int>(m);
    if (spec.frames() == 0) {
      std::cerr << "[aedkit] dictionary: event " << event << " ('"
                << event_labels[m] << "') is empty; skipped\n";
      continue;
    }
    const std::vector<Spectrogram> parts = cluster_event(spec, event, cfg);
    for (std::size_t c = 0; c < parts.size(); ++c) {
      const int cluster = static_cast<int>(c);
      int rank = 0;
      if (!cluster_usable(parts[c], event, cluster, cfg.atoms_per_cluster, &rank))
        continue;
      const auto seed =
          derive_seed(cfg.seed, kNmfStream, cluster_item(event, cluster));
      const NmfResult r =
          nmf_factorize(parts[c].values, with_rank_seed(cfg.nmf, rank, seed));
      sink.add(r.basis, event, cluster);
    }
  }
  return sink.finish(event_labels);
}

Dictionary learn_baseline(const std::vector<Spectrogram>& event_spectra,
                          const std::vector<std::string>& event_labels,
                          const DictLearnConfig& cfg) {
  check_event_inputs(event_spectra, event_labels);
  AtomSink sink;

  switch (cfg.strategy) {
    case DictStrategy::DL: {
      Eigen::Index total = 0;
      for (const auto& s : event_spectra) total += s.frames();
      Matrix all(event_spectra[0].values.rows(), total);
      Eigen::Index at = 0;
      for (const auto& s : event_spectra) {
        all.middleCols(at, s.frames()) = s.values;
        at += s.frames();
      }
      const int rank = effective_rank(cfg.dl_rank, all.rows(), all.cols());
      if (rank < 1) throw InputError("dictionary: too few frames for DL");
      const auto seed = derive_seed(cfg.seed, kNmfStream, cluster_item(-1, -1));
      const NmfResult r = nmf_factorize(all, with_rank_seed(cfg.nmf, rank, seed));
      sink.add(r.basis, -1, -1);
      break;
    }
    case DictStrategy::ENMF: {
      for (std::size_t m = 0; m < event_spectra.size(); ++m) {
        const int event = static_cast<int>(m);
        int rank = 0;
        if (!cluster_usable(event_spectra[m], event, -1, cfg.enmf_rank, &rank))
          continue;
        const auto seed =
            derive_seed(cfg.seed, kNmfStream, cluster_item(event, -1));
        const NmfResult r = nmf_factorize(event_spectra[m].values,
                                          with_rank_seed(cfg.nmf, rank, seed));
        sink.add(r.basis, event, -1);
      }
      break;
    }
    case DictStrategy::CNDL: {
      // Cluster exactly as CSDL (same derived seeds), rescale every cluster's
      // columns by 1 / frame-count, re-concatenate in cluster order, then run
      // one NMF per event with rank K * r_sub.
      for (std::size_t m = 0; m < event_spectra.size(); ++m) {
        const int event = static_cast<int>(m);
        if (event_spectra[m].frames() == 0) {
          std::cerr << "[aedkit] dictionary: event " << event << " ('"
                    << event_labels[m] << "') is empty; skipped\n";
          continue;
        }
        const std::vector<Spectrogram> parts =
            cluster_event(event_spectra[m], event, cfg);
        Matrix scaled(event_spectra[m].values.rows(),
                      event_spectra[m].values.cols());
        Eigen::Index at = 0;
        for (const auto& part : parts) {
          if (part.frames() == 0) continue;
          scaled.middleCols(at, part.frames()) =
              part.values / static_cast<double>(part.frames());
          at += part.frames();
        }
        int rank = 0;
        Spectrogram scaled_spec = event_spectra[m];
        scaled_spec.values = scaled.leftCols(at);
        if (!cluster_usable(scaled_spec, event, -1,
                            cfg.clusters * cfg.atoms_per_cluster, &rank))
          continue;
        const auto seed =
            derive_seed(cfg.seed, kNmfStream, cluster_item(event, -1));
        const NmfResult r = nmf_factorize(scaled_spec.values,
                                          with_rank_seed(cfg.nmf, rank, seed));
        sink.add(r.basis, event, -1);
      }
      break;
    }
    case DictStrategy::CSDL:
      throw ConfigError("learn_baseline: use learn_csdl for the csdl strategy");
  }
  return sink.finish(event_labels);
}

Dictionary learn_dictionary(const std::vector<Spectrogram>& event_spectra,
                            const std::vector<std::string>& event_labels,
                            const DictLearnConfig& cfg) {
  return cfg.strategy == DictStrategy::CSDL
             ? learn_csdl(event_spectra, event_labels, cfg)
             : learn_baseline(event_spectra, event_labels, cfg);
}

namespace {

double atom_correlation(const Vector& a, const Vector& b, AtomCorrelation kind) {
  if (kind == AtomCorrelation::Cosine) {
    const double na = a.norm(), nb = b.norm();
    if (na < 1e-15 || nb < 1e-15) return 0.0;
    return a.dot(b) / (na * nb);
  }
  const auto n = static_cast<double>(a.size());
  const double ma = a.mean(), mb = b.mean();
  const double cov = (a.array() - ma).cwiseProduct(b.array() - mb).sum() / n;
  const double va = (a.array() - ma).square().sum() / n;
  const double vb = (b.array() - mb).square().sum() / n;
  if (va < 1e-30 || vb < 1e-30) return 0.0;  // constant atom: treat as uncorrelated
  return cov / std::sqrt(va * vb);
}

}  // namespace

Dictionary reduce_min_correlation(const Dictionary& dict, int target,
                                  AtomCorrelation kind) {
  const int n = dict.atoms();
  if (target < 1 || target > n)
    throw ConfigError("reduce_min_correlation: target must be in [1, atoms]");

  std::vector<char> selected(static_cast<std::size_t>(n), 0);
  if (target == n) {
    std::fill(selected.begin(), selected.end(), 1);
  } else {
    Matrix corr(n, n);
    for (int i = 0; i < n; ++i) {
      corr(i, i) = 1.0;
      for (int j = i + 1; j < n; ++j) {
        corr(i, j) = corr(j, i) =
            atom_correlation(dict.basis.col(i), dict.basis.col(j), kind);
      }
    }
    int best_i = 0, best_j = 1;
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        if (corr(i, j) < best) {
          best = corr(i, j);
          best_i = i;
          best_j = j;
        }
    selected[static_cast<std::size_t>(best_i)] = 1;
    int count = 1;
    if (target >= 2) {
      selected[static_cast<std::size_t>(best_j)] = 1;
      count = 2;
    }
    while (count < target) {
      int pick = -1;
      double pick_score = std::numeric_limits<double>::infinity();
      for (int c = 0; c < n; ++c) {
        if (selected[static_cast<std::size_t>(c)]) continue;
        double worst = -std::numeric_limits<double>::infinity();
        for (int s = 0; s < n; ++s)
          if (selected[static_cast<std::size_t>(s)])
            worst = std::max(worst, corr(c, s));
        if (worst < pick_score) {
          pick_score = worst;
          pick = c;
        }
      }
      selected[static_cast<std::size_t>(pick)] = 1;
      ++count;
    }
  }

  Dictionary out;
  out.event_labels = dict.event_labels;
  const int kept = target;
  out.basis.resize(dict.basis.rows(), kept);
  out.tags.reserve(static_cast<std::size_t>(kept));
  int at = 0;
  for (int i = 0; i < n; ++i) {
    if (!selected[static_cast<std::size_t>(i)]) continue;
    out.basis.col(at++) = dict.basis.col(i);
    out.tags.push_back(dict.tags[static_cast<std::size_t>(i)]);
  }
  return out;
}

double reconstruction_score(const Spectrogram& exemplar, const Dictionary& dict,
                            const NmfConfig& cfg) {
  if (dict.atoms() == 0) throw InputError("reconstruction_score: empty dictionary");
  const SupervisedNmfResult r = nmf_supervised(exemplar.values, dict.basis, cfg);
  return -r.cost_trace.back() / std::max(exemplar.frames(), 1);
}

}  // namespace aed
