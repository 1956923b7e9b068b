#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "aedkit/dsp.hpp"
#include "aedkit/gmm.hpp"
#include "aedkit/nmf.hpp"
#include "aedkit/types.hpp"

namespace aed {

// Provenance of one dictionary atom. event/cluster are -1 where the learning
// strategy has no such notion (pooled or unclustered learning).
struct AtomTag {
  int event = -1;
  int cluster = -1;
  int index = 0;

  bool operator==(const AtomTag&) const = default;
};

struct Dictionary {
  Matrix basis;                           // bins x atoms, columns L1-normalized
  std::vector<AtomTag> tags;              // one per column
  std::vector<std::string> event_labels;  // vocabulary; tag.event indexes it

  int atoms() const { return static_cast<int>(basis.cols()); }

  // Hash of dimensions, tags and labels. Stored in classifier models to catch
  // dictionary/model mismatches at load time.
  std::string fingerprint() const;
};

// How the overall dictionary is learned from per-event spectra:
//   DL    one NMF over the concatenated spectra of every event
//   ENMF  one NMF per event, results concatenated
//   CNDL  cluster each event, rescale every cluster by 1/frame-count,
//         one NMF per event over the re-concatenated clusters
//   CSDL  cluster each event, one NMF per cluster, all results concatenated
enum class DictStrategy { DL, ENMF, CNDL, CSDL };

DictStrategy dict_strategy_from_string(const std::string& name);
std::string to_string(DictStrategy s);

struct DictLearnConfig {
  DictStrategy strategy = DictStrategy::CSDL;
  int clusters = 2;           // K, used by CSDL / CNDL
  int atoms_per_cluster = 3;  // r_sub; CNDL uses rank K * r_sub per event
  int dl_rank = 35;           // DL: total atoms
  int enmf_rank = 3;          // ENMF: atoms per event
  MfccConfig mfcc;
  GmmConfig gmm;   // components/seed are overridden per event
  NmfConfig nmf;   // rank/seed are overridden per factorization
  std::uint64_t seed = 0;
};

// Clustering + separate sub-dictionary learning. Per event: MFCC features,
// GMM fit, hard assignment, column split, one NMF per non-empty cluster; the
// sub-dictionaries are concatenated in event-then-cluster order. The per-
// cluster rank shrinks to min(p, cluster frames) - 1 when the configured
// r_sub would violate the NMF rank bound; clusters that cannot support even
// rank 1 are skipped with a warning.
Dictionary learn_csdl(const std::vector<Spectrogram>& event_spectra,
                      const std::vector<std::string>& event_labels,
                      const DictLearnConfig& cfg);

// The three comparison strategies (cfg.strategy must not be CSDL).
Dictionary learn_baseline(const std::vector<Spectrogram>& event_spectra,
                          const std::vector<std::string>& event_labels,
                          const DictLearnConfig& cfg);

// Dispatches on cfg.strategy.
Dictionary learn_dictionary(const std::vector<Spectrogram>& event_spectra,
                            const std::vector<std::string>& event_labels,
                            const DictLearnConfig& cfg);

enum class AtomCorrelation { Pearson, Cosine };

// Keep `target` atoms: the pair with minimum correlation first, then greedily
// the atom whose maximum correlation to the kept set is smallest. Ties go to
// the lowest atom index; surviving atoms keep their original column order.
Dictionary reduce_min_correlation(const Dictionary& dict, int target,
                                  AtomCorrelation kind = AtomCorrelation::Pearson);

// Negated final KL cost of a supervised decomposition of the exemplar on the
// dictionary, per frame. Higher is better; 0 means exact reconstruction.
double reconstruction_score(const Spectrogram& exemplar, const Dictionary& dict,
                            const NmfConfig& cfg);

}  // namespace aed
