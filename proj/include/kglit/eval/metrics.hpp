#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "kglit/core/filter_index.hpp"
#include "kglit/core/graph.hpp"
#include "kglit/core/thread_pool.hpp"
#include "kglit/models/scorer.hpp"

namespace kglit {

enum class CorruptionSide { subject, object };

/// Both filtered ranks of each evaluated triple.
struct RankList {
  std::vector<std::pair<std::uint32_t, std::uint32_t>> ranks;  // (subject, object)
};

/// Filtered rank with "realistic" tie handling: candidates forming a known
/// triple (any split) other than the test triple itself are removed, and
/// rank = 1 + |strictly greater| + round-half-up(|ties| / 2).
std::uint32_t filtered_rank(const Scorer& scorer, const RelTriple& triple,
                            CorruptionSide side, const FilterIndex& filter);

/// Ranks every triple of the list on both corruption sides. Triples are
/// independent; they are ranked concurrently against the immutable scorer.
RankList rank_triples(const Scorer& scorer, std::span<const RelTriple> triples,
                      const FilterIndex& filter, ThreadPool& pool);

struct EvalReport {
  double mr = 0.0;
  double mrr = 0.0;
  double hits1 = 0.0;
  double hits3 = 0.0;
  double hits10 = 0.0;
  std::size_t n_test = 0;
  std::optional<double> acc;  // synthetic runs only

  // multi-run aggregation slots
  std::optional<double> mr_std, mrr_std, hits1_std, hits3_std, hits10_std, acc_std;
  bool single_run = false;
};

/// MR / MRR / Hits@{1,3,10} over the pooled subject- and object-side ranks.
/// Errors on an empty list rather than returning NaN.
EvalReport metrics(const RankList& ranks);

/// Names of the synthetic task vocabulary inside an enriched dataset.
struct SyntheticVocab {
  std::string rel_name;
  std::string class_high;
  std::string class_low;
};

/// Fraction of E' whose correct class entity outscores the other one.
/// Membership comes from the class triples across all splits; ties go to
/// the high class.
double synthetic_accuracy(const Scorer& scorer, const KnowledgeGraph& g,
                          const SyntheticVocab& vocab);

/// Mean / sample standard deviation across runs; one report sets the
/// single-run flag and zero deviations.
EvalReport aggregate_runs(std::span<const EvalReport> reports);

}  // namespace kglit
