#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "kglit/core/filter_index.hpp"
#include "kglit/core/graph.hpp"
#include "kglit/core/rng.hpp"

namespace kglit {

/// One 1-N training row: all entities are scored as replacements for the
/// missing side. side == to_objects ranks objects of (key=s, rel); side ==
/// to_subjects ranks subjects of (rel, key=o).
enum class RowSide : std::uint8_t { to_objects = 0, to_subjects = 1 };

struct OneToNRow {
  std::uint32_t key = 0;
  std::uint32_t rel = 0;
  RowSide side = RowSide::to_objects;
};

/// Unique (s,p) and (p,o) keys of the training split, both directions.
std::vector<OneToNRow> build_one_to_n_rows(const KnowledgeGraph& g);

/// Smoothed binary labels over all entities: y' = (1-ls)*y + ls/n.
void fill_one_to_n_labels(std::span<double> out,
                          std::span<const std::uint32_t> true_ids, double ls);

struct NegativeSample {
  std::vector<RelTriple> triples;  // n_neg per positive, positive-major order
  std::size_t known_accepted = 0;  // corruptions that stayed known after one resample
};

/// Corrupts subject or object (coin flip) with a uniform entity drawn from
/// all entities except the original one, so a corruption never equals its
/// positive. A corruption that hits a known training triple is resampled
/// once; if still known it is accepted and counted.
NegativeSample negative_sample(std::span<const RelTriple> positives,
                               const FilterIndex& train_index,
                               std::size_t n_entities, std::size_t n_neg,
                               Rng& rng);

/// Train-only label/membership index (the FilterIndex over just the
/// training split).
FilterIndex make_train_index(const KnowledgeGraph& g);

}  // namespace kglit
