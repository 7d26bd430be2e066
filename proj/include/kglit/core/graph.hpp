#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace kglit {

struct RelTriple {
  std::uint32_t s = 0;
  std::uint32_t p = 0;
  std::uint32_t o = 0;
  friend bool operator==(const RelTriple&, const RelTriple&) = default;
};

struct AttrTriple {
  std::uint32_t s = 0;
  std::uint32_t a = 0;
  double v = 0.0;
  friend bool operator==(const AttrTriple&, const AttrTriple&) = default;
};

enum class Split { train, valid, test };

/// Immutable once constructed. Vocabularies are sorted lexicographically and
/// frozen, so indices are stable across runs regardless of file row order.
/// Relational triples carry entity objects; attributive triples carry real
/// values, and the two sets are disjoint by type. Attributive triples are
/// not split: all literal data is training-side.
struct KnowledgeGraph {
  std::vector<std::string> entities;
  std::vector<std::string> entity_relations;
  std::vector<std::string> attr_relations;

  std::vector<RelTriple> train;
  std::vector<RelTriple> valid;
  std::vector<RelTriple> test;
  std::vector<AttrTriple> attributive;

  std::size_t num_entities() const { return entities.size(); }
  std::size_t num_relations() const { return entity_relations.size(); }
  std::size_t num_attrs() const { return attr_relations.size(); }

  const std::vector<RelTriple>& split(Split s) const {
    switch (s) {
      case Split::train: return train;
      case Split::valid: return valid;
      default: return test;
    }
  }
  std::vector<RelTriple>& split(Split s) {
    switch (s) {
      case Split::train: return train;
      case Split::valid: return valid;
      default: return test;
    }
  }

  std::optional<std::uint32_t> entity_id(std::string_view name) const;
  std::optional<std::uint32_t> relation_id(std::string_view name) const;
  std::optional<std::uint32_t> attr_id(std::string_view name) const;

  /// Checks index bounds, vocabulary sortedness and per-split uniqueness.
  /// Throws DomainError on violation.
  void validate() const;

  /// Content fingerprint over vocabularies and triple lists (order included).
  std::uint64_t fingerprint() const;
};

enum class UnknownEntityPolicy { reject, drop_warn };

struct LoadOptions {
  UnknownEntityPolicy unknown_policy = UnknownEntityPolicy::reject;
  /// Set by the loader: number of valid/test triples dropped under drop_warn.
  mutable std::size_t dropped = 0;
};

/// Reads tab-separated files: relational rows are subject<TAB>predicate<TAB>
/// object, attributive rows subject<TAB>predicate<TAB>decimal. Vocabulary is
/// built from the training split and the attributive subjects; valid/test
/// rows mentioning anything outside it follow the unknown-entity policy.
KnowledgeGraph load_graph(const std::string& train_path,
                          const std::string& valid_path,
                          const std::string& test_path,
                          const std::string& literals_path,
                          const LoadOptions& opts = {});

/// Writes the four files back in the same format. Values round-trip exactly
/// (shortest representation that parses back to the same double).
void write_graph(const KnowledgeGraph& g, const std::string& train_path,
                 const std::string& valid_path, const std::string& test_path,
                 const std::string& literals_path);

/// Version-tagged single-file cache embedding the vocabulary order.
void save_graph_cache(const KnowledgeGraph& g, const std::string& path);
KnowledgeGraph load_graph_cache(const std::string& path);

std::string format_value(double v);

}  // namespace kglit
