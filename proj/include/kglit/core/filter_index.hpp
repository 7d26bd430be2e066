#pragma once

#include <cstdint>
#include <span>
#include <unordered_map>
#include <vector>

#include "kglit/core/graph.hpp"

namespace kglit {

/// Membership index over the union of train/valid/test relational triples,
/// used to drop known-true corruptions before ranking. Immutable after
/// construction; safe for concurrent readers.
class FilterIndex {
 public:
  explicit FilterIndex(const KnowledgeGraph& g);
  /// Index over an explicit triple set (e.g. the training split only).
  explicit FilterIndex(std::span<const RelTriple> triples);

  bool contains(std::uint32_t s, std::uint32_t p, std::uint32_t o) const;

  /// All true objects o with (s, p, o) known, sorted ascending.
  std::span<const std::uint32_t> objects_of(std::uint32_t s, std::uint32_t p) const;
  /// All true subjects s with (s, p, o) known, sorted ascending.
  std::span<const std::uint32_t> subjects_of(std::uint32_t p, std::uint32_t o) const;

 private:
  static std::uint64_t key(std::uint32_t a, std::uint32_t b) {
    return (static_cast<std::uint64_t>(a) << 32) | b;
  }
  std::unordered_map<std::uint64_t, std::vector<std::uint32_t>> sp_to_o_;
  std::unordered_map<std::uint64_t, std::vector<std::uint32_t>> po_to_s_;
};

}  // namespace kglit
