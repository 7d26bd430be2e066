#pragma once

#include <cstdint>
#include <vector>

#include "kglit/core/graph.hpp"

namespace kglit {

/// Per-entity numerical feature vectors, one dimension per attributive
/// relation. Cells without a raw value are exactly 0 with present=false;
/// present cells hold the min-max-normalized value for that attribute.
struct LiteralFeatureMatrix {
  std::size_t n_entities = 0;
  std::size_t n_attrs = 0;
  std::vector<double> values;        // row-major, n_entities x n_attrs
  std::vector<std::uint8_t> present;
  std::vector<double> attr_min;      // raw-space normalization stats
  std::vector<double> attr_max;

  double at(std::size_t e, std::size_t a) const { return values[e * n_attrs + a]; }
  bool has(std::size_t e, std::size_t a) const { return present[e * n_attrs + a] != 0; }
  const double* row(std::size_t e) const { return values.data() + e * n_attrs; }

  /// Min-max map of a raw value for attribute a (0.5 on degenerate range).
  double normalize_raw(std::size_t a, double raw) const {
    const double lo = attr_min[a], hi = attr_max[a];
    if (hi == lo) return 0.5;
    return (raw - lo) / (hi - lo);
  }
};

/// Applies per-attribute min-max normalization over present cells only;
/// a constant attribute maps to 0.5, absent cells stay 0.
LiteralFeatureMatrix normalize_features(std::vector<double> raw,
                                        std::vector<std::uint8_t> mask,
                                        std::size_t n_entities,
                                        std::size_t n_attrs);

/// Builds the feature table: entities with several raw values for an
/// attribute get one picked uniformly at random (seeded; single-valued
/// cells consume no randomness), then normalize_features is applied.
LiteralFeatureMatrix build_feature_matrix(const KnowledgeGraph& g,
                                          std::uint64_t seed);

}  // namespace kglit
