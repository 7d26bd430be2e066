#include "kglit/core/features.hpp"

#include <algorithm>
#include <limits>

#include "kglit/core/rng.hpp"

namespace kglit {

LiteralFeatureMatrix normalize_features(std::vector<double> raw,
                                        std::vector<std::uint8_t> mask,
                                        std::size_t n_entities,
                                        std::size_t n_attrs) {
  LiteralFeatureMatrix m;
  m.n_entities = n_entities;
  m.n_attrs = n_attrs;
  m.values = std::move(raw);
  m.present = std::move(mask);
  m.attr_min.assign(n_attrs, 0.0);
  m.attr_max.assign(n_attrs, 0.0);

  for (std::size_t a = 0; a < n_attrs; ++a) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (std::size_t e = 0; e < n_entities; ++e) {
      if (!m.present[e * n_attrs + a]) continue;
      lo = std::min(lo, m.values[e * n_attrs + a]);
      hi = std::max(hi, m.values[e * n_attrs + a]);
    }
    if (lo > hi) {  // no present cell for this attribute
      m.attr_min[a] = m.attr_max[a] = 0.0;
      continue;
    }
    m.attr_min[a] = lo;
    m.attr_max[a] = hi;
    for (std::size_t e = 0; e < n_entities; ++e) {
      const std::size_t idx = e * n_attrs + a;
      if (!m.present[idx]) {
        m.values[idx] = 0.0;
        continue;
      }
      m.values[idx] = hi == lo ? 0.5 : (m.values[idx] - lo) / (hi - lo);
    }
  }
  return m;
}

LiteralFeatureMatrix build_feature_matrix(const KnowledgeGraph& g,
                                          std::uint64_t seed) {
  const std::size_t ne = g.num_entities();
  const std::size_t na = g.num_attrs();
  // Candidate values per cell, in file order.
  std::vector<std::vector<double>> cells(ne * na);
  for (const auto& t : g.attributive) {
    cells[t.s * na + t.a].push_back(t.v);
  }

  Rng rng(seed, "feature-matrix");
  std::vector<double> raw(ne * na, 0.0);
  std::vector<std::uint8_t> mask(ne * na, 0);
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const auto& c = cells[i];
    if (c.empty()) continue;
    mask[i] = 1;
    raw[i] = c.size() == 1 ? c[0] : c[rng.uniform_int(c.size())];
  }
  return normalize_features(std::move(raw), std::move(mask), ne, na);
}

}  // namespace kglit
