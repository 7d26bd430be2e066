#pragma once

#include <cstdint>
#include <vector>

#include "kglit/models/state.hpp"

namespace kglit {

/// Gradient buffer aligned with one parameter table. Dense mode means every
/// element may carry gradient; sparse mode lists the touched rows (sorted,
/// unique) and only those rows of g are meaningful.
struct GradTable {
  std::vector<double> g;
  bool touched = false;
  bool dense = false;
  std::vector<std::uint32_t> rows;
};

struct Gradients {
  std::vector<GradTable> tables;

  void init_like(const ModelState& s) {
    tables.clear();
    tables.resize(s.tables.size());
    for (std::size_t i = 0; i < s.tables.size(); ++i) {
      tables[i].g.assign(s.tables[i].size(), 0.0);
    }
  }

  void reset() {
    for (auto& t : tables) {
      std::fill(t.g.begin(), t.g.end(), 0.0);
      t.touched = false;
      t.dense = false;
      t.rows.clear();
    }
  }
};

}  // namespace kglit
