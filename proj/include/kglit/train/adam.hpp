#pragma once

#include <cstdint>
#include <vector>

#include "kglit/models/state.hpp"
#include "kglit/train/grads.hpp"

namespace kglit {

/// Adam with beta = (0.9, 0.999), eps = 1e-8, bias correction. Tables that
/// received no gradient in a batch are skipped entirely; sparse batches
/// update only the touched rows (lazy moments, per-table step count).
class Adam {
 public:
  Adam(const ModelState& state, double lr);

  void step(ModelState& state, const Gradients& grads);

  static constexpr double kBeta1 = 0.9;
  static constexpr double kBeta2 = 0.999;
  static constexpr double kEps = 1e-8;

 private:
  struct Slot {
    std::vector<double> m, v;
    std::uint64_t t = 0;
  };
  std::vector<Slot> slots_;
  double lr_;
};

}  // namespace kglit
