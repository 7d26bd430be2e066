#include "kglit/train/adam.hpp"

#include <cmath>

#include "kglit/simd/kernels.hpp"

namespace kglit {

Adam::Adam(const ModelState& state, double lr) : lr_(lr) {
  slots_.resize(state.tables.size());
  for (std::size_t i = 0; i < state.tables.size(); ++i) {
    slots_[i].m.assign(state.tables[i].size(), 0.0);
    slots_[i].v.assign(state.tables[i].size(), 0.0);
  }
}

void Adam::step(ModelState& state, const Gradients& grads) {
  for (std::size_t i = 0; i < state.tables.size(); ++i) {
    auto& table = state.tables[i];
    const auto& gt = grads.tables[i];
    if (!table.trainable || !gt.touched) continue;
    auto& slot = slots_[i];
    ++slot.t;
    const double bc1 = 1.0 - std::pow(kBeta1, static_cast<double>(slot.t));
    const double bc2 = 1.0 - std::pow(kBeta2, static_cast<double>(slot.t));
    if (gt.dense) {
      simd::k().adam_update(table.w.data(), slot.m.data(), slot.v.data(),
                            gt.g.data(), table.size(), lr_, kBeta1, kBeta2,
                            kEps, bc1, bc2);
    } else {
      const std::size_t cols = table.cols;
      for (const auto r : gt.rows) {
        const std::size_t off = r * cols;
        simd::k().adam_update(table.w.data() + off, slot.m.data() + off,
                              slot.v.data() + off, gt.g.data() + off, cols, lr_,
                              kBeta1, kBeta2, kEps, bc1, bc2);
      }
    }
  }
}

}  // namespace kglit
