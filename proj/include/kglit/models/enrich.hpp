#pragma once

#include <cstdint>
#include <vector>

#include "kglit/core/features.hpp"
#include "kglit/core/thread_pool.hpp"
#include "kglit/models/state.hpp"

namespace kglit {

/// View over one LiteralE gate parameter set mapping an entity component
/// vector (length d) plus the literal features (length na) to the enriched
/// component: z = sigmoid(Wze e + Wzl x + bz), h = tanh(Wh [e;x]),
/// out = z*h + (1-z)*e.
struct GateView {
  const double* wze;  // d x d
  const double* wzl;  // d x na
  const double* bz;   // d
  const double* wh;   // d x (d+na)
  std::size_t d = 0;
  std::size_t na = 0;
};

GateView gate_view(const ModelState& s, const char* prefix);

/// Single-vector gate application; z/h capture the activations when non-null.
void gate_apply(const GateView& g, const double* e, const double* x,
                double* out, double* z = nullptr, double* h = nullptr);

/// Literal-enriched entity table for LiteralE hosts. For the complex host
/// the real and imaginary halves run through their own gates. When
/// keep_activations is set, z/h (per component) are retained for backprop.
struct EnrichedTable {
  std::size_t n = 0;      // entities
  std::size_t width = 0;  // entity row width (d or 2d)
  std::vector<double> enr;
  std::vector<double> z;  // gate activations, same shape as enr
  std::vector<double> h;

  const double* row(std::size_t e) const { return enr.data() + e * width; }
};

EnrichedTable build_enriched(const ModelState& s, const LiteralFeatureMatrix& feats,
                             bool keep_activations, ThreadPool& pool);

}  // namespace kglit
