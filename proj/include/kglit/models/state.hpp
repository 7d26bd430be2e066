#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "kglit/core/features.hpp"
#include "kglit/core/graph.hpp"

namespace kglit {

enum class ModelKind {
  transe,
  distmult,
  complex_bilinear,
  tucker,
  literale_distmult,
  literale_complex,
  kbln,
  mtkgnn,
  transea,
};

ModelKind model_kind_from_name(std::string_view name);
std::string model_kind_name(ModelKind kind);

/// True when the model trains in the 1-N regime (binary labels over all
/// candidate entities); otherwise it trains pairwise with sampled negatives.
bool is_one_to_n(ModelKind kind);
bool is_complex_family(ModelKind kind);
bool is_literale(ModelKind kind);

struct ModelDims {
  std::size_t n_entities = 0;
  std::size_t n_relations = 0;
  std::size_t n_attrs = 0;
  std::size_t dim = 200;       // complex models: dim complex pairs = 2*dim reals
  std::size_t rel_dim = 30;    // tucker relation dim
  std::size_t hidden = 100;    // mtkgnn net width

  std::size_t entity_width(ModelKind kind) const {
    return is_complex_family(kind) ? 2 * dim : dim;
  }
  std::size_t relation_width(ModelKind kind) const {
    if (kind == ModelKind::tucker) return rel_dim;
    return entity_width(kind);
  }
};

struct ParamTable {
  std::string name;
  std::size_t rows = 0;
  std::size_t cols = 0;
  bool trainable = true;
  std::vector<double> w;

  double* row_ptr(std::size_t r) { return w.data() + r * cols; }
  const double* row_ptr(std::size_t r) const { return w.data() + r * cols; }
  std::size_t size() const { return rows * cols; }
};

/// All learnable state of one model. Tables are kept in a canonical order
/// (the checkpoint layout) and are finite after every optimizer step.
struct ModelState {
  ModelKind kind = ModelKind::distmult;
  ModelDims dims;
  std::vector<ParamTable> tables;

  ParamTable& table(std::string_view name);
  const ParamTable& table(std::string_view name) const;
  ParamTable& entity() { return tables[0]; }
  const ParamTable& entity() const { return tables[0]; }
  ParamTable& relation() { return tables[1]; }
  const ParamTable& relation() const { return tables[1]; }

  bool all_finite() const;
};

/// Builds and seeds all tables: embeddings ~ Normal(0, 0.05^2), weight
/// matrices Xavier-uniform, biases zero. Same (kind, dims, seed) give the
/// same bit pattern.
ModelState init_model(ModelKind kind, const ModelDims& dims, std::uint64_t seed);

/// KBLN keeps per-(relation, attribute) RBF centers/widths fitted from the
/// training triples: center = mean of x_s[a]-x_o[a], width = its (biased)
/// standard deviation floored at 1e-3. Relations without training triples
/// get center 0, width 1.
void fit_kbln_stats(ModelState& state, const KnowledgeGraph& g,
                    const LiteralFeatureMatrix& feats);

}  // namespace kglit
