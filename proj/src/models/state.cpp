#include "kglit/models/state.hpp"

#include <algorithm>
#include <cmath>

#include "kglit/core/error.hpp"
#include "kglit/core/rng.hpp"

namespace kglit {

ModelKind model_kind_from_name(std::string_view name) {
  if (name == "transe") return ModelKind::transe;
  if (name == "distmult") return ModelKind::distmult;
  if (name == "complex") return ModelKind::complex_bilinear;
  if (name == "tucker") return ModelKind::tucker;
  if (name == "literale-distmult") return ModelKind::literale_distmult;
  if (name == "literale-complex") return ModelKind::literale_complex;
  if (name == "kbln") return ModelKind::kbln;
  if (name == "mtkgnn") return ModelKind::mtkgnn;
  if (name == "transea") return ModelKind::transea;
  throw DomainError("unknown model: " + std::string(name));
}

std::string model_kind_name(ModelKind kind) {
  switch (kind) {
    case ModelKind::transe: return "transe";
    case ModelKind::distmult: return "distmult";
    case ModelKind::complex_bilinear: return "complex";
    case ModelKind::tucker: return "tucker";
    case ModelKind::literale_distmult: return "literale-distmult";
    case ModelKind::literale_complex: return "literale-complex";
    case ModelKind::kbln: return "kbln";
    case ModelKind::mtkgnn: return "mtkgnn";
    case ModelKind::transea: return "transea";
  }
  return "?";
}

bool is_one_to_n(ModelKind kind) {
  switch (kind) {
    case ModelKind::transe:
    case ModelKind::transea:
    case ModelKind::mtkgnn:
      return false;
    default:
      return true;
  }
}

bool is_complex_family(ModelKind kind) {
  return kind == ModelKind::complex_bilinear || kind == ModelKind::literale_complex;
}

bool is_literale(ModelKind kind) {
  return kind == ModelKind::literale_distmult || kind == ModelKind::literale_complex;
}

ParamTable& ModelState::table(std::string_view name) {
  for (auto& t : tables) {
    if (t.name == name) return t;
  }
  throw DomainError("no such parameter table: " + std::string(name));
}

const ParamTable& ModelState::table(std::string_view name) const {
  for (const auto& t : tables) {
    if (t.name == name) return t;
  }
  throw DomainError("no such parameter table: " + std::string(name));
}

bool ModelState::all_finite() const {
  for (const auto& t : tables) {
    for (double v : t.w) {
      if (!std::isfinite(v)) return false;
    }
  }
  return true;
}

namespace {

void init_normal(ParamTable& t, Rng& rng, double stddev) {
  for (auto& v : t.w) v = rng.normal(0.0, stddev);
}

void init_xavier(ParamTable& t, Rng& rng) {
  const double limit =
      std::sqrt(6.0 / (static_cast<double>(t.rows) + static_cast<double>(t.cols)));
  for (auto& v : t.w) v = rng.uniform(-limit, limit);
}

ParamTable make_table(std::string name, std::size_t rows, std::size_t cols,
                      bool trainable = true) {
  ParamTable t;
  t.name = std::move(name);
  t.rows = rows;
  t.cols = cols;
  t.trainable = trainable;
  t.w.assign(rows * cols, 0.0);
  return t;
}

}  // namespace

ModelState init_model(ModelKind kind, const ModelDims& dims, std::uint64_t seed) {
  ModelState s;
  s.kind = kind;
  s.dims = dims;
  const std::size_t ew = dims.entity_width(kind);
  const std::size_t rw = dims.relation_width(kind);
  const std::size_t d = dims.dim;
  const std::size_t na = dims.n_attrs;
  const std::size_t h = dims.hidden;

  s.tables.push_back(make_table("entity", dims.n_entities, ew));
  s.tables.push_back(make_table("relation", dims.n_relations, rw));

  switch (kind) {
    case ModelKind::tucker:
      s.tables.push_back(make_table("core", d, dims.rel_dim * d));
      break;
    case ModelKind::literale_distmult:
      s.tables.push_back(make_table("gate_wze", d, d));
      s.tables.push_back(make_table("gate_wzl", d, na));
      s.tables.push_back(make_table("gate_bz", 1, d));
      s.tables.push_back(make_table("gate_wh", d, d + na));
      break;
    case ModelKind::literale_complex:
      // independent gates for the real and imaginary components
      s.tables.push_back(make_table("gate_re_wze", d, d));
      s.tables.push_back(make_table("gate_re_wzl", d, na));
      s.tables.push_back(make_table("gate_re_bz", 1, d));
      s.tables.push_back(make_table("gate_re_wh", d, d + na));
      s.tables.push_back(make_table("gate_im_wze", d, d));
      s.tables.push_back(make_table("gate_im_wzl", d, na));
      s.tables.push_back(make_table("gate_im_bz", 1, d));
      s.tables.push_back(make_table("gate_im_wh", d, d + na));
      break;
    case ModelKind::kbln:
      s.tables.push_back(make_table("kbln_w", dims.n_relations, na));
      s.tables.push_back(make_table("kbln_c", dims.n_relations, na, false));
      s.tables.push_back(make_table("kbln_s", dims.n_relations, na, false));
      break;
    case ModelKind::mtkgnn:
      s.tables.push_back(make_table("attr_emb", na, d));
      s.tables.push_back(make_table("rel_w1", h, 3 * d));
      s.tables.push_back(make_table("rel_b1", 1, h));
      s.tables.push_back(make_table("rel_w2", 1, h));
      s.tables.push_back(make_table("rel_b2", 1, 1));
      s.tables.push_back(make_table("attr_s_w1", h, 2 * d));
      s.tables.push_back(make_table("attr_s_b1", 1, h));
      s.tables.push_back(make_table("attr_s_w2", 1, h));
      s.tables.push_back(make_table("attr_s_b2", 1, 1));
      s.tables.push_back(make_table("attr_o_w1", h, 2 * d));
      s.tables.push_back(make_table("attr_o_b1", 1, h));
      s.tables.push_back(make_table("attr_o_w2", 1, h));
      s.tables.push_back(make_table("attr_o_b2", 1, 1));
      break;
    case ModelKind::transea:
      s.tables.push_back(make_table("attr_a", na, d));
      s.tables.push_back(make_table("attr_b", 1, na));
      break;
    default:
      break;
  }

  Rng rng(seed, "model-init");
  for (auto& t : s.tables) {
    if (!t.trainable) continue;  // kbln stats are fitted, not sampled
    if (t.name == "entity" || t.name == "relation" || t.name == "attr_emb" ||
        t.name == "attr_a") {
      init_normal(t, rng, 0.05);
    } else if (t.name.ends_with("_b1") || t.name.ends_with("_b2") ||
               t.name.ends_with("bz") || t.name == "attr_b") {
      // biases stay zero
    } else {
      init_xavier(t, rng);
    }
  }
  return s;
}

void fit_kbln_stats(ModelState& state, const KnowledgeGraph& g,
                    const LiteralFeatureMatrix& feats) {
  auto& c = state.table("kbln_c");
  auto& sd = state.table("kbln_s");
  const std::size_t na = state.dims.n_attrs;
  std::vector<double> sum(c.size(), 0.0), sumsq(c.size(), 0.0);
  std::vector<std::size_t> count(state.dims.n_relations, 0);

  for (const auto& t : g.train) {
    ++count[t.p];
    for (std::size_t a = 0; a < na; ++a) {
      const double d = feats.at(t.s, a) - feats.at(t.o, a);
      sum[t.p * na + a] += d;
      sumsq[t.p * na + a] += d * d;
    }
  }
  for (std::size_t p = 0; p < state.dims.n_relations; ++p) {
    for (std::size_t a = 0; a < na; ++a) {
      const std::size_t i = p * na + a;
      if (count[p] == 0) {
        c.w[i] = 0.0;
        sd.w[i] = 1.0;
        continue;
      }
      const double n = static_cast<double>(count[p]);
      const double mean = sum[i] / n;
      const double var = std::max(0.0, sumsq[i] / n - mean * mean);
      c.w[i] = mean;
      sd.w[i] = std::max(1e-3, std::sqrt(var));
    }
  }
}

}  // namespace kglit
