#include "kglit/models/scorer.hpp"

#include <cmath>
#include <cstring>
#include <vector>

#include "kglit/core/error.hpp"
#include "kglit/models/enrich.hpp"
#include "kglit/simd/kernels.hpp"

namespace kglit {

double score_transe(std::span<const double> e_s, std::span<const double> r,
                    std::span<const double> e_o) {
  double sq = 0.0;
  for (std::size_t i = 0; i < e_s.size(); ++i) {
    const double d = e_s[i] + r[i] - e_o[i];
    sq += d * d;
  }
  return -std::sqrt(sq);
}

double score_distmult(std::span<const double> e_s, std::span<const double> r,
                      std::span<const double> e_o) {
  double acc = 0.0;
  for (std::size_t i = 0; i < e_s.size(); ++i) acc += e_s[i] * r[i] * e_o[i];
  return acc;
}

double score_complex(std::span<const double> e_s, std::span<const double> r,
                     std::span<const double> e_o) {
  const std::size_t d = e_s.size() / 2;
  const double* sr = e_s.data();
  const double* si = e_s.data() + d;
  const double* rr = r.data();
  const double* ri = r.data() + d;
  const double* or_ = e_o.data();
  const double* oi = e_o.data() + d;
  double acc = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    acc += (sr[i] * rr[i] - si[i] * ri[i]) * or_[i] +
           (sr[i] * ri[i] + si[i] * rr[i]) * oi[i];
  }
  return acc;
}

double score_tucker(std::span<const double> e_s, std::span<const double> core,
                    std::span<const double> r, std::span<const double> e_o,
                    std::size_t d, std::size_t dr) {
  std::vector<double> m(dr * d, 0.0);
  tucker_mix_subject(e_s.data(), core.data(), m.data(), d, dr);
  std::vector<double> q(d, 0.0);
  tucker_query_from_mix(m.data(), r.data(), q.data(), d, dr);
  return simd::k().dot(q.data(), e_o.data(), d);
}

void complex_query_given_subject(const double* e_s, const double* r, double* q,
                                 std::size_t d) {
  const double* sr = e_s;
  const double* si = e_s + d;
  const double* rr = r;
  const double* ri = r + d;
  for (std::size_t i = 0; i < d; ++i) {
    q[i] = sr[i] * rr[i] - si[i] * ri[i];
    q[d + i] = sr[i] * ri[i] + si[i] * rr[i];
  }
}

void complex_query_given_object(const double* e_o, const double* r, double* q,
                                std::size_t d) {
  const double* or_ = e_o;
  const double* oi = e_o + d;
  const double* rr = r;
  const double* ri = r + d;
  for (std::size_t i = 0; i < d; ++i) {
    q[i] = rr[i] * or_[i] + ri[i] * oi[i];
    q[d + i] = rr[i] * oi[i] - ri[i] * or_[i];
  }
}

void tucker_mix_subject(const double* e_s, const double* core, double* m,
                        std::size_t d, std::size_t dr) {
  std::memset(m, 0, dr * d * sizeof(double));
  for (std::size_t i = 0; i < d; ++i) {
    simd::k().axpy(e_s[i], core + i * dr * d, m, dr * d);
  }
}

void tucker_query_from_mix(const double* m, const double* r, double* q,
                           std::size_t d, std::size_t dr) {
  std::memset(q, 0, d * sizeof(double));
  for (std::size_t j = 0; j < dr; ++j) {
    simd::k().axpy(r[j], m + j * d, q, d);
  }
}

void tucker_query_given_object(const double* core, const double* r,
                               const double* e_o, double* q, std::size_t d,
                               std::size_t dr) {
  std::vector<double> u(dr * d);
  for (std::size_t j = 0; j < dr; ++j) {
    for (std::size_t k = 0; k < d; ++k) u[j * d + k] = r[j] * e_o[k];
  }
  for (std::size_t i = 0; i < d; ++i) {
    q[i] = simd::k().dot(core + i * dr * d, u.data(), dr * d);
  }
}

double kbln_literal_term(const double* w_row, const double* c_row,
                         const double* s_row, const double* xs, const double* xo,
                         std::size_t na) {
  double acc = 0.0;
  for (std::size_t a = 0; a < na; ++a) {
    const double d = xs[a] - xo[a] - c_row[a];
    acc += w_row[a] * std::exp(-(d * d) / (2.0 * s_row[a] * s_row[a]));
  }
  return acc;
}

double mtkgnn_triple_score(const ModelState& s, const double* e_s,
                           const double* r, const double* e_o) {
  const std::size_t d = s.dims.dim;
  const std::size_t h = s.dims.hidden;
  const auto& w1 = s.table("rel_w1");
  const auto& b1 = s.table("rel_b1");
  const auto& w2 = s.table("rel_w2");
  const auto& b2 = s.table("rel_b2");
  std::vector<double> pre(h), act(h);
  for (std::size_t i = 0; i < h; ++i) {
    const double* row = w1.row_ptr(i);
    pre[i] = b1.w[i] + simd::k().dot(row, e_s, d) + simd::k().dot(row + d, r, d) +
             simd::k().dot(row + 2 * d, e_o, d);
  }
  simd::k().tanh(pre.data(), act.data(), h);
  return b2.w[0] + simd::k().dot(w2.w.data(), act.data(), h);
}

double mtkgnn_attr_prediction(const ModelState& s, const char* net_prefix,
                              const double* e, std::uint32_t attr) {
  const std::size_t d = s.dims.dim;
  const std::size_t h = s.dims.hidden;
  const std::string p(net_prefix);
  const auto& w1 = s.table(p + "_w1");
  const auto& b1 = s.table(p + "_b1");
  const auto& w2 = s.table(p + "_w2");
  const auto& b2 = s.table(p + "_b2");
  const double* a_emb = s.table("attr_emb").row_ptr(attr);
  std::vector<double> pre(h), act(h);
  for (std::size_t i = 0; i < h; ++i) {
    const double* row = w1.row_ptr(i);
    pre[i] = b1.w[i] + simd::k().dot(row, e, d) + simd::k().dot(row + d, a_emb, d);
  }
  simd::k().tanh(pre.data(), act.data(), h);
  return b2.w[0] + simd::k().dot(w2.w.data(), act.data(), h);
}

namespace {

/// Hosts whose score is dot(query, candidate_row): DistMult, ComplEx,
/// TuckER and the LiteralE variants (candidates come from the enriched
/// table). KBLN adds its literal term on top of the DistMult dot.
class DotScorer final : public Scorer {
 public:
  DotScorer(const ModelState& s, const LiteralFeatureMatrix& feats,
            ThreadPool& pool)
      : s_(s), feats_(feats) {
    if (is_literale(s.kind)) {
      enriched_ = build_enriched(s, feats, false, pool);
      cand_ = enriched_.enr.data();
    } else {
      cand_ = s.entity().w.data();
    }
    width_ = s.entity().cols;
  }

  void score_objects(std::uint32_t sub, std::uint32_t p,
                     std::span<double> out) const override {
    std::vector<double> q(width_);
    build_query(row(sub), p, /*given_subject=*/true, q.data());
    dot_all(q.data(), out);
    if (s_.kind == ModelKind::kbln) add_literal(sub, p, true, out);
  }

  void score_subjects(std::uint32_t p, std::uint32_t obj,
                      std::span<double> out) const override {
    std::vector<double> q(width_);
    build_query(row(obj), p, /*given_subject=*/false, q.data());
    dot_all(q.data(), out);
    if (s_.kind == ModelKind::kbln) add_literal(obj, p, false, out);
  }

  double score_one(std::uint32_t sub, std::uint32_t p,
                   std::uint32_t obj) const override {
    std::vector<double> q(width_);
    build_query(row(sub), p, true, q.data());
    double v = simd::k().dot(q.data(), row(obj), width_);
    if (s_.kind == ModelKind::kbln) {
      v += kbln_literal_term(s_.table("kbln_w").row_ptr(p),
                             s_.table("kbln_c").row_ptr(p),
                             s_.table("kbln_s").row_ptr(p), feats_.row(sub),
                             feats_.row(obj), s_.dims.n_attrs);
    }
    return v;
  }

  std::size_t num_entities() const override { return s_.dims.n_entities; }

 private:
  const double* row(std::uint32_t e) const { return cand_ + e * width_; }

  void build_query(const double* key, std::uint32_t p, bool given_subject,
                   double* q) const {
    const double* r = s_.relation().row_ptr(p);
    switch (s_.kind) {
      case ModelKind::distmult:
      case ModelKind::literale_distmult:
      case ModelKind::kbln:
        simd::k().mul(key, r, q, width_);
        break;
      case ModelKind::complex_bilinear:
      case ModelKind::literale_complex:
        if (given_subject) {
          complex_query_given_subject(key, r, q, s_.dims.dim);
        } else {
          complex_query_given_object(key, r, q, s_.dims.dim);
        }
        break;
      case ModelKind::tucker: {
        const double* core = s_.table("core").w.data();
        if (given_subject) {
          std::vector<double> m(s_.dims.rel_dim * s_.dims.dim);
          tucker_mix_subject(key, core, m.data(), s_.dims.dim, s_.dims.rel_dim);
          tucker_query_from_mix(m.data(), r, q, s_.dims.dim, s_.dims.rel_dim);
        } else {
          tucker_query_given_object(core, r, key, q, s_.dims.dim, s_.dims.rel_dim);
        }
        break;
      }
      default:
        throw DomainError("model is not a dot-product host");
    }
  }

  void dot_all(const double* q, std::span<double> out) const {
    simd::k().gemm_nt(q, width_, cand_, width_, out.data(), out.size(), 1,
                      out.size(), width_);
  }

  void add_literal(std::uint32_t key, std::uint32_t p, bool key_is_subject,
                   std::span<double> out) const {
    const std::size_t na = s_.dims.n_attrs;
    if (na == 0) return;
    const double* w = s_.table("kbln_w").row_ptr(p);
    const double* c = s_.table("kbln_c").row_ptr(p);
    const double* sd = s_.table("kbln_s").row_ptr(p);
    const double* xk = feats_.row(key);
    for (std::size_t e = 0; e < out.size(); ++e) {
      const double* xe = feats_.row(e);
      out[e] += key_is_subject ? kbln_literal_term(w, c, sd, xk, xe, na)
                               : kbln_literal_term(w, c, sd, xe, xk, na);
    }
  }

  const ModelState& s_;
  const LiteralFeatureMatrix& feats_;
  EnrichedTable enriched_;
  const double* cand_ = nullptr;
  std::size_t width_ = 0;
};

class TransEScorer final : public Scorer {
 public:
  explicit TransEScorer(const ModelState& s) : s_(s), width_(s.entity().cols) {}

  void score_objects(std::uint32_t sub, std::uint32_t p,
                     std::span<double> out) const override {
    std::vector<double> q(width_);
    const double* es = s_.entity().row_ptr(sub);
    const double* r = s_.relation().row_ptr(p);
    for (std::size_t i = 0; i < width_; ++i) q[i] = es[i] + r[i];
    distances(q.data(), out);
  }

  void score_subjects(std::uint32_t p, std::uint32_t obj,
                      std::span<double> out) const override {
    std::vector<double> q(width_);
    const double* eo = s_.entity().row_ptr(obj);
    const double* r = s_.relation().row_ptr(p);
    for (std::size_t i = 0; i < width_; ++i) q[i] = eo[i] - r[i];
    distances(q.data(), out);
  }

  double score_one(std::uint32_t sub, std::uint32_t p,
                   std::uint32_t obj) const override {
    const auto& ent = s_.entity();
    return score_transe({ent.row_ptr(sub), width_},
                        {s_.relation().row_ptr(p), width_},
                        {ent.row_ptr(obj), width_});
  }

  std::size_t num_entities() const override { return s_.dims.n_entities; }

 private:
  void distances(const double* q, std::span<double> out) const {
    const auto& ent = s_.entity();
    for (std::size_t e = 0; e < out.size(); ++e) {
      const double* row = ent.row_ptr(e);
      double sq = 0.0;
      for (std::size_t i = 0; i < width_; ++i) {
        const double d = q[i] - row[i];
        sq += d * d;
      }
      out[e] = -std::sqrt(sq);
    }
  }

  const ModelState& s_;
  std::size_t width_;
};

class MtkgnnScorer final : public Scorer {
 public:
  MtkgnnScorer(const ModelState& s, ThreadPool& pool) : s_(s) {
    const std::size_t n = s.dims.n_entities;
    const std::size_t d = s.dims.dim;
    const std::size_t h = s.dims.hidden;
    proj_s_.assign(n * h, 0.0);
    proj_o_.assign(n * h, 0.0);
    const auto& w1 = s.table("rel_w1");
    const auto& ent = s.entity();
    pool.parallel_for(n, [&](std::size_t b, std::size_t e) {
      for (std::size_t i = b; i < e; ++i) {
        for (std::size_t j = 0; j < h; ++j) {
          const double* row = w1.row_ptr(j);
          proj_s_[i * h + j] = simd::k().dot(row, ent.row_ptr(i), d);
          proj_o_[i * h + j] = simd::k().dot(row + 2 * d, ent.row_ptr(i), d);
        }
      }
    });
  }

  void score_objects(std::uint32_t sub, std::uint32_t p,
                     std::span<double> out) const override {
    score_side(sub, p, /*candidates_are_objects=*/true, out);
  }
  void score_subjects(std::uint32_t p, std::uint32_t obj,
                      std::span<double> out) const override {
    score_side(obj, p, false, out);
  }

  double score_one(std::uint32_t sub, std::uint32_t p,
                   std::uint32_t obj) const override {
    const auto& ent = s_.entity();
    return mtkgnn_triple_score(s_, ent.row_ptr(sub), s_.relation().row_ptr(p),
                               ent.row_ptr(obj));
  }

  std::size_t num_entities() const override { return s_.dims.n_entities; }

 private:
  void score_side(std::uint32_t key, std::uint32_t p, bool candidates_are_objects,
                  std::span<double> out) const {
    const std::size_t d = s_.dims.dim;
    const std::size_t h = s_.dims.hidden;
    const auto& w1 = s_.table("rel_w1");
    const auto& b1 = s_.table("rel_b1");
    const auto& w2 = s_.table("rel_w2");
    const auto& b2 = s_.table("rel_b2");
    const double* r = s_.relation().row_ptr(p);

    std::vector<double> base(h);
    const std::vector<double>& key_proj = candidates_are_objects ? proj_s_ : proj_o_;
    const std::vector<double>& cand_proj = candidates_are_objects ? proj_o_ : proj_s_;
    for (std::size_t j = 0; j < h; ++j) {
      base[j] = b1.w[j] + key_proj[key * h + j] +
                simd::k().dot(w1.row_ptr(j) + d, r, d);
    }
    std::vector<double> pre(h), act(h);
    for (std::size_t e = 0; e < out.size(); ++e) {
      for (std::size_t j = 0; j < h; ++j) pre[j] = base[j] + cand_proj[e * h + j];
      simd::k().tanh(pre.data(), act.data(), h);
      out[e] = b2.w[0] + simd::k().dot(w2.w.data(), act.data(), h);
    }
  }

  const ModelState& s_;
  std::vector<double> proj_s_;
  std::vector<double> proj_o_;
};

}  // namespace

std::unique_ptr<Scorer> make_scorer(const ModelState& state,
                                    const LiteralFeatureMatrix& feats,
                                    ThreadPool& pool) {
  switch (state.kind) {
    case ModelKind::transe:
    case ModelKind::transea:
      return std::make_unique<TransEScorer>(state);
    case ModelKind::mtkgnn:
      return std::make_unique<MtkgnnScorer>(state, pool);
    default:
      return std::make_unique<DotScorer>(state, feats, pool);
  }
}

AffineScorer::AffineScorer(const Scorer& inner, double a, double b)
    : inner_(inner), a_(a), b_(b) {
  if (!(a > 0.0)) throw DomainError("affine score transform must be increasing");
}

void AffineScorer::score_objects(std::uint32_t s, std::uint32_t p,
                                 std::span<double> out) const {
  inner_.score_objects(s, p, out);
  for (auto& v : out) v = a_ * v + b_;
}

void AffineScorer::score_subjects(std::uint32_t p, std::uint32_t o,
                                  std::span<double> out) const {
  inner_.score_subjects(p, o, out);
  for (auto& v : out) v = a_ * v + b_;
}

double AffineScorer::score_one(std::uint32_t s, std::uint32_t p,
                               std::uint32_t o) const {
  return a_ * inner_.score_one(s, p, o) + b_;
}

}  // namespace kglit
