#include <algorithm>
#include <cmath>
#include <cstring>
#include <vector>

#include "kglit/core/rng.hpp"
#include "kglit/models/scorer.hpp"
#include "kglit/simd/kernels.hpp"
#include "kglit/train/loss.hpp"

namespace kglit {

namespace {

struct RowMarks {
  std::vector<std::uint32_t> rows;
  void add(std::uint32_t r) { rows.push_back(r); }
  void finish(GradTable& t) {
    if (rows.empty()) return;
    std::sort(rows.begin(), rows.end());
    rows.erase(std::unique(rows.begin(), rows.end()), rows.end());
    t.rows = std::move(rows);
    t.touched = true;
    t.dense = false;
  }
};

inline double bce_with_logits(double s, double y) {
  return std::max(s, 0.0) - y * s + std::log1p(std::exp(-std::abs(s)));
}

inline double sigmoid1(double s) {
  if (s >= 0.0) return 1.0 / (1.0 + std::exp(-s));
  const double t = std::exp(s);
  return t / (1.0 + t);
}

void make_mask(std::vector<double>& mask, double drop, std::uint64_t seed,
               std::size_t sample) {
  if (drop <= 0.0) return;
  Rng rng(seed + sample, "dropout");
  const double scale = 1.0 / (1.0 - drop);
  for (auto& v : mask) v = rng.uniform() < drop ? 0.0 : scale;
}

// Margin-ranking loss for the translational family; TransEA adds the
// L1 attribute regression weighted by alpha.
double translational_loss(const ModelState& st, const LiteralFeatureMatrix& feats,
                          const PairwiseBatch& batch, const TrainConfig& cfg,
                          std::uint64_t dropout_seed, Gradients* grads) {
  const std::size_t d = st.entity().cols;
  const bool transea = st.kind == ModelKind::transea;
  const double w_rel = transea ? 1.0 - cfg.alpha : 1.0;
  const double w_attr = transea ? cfg.alpha : 0.0;
  const auto& ent = st.entity();
  const auto& rel = st.relation();

  RowMarks ent_rows, rel_rows, attr_rows;
  GradTable* dent = grads ? &grads->tables[0] : nullptr;
  GradTable* drel = grads ? &grads->tables[1] : nullptr;

  std::vector<double> mask_pos(d, 1.0), mask_neg(d, 1.0);
  std::vector<double> diff_pos(d), diff_neg(d);
  double loss_rel = 0.0;

  const std::size_t n_neg = cfg.n_neg;
  for (std::size_t i = 0; i < batch.pos.size(); ++i) {
    const auto& p = batch.pos[i];
    make_mask(mask_pos, cfg.input_dropout, dropout_seed, i * (n_neg + 1));
    const double* es = ent.row_ptr(p.s);
    const double* rp = rel.row_ptr(p.p);
    const double* eo = ent.row_ptr(p.o);
    double sq = 0.0;
    if (cfg.input_dropout > 0.0) {
      for (std::size_t j = 0; j < d; ++j) {
        diff_pos[j] = es[j] * mask_pos[j] + rp[j] - eo[j];
        sq += diff_pos[j] * diff_pos[j];
      }
    } else {
      for (std::size_t j = 0; j < d; ++j) {
        diff_pos[j] = es[j] + rp[j] - eo[j];
        sq += diff_pos[j] * diff_pos[j];
      }
    }
    const double dist_pos = std::sqrt(sq);

    for (std::size_t jn = 0; jn < n_neg; ++jn) {
      const auto& ng = batch.neg[i * n_neg + jn];
      make_mask(mask_neg, cfg.input_dropout, dropout_seed, i * (n_neg + 1) + 1 + jn);
      const double* ns = ent.row_ptr(ng.s);
      const double* nr = rel.row_ptr(ng.p);
      const double* no = ent.row_ptr(ng.o);
      double nsq = 0.0;
      if (cfg.input_dropout > 0.0) {
        for (std::size_t j = 0; j < d; ++j) {
          diff_neg[j] = ns[j] * mask_neg[j] + nr[j] - no[j];
          nsq += diff_neg[j] * diff_neg[j];
        }
      } else {
        for (std::size_t j = 0; j < d; ++j) {
          diff_neg[j] = ns[j] + nr[j] - no[j];
          nsq += diff_neg[j] * diff_neg[j];
        }
      }
      const double dist_neg = std::sqrt(nsq);

      // hinge on -dist scores: margin + dist_pos - dist_neg
      const double h = cfg.margin + dist_pos - dist_neg;
      if (h <= 0.0) continue;
      loss_rel += h;
      if (!grads) continue;

      if (dist_pos > 0.0) {
        const double c = w_rel / dist_pos;
        double* gs = dent->g.data() + p.s * d;
        double* go = dent->g.data() + p.o * d;
        double* gr = drel->g.data() + p.p * d;
        for (std::size_t j = 0; j < d; ++j) {
          const double v = c * diff_pos[j];
          gs[j] += v * mask_pos[j];
          gr[j] += v;
          go[j] -= v;
        }
        ent_rows.add(p.s);
        ent_rows.add(p.o);
        rel_rows.add(p.p);
      }
      if (dist_neg > 0.0) {
        const double c = -w_rel / dist_neg;
        double* gs = dent->g.data() + ng.s * d;
        double* go = dent->g.data() + ng.o * d;
        double* gr = drel->g.data() + ng.p * d;
        for (std::size_t j = 0; j < d; ++j) {
          const double v = c * diff_neg[j];
          gs[j] += v * mask_neg[j];
          gr[j] += v;
          go[j] -= v;
        }
        ent_rows.add(ng.s);
        ent_rows.add(ng.o);
        rel_rows.add(ng.p);
      }
    }
  }

  double loss_attr = 0.0;
  if (transea && !batch.attr.empty()) {
    const auto& aa = st.table("attr_a");
    const auto& ab = st.table("attr_b");
    GradTable* daa = grads ? &grads->tables[&aa - st.tables.data()] : nullptr;
    GradTable* dab = grads ? &grads->tables[&ab - st.tables.data()] : nullptr;
    for (const auto& t : batch.attr) {
      const double target = feats.normalize_raw(t.a, t.v);
      const double* e = ent.row_ptr(t.s);
      const double* arow = aa.row_ptr(t.a);
      const double pred = simd::k().dot(arow, e, d) + ab.w[t.a];
      const double r = pred - target;
      loss_attr += std::abs(r);
      if (!grads || r == 0.0) continue;
      const double sgn = r > 0.0 ? w_attr : -w_attr;
      simd::k().axpy(sgn, e, daa->g.data() + t.a * d, d);
      simd::k().axpy(sgn, arow, dent->g.data() + t.s * d, d);
      dab->g[t.a] += sgn;
      attr_rows.add(t.a);
      ent_rows.add(t.s);
      dab->touched = true;
      dab->dense = true;
    }
  }

  if (grads) {
    ent_rows.finish(grads->tables[0]);
    rel_rows.finish(grads->tables[1]);
    if (transea) {
      attr_rows.finish(grads->tables[&st.table("attr_a") - st.tables.data()]);
    }
  }
  return w_rel * loss_rel + w_attr * loss_attr;
}

struct NetRef {
  const ParamTable* w1;
  const ParamTable* b1;
  const ParamTable* w2;
  const ParamTable* b2;
  GradTable* dw1;
  GradTable* db1;
  GradTable* dw2;
  GradTable* db2;
};

NetRef net_ref(const ModelState& st, Gradients* grads, const std::string& p) {
  NetRef n;
  n.w1 = &st.table(p + "_w1");
  n.b1 = &st.table(p + "_b1");
  n.w2 = &st.table(p + "_w2");
  n.b2 = &st.table(p + "_b2");
  if (grads) {
    n.dw1 = &grads->tables[n.w1 - st.tables.data()];
    n.db1 = &grads->tables[n.b1 - st.tables.data()];
    n.dw2 = &grads->tables[n.w2 - st.tables.data()];
    n.db2 = &grads->tables[n.b2 - st.tables.data()];
    n.dw1->touched = n.db1->touched = n.dw2->touched = n.db2->touched = true;
    n.dw1->dense = n.db1->dense = n.dw2->dense = n.db2->dense = true;
  } else {
    n.dw1 = n.db1 = n.dw2 = n.db2 = nullptr;
  }
  return n;
}

// Sampled-negative BCE on the triple net plus squared-error regression on
// the two attribute nets.
double mtkgnn_loss(const ModelState& st, const LiteralFeatureMatrix& feats,
                   const PairwiseBatch& batch, const TrainConfig& cfg,
                   std::uint64_t dropout_seed, Gradients* grads) {
  const std::size_t d = st.dims.dim;
  const std::size_t h = st.dims.hidden;
  const auto& ent = st.entity();
  const auto& rel = st.relation();
  NetRef tnet = net_ref(st, grads, "rel");

  RowMarks ent_rows, rel_rows, attr_rows;
  GradTable* dent = grads ? &grads->tables[0] : nullptr;
  GradTable* drel = grads ? &grads->tables[1] : nullptr;

  const std::size_t n_samples = batch.pos.size() * (1 + cfg.n_neg);
  const double inv = n_samples ? 1.0 / static_cast<double>(n_samples) : 0.0;
  std::vector<double> mask(d, 1.0), pre(h), act(h), dpre(h), es_masked(d);
  double loss_rel = 0.0;

  auto run_triple = [&](const RelTriple& t, double label, std::size_t sample) {
    make_mask(mask, cfg.input_dropout, dropout_seed, sample);
    const double* es = ent.row_ptr(t.s);
    const double* rp = rel.row_ptr(t.p);
    const double* eo = ent.row_ptr(t.o);
    if (cfg.input_dropout > 0.0) {
      for (std::size_t j = 0; j < d; ++j) es_masked[j] = es[j] * mask[j];
    } else {
      std::memcpy(es_masked.data(), es, d * sizeof(double));
    }
    for (std::size_t i = 0; i < h; ++i) {
      const double* row = tnet.w1->row_ptr(i);
      pre[i] = tnet.b1->w[i] + simd::k().dot(row, es_masked.data(), d) +
               simd::k().dot(row + d, rp, d) + simd::k().dot(row + 2 * d, eo, d);
    }
    simd::k().tanh(pre.data(), act.data(), h);
    const double s = tnet.b2->w[0] + simd::k().dot(tnet.w2->w.data(), act.data(), h);
    loss_rel += bce_with_logits(s, label);
    if (!grads) return;

    const double ds = (sigmoid1(s) - label) * inv;
    tnet.db2->g[0] += ds;
    simd::k().axpy(ds, act.data(), tnet.dw2->g.data(), h);
    for (std::size_t i = 0; i < h; ++i) {
      dpre[i] = ds * tnet.w2->w[i] * (1.0 - act[i] * act[i]);
      tnet.db1->g[i] += dpre[i];
    }
    double* ges = dent->g.data() + t.s * d;
    double* gr = drel->g.data() + t.p * d;
    double* geo = dent->g.data() + t.o * d;
    for (std::size_t i = 0; i < h; ++i) {
      const double* row = tnet.w1->row_ptr(i);
      double* grow = tnet.dw1->g.data() + i * 3 * d;
      simd::k().axpy(dpre[i], es_masked.data(), grow, d);
      simd::k().axpy(dpre[i], rp, grow + d, d);
      simd::k().axpy(dpre[i], eo, grow + 2 * d, d);
      if (cfg.input_dropout > 0.0) {
        for (std::size_t j = 0; j < d; ++j) ges[j] += dpre[i] * row[j] * mask[j];
      } else {
        simd::k().axpy(dpre[i], row, ges, d);
      }
      simd::k().axpy(dpre[i], row + d, gr, d);
      simd::k().axpy(dpre[i], row + 2 * d, geo, d);
    }
    ent_rows.add(t.s);
    ent_rows.add(t.o);
    rel_rows.add(t.p);
  };

  std::size_t sample = 0;
  for (std::size_t i = 0; i < batch.pos.size(); ++i) {
    run_triple(batch.pos[i], 1.0, sample++);
    for (std::size_t j = 0; j < cfg.n_neg; ++j) {
      run_triple(batch.neg[i * cfg.n_neg + j], 0.0, sample++);
    }
  }
  loss_rel *= inv;

  // Attribute regression: both nets regress the masked-present values of
  // the slice; entities without literals never appear here.
  double loss_attr = 0.0;
  const std::size_t n_attr = batch.attr.size();
  if (n_attr) {
    const double ainv = 1.0 / static_cast<double>(n_attr);
    const auto& aemb = st.table("attr_emb");
    GradTable* daemb = grads ? &grads->tables[&aemb - st.tables.data()] : nullptr;
    for (const char* prefix : {"attr_s", "attr_o"}) {
      NetRef net = net_ref(st, grads, prefix);
      for (const auto& t : batch.attr) {
        const double target = feats.normalize_raw(t.a, t.v);
        const double* e = ent.row_ptr(t.s);
        const double* a = aemb.row_ptr(t.a);
        for (std::size_t i = 0; i < h; ++i) {
          const double* row = net.w1->row_ptr(i);
          pre[i] = net.b1->w[i] + simd::k().dot(row, e, d) +
                   simd::k().dot(row + d, a, d);
        }
        simd::k().tanh(pre.data(), act.data(), h);
        const double p = net.b2->w[0] + simd::k().dot(net.w2->w.data(), act.data(), h);
        const double r = p - target;
        loss_attr += r * r * ainv;
        if (!grads) continue;
        const double dp = 2.0 * r * ainv;
        net.db2->g[0] += dp;
        simd::k().axpy(dp, act.data(), net.dw2->g.data(), h);
        double* ge = dent->g.data() + t.s * d;
        double* ga = daemb->g.data() + t.a * d;
        for (std::size_t i = 0; i < h; ++i) {
          const double dpi = dp * net.w2->w[i] * (1.0 - act[i] * act[i]);
          net.db1->g[i] += dpi;
          const double* row = net.w1->row_ptr(i);
          double* grow = net.dw1->g.data() + i * 2 * d;
          simd::k().axpy(dpi, e, grow, d);
          simd::k().axpy(dpi, a, grow + d, d);
          simd::k().axpy(dpi, row, ge, d);
          simd::k().axpy(dpi, row + d, ga, d);
        }
        ent_rows.add(t.s);
        attr_rows.add(t.a);
      }
    }
  }

  if (grads) {
    ent_rows.finish(grads->tables[0]);
    rel_rows.finish(grads->tables[1]);
    attr_rows.finish(grads->tables[&st.table("attr_emb") - st.tables.data()]);
  }
  return loss_rel + loss_attr;
}

}  // namespace

double pairwise_batch_loss(const ModelState& st, const LiteralFeatureMatrix& feats,
                           const PairwiseBatch& batch, const TrainConfig& cfg,
                           std::uint64_t dropout_seed, ThreadPool& pool,
                           Gradients* grads) {
  (void)pool;  // pairwise batches are cheap; kept single-threaded
  if (st.kind == ModelKind::mtkgnn) {
    return mtkgnn_loss(st, feats, batch, cfg, dropout_seed, grads);
  }
  return translational_loss(st, feats, batch, cfg, dropout_seed, grads);
}

}  // namespace kglit
