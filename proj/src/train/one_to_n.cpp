#include <algorithm>
#include <cmath>
#include <cstring>
#include <vector>

#include "kglit/core/error.hpp"
#include "kglit/core/rng.hpp"
#include "kglit/models/enrich.hpp"
#include "kglit/models/scorer.hpp"
#include "kglit/simd/kernels.hpp"
#include "kglit/train/loss.hpp"

namespace kglit {

namespace {

// out[c][r] = a[r][c]; both row-major, strided.
void transpose_into(const double* a, std::size_t lda, double* out, std::size_t ldo,
                    std::size_t rows, std::size_t cols, ThreadPool& pool) {
  constexpr std::size_t kBlk = 32;
  pool.parallel_for((cols + kBlk - 1) / kBlk, [&](std::size_t b0, std::size_t b1) {
    for (std::size_t cb = b0; cb < b1; ++cb) {
      const std::size_t c0 = cb * kBlk;
      const std::size_t c1 = std::min(c0 + kBlk, cols);
      for (std::size_t r0 = 0; r0 < rows; r0 += kBlk) {
        const std::size_t r1 = std::min(r0 + kBlk, rows);
        for (std::size_t c = c0; c < c1; ++c) {
          for (std::size_t r = r0; r < r1; ++r) {
            out[c * ldo + r] = a[r * lda + c];
          }
        }
      }
    }
  });
}

struct GradSlots {
  GradTable* entity = nullptr;
  GradTable* relation = nullptr;
};

// Backward through one LiteralE gate component: given d(enr) for the column
// block, accumulates the gate-table gradients and the entity-table gradient.
void gate_backward(const ModelState& st, const LiteralFeatureMatrix& feats,
                   const EnrichedTable& enr, const std::vector<double>& denr,
                   const char* prefix, std::size_t offset, Gradients& grads,
                   ThreadPool& pool) {
  const GateView g = gate_view(st, prefix);
  const std::size_t n = enr.n;
  const std::size_t w = enr.width;
  const std::size_t d = g.d;
  const std::size_t na = g.na;
  const std::size_t whl = d + na;
  const auto& ent = st.entity();

  std::vector<double> dzpre(n * d), dhpre(n * d);
  auto& dent = grads.tables[0];  // entity table is index 0
  dent.touched = true;
  dent.dense = true;

  pool.parallel_for(n, [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) {
      const double* dout = denr.data() + i * w + offset;
      const double* zi = enr.z.data() + i * w + offset;
      const double* hi = enr.h.data() + i * w + offset;
      const double* ei = ent.row_ptr(i) + offset;
      double* dz = dzpre.data() + i * d;
      double* dh = dhpre.data() + i * d;
      double* de = dent.g.data() + i * w + offset;
      for (std::size_t j = 0; j < d; ++j) {
        const double dzj = dout[j] * (hi[j] - ei[j]);
        dz[j] = dzj * zi[j] * (1.0 - zi[j]);
        const double dhj = dout[j] * zi[j];
        dh[j] = dhj * (1.0 - hi[j] * hi[j]);
        de[j] += dout[j] * (1.0 - zi[j]);
      }
    }
  });

  // Transposed activations for the weight-gradient GEMMs.
  std::vector<double> zt(d * n), ht(d * n), et(d * n), xt(na * n);
  transpose_into(dzpre.data(), d, zt.data(), n, n, d, pool);
  transpose_into(dhpre.data(), d, ht.data(), n, n, d, pool);
  transpose_into(ent.w.data() + offset, w, et.data(), n, n, d, pool);
  if (na) transpose_into(feats.values.data(), na, xt.data(), n, n, na, pool);

  const std::string p(prefix);
  auto& dwze = grads.tables[&st.table(p + "wze") - st.tables.data()];
  auto& dwzl = grads.tables[&st.table(p + "wzl") - st.tables.data()];
  auto& dbz = grads.tables[&st.table(p + "bz") - st.tables.data()];
  auto& dwh = grads.tables[&st.table(p + "wh") - st.tables.data()];
  dwze.touched = dwzl.touched = dbz.touched = dwh.touched = true;
  dwze.dense = dwzl.dense = dbz.dense = dwh.dense = true;

  pool.parallel_for(d, [&](std::size_t b, std::size_t e) {
    const std::size_t rows = e - b;
    simd::k().gemm_nt(zt.data() + b * n, n, et.data(), n,
                      dwze.g.data() + b * d, d, rows, d, n);
    simd::k().gemm_nt(ht.data() + b * n, n, et.data(), n,
                      dwh.g.data() + b * whl, whl, rows, d, n);
    if (na) {
      simd::k().gemm_nt(zt.data() + b * n, n, xt.data(), n,
                        dwzl.g.data() + b * na, na, rows, na, n);
      simd::k().gemm_nt(ht.data() + b * n, n, xt.data(), n,
                        dwh.g.data() + b * whl + d, whl, rows, na, n);
    }
    for (std::size_t i = b; i < e; ++i) {
      dbz.g[i] += simd::k().sum(zt.data() + i * n, n);
    }
  });

  // dE += dzpre * Wze + dhpre * Wh[:, :d]
  std::vector<double> wzet(d * d), whlt(d * d), tmp(n * d);
  transpose_into(g.wze, d, wzet.data(), d, d, d, pool);
  transpose_into(g.wh, whl, whlt.data(), d, d, d, pool);
  pool.parallel_for(n, [&](std::size_t b, std::size_t e) {
    const std::size_t rows = e - b;
    simd::k().gemm_nt(dzpre.data() + b * d, d, wzet.data(), d, tmp.data() + b * d,
                      d, rows, d, d);
    for (std::size_t i = b; i < e; ++i) {
      simd::k().axpy(1.0, tmp.data() + i * d, dent.g.data() + i * w + offset, d);
    }
  });
  pool.parallel_for(n, [&](std::size_t b, std::size_t e) {
    const std::size_t rows = e - b;
    simd::k().gemm_nt(dhpre.data() + b * d, d, whlt.data(), d, tmp.data() + b * d,
                      d, rows, d, d);
    for (std::size_t i = b; i < e; ++i) {
      simd::k().axpy(1.0, tmp.data() + i * d, dent.g.data() + i * w + offset, d);
    }
  });
}

}  // namespace

double one_to_n_batch_loss(const ModelState& st, const LiteralFeatureMatrix& feats,
                           std::span<const OneToNRow> rows,
                           const FilterIndex& train_labels, const TrainConfig& cfg,
                           std::uint64_t dropout_seed, ThreadPool& pool,
                           Gradients* grads) {
  const std::size_t n = st.dims.n_entities;
  const std::size_t w = st.entity().cols;
  const std::size_t d = st.dims.dim;
  const std::size_t dr = st.dims.rel_dim;
  const std::size_t nb = rows.size();
  const bool lit = is_literale(st.kind);
  const bool tucker = st.kind == ModelKind::tucker;
  const bool cplx = is_complex_family(st.kind);
  const bool kbln = st.kind == ModelKind::kbln;
  const double ls = cfg.label_smoothing;
  const double drop = cfg.input_dropout;

  EnrichedTable enr;
  const double* m = nullptr;
  if (lit) {
    enr = build_enriched(st, feats, grads != nullptr, pool);
    m = enr.enr.data();
  } else {
    m = st.entity().w.data();
  }

  std::vector<double> q(nb * w), keydrop(nb * w), mask;
  if (drop > 0.0) mask.assign(nb * w, 0.0);
  std::vector<double> mixes;  // tucker per-row subject mixes
  if (tucker) mixes.assign(nb * dr * d, 0.0);

  pool.parallel_for(nb, [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) {
      const auto& row = rows[i];
      const double* key = m + row.key * w;
      double* kd = keydrop.data() + i * w;
      if (drop > 0.0) {
        Rng rng(dropout_seed + i, "dropout");
        double* mk = mask.data() + i * w;
        const double scale = 1.0 / (1.0 - drop);
        for (std::size_t j = 0; j < w; ++j) {
          mk[j] = rng.uniform() < drop ? 0.0 : scale;
          kd[j] = key[j] * mk[j];
        }
      } else {
        std::memcpy(kd, key, w * sizeof(double));
      }
      const double* rel = st.relation().row_ptr(row.rel);
      double* qi = q.data() + i * w;
      if (tucker) {
        double* mix = mixes.data() + i * dr * d;
        if (row.side == RowSide::to_objects) {
          tucker_mix_subject(kd, st.table("core").w.data(), mix, d, dr);
          tucker_query_from_mix(mix, rel, qi, d, dr);
        } else {
          tucker_query_given_object(st.table("core").w.data(), rel, kd, qi, d, dr);
        }
      } else if (cplx) {
        if (row.side == RowSide::to_objects) {
          complex_query_given_subject(kd, rel, qi, d);
        } else {
          complex_query_given_object(kd, rel, qi, d);
        }
      } else {
        simd::k().mul(kd, rel, qi, w);
      }
    }
  });

  std::vector<double> scores(nb * n);
  pool.parallel_for(nb, [&](std::size_t b, std::size_t e) {
    simd::k().gemm_nt(q.data() + b * w, w, m, w, scores.data() + b * n, n, e - b,
                      n, w);
  });

  if (kbln && st.dims.n_attrs > 0) {
    const std::size_t na = st.dims.n_attrs;
    pool.parallel_for(nb, [&](std::size_t b, std::size_t e) {
      for (std::size_t i = b; i < e; ++i) {
        const auto& row = rows[i];
        const double* wr = st.table("kbln_w").row_ptr(row.rel);
        const double* cr = st.table("kbln_c").row_ptr(row.rel);
        const double* sr = st.table("kbln_s").row_ptr(row.rel);
        const double* xk = feats.row(row.key);
        double* si = scores.data() + i * n;
        for (std::size_t c = 0; c < n; ++c) {
          si[c] += row.side == RowSide::to_objects
                       ? kbln_literal_term(wr, cr, sr, xk, feats.row(c), na)
                       : kbln_literal_term(wr, cr, sr, feats.row(c), xk, na);
        }
      }
    });
  }

  // Loss and dS in place: scores buffer becomes the gradient.
  const double inv = 1.0 / (static_cast<double>(nb) * static_cast<double>(n));
  const double base = ls / static_cast<double>(n);
  std::vector<double> row_loss(nb, 0.0);
  pool.parallel_for(nb, [&](std::size_t b, std::size_t e) {
    std::vector<double> tmp(n), lg(n), sig(n);
    for (std::size_t i = b; i < e; ++i) {
      double* s = scores.data() + i * n;
      const auto& row = rows[i];
      const auto truths = row.side == RowSide::to_objects
                              ? train_labels.objects_of(row.key, row.rel)
                              : train_labels.subjects_of(row.rel, row.key);
      double acc = 0.0;
      double ysum = 0.0;
      for (std::size_t c = 0; c < n; ++c) {
        acc += std::max(s[c], 0.0);
        ysum += s[c];
        tmp[c] = -std::abs(s[c]);
      }
      simd::k().exp(tmp.data(), lg.data(), n);
      for (std::size_t c = 0; c < n; ++c) tmp[c] = 1.0 + lg[c];
      simd::k().log(tmp.data(), lg.data(), n);
      acc += simd::k().sum(lg.data(), n);
      acc -= base * ysum;
      double tsum = 0.0;
      for (const auto t : truths) tsum += s[t];
      acc -= (1.0 - ls) * tsum;
      row_loss[i] = acc;

      simd::k().sigmoid(s, sig.data(), n);
      for (std::size_t c = 0; c < n; ++c) s[c] = (sig[c] - base) * inv;
      const double tshift = (1.0 - ls) * inv;
      for (const auto t : truths) s[t] -= tshift;
    }
  });
  double loss = 0.0;
  for (const double l : row_loss) loss += l;
  loss *= inv;

  if (!grads) return loss;

  auto& dent = grads->tables[0];
  auto& drel = grads->tables[1];
  dent.touched = true;
  dent.dense = true;
  drel.touched = true;

  // dQ = dS * M, dM = dS^T * Q (through explicit transposes so every GEMM
  // output element reduces over a fixed index order).
  std::vector<double> mt(w * n), dq(nb * w);
  transpose_into(m, w, mt.data(), n, n, w, pool);
  pool.parallel_for(nb, [&](std::size_t b, std::size_t e) {
    simd::k().gemm_nt(scores.data() + b * n, n, mt.data(), n, dq.data() + b * w,
                      w, e - b, w, n);
  });
  std::vector<double> dst(n * nb), qt(w * nb);
  transpose_into(scores.data(), n, dst.data(), nb, nb, n, pool);
  transpose_into(q.data(), w, qt.data(), nb, nb, w, pool);

  std::vector<double> dm(n * w);
  pool.parallel_for(n, [&](std::size_t b, std::size_t e) {
    simd::k().gemm_nt(dst.data() + b * nb, nb, qt.data(), nb, dm.data() + b * w,
                      w, e - b, w, nb);
  });

  // Candidate-side gradient goes straight to the table (entities or the
  // enriched table); query-side contributions are scattered next.
  std::vector<double> denr;
  double* key_grad_target = nullptr;
  if (lit) {
    denr = std::move(dm);
    key_grad_target = denr.data();
  } else {
    simd::k().axpy(1.0, dm.data(), dent.g.data(), n * w);
    key_grad_target = dent.g.data();
  }

  if (kbln && st.dims.n_attrs > 0) {
    const std::size_t na = st.dims.n_attrs;
    auto& dw = grads->tables[&st.table("kbln_w") - st.tables.data()];
    dw.touched = true;
    dw.dense = true;
    const auto& cc = st.table("kbln_c");
    const auto& ss = st.table("kbln_s");
    for (std::size_t i = 0; i < nb; ++i) {
      const auto& row = rows[i];
      const double* cr = cc.row_ptr(row.rel);
      const double* sr = ss.row_ptr(row.rel);
      const double* xk = feats.row(row.key);
      const double* dsrow = scores.data() + i * n;
      double* dwr = dw.g.data() + row.rel * na;
      for (std::size_t c = 0; c < n; ++c) {
        const double* xc = feats.row(c);
        for (std::size_t a = 0; a < na; ++a) {
          const double diff = (row.side == RowSide::to_objects ? xk[a] - xc[a]
                                                               : xc[a] - xk[a]) -
                              cr[a];
          dwr[a] += dsrow[c] * std::exp(-(diff * diff) / (2.0 * sr[a] * sr[a]));
        }
      }
    }
  }

  // Query-side scatter, sequential: rows may share keys and relations.
  std::vector<double> dkd(w), du(tucker ? dr * d : 0);
  std::vector<std::uint32_t> rel_rows;
  for (std::size_t i = 0; i < nb; ++i) {
    const auto& row = rows[i];
    const double* dqi = dq.data() + i * w;
    const double* kd = keydrop.data() + i * w;
    const double* rel = st.relation().row_ptr(row.rel);
    double* drel_row = drel.g.data() + row.rel * st.relation().cols;
    rel_rows.push_back(row.rel);
    std::fill(dkd.begin(), dkd.end(), 0.0);

    if (tucker) {
      auto& dcore = grads->tables[&st.table("core") - st.tables.data()];
      dcore.touched = true;
      dcore.dense = true;
      const double* core = st.table("core").w.data();
      if (row.side == RowSide::to_objects) {
        const double* mix = mixes.data() + i * dr * d;
        // q = sum_j rel[j] * mix_j ; mix = sum_i kd[i] * core_i
        std::vector<double> dmix(dr * d, 0.0);
        for (std::size_t j = 0; j < dr; ++j) {
          drel_row[j] += simd::k().dot(mix + j * d, dqi, d);
          simd::k().axpy(rel[j], dqi, dmix.data() + j * d, d);
        }
        for (std::size_t ii = 0; ii < d; ++ii) {
          dkd[ii] = simd::k().dot(core + ii * dr * d, dmix.data(), dr * d);
          simd::k().axpy(kd[ii], dmix.data(), dcore.g.data() + ii * dr * d, dr * d);
        }
      } else {
        // q[i] = dot(core_i, u), u = outer(rel, kd)
        for (std::size_t j = 0; j < dr; ++j) {
          for (std::size_t k2 = 0; k2 < d; ++k2) du[j * d + k2] = rel[j] * kd[k2];
        }
        std::vector<double> duacc(dr * d, 0.0);
        for (std::size_t ii = 0; ii < d; ++ii) {
          simd::k().axpy(dqi[ii], core + ii * dr * d, duacc.data(), dr * d);
          simd::k().axpy(dqi[ii], du.data(), dcore.g.data() + ii * dr * d, dr * d);
        }
        for (std::size_t j = 0; j < dr; ++j) {
          drel_row[j] += simd::k().dot(duacc.data() + j * d, kd, d);
          simd::k().axpy(rel[j], duacc.data() + j * d, dkd.data(), d);
        }
      }
    } else if (cplx) {
      const double* dqr = dqi;
      const double* dqim = dqi + d;
      const double* kr = kd;
      const double* ki = kd + d;
      const double* rr = rel;
      const double* ri = rel + d;
      if (row.side == RowSide::to_objects) {
        for (std::size_t j = 0; j < d; ++j) {
          dkd[j] = dqr[j] * rr[j] + dqim[j] * ri[j];
          dkd[d + j] = -dqr[j] * ri[j] + dqim[j] * rr[j];
          drel_row[j] += dqr[j] * kr[j] + dqim[j] * ki[j];
          drel_row[d + j] += -dqr[j] * ki[j] + dqim[j] * kr[j];
        }
      } else {
        for (std::size_t j = 0; j < d; ++j) {
          dkd[j] = dqr[j] * rr[j] - dqim[j] * ri[j];
          dkd[d + j] = dqr[j] * ri[j] + dqim[j] * rr[j];
          drel_row[j] += dqr[j] * kr[j] + dqim[j] * ki[j];
          drel_row[d + j] += dqr[j] * ki[j] - dqim[j] * kr[j];
        }
      }
    } else {
      for (std::size_t j = 0; j < w; ++j) {
        dkd[j] = dqi[j] * rel[j];
        drel_row[j] += dqi[j] * kd[j];
      }
    }

    double* target = key_grad_target + row.key * w;
    if (drop > 0.0) {
      const double* mk = mask.data() + i * w;
      for (std::size_t j = 0; j < w; ++j) target[j] += dkd[j] * mk[j];
    } else {
      simd::k().axpy(1.0, dkd.data(), target, w);
    }
  }
  std::sort(rel_rows.begin(), rel_rows.end());
  rel_rows.erase(std::unique(rel_rows.begin(), rel_rows.end()), rel_rows.end());
  drel.rows = std::move(rel_rows);

  if (lit) {
    if (st.kind == ModelKind::literale_distmult) {
      gate_backward(st, feats, enr, denr, "gate_", 0, *grads, pool);
    } else {
      gate_backward(st, feats, enr, denr, "gate_re_", 0, *grads, pool);
      gate_backward(st, feats, enr, denr, "gate_im_", st.dims.dim, *grads, pool);
    }
  }

  return loss;
}

}  // namespace kglit
