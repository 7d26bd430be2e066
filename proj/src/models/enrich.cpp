#include "kglit/models/enrich.hpp"

#include <cstring>
#include <string>

#include "kglit/simd/kernels.hpp"

namespace kglit {

GateView gate_view(const ModelState& s, const char* prefix) {
  const std::string p(prefix);
  GateView g;
  const auto& wze = s.table(p + "wze");
  g.wze = wze.w.data();
  g.wzl = s.table(p + "wzl").w.data();
  g.bz = s.table(p + "bz").w.data();
  g.wh = s.table(p + "wh").w.data();
  g.d = wze.rows;
  g.na = s.table(p + "wzl").cols;
  return g;
}

void gate_apply(const GateView& g, const double* e, const double* x,
                double* out, double* z, double* h) {
  const std::size_t d = g.d;
  std::vector<double> zp(d), hp(d), zbuf, hbuf;
  if (!z) {
    zbuf.resize(d);
    z = zbuf.data();
  }
  if (!h) {
    hbuf.resize(d);
    h = hbuf.data();
  }
  for (std::size_t i = 0; i < d; ++i) {
    zp[i] = g.bz[i] + simd::k().dot(g.wze + i * d, e, d) +
            (g.na ? simd::k().dot(g.wzl + i * g.na, x, g.na) : 0.0);
    hp[i] = simd::k().dot(g.wh + i * (d + g.na), e, d) +
            (g.na ? simd::k().dot(g.wh + i * (d + g.na) + d, x, g.na) : 0.0);
  }
  simd::k().sigmoid(zp.data(), z, d);
  simd::k().tanh(hp.data(), h, d);
  for (std::size_t i = 0; i < d; ++i) {
    out[i] = z[i] * h[i] + (1.0 - z[i]) * e[i];
  }
}

namespace {

// Applies one gate to the column block [offset, offset+d) of the entity
// table, batched: the matvecs become row-blocked GEMMs against the gate
// matrices, with the Wh product split into its entity and literal column
// blocks so no concatenated input is materialized.
void enrich_component(const ModelState& s, const LiteralFeatureMatrix& feats,
                      const GateView& g, std::size_t offset,
                      EnrichedTable& table, bool keep_activations,
                      ThreadPool& pool) {
  const auto& ent = s.entity();
  const std::size_t w = ent.cols;
  const std::size_t d = g.d;
  const std::size_t na = g.na;
  const std::size_t whl = d + na;  // Wh row stride

  pool.parallel_for(ent.rows, [&](std::size_t begin, std::size_t end) {
    const std::size_t rows = end - begin;
    const double* e0 = ent.row_ptr(begin) + offset;
    std::vector<double> zpre(rows * d), hpre(rows * d), tmp(rows * d);

    simd::k().gemm_nt(e0, w, g.wze, d, zpre.data(), d, rows, d, d);
    simd::k().gemm_nt(e0, w, g.wh, whl, hpre.data(), d, rows, d, d);
    if (na > 0) {
      const double* x0 = feats.row(begin);
      simd::k().gemm_nt(x0, na, g.wzl, na, tmp.data(), d, rows, d, na);
      simd::k().axpy(1.0, tmp.data(), zpre.data(), rows * d);
      simd::k().gemm_nt(x0, na, g.wh + d, whl, tmp.data(), d, rows, d, na);
      simd::k().axpy(1.0, tmp.data(), hpre.data(), rows * d);
    }
    for (std::size_t r = 0; r < rows; ++r) {
      simd::k().axpy(1.0, g.bz, zpre.data() + r * d, d);
    }

    std::vector<double>& z = tmp;  // reuse
    std::vector<double> h(rows * d);
    simd::k().sigmoid(zpre.data(), z.data(), rows * d);
    simd::k().tanh(hpre.data(), h.data(), rows * d);

    for (std::size_t r = 0; r < rows; ++r) {
      const double* erow = e0 + r * w;
      const double* zr = z.data() + r * d;
      const double* hr = h.data() + r * d;
      double* out = table.enr.data() + (begin + r) * w + offset;
      for (std::size_t i = 0; i < d; ++i) {
        out[i] = zr[i] * hr[i] + (1.0 - zr[i]) * erow[i];
      }
      if (keep_activations) {
        std::memcpy(table.z.data() + (begin + r) * w + offset, zr, d * sizeof(double));
        std::memcpy(table.h.data() + (begin + r) * w + offset, hr, d * sizeof(double));
      }
    }
  });
}

}  // namespace

EnrichedTable build_enriched(const ModelState& s, const LiteralFeatureMatrix& feats,
                             bool keep_activations, ThreadPool& pool) {
  EnrichedTable t;
  const auto& ent = s.entity();
  t.n = ent.rows;
  t.width = ent.cols;
  t.enr.assign(t.n * t.width, 0.0);
  if (keep_activations) {
    t.z.assign(t.n * t.width, 0.0);
    t.h.assign(t.n * t.width, 0.0);
  }

  if (s.kind == ModelKind::literale_distmult) {
    enrich_component(s, feats, gate_view(s, "gate_"), 0, t, keep_activations, pool);
  } else {
    enrich_component(s, feats, gate_view(s, "gate_re_"), 0, t, keep_activations, pool);
    enrich_component(s, feats, gate_view(s, "gate_im_"), s.dims.dim, t,
                     keep_activations, pool);
  }
  return t;
}

}  // namespace kglit
