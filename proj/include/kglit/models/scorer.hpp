#pragma once

#include <memory>
#include <span>

#include "kglit/core/features.hpp"
#include "kglit/core/thread_pool.hpp"
#include "kglit/models/state.hpp"

namespace kglit {

/// Immutable scoring view over a trained model. Higher scores mean more
/// plausible triples for every variant (translational scores are negated
/// distances). Implementations are const and safe to share across ranking
/// workers.
class Scorer {
 public:
  virtual ~Scorer() = default;

  /// out[c] = score(s, p, c) for every candidate object c.
  virtual void score_objects(std::uint32_t s, std::uint32_t p,
                             std::span<double> out) const = 0;
  /// out[c] = score(c, p, o) for every candidate subject c.
  virtual void score_subjects(std::uint32_t p, std::uint32_t o,
                              std::span<double> out) const = 0;
  virtual double score_one(std::uint32_t s, std::uint32_t p,
                           std::uint32_t o) const = 0;

  virtual std::size_t num_entities() const = 0;
};

/// Builds the scorer for a model snapshot. LiteralE hosts enrich the full
/// entity table once here; MTKGNN precomputes its entity projections.
std::unique_ptr<Scorer> make_scorer(const ModelState& state,
                                    const LiteralFeatureMatrix& feats,
                                    ThreadPool& pool);

/// score -> a*score + b with a > 0. Ranking metrics are invariant under any
/// strictly increasing transform; this wrapper exists to verify exactly that.
class AffineScorer : public Scorer {
 public:
  AffineScorer(const Scorer& inner, double a, double b);
  void score_objects(std::uint32_t s, std::uint32_t p,
                     std::span<double> out) const override;
  void score_subjects(std::uint32_t p, std::uint32_t o,
                      std::span<double> out) const override;
  double score_one(std::uint32_t s, std::uint32_t p, std::uint32_t o) const override;
  std::size_t num_entities() const override { return inner_.num_entities(); }

 private:
  const Scorer& inner_;
  double a_;
  double b_;
};

// Plain scoring functions on raw parameter vectors; the scorers and the
// training path are built on these shapes.
double score_transe(std::span<const double> e_s, std::span<const double> r,
                    std::span<const double> e_o);
double score_distmult(std::span<const double> e_s, std::span<const double> r,
                      std::span<const double> e_o);
/// Rows are [re | im] halves of length d each.
double score_complex(std::span<const double> e_s, std::span<const double> r,
                     std::span<const double> e_o);
/// core is d x (dr*d), row i holding W[i, j, k] at j*d + k.
double score_tucker(std::span<const double> e_s, std::span<const double> core,
                    std::span<const double> r, std::span<const double> e_o,
                    std::size_t d, std::size_t dr);

// Query builders shared with the trainer: a query vector q such that
// score = dot(q, candidate_row).
void complex_query_given_subject(const double* e_s, const double* r, double* q,
                                 std::size_t d);
void complex_query_given_object(const double* e_o, const double* r, double* q,
                                std::size_t d);
/// m[j*d+k] = sum_i e_s[i] * core[i][j*d+k]
void tucker_mix_subject(const double* e_s, const double* core, double* m,
                        std::size_t d, std::size_t dr);
/// q[k] = sum_j r[j] * m[j*d+k]
void tucker_query_from_mix(const double* m, const double* r, double* q,
                           std::size_t d, std::size_t dr);
/// q[i] = sum_{j,k} core[i][j*d+k] * r[j] * e_o[k]
void tucker_query_given_object(const double* core, const double* r,
                               const double* e_o, double* q, std::size_t d,
                               std::size_t dr);

/// KBLN literal correlation term for predicate p between feature rows:
/// sum_a w[p,a] * exp(-(d_a - c[p,a])^2 / (2 s[p,a]^2)), d_a = xs[a] - xo[a].
double kbln_literal_term(const double* w_row, const double* c_row,
                         const double* s_row, const double* xs, const double* xo,
                         std::size_t na);

/// MTKGNN forward pieces: triple net score and the per-attribute value
/// predictions of the subject/object regression nets.
double mtkgnn_triple_score(const ModelState& s, const double* e_s,
                           const double* r, const double* e_o);
double mtkgnn_attr_prediction(const ModelState& s, const char* net_prefix,
                              const double* e, std::uint32_t attr);

}  // namespace kglit
