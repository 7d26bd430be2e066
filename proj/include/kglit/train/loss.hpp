#pragma once

#include <cstdint>
#include <span>

#include "kglit/core/features.hpp"
#include "kglit/core/filter_index.hpp"
#include "kglit/core/thread_pool.hpp"
#include "kglit/models/state.hpp"
#include "kglit/train/batches.hpp"
#include "kglit/train/config.hpp"
#include "kglit/train/grads.hpp"

namespace kglit {

/// Mean binary cross-entropy over all candidates of every row, with label
/// smoothing. Analytic gradients for every trainable table when grads is
/// non-null; with grads null only the loss is computed (the two paths share
/// the forward, so finite differences of this function check the gradients).
/// Dropout is a pure function of dropout_seed.
double one_to_n_batch_loss(const ModelState& st, const LiteralFeatureMatrix& feats,
                           std::span<const OneToNRow> rows,
                           const FilterIndex& train_labels, const TrainConfig& cfg,
                           std::uint64_t dropout_seed, ThreadPool& pool,
                           Gradients* grads);

struct PairwiseBatch {
  std::span<const RelTriple> pos;
  std::span<const RelTriple> neg;   // cfg.n_neg entries per positive
  std::span<const AttrTriple> attr; // attribute slice (transea / mtkgnn)
};

/// TransE/TransEA margin-ranking objective (sums over the batch,
/// (1-alpha)*L_E + alpha*L_A for TransEA; attribute values are regressed on
/// the attribute's min-max scale) and the MTKGNN sampled-negative BCE plus
/// the two attribute-net regressions.
double pairwise_batch_loss(const ModelState& st, const LiteralFeatureMatrix& feats,
                           const PairwiseBatch& batch, const TrainConfig& cfg,
                           std::uint64_t dropout_seed, ThreadPool& pool,
                           Gradients* grads);

}  // namespace kglit
