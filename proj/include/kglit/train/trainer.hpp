#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "kglit/core/features.hpp"
#include "kglit/core/graph.hpp"
#include "kglit/core/thread_pool.hpp"
#include "kglit/models/state.hpp"
#include "kglit/train/config.hpp"

namespace kglit {

struct TrainReport {
  std::vector<std::pair<std::size_t, double>> mrr_trace;  // (epoch, valid MRR)
  std::size_t best_epoch = 0;
  double best_mrr = 0.0;
  std::size_t epochs_run = 0;
  double wall_seconds = 0.0;
  std::size_t flagged_negatives = 0;
  std::uint64_t feature_seed = 0;
};

struct TrainResult {
  ModelState state;  // best-validation-MRR checkpoint
  TrainReport report;
};

/// Runs the optimization loop: seeded shuffling and batching, negative
/// sampling or 1-N targets by model regime, Adam updates, validation MRR
/// every eval_every_epochs epochs, stop after `patience` consecutive
/// non-improving checks. Single-threaded pools make the result bit-stable;
/// wider pools only change thread assignment, not any computed value.
TrainResult train(const KnowledgeGraph& g, const LiteralFeatureMatrix& feats,
                  ModelKind kind, const TrainConfig& cfg, ThreadPool& pool,
                  const std::function<void(const std::string&)>& log = {});

}  // namespace kglit
