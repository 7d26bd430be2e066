#include "kglit/train/trainer.hpp"

#include <chrono>
#include <cmath>
#include <limits>

#include "kglit/core/error.hpp"
#include "kglit/core/rng.hpp"
#include "kglit/eval/metrics.hpp"
#include "kglit/train/adam.hpp"
#include "kglit/train/loss.hpp"

namespace kglit {

namespace {

std::uint64_t batch_seed(std::uint64_t seed, std::size_t epoch, std::size_t batch) {
  std::uint64_t h = fnv1a64("batch-stream");
  h ^= seed;
  h *= kFnvPrime;
  h ^= epoch;
  h *= kFnvPrime;
  h ^= batch;
  h *= kFnvPrime;
  return h;
}

}  // namespace

TrainResult train(const KnowledgeGraph& g, const LiteralFeatureMatrix& feats,
                  ModelKind kind, const TrainConfig& cfg, ThreadPool& pool,
                  const std::function<void(const std::string&)>& log) {
  cfg.validate();
  if (g.train.empty()) throw DomainError("training split is empty");

  const auto t0 = std::chrono::steady_clock::now();

  ModelDims dims;
  dims.n_entities = g.num_entities();
  dims.n_relations = g.num_relations();
  dims.n_attrs = g.num_attrs();
  dims.dim = cfg.embedding_dim;
  dims.rel_dim = cfg.rel_dim;

  ModelState state = init_model(kind, dims, cfg.seed);
  if (kind == ModelKind::kbln) fit_kbln_stats(state, g, feats);

  const bool one_to_n = is_one_to_n(kind);
  const FilterIndex train_index = make_train_index(g);
  FilterIndex full_filter(g);

  std::vector<OneToNRow> rows;
  if (one_to_n) rows = build_one_to_n_rows(g);
  std::vector<AttrTriple> attr_order = g.attributive;

  Gradients grads;
  grads.init_like(state);
  Adam adam(state, cfg.learning_rate);

  TrainResult result;
  TrainReport& report = result.report;
  ModelState best = state;
  double best_mrr = -std::numeric_limits<double>::infinity();
  std::size_t best_epoch = 0;
  std::size_t stale_checks = 0;
  bool any_check = false;

  const std::size_t bs = cfg.batch_size;
  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    Rng order_rng(cfg.seed, "epoch-order#" + std::to_string(epoch));
    double epoch_loss = 0.0;
    std::size_t n_batches = 0;

    if (one_to_n) {
      order_rng.shuffle(rows);
      for (std::size_t off = 0; off < rows.size(); off += bs, ++n_batches) {
        const std::size_t take = std::min(bs, rows.size() - off);
        grads.reset();
        const double loss = one_to_n_batch_loss(
            state, feats, {rows.data() + off, take}, train_index, cfg,
            batch_seed(cfg.seed, epoch, n_batches), pool, &grads);
        if (!std::isfinite(loss)) {
          throw NumericError("non-finite loss at epoch " + std::to_string(epoch) +
                             ", batch " + std::to_string(n_batches));
        }
        epoch_loss += loss;
        adam.step(state, grads);
      }
    } else {
      std::vector<RelTriple> positives = g.train;
      order_rng.shuffle(positives);
      if (!attr_order.empty()) order_rng.shuffle(attr_order);
      std::size_t attr_cursor = 0;
      for (std::size_t off = 0; off < positives.size(); off += bs, ++n_batches) {
        const std::size_t take = std::min(bs, positives.size() - off);
        Rng neg_rng(batch_seed(cfg.seed, epoch, n_batches), "negatives");
        auto negs = negative_sample({positives.data() + off, take}, train_index,
                                    g.num_entities(), cfg.n_neg, neg_rng);
        report.flagged_negatives += negs.known_accepted;

        PairwiseBatch batch;
        batch.pos = {positives.data() + off, take};
        batch.neg = negs.triples;
        std::vector<AttrTriple> attr_slice;
        if (!attr_order.empty() &&
            (kind == ModelKind::transea || kind == ModelKind::mtkgnn)) {
          attr_slice.reserve(take);
          for (std::size_t j = 0; j < take; ++j) {
            attr_slice.push_back(attr_order[attr_cursor]);
            attr_cursor = (attr_cursor + 1) % attr_order.size();
          }
          batch.attr = attr_slice;
        }

        grads.reset();
        const double loss = pairwise_batch_loss(
            state, feats, batch, cfg, batch_seed(cfg.seed, epoch, n_batches) ^ 0x5a5a,
            pool, &grads);
        if (!std::isfinite(loss)) {
          throw NumericError("non-finite loss at epoch " + std::to_string(epoch) +
                             ", batch " + std::to_string(n_batches));
        }
        epoch_loss += loss;
        adam.step(state, grads);
      }
    }
    report.epochs_run = epoch;

    if (epoch % cfg.eval_every_epochs == 0 && !g.valid.empty()) {
      if (!state.all_finite()) {
        throw NumericError("non-finite parameters after epoch " +
                           std::to_string(epoch));
      }
      const auto scorer = make_scorer(state, feats, pool);
      const auto ranks = rank_triples(*scorer, g.valid, full_filter, pool);
      const double mrr = metrics(ranks).mrr;
      report.mrr_trace.push_back({epoch, mrr});
      any_check = true;
      if (log) {
        log("epoch " + std::to_string(epoch) + ": loss=" +
            std::to_string(epoch_loss / std::max<std::size_t>(1, n_batches)) +
            " valid_mrr=" + std::to_string(mrr));
      }
      if (mrr > best_mrr) {
        best_mrr = mrr;
        best_epoch = epoch;
        best = state;
        stale_checks = 0;
      } else if (++stale_checks >= cfg.patience) {
        break;
      }
    }
  }

  if (!any_check) {
    best = state;  // no validation checks ran; final parameters stand.
    best_mrr = 0.0;
    best_epoch = report.epochs_run;
  }
  report.best_epoch = best_epoch;
  report.best_mrr = any_check ? best_mrr : 0.0;
  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  result.state = std::move(best);
  return result;
}

}  // namespace kglit
