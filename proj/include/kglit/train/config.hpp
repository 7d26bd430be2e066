#pragma once

#include <cstdint>
#include <string>

#include "kglit/models/state.hpp"

namespace kglit {

struct TrainConfig {
  std::size_t embedding_dim = 200;
  std::size_t rel_dim = 30;  // tucker relation dim
  std::size_t epochs = 100;
  double learning_rate = 0.001;
  std::size_t batch_size = 128;
  double input_dropout = 0.2;
  double label_smoothing = 0.1;
  double margin = 1.0;   // translational models
  double alpha = 0.1;    // transea attribute-loss weight
  std::size_t n_neg = 1; // negatives per positive, pairwise regime
  std::size_t eval_every_epochs = 3;
  std::size_t patience = 5;  // non-improving checks before stopping
  std::uint64_t seed = 0;

  void validate() const;
};

/// Per-model defaults. The 1-N hosts share one hyperparameter set
/// (dim 200, 100 epochs, lr 0.001, batch 128, dropout 0.2, smoothing 0.1);
/// the translational models drop smoothing/dropout, TransEA uses dim 100
/// and 500 epochs with the regression weight 0.1.
TrainConfig default_config(ModelKind kind);

/// key=value text, one per line, '#' comments ignored. Unknown keys error.
TrainConfig parse_config_text(const std::string& text, ModelKind kind);
TrainConfig load_config_file(const std::string& path, ModelKind kind);
void apply_config_entry(TrainConfig& cfg, const std::string& key,
                        const std::string& value);

/// Canonical serialized form; its fingerprint is the config hash recorded
/// in checkpoints and manifests.
std::string config_to_text(const TrainConfig& cfg);
std::uint64_t config_hash(const TrainConfig& cfg);

}  // namespace kglit
