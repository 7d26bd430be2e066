#pragma once

#include <optional>
#include <string>

#include "kglit/core/graph.hpp"
#include "kglit/eval/metrics.hpp"

namespace kglit {

/// Dataset directory layout: train.txt / valid.txt / test.txt / literals.txt
/// plus manifest.json. File names are overridable.
struct DatasetFiles {
  std::string train = "train.txt";
  std::string valid = "valid.txt";
  std::string test = "test.txt";
  std::string literals = "literals.txt";
};

KnowledgeGraph load_dataset_dir(const std::string& dir,
                                const LoadOptions& opts = {},
                                const DatasetFiles& files = {});

void write_dataset_dir(const KnowledgeGraph& g, const std::string& dir,
                       const DatasetFiles& files = {});

/// Synthetic vocabulary recorded in (and read back from) the dataset
/// manifest, so downstream transforms and evaluation can resolve the task.
std::optional<SyntheticVocab> read_synthetic_vocab(const std::string& dir);

}  // namespace kglit
