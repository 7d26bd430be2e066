#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "kglit/core/graph.hpp"

namespace kglit {

/// Configuration for the semi-synthetic enrichment. The target subset E' is
/// all entities by default; setting subject_of_relation restricts it to
/// entities appearing as subject of that relation (the paper-style
/// person-entity filter, generalized).
struct SyntheticSpec {
  std::optional<std::string> subject_of_relation;
  double threshold = 0.5;
  std::string attr_name = "synth_attr";
  std::string rel_name = "synth_rel";
  std::string class_high = "synth_high";
  std::string class_low = "synth_low";
  double frac_train = 0.70;
  double frac_valid = 0.15;
  double frac_test = 0.15;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Class decision for a drawn literal value: strictly above the threshold is
/// the high class, at or below is the low class.
bool synthetic_is_high(double value, double threshold);

/// Replaces all attributive triples by one uniform literal per member of E',
/// adds exactly one class triple per member, and appends the shuffled class
/// triples to the original splits by the configured fractions. The two class
/// entities and the class relation are new vocabulary; the literal relation
/// becomes the sole attributive relation.
KnowledgeGraph synth_enrich(const KnowledgeGraph& g, const SyntheticSpec& spec);

enum class AblationKind {
  random_literal,
  random_literal_values_only,
  existence,
  relational_reduce,
};

struct AblationSpec {
  AblationKind kind = AblationKind::random_literal;
  std::optional<double> alpha;  // relational_reduce only
  std::uint64_t seed = 0;
  bool include_eval_splits = false;  // relational_reduce: literal reading

  void validate() const;
};

/// Replaces G_A by the complete |E| x |R_A| table of Uniform(0,1) literals.
KnowledgeGraph ablate_literals_random(const KnowledgeGraph& g, std::uint64_t seed);

/// Keeps the (entity, attribute) incidence structure, redraws every value
/// from Uniform(0,1). The variant used with augmentation-based consumers,
/// where the complete table would blow the graph up.
KnowledgeGraph ablate_literals_values_only(const KnowledgeGraph& g, std::uint64_t seed);

/// One triple (e, p, 1.0) per (entity, attribute) pair that had any value.
KnowledgeGraph ablate_literals_existence(const KnowledgeGraph& g);

struct RelationalAblationStats {
  std::size_t protected_count = 0;
  std::size_t target = 0;
  double max_feasible_alpha = 0.0;
};

/// Reduces the training relational triples to ceil((1-alpha)*|train|) while
/// keeping every entity and relation that occurs in the input covered by at
/// least one surviving triple. Greedy seeded cover, then uniform removal
/// among unprotected triples. Throws DomainError naming the feasibility
/// limit when the target is below the cover size.
KnowledgeGraph ablate_relational(const KnowledgeGraph& g, double alpha,
                                 std::uint64_t seed,
                                 bool include_eval_splits = false,
                                 RelationalAblationStats* stats = nullptr);

KnowledgeGraph apply_ablation(const KnowledgeGraph& g, const AblationSpec& spec);

/// Independent check of the reduction contract: subset of the input,
/// exact target cardinality, and full entity/relation coverage (relative to
/// what the input split covered). Returns an explanation on failure.
std::optional<std::string> verify_relational_ablation(
    const KnowledgeGraph& input, const KnowledgeGraph& output, double alpha);

}  // namespace kglit
