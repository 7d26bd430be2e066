#include "kglit/datagen/transforms.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <tuple>

#include "kglit/core/error.hpp"
#include "kglit/core/rng.hpp"

namespace kglit {

void SyntheticSpec::validate() const {
  if (std::abs(frac_train + frac_valid + frac_test - 1.0) > 1e-9) {
    throw DomainError("synthetic split fractions must sum to 1");
  }
  if (!(threshold > 0.0 && threshold < 1.0)) {
    throw DomainError("synthetic threshold must lie in (0, 1)");
  }
}

bool synthetic_is_high(double value, double threshold) {
  return value > threshold;
}

namespace {

std::uint32_t index_of(const std::vector<std::string>& vocab,
                       const std::string& name) {
  const auto it = std::lower_bound(vocab.begin(), vocab.end(), name);
  return static_cast<std::uint32_t>(it - vocab.begin());
}

std::vector<std::uint32_t> remap_table(const std::vector<std::string>& old_vocab,
                                       const std::vector<std::string>& new_vocab) {
  std::vector<std::uint32_t> map(old_vocab.size());
  for (std::size_t i = 0; i < old_vocab.size(); ++i) {
    map[i] = index_of(new_vocab, old_vocab[i]);
  }
  return map;
}

}  // namespace

KnowledgeGraph synth_enrich(const KnowledgeGraph& g, const SyntheticSpec& spec) {
  spec.validate();

  // E': all entities, or subjects of the configured relation.
  std::vector<std::uint32_t> members;
  if (spec.subject_of_relation) {
    const auto rel = g.relation_id(*spec.subject_of_relation);
    if (!rel) {
      throw DomainError("entity-filter relation not in vocabulary: " +
                        *spec.subject_of_relation);
    }
    std::set<std::uint32_t> subjects;
    for (const auto& t : g.train) {
      if (t.p == *rel) subjects.insert(t.s);
    }
    members.assign(subjects.begin(), subjects.end());
  } else {
    members.resize(g.num_entities());
    for (std::size_t i = 0; i < members.size(); ++i) {
      members[i] = static_cast<std::uint32_t>(i);
    }
  }
  if (members.empty()) {
    throw DomainError("synthetic entity filter selected no entities");
  }

  for (const auto& name : {spec.class_high, spec.class_low}) {
    if (g.entity_id(name)) {
      throw DomainError("synthetic class entity already exists: " + name);
    }
  }
  if (g.relation_id(spec.rel_name)) {
    throw DomainError("synthetic relation already exists: " + spec.rel_name);
  }

  KnowledgeGraph out;
  out.entities = g.entities;
  out.entities.push_back(spec.class_high);
  out.entities.push_back(spec.class_low);
  std::sort(out.entities.begin(), out.entities.end());
  out.entity_relations = g.entity_relations;
  out.entity_relations.push_back(spec.rel_name);
  std::sort(out.entity_relations.begin(), out.entity_relations.end());
  out.attr_relations = {spec.attr_name};

  const auto emap = remap_table(g.entities, out.entities);
  const auto rmap = remap_table(g.entity_relations, out.entity_relations);
  auto remap = [&](const std::vector<RelTriple>& ts) {
    std::vector<RelTriple> r;
    r.reserve(ts.size());
    for (const auto& t : ts) r.push_back({emap[t.s], rmap[t.p], emap[t.o]});
    return r;
  };
  out.train = remap(g.train);
  out.valid = remap(g.valid);
  out.test = remap(g.test);

  const std::uint32_t high_id = index_of(out.entities, spec.class_high);
  const std::uint32_t low_id = index_of(out.entities, spec.class_low);
  const std::uint32_t rel_id = index_of(out.entity_relations, spec.rel_name);

  // One literal and one class triple per member, in ascending entity order.
  Rng value_rng(spec.seed, "synth-values");
  std::vector<RelTriple> class_triples;
  class_triples.reserve(members.size());
  out.attributive.reserve(members.size());
  for (const std::uint32_t e_old : members) {
    const double v = value_rng.uniform();
    const std::uint32_t e = emap[e_old];
    out.attributive.push_back({e, 0, v});
    class_triples.push_back(
        {e, rel_id, synthetic_is_high(v, spec.threshold) ? high_id : low_id});
  }

  Rng split_rng(spec.seed, "synth-split");
  split_rng.shuffle(class_triples);
  const std::size_t n = class_triples.size();
  const std::size_t n_train =
      static_cast<std::size_t>(std::llround(spec.frac_train * static_cast<double>(n)));
  const std::size_t n_train_valid = static_cast<std::size_t>(
      std::llround((spec.frac_train + spec.frac_valid) * static_cast<double>(n)));
  for (std::size_t i = 0; i < n; ++i) {
    if (i < n_train) {
      out.train.push_back(class_triples[i]);
    } else if (i < n_train_valid) {
      out.valid.push_back(class_triples[i]);
    } else {
      out.test.push_back(class_triples[i]);
    }
  }

  out.validate();
  return out;
}

void AblationSpec::validate() const {
  if (kind == AblationKind::relational_reduce) {
    if (!alpha) throw DomainError("relational ablation requires alpha");
    if (!(*alpha >= 0.0 && *alpha < 1.0)) {
      throw DomainError("alpha must lie in [0, 1)");
    }
  } else if (alpha) {
    throw DomainError("alpha is only meaningful for relational ablation");
  }
}

KnowledgeGraph ablate_literals_random(const KnowledgeGraph& g,
                                      std::uint64_t seed) {
  if (g.num_attrs() == 0) {
    throw DomainError("graph has no attributive relations; nothing to ablate");
  }
  KnowledgeGraph out = g;
  out.attributive.clear();
  out.attributive.reserve(g.num_entities() * g.num_attrs());
  Rng rng(seed, "ablate-random");
  for (std::uint32_t e = 0; e < g.num_entities(); ++e) {
    for (std::uint32_t a = 0; a < g.num_attrs(); ++a) {
      out.attributive.push_back({e, a, rng.uniform()});
    }
  }
  return out;
}

KnowledgeGraph ablate_literals_values_only(const KnowledgeGraph& g,
                                           std::uint64_t seed) {
  KnowledgeGraph out = g;
  Rng rng(seed, "ablate-values-only");
  for (auto& t : out.attributive) t.v = rng.uniform();
  return out;
}

KnowledgeGraph ablate_literals_existence(const KnowledgeGraph& g) {
  KnowledgeGraph out = g;
  std::set<std::pair<std::uint32_t, std::uint32_t>> pairs;
  for (const auto& t : g.attributive) pairs.insert({t.s, t.a});
  out.attributive.clear();
  out.attributive.reserve(pairs.size());
  for (const auto& [e, a] : pairs) out.attributive.push_back({e, a, 1.0});
  return out;
}

namespace {

struct ReduceResult {
  std::vector<std::uint8_t> keep;  // per pool index
  RelationalAblationStats stats;
};

ReduceResult reduce_pool(const std::vector<RelTriple>& pool,
                         std::size_t n_entities, std::size_t n_relations,
                         double alpha, std::uint64_t seed) {
  const std::size_t n = pool.size();
  const std::size_t target = static_cast<std::size_t>(
      std::ceil((1.0 - alpha) * static_cast<double>(n)));

  std::vector<std::vector<std::uint32_t>> by_entity(n_entities);
  std::vector<std::vector<std::uint32_t>> by_relation(n_relations);
  for (std::uint32_t i = 0; i < n; ++i) {
    by_entity[pool[i].s].push_back(i);
    if (pool[i].o != pool[i].s) by_entity[pool[i].o].push_back(i);
    by_relation[pool[i].p].push_back(i);
  }

  std::vector<std::uint8_t> protected_flag(n, 0);
  std::vector<std::uint8_t> entity_covered(n_entities, 0);
  std::vector<std::uint8_t> relation_covered(n_relations, 0);
  std::size_t protected_count = 0;
  Rng rng(seed, "ablate-relational");

  auto mark = [&](std::uint32_t idx) {
    if (!protected_flag[idx]) {
      protected_flag[idx] = 1;
      ++protected_count;
    }
    entity_covered[pool[idx].s] = 1;
    entity_covered[pool[idx].o] = 1;
    relation_covered[pool[idx].p] = 1;
  };

  for (std::size_t e = 0; e < n_entities; ++e) {
    if (entity_covered[e] || by_entity[e].empty()) continue;
    mark(by_entity[e][rng.uniform_int(by_entity[e].size())]);
  }
  for (std::size_t p = 0; p < n_relations; ++p) {
    if (relation_covered[p] || by_relation[p].empty()) continue;
    mark(by_relation[p][rng.uniform_int(by_relation[p].size())]);
  }

  RelationalAblationStats stats;
  stats.protected_count = protected_count;
  stats.target = target;
  stats.max_feasible_alpha =
      n == 0 ? 0.0
             : 1.0 - static_cast<double>(protected_count) / static_cast<double>(n);

  if (target < protected_count) {
    throw DomainError(
        "infeasible alpha: target of " + std::to_string(target) +
        " triples is below the coverage minimum of " +
        std::to_string(protected_count) + " (max feasible alpha ~ " +
        std::to_string(stats.max_feasible_alpha) + ")");
  }

  std::vector<std::uint32_t> unprotected;
  unprotected.reserve(n - protected_count);
  for (std::uint32_t i = 0; i < n; ++i) {
    if (!protected_flag[i]) unprotected.push_back(i);
  }
  rng.shuffle(unprotected);

  std::vector<std::uint8_t> keep(n, 0);
  for (std::uint32_t i = 0; i < n; ++i) keep[i] = protected_flag[i];
  const std::size_t extra = target - protected_count;
  for (std::size_t i = 0; i < extra; ++i) keep[unprotected[i]] = 1;

  return {std::move(keep), stats};
}

}  // namespace

KnowledgeGraph ablate_relational(const KnowledgeGraph& g, double alpha,
                                 std::uint64_t seed, bool include_eval_splits,
                                 RelationalAblationStats* stats) {
  if (!(alpha >= 0.0 && alpha < 1.0)) {
    throw DomainError("alpha must lie in [0, 1)");
  }
  KnowledgeGraph out = g;
  if (!include_eval_splits) {
    auto res = reduce_pool(g.train, g.num_entities(), g.num_relations(), alpha, seed);
    if (stats) *stats = res.stats;
    out.train.clear();
    out.train.reserve(res.stats.target);
    for (std::size_t i = 0; i < g.train.size(); ++i) {
      if (res.keep[i]) out.train.push_back(g.train[i]);
    }
    return out;
  }

  // Literal reading: the reduction runs over all three splits as one pool.
  std::vector<RelTriple> pool;
  pool.reserve(g.train.size() + g.valid.size() + g.test.size());
  pool.insert(pool.end(), g.train.begin(), g.train.end());
  pool.insert(pool.end(), g.valid.begin(), g.valid.end());
  pool.insert(pool.end(), g.test.begin(), g.test.end());
  auto res = reduce_pool(pool, g.num_entities(), g.num_relations(), alpha, seed);
  if (stats) *stats = res.stats;
  out.train.clear();
  out.valid.clear();
  out.test.clear();
  const std::size_t b1 = g.train.size();
  const std::size_t b2 = b1 + g.valid.size();
  for (std::size_t i = 0; i < pool.size(); ++i) {
    if (!res.keep[i]) continue;
    if (i < b1) {
      out.train.push_back(pool[i]);
    } else if (i < b2) {
      out.valid.push_back(pool[i]);
    } else {
      out.test.push_back(pool[i]);
    }
  }
  return out;
}

KnowledgeGraph apply_ablation(const KnowledgeGraph& g, const AblationSpec& spec) {
  spec.validate();
  switch (spec.kind) {
    case AblationKind::random_literal:
      return ablate_literals_random(g, spec.seed);
    case AblationKind::random_literal_values_only:
      return ablate_literals_values_only(g, spec.seed);
    case AblationKind::existence:
      return ablate_literals_existence(g);
    case AblationKind::relational_reduce:
      return ablate_relational(g, *spec.alpha, spec.seed, spec.include_eval_splits);
  }
  throw DomainError("unknown ablation kind");
}

std::optional<std::string> verify_relational_ablation(
    const KnowledgeGraph& input, const KnowledgeGraph& output, double alpha) {
  const std::size_t expected = static_cast<std::size_t>(
      std::ceil((1.0 - alpha) * static_cast<double>(input.train.size())));
  if (output.train.size() != expected) {
    return "cardinality mismatch: got " + std::to_string(output.train.size()) +
           ", expected " + std::to_string(expected);
  }
  if (output.valid != input.valid || output.test != input.test) {
    return "valid/test splits were modified";
  }

  std::set<std::tuple<std::uint32_t, std::uint32_t, std::uint32_t>> in_set;
  for (const auto& t : input.train) in_set.insert({t.s, t.p, t.o});
  for (const auto& t : output.train) {
    if (!in_set.count({t.s, t.p, t.o})) {
      return "output contains a triple absent from the input training split";
    }
  }

  std::vector<std::uint8_t> need_entity(input.num_entities(), 0);
  std::vector<std::uint8_t> need_rel(input.num_relations(), 0);
  for (const auto& t : input.train) {
    need_entity[t.s] = need_entity[t.o] = 1;
    need_rel[t.p] = 1;
  }
  std::vector<std::uint8_t> have_entity(input.num_entities(), 0);
  std::vector<std::uint8_t> have_rel(input.num_relations(), 0);
  for (const auto& t : output.train) {
    have_entity[t.s] = have_entity[t.o] = 1;
    have_rel[t.p] = 1;
  }
  for (std::size_t e = 0; e < need_entity.size(); ++e) {
    if (need_entity[e] && !have_entity[e]) {
      return "entity " + input.entities[e] + " lost all training triples";
    }
  }
  for (std::size_t p = 0; p < need_rel.size(); ++p) {
    if (need_rel[p] && !have_rel[p]) {
      return "relation " + input.entity_relations[p] + " lost all training triples";
    }
  }
  return std::nullopt;
}

}  // namespace kglit
