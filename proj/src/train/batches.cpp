#include "kglit/train/batches.hpp"

#include <algorithm>
#include <unordered_set>

namespace kglit {

std::vector<OneToNRow> build_one_to_n_rows(const KnowledgeGraph& g) {
  std::unordered_set<std::uint64_t> seen;
  seen.reserve(g.train.size() * 4);
  std::vector<OneToNRow> rows;
  rows.reserve(g.train.size() * 2);
  auto add = [&](std::uint32_t key, std::uint32_t rel, RowSide side) {
    const std::uint64_t k = (static_cast<std::uint64_t>(key) << 33) |
                            (static_cast<std::uint64_t>(rel) << 1) |
                            static_cast<std::uint64_t>(side);
    if (seen.insert(k).second) rows.push_back({key, rel, side});
  };
  for (const auto& t : g.train) {
    add(t.s, t.p, RowSide::to_objects);
    add(t.o, t.p, RowSide::to_subjects);
  }
  return rows;
}

void fill_one_to_n_labels(std::span<double> out,
                          std::span<const std::uint32_t> true_ids, double ls) {
  const double n = static_cast<double>(out.size());
  const double base = ls / n;
  std::fill(out.begin(), out.end(), base);
  for (const auto id : true_ids) out[id] = (1.0 - ls) + base;
}

NegativeSample negative_sample(std::span<const RelTriple> positives,
                               const FilterIndex& train_index,
                               std::size_t n_entities, std::size_t n_neg,
                               Rng& rng) {
  NegativeSample out;
  out.triples.reserve(positives.size() * n_neg);
  for (const auto& pos : positives) {
    for (std::size_t j = 0; j < n_neg; ++j) {
      const bool corrupt_subject = rng.coin();
      const std::uint32_t original = corrupt_subject ? pos.s : pos.o;
      auto draw = [&] {
        // uniform over all entities except the original
        std::uint32_t e = static_cast<std::uint32_t>(rng.uniform_int(n_entities - 1));
        if (e >= original) ++e;
        return e;
      };
      auto build = [&](std::uint32_t e) {
        return corrupt_subject ? RelTriple{e, pos.p, pos.o}
                               : RelTriple{pos.s, pos.p, e};
      };
      RelTriple cand = build(draw());
      if (train_index.contains(cand.s, cand.p, cand.o)) {
        cand = build(draw());
        if (train_index.contains(cand.s, cand.p, cand.o)) ++out.known_accepted;
      }
      out.triples.push_back(cand);
    }
  }
  return out;
}

FilterIndex make_train_index(const KnowledgeGraph& g) {
  return FilterIndex(std::span<const RelTriple>(g.train.data(), g.train.size()));
}

}  // namespace kglit
