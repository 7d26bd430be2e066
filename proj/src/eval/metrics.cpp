#include "kglit/eval/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "kglit/core/error.hpp"

namespace kglit {

std::uint32_t filtered_rank(const Scorer& scorer, const RelTriple& triple,
                            CorruptionSide side, const FilterIndex& filter) {
  const std::size_t n = scorer.num_entities();
  std::vector<double> scores(n);
  std::uint32_t true_id;
  std::span<const std::uint32_t> known;
  if (side == CorruptionSide::object) {
    scorer.score_objects(triple.s, triple.p, scores);
    true_id = triple.o;
    known = filter.objects_of(triple.s, triple.p);
  } else {
    scorer.score_subjects(triple.p, triple.o, scores);
    true_id = triple.s;
    known = filter.subjects_of(triple.p, triple.o);
  }

  const double target = scores[true_id];
  std::size_t greater = 0, ties = 0;
  std::size_t ki = 0;
  for (std::size_t c = 0; c < n; ++c) {
    while (ki < known.size() && known[ki] < c) ++ki;
    const bool is_known = ki < known.size() && known[ki] == c;
    if (is_known) continue;  // true_id is always in `known`
    if (scores[c] > target) {
      ++greater;
    } else if (scores[c] == target) {
      ++ties;
    }
  }
  return static_cast<std::uint32_t>(1 + greater + (ties + 1) / 2);
}

RankList rank_triples(const Scorer& scorer, std::span<const RelTriple> triples,
                      const FilterIndex& filter, ThreadPool& pool) {
  RankList out;
  out.ranks.resize(triples.size());
  pool.parallel_for(triples.size(), [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) {
      out.ranks[i] = {
          filtered_rank(scorer, triples[i], CorruptionSide::subject, filter),
          filtered_rank(scorer, triples[i], CorruptionSide::object, filter)};
    }
  });
  return out;
}

EvalReport metrics(const RankList& ranks) {
  if (ranks.ranks.empty()) {
    throw DomainError("cannot compute metrics over an empty rank list");
  }
  EvalReport r;
  r.n_test = ranks.ranks.size();
  double mr = 0.0, mrr = 0.0, h1 = 0.0, h3 = 0.0, h10 = 0.0;
  auto tally = [&](std::uint32_t rank) {
    mr += rank;
    mrr += 1.0 / static_cast<double>(rank);
    h1 += rank <= 1;
    h3 += rank <= 3;
    h10 += rank <= 10;
  };
  for (const auto& [rs, ro] : ranks.ranks) {
    tally(rs);
    tally(ro);
  }
  const double n = 2.0 * static_cast<double>(ranks.ranks.size());
  r.mr = mr / n;
  r.mrr = mrr / n;
  r.hits1 = h1 / n;
  r.hits3 = h3 / n;
  r.hits10 = h10 / n;
  return r;
}

double synthetic_accuracy(const Scorer& scorer, const KnowledgeGraph& g,
                          const SyntheticVocab& vocab) {
  const auto rel = g.relation_id(vocab.rel_name);
  const auto high = g.entity_id(vocab.class_high);
  const auto low = g.entity_id(vocab.class_low);
  if (!rel || !high || !low) {
    throw DomainError("synthetic vocabulary (" + vocab.rel_name + ", " +
                      vocab.class_high + ", " + vocab.class_low +
                      ") not resolvable in this graph");
  }

  std::vector<std::uint8_t> is_high(g.num_entities(), 0), is_low(g.num_entities(), 0);
  auto scan = [&](const std::vector<RelTriple>& ts) {
    for (const auto& t : ts) {
      if (t.p != *rel) continue;
      if (t.o == *high) is_high[t.s] = 1;
      if (t.o == *low) is_low[t.s] = 1;
    }
  };
  scan(g.train);
  scan(g.valid);
  scan(g.test);

  std::size_t members = 0, correct = 0;
  for (std::uint32_t e = 0; e < g.num_entities(); ++e) {
    if (!is_high[e] && !is_low[e]) continue;
    ++members;
    const double sh = scorer.score_one(e, *rel, *high);
    const double sl = scorer.score_one(e, *rel, *low);
    if (is_high[e]) {
      correct += sh >= sl;  // ties credit the high class
    } else {
      correct += sl > sh;
    }
  }
  if (members == 0) {
    throw DomainError("no synthetic class triples found in the graph");
  }
  return static_cast<double>(correct) / static_cast<double>(members);
}

EvalReport aggregate_runs(std::span<const EvalReport> reports) {
  if (reports.empty()) throw DomainError("no reports to aggregate");
  EvalReport out;
  out.n_test = reports.front().n_test;

  auto stats = [&](auto getter) {
    double mean = 0.0;
    for (const auto& r : reports) mean += getter(r);
    mean /= static_cast<double>(reports.size());
    double var = 0.0;
    for (const auto& r : reports) {
      const double d = getter(r) - mean;
      var += d * d;
    }
    const double sd = reports.size() > 1
                          ? std::sqrt(var / static_cast<double>(reports.size() - 1))
                          : 0.0;
    return std::pair<double, double>(mean, sd);
  };

  std::tie(out.mr, out.mr_std.emplace()) = stats([](const EvalReport& r) { return r.mr; });
  std::tie(out.mrr, out.mrr_std.emplace()) = stats([](const EvalReport& r) { return r.mrr; });
  std::tie(out.hits1, out.hits1_std.emplace()) = stats([](const EvalReport& r) { return r.hits1; });
  std::tie(out.hits3, out.hits3_std.emplace()) = stats([](const EvalReport& r) { return r.hits3; });
  std::tie(out.hits10, out.hits10_std.emplace()) = stats([](const EvalReport& r) { return r.hits10; });
  const bool all_acc = std::all_of(reports.begin(), reports.end(),
                                   [](const EvalReport& r) { return r.acc.has_value(); });
  if (all_acc) {
    auto [m, s] = stats([](const EvalReport& r) { return *r.acc; });
    out.acc = m;
    out.acc_std = s;
  }
  out.single_run = reports.size() == 1;
  return out;
}

}  // namespace kglit
