#include "kglit/core/graph.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <tuple>
#include <unordered_set>

#include "kglit/core/error.hpp"
#include "kglit/core/hash.hpp"

namespace kglit {

namespace {

std::optional<std::uint32_t> lookup(const std::vector<std::string>& vocab,
                                    std::string_view name) {
  auto it = std::lower_bound(vocab.begin(), vocab.end(), name);
  if (it == vocab.end() || *it != name) return std::nullopt;
  return static_cast<std::uint32_t>(it - vocab.begin());
}

struct RawRow {
  std::string s, p, o;
  std::size_t line = 0;
};

std::vector<RawRow> read_rows(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  std::vector<RawRow> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto t1 = line.find('\t');
    const auto t2 = t1 == std::string::npos ? std::string::npos : line.find('\t', t1 + 1);
    const auto t3 = t2 == std::string::npos ? std::string::npos : line.find('\t', t2 + 1);
    if (t1 == std::string::npos || t2 == std::string::npos || t3 != std::string::npos) {
      throw ParseError(path + ":" + std::to_string(lineno) +
                       ": expected 3 tab-separated columns");
    }
    rows.push_back({line.substr(0, t1), line.substr(t1 + 1, t2 - t1 - 1),
                    line.substr(t2 + 1), lineno});
  }
  return rows;
}

double parse_value(const std::string& text, const std::string& path,
                   std::size_t lineno) {
  double v = 0.0;
  const char* begin = text.data();
  const char* end = begin + text.size();
  auto [ptr, ec] = std::from_chars(begin, end, v);
  if (ec != std::errc() || ptr != end) {
    throw ParseError(path + ":" + std::to_string(lineno) +
                     ": attributive value is not a real number: '" + text + "'");
  }
  return v;
}

}  // namespace

std::optional<std::uint32_t> KnowledgeGraph::entity_id(std::string_view name) const {
  return lookup(entities, name);
}
std::optional<std::uint32_t> KnowledgeGraph::relation_id(std::string_view name) const {
  return lookup(entity_relations, name);
}
std::optional<std::uint32_t> KnowledgeGraph::attr_id(std::string_view name) const {
  return lookup(attr_relations, name);
}

void KnowledgeGraph::validate() const {
  if (!std::is_sorted(entities.begin(), entities.end()) ||
      !std::is_sorted(entity_relations.begin(), entity_relations.end()) ||
      !std::is_sorted(attr_relations.begin(), attr_relations.end())) {
    throw DomainError("vocabulary is not sorted");
  }
  auto check_split = [this](const std::vector<RelTriple>& triples,
                            const char* name) {
    for (const auto& t : triples) {
      if (t.s >= entities.size() || t.o >= entities.size() ||
          t.p >= entity_relations.size()) {
        throw DomainError(std::string("triple index out of range in ") + name);
      }
    }
    auto sorted = triples;
    std::sort(sorted.begin(), sorted.end(), [](const RelTriple& a, const RelTriple& b) {
      return std::tie(a.s, a.p, a.o) < std::tie(b.s, b.p, b.o);
    });
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
      throw DomainError(std::string("duplicate triple in split ") + name);
    }
  };
  check_split(train, "train");
  check_split(valid, "valid");
  check_split(test, "test");
  for (const auto& t : attributive) {
    if (t.s >= entities.size() || t.a >= attr_relations.size()) {
      throw DomainError("attributive triple index out of range");
    }
  }
}

std::uint64_t KnowledgeGraph::fingerprint() const {
  Fingerprint fp;
  auto add_vocab = [&fp](const std::vector<std::string>& v) {
    for (const auto& s : v) {
      fp.update(s);
      fp.update(std::string_view("\0", 1));
    }
    fp.update("|");
  };
  add_vocab(entities);
  add_vocab(entity_relations);
  add_vocab(attr_relations);
  auto add_triples = [&fp](const std::vector<RelTriple>& v) {
    for (const auto& t : v) {
      const std::uint32_t raw[3] = {t.s, t.p, t.o};
      fp.update(std::string_view(reinterpret_cast<const char*>(raw), sizeof(raw)));
    }
    fp.update("|");
  };
  add_triples(train);
  add_triples(valid);
  add_triples(test);
  for (const auto& t : attributive) {
    fp.update(std::string_view(reinterpret_cast<const char*>(&t.s), 4));
    fp.update(std::string_view(reinterpret_cast<const char*>(&t.a), 4));
    fp.update(std::string_view(reinterpret_cast<const char*>(&t.v), 8));
  }
  return fp.value();
}

KnowledgeGraph load_graph(const std::string& train_path,
                          const std::string& valid_path,
                          const std::string& test_path,
                          const std::string& literals_path,
                          const LoadOptions& opts) {
  const auto train_rows = read_rows(train_path);
  const auto valid_rows = read_rows(valid_path);
  const auto test_rows = read_rows(test_path);
  const auto attr_rows = read_rows(literals_path);

  KnowledgeGraph g;
  {
    std::unordered_set<std::string> ents, rels, attrs;
    for (const auto& r : train_rows) {
      ents.insert(r.s);
      ents.insert(r.o);
      rels.insert(r.p);
    }
    for (const auto& r : attr_rows) {
      ents.insert(r.s);
      attrs.insert(r.p);
    }
    g.entities.assign(ents.begin(), ents.end());
    g.entity_relations.assign(rels.begin(), rels.end());
    g.attr_relations.assign(attrs.begin(), attrs.end());
    std::sort(g.entities.begin(), g.entities.end());
    std::sort(g.entity_relations.begin(), g.entity_relations.end());
    std::sort(g.attr_relations.begin(), g.attr_relations.end());
  }

  auto to_triples = [&](const std::vector<RawRow>& rows, const std::string& path,
                        bool eval_split) {
    std::vector<RelTriple> out;
    out.reserve(rows.size());
    for (const auto& r : rows) {
      const auto s = g.entity_id(r.s);
      const auto p = g.relation_id(r.p);
      const auto o = g.entity_id(r.o);
      if (!s || !p || !o) {
        const std::string what = !s ? "entity '" + r.s + "'"
                                 : !p ? "relation '" + r.p + "'"
                                      : "entity '" + r.o + "'";
        if (!eval_split) {
          // Training rows define the vocabulary; this cannot happen.
          throw DomainError(path + ":" + std::to_string(r.line) +
                            ": internal vocabulary inconsistency");
        }
        if (opts.unknown_policy == UnknownEntityPolicy::reject) {
          throw DomainError(path + ":" + std::to_string(r.line) + ": unknown " +
                            what +
                            " not present in training data (use the drop "
                            "policy to skip such triples)");
        }
        ++opts.dropped;
        std::cerr << "warning: dropping " << path << ":" << r.line
                  << " with unknown " << what << "\n";
        continue;
      }
      out.push_back({*s, *p, *o});
    }
    return out;
  };

  g.train = to_triples(train_rows, train_path, false);
  g.valid = to_triples(valid_rows, valid_path, true);
  g.test = to_triples(test_rows, test_path, true);

  g.attributive.reserve(attr_rows.size());
  for (const auto& r : attr_rows) {
    g.attributive.push_back({*g.entity_id(r.s), *g.attr_id(r.p),
                             parse_value(r.o, literals_path, r.line)});
  }

  g.validate();
  return g;
}

std::string format_value(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  // Prefer the shortest representation that still round-trips.
  for (int prec = 1; prec < 17; ++prec) {
    char probe[64];
    std::snprintf(probe, sizeof(probe), "%.*g", prec, v);
    double back = 0.0;
    std::from_chars(probe, probe + std::char_traits<char>::length(probe), back);
    if (back == v) return probe;
  }
  return buf;
}

void write_graph(const KnowledgeGraph& g, const std::string& train_path,
                 const std::string& valid_path, const std::string& test_path,
                 const std::string& literals_path) {
  auto write_rel = [&g](const std::string& path, const std::vector<RelTriple>& ts) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    for (const auto& t : ts) {
      out << g.entities[t.s] << '\t' << g.entity_relations[t.p] << '\t'
          << g.entities[t.o] << '\n';
    }
  };
  write_rel(train_path, g.train);
  write_rel(valid_path, g.valid);
  write_rel(test_path, g.test);
  std::ofstream out(literals_path);
  if (!out) throw IoError("cannot write " + literals_path);
  for (const auto& t : g.attributive) {
    out << g.entities[t.s] << '\t' << g.attr_relations[t.a] << '\t'
        << format_value(t.v) << '\n';
  }
}

namespace {
constexpr char kCacheTag[] = "kglit-graph-cache v1";
}

void save_graph_cache(const KnowledgeGraph& g, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  out << kCacheTag << '\n';
  out << g.entities.size() << ' ' << g.entity_relations.size() << ' '
      << g.attr_relations.size() << ' ' << g.train.size() << ' '
      << g.valid.size() << ' ' << g.test.size() << ' ' << g.attributive.size()
      << '\n';
  for (const auto& e : g.entities) out << e << '\n';
  for (const auto& r : g.entity_relations) out << r << '\n';
  for (const auto& a : g.attr_relations) out << a << '\n';
  auto dump = [&out](const std::vector<RelTriple>& ts) {
    for (const auto& t : ts) out << t.s << ' ' << t.p << ' ' << t.o << '\n';
  };
  dump(g.train);
  dump(g.valid);
  dump(g.test);
  for (const auto& t : g.attributive) {
    out << t.s << ' ' << t.a << ' ' << format_value(t.v) << '\n';
  }
}

KnowledgeGraph load_graph_cache(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  std::string tag;
  std::getline(in, tag);
  if (tag != kCacheTag) throw ParseError(path + ": unrecognized cache header");
  std::size_t ne, nr, na, ntr, nva, nte, nat;
  if (!(in >> ne >> nr >> na >> ntr >> nva >> nte >> nat)) {
    throw ParseError(path + ": bad cache size line");
  }
  in.ignore();
  KnowledgeGraph g;
  auto read_names = [&](std::vector<std::string>& v, std::size_t n) {
    v.resize(n);
    for (auto& s : v) {
      if (!std::getline(in, s)) throw ParseError(path + ": truncated cache");
    }
  };
  read_names(g.entities, ne);
  read_names(g.entity_relations, nr);
  read_names(g.attr_relations, na);
  auto read_rel = [&](std::vector<RelTriple>& v, std::size_t n) {
    v.resize(n);
    for (auto& t : v) {
      if (!(in >> t.s >> t.p >> t.o)) throw ParseError(path + ": truncated cache");
    }
  };
  read_rel(g.train, ntr);
  read_rel(g.valid, nva);
  read_rel(g.test, nte);
  g.attributive.resize(nat);
  for (auto& t : g.attributive) {
    if (!(in >> t.s >> t.a >> t.v)) throw ParseError(path + ": truncated cache");
  }
  g.validate();
  return g;
}

}  // namespace kglit
