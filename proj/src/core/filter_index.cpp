#include "kglit/core/filter_index.hpp"

#include <algorithm>

namespace kglit {

FilterIndex::FilterIndex(const KnowledgeGraph& g) {
  auto add = [this](const std::vector<RelTriple>& ts) {
    for (const auto& t : ts) {
      sp_to_o_[key(t.s, t.p)].push_back(t.o);
      po_to_s_[key(t.p, t.o)].push_back(t.s);
    }
  };
  add(g.train);
  add(g.valid);
  add(g.test);
  for (auto& [k, v] : sp_to_o_) std::sort(v.begin(), v.end());
  for (auto& [k, v] : po_to_s_) std::sort(v.begin(), v.end());
}

FilterIndex::FilterIndex(std::span<const RelTriple> triples) {
  for (const auto& t : triples) {
    sp_to_o_[key(t.s, t.p)].push_back(t.o);
    po_to_s_[key(t.p, t.o)].push_back(t.s);
  }
  for (auto& [k, v] : sp_to_o_) std::sort(v.begin(), v.end());
  for (auto& [k, v] : po_to_s_) std::sort(v.begin(), v.end());
}

bool FilterIndex::contains(std::uint32_t s, std::uint32_t p,
                           std::uint32_t o) const {
  const auto it = sp_to_o_.find(key(s, p));
  if (it == sp_to_o_.end()) return false;
  return std::binary_search(it->second.begin(), it->second.end(), o);
}

std::span<const std::uint32_t> FilterIndex::objects_of(std::uint32_t s,
                                                       std::uint32_t p) const {
  const auto it = sp_to_o_.find(key(s, p));
  if (it == sp_to_o_.end()) return {};
  return {it->second.data(), it->second.size()};
}

std::span<const std::uint32_t> FilterIndex::subjects_of(std::uint32_t p,
                                                        std::uint32_t o) const {
  const auto it = po_to_s_.find(key(p, o));
  if (it == po_to_s_.end()) return {};
  return {it->second.data(), it->second.size()};
}

}  // namespace kglit
