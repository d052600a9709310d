#pragma once

#include <map>
#include <optional>

#include "callab/core.hpp"

namespace callab {

/// Ordered partition of an edge set into parts H_1..H_k; within each part
/// every edge keeps an item private to it.
struct EdgePartition {
  std::vector<std::vector<Hyperedge>> parts;
  int size() const { return static_cast<int>(parts.size()); }
};

/// Max over items of the number of input edges containing it; 0 for empty E.
inline int max_degree(const std::vector<Hyperedge>& edges) {
  std::map<int, int> count;
  int best = 0;
  for (const auto& e : edges)
    for (int i : e.items) best = std::max(best, ++count[i]);
  return best;
}

/// The edge partitioning process: repeatedly take all remaining edges and
/// eliminate, in ascending lexicographic order, every edge covered by the
/// union of the others still present; the survivors form the next part.
inline EdgePartition partition_edges(std::vector<Hyperedge> edges) {
  std::sort(edges.begin(), edges.end());
  for (size_t i = 1; i < edges.size(); ++i)
    if (edges[i] == edges[i - 1])
      throw std::invalid_argument("partition_edges: duplicate edge " + edges[i].str());

  EdgePartition out;
  std::vector<Hyperedge> current = std::move(edges);
  while (!current.empty()) {
    std::vector<Hyperedge> part = current;
    std::vector<bool> removed(part.size(), false);
    for (size_t i = 0; i < part.size(); ++i) {
      ItemMask others = 0;
      for (size_t j = 0; j < part.size(); ++j)
        if (j != i && !removed[j]) others |= part[j].mask();
      if ((part[i].mask() & ~others) == 0) removed[i] = true;
    }
    std::vector<Hyperedge> kept, rest;
    for (size_t i = 0; i < part.size(); ++i)
      (removed[i] ? rest : kept).push_back(part[i]);
    out.parts.push_back(std::move(kept));
    current = std::move(rest);
  }
  return out;
}

struct PartitionViolation {
  int part_index = -1;
  Hyperedge edge;
  std::string reason;
};

/// True iff the partition is a disjoint cover of E and every part satisfies
/// the unique-item property T not subseteq union of the others.
inline std::optional<PartitionViolation> verify_partition(
    const std::vector<Hyperedge>& edges, const EdgePartition& partition) {
  std::vector<Hyperedge> covered;
  for (int x = 0; x < partition.size(); ++x) {
    const auto& part = partition.parts[x];
    if (part.empty())
      return PartitionViolation{x, {}, "empty part"};
    for (size_t i = 0; i < part.size(); ++i) {
      ItemMask others = 0;
      for (size_t j = 0; j < part.size(); ++j)
        if (j != i) others |= part[j].mask();
      if ((part[i].mask() & ~others) == 0)
        return PartitionViolation{x, part[i], "edge covered by rest of part"};
      covered.push_back(part[i]);
    }
  }
  std::vector<Hyperedge> want = edges;
  std::sort(want.begin(), want.end());
  std::sort(covered.begin(), covered.end());
  if (want != covered)
    return PartitionViolation{-1, {}, "parts are not a disjoint cover of E"};
  return std::nullopt;
}

}  // namespace callab
