#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "abn/graph.hpp"
#include "abn/table.hpp"

namespace abn {

struct JunctionTree {
  std::vector<std::vector<int>> cliques;      // variable ids, ascending
  std::vector<std::array<int, 2>> edges;      // clique index pairs
  std::vector<std::vector<int>> separators;   // aligned with edges
  std::vector<Table> potentials;              // aligned with cliques
  std::vector<std::string> elimination_order;
  std::int64_t max_table_size = 0;
  int root = 0;  // clique holding the lexicographically smallest variable

  bool contains(int clique, int var) const;
  int first_clique_with(int var) const;  // -1 when absent
};

// Maximum-weight spanning tree over the clique graph (weight = separator
// cardinality; ties by smaller separator table size, then clique order).
// Potentials start as products of the CPTs assigned to each clique; an
// additive node contributes its effective CPT. Every family must fit in
// some clique or Errc::internal is raised.
JunctionTree build_junction_tree(const std::vector<std::vector<std::string>>& cliques,
                                 const Network& net);

// Full pipeline: moralize, triangulate, extract cliques, assemble the tree.
JunctionTree build_junction_tree(const Network& net);

}  // namespace abn
