#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "abn/model.hpp"

namespace abn {

struct UndirectedGraph {
  std::vector<std::string> vertices;
  std::set<std::pair<int, int>> edges;  // index pairs, first < second

  int index_of(const std::string& name) const;  // -1 when absent
  int add_vertex(const std::string& name);      // no-op if already present
  void add_edge(const std::string& a, const std::string& b);
  void add_edge_by_index(int a, int b);
  bool adjacent(int a, int b) const;
  std::vector<int> neighbors(int v) const;
  int vertex_count() const { return static_cast<int>(vertices.size()); }
};

// Undirected skeleton of the DAG plus an edge between every pair of
// co-parents of a common child.
UndirectedGraph moralize(const Network& net);

struct Triangulation {
  UndirectedGraph graph;           // input plus fill-in edges; chordal
  std::vector<std::string> order;  // perfect elimination order of `graph`
};

// Min-fill triangulation. Ties are broken by the smaller table size of the
// clique the elimination would create, then by vertex name, so the result is
// deterministic. `cards` is aligned with graph.vertices; when empty every
// vertex counts as binary.
Triangulation triangulate(const UndirectedGraph& graph,
                          const std::vector<std::int64_t>& cards = {});

// All maximal cliques of a chordal graph, given one of its perfect
// elimination orders. Each clique is sorted by name and the list is in
// lexicographic order. Throws Errc::not_chordal if `order` has fill-in.
std::vector<std::vector<std::string>> maximal_cliques(
    const UndirectedGraph& chordal, const std::vector<std::string>& order);

// Product of member cardinalities: the size of the clique's marginal table.
std::int64_t table_size(const std::vector<std::string>& clique, const Network& net);

// Exact maximum clique by branch and bound. Among maximum cliques returns
// the lexicographically smallest sorted vertex sequence. Graphs larger than
// `max_vertices` are rejected with Errc::size_limit.
std::vector<std::string> max_clique(const UndirectedGraph& graph,
                                    int max_vertices = 64);

// Intercausal dependence graph file (".icg"): vertex names one per line,
// then edges as "A -- B". Blank lines and lines starting with '#' skipped.
UndirectedGraph parse_icg(const std::string& text);

}  // namespace abn
