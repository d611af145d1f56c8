#pragma once

#include <cstdint>
#include <utility>
#include <vector>

namespace aklt {

struct CellGraph;
struct DegreeSequence;

// Rooted tree of sites. Every node owns one outgoing leg toward its parent
// (the root's outgoing leg dangles and carries the readout); the remaining
// legs are filled by children first, then by pendant boundary legs, so
// pendant legs only appear where the declared site degree exceeds the
// structural degree (normally at the deepest layer).
struct FiniteTree {
  std::vector<int> parent;  // parent[0] = -1
  std::vector<std::vector<int>> children;
  std::vector<int> site_degree;
  std::vector<int> depth;
  int bilayer_g = 0;  // nonzero: each node is a rung pair of two degree-(g+2) sites

  int node_count() const { return static_cast<int>(parent.size()); }
  int max_depth() const;
  // ingoing slots below a node (children + pendants)
  int input_slots(int v) const { return bilayer_g > 0 ? bilayer_g : site_degree[v] - 1; }
  int pendant_count(int v) const {
    return input_slots(v) - static_cast<int>(children[v].size());
  }
  // (node, slot) pairs in canonical order, one per pendant boundary leg
  std::vector<std::pair<int, int>> pendant_slots() const;
  std::int64_t qubit_count() const;  // total spin-1/2 count, sum of site degrees
  void validate() const;

  static FiniteTree cayley(int d, int depth);
  static FiniteTree decorated(int d, int g, int depth);
  static FiniteTree layered(const DegreeSequence& seq, int depth);
  static FiniteTree from_cell(const CellGraph& cell, int generations);
  static FiniteTree bilayer_cayley(int g, int depth);
};

}  // namespace aklt
