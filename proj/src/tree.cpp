#include "aklt/tree.hpp"

#include <algorithm>
#include <stdexcept>

#include "aklt/transfer_function.hpp"

namespace aklt {

namespace {

int add_node(FiniteTree& t, int parent, int degree) {
  int id = t.node_count();
  t.parent.push_back(parent);
  t.children.emplace_back();
  t.site_degree.push_back(degree);
  t.depth.push_back(parent < 0 ? 0 : t.depth[parent] + 1);
  if (parent >= 0) t.children[parent].push_back(id);
  return id;
}

}  // namespace

int FiniteTree::max_depth() const {
  int m = 0;
  for (int d : depth) m = std::max(m, d);
  return m;
}

std::vector<std::pair<int, int>> FiniteTree::pendant_slots() const {
  std::vector<std::pair<int, int>> out;
  for (int v = 0; v < node_count(); ++v)
    for (int s = 0; s < pendant_count(v); ++s) out.emplace_back(v, s);
  return out;
}

std::int64_t FiniteTree::qubit_count() const {
  std::int64_t q = 0;
  for (int v = 0; v < node_count(); ++v) q += site_degree[v] * (bilayer_g > 0 ? 2 : 1);
  return q;
}

void FiniteTree::validate() const {
  if (node_count() == 0) throw std::invalid_argument("empty tree");
  if (parent[0] != -1) throw std::invalid_argument("node 0 must be the root");
  for (int v = 0; v < node_count(); ++v) {
    if (v > 0 && (parent[v] < 0 || parent[v] >= node_count()))
      throw std::invalid_argument("dangling parent link");
    if (v > 0 && depth[v] != depth[parent[v]] + 1)
      throw std::invalid_argument("depth mismatch");
    if (site_degree[v] < 2) throw std::invalid_argument("site degree must be >= 2");
    if (static_cast<int>(children[v].size()) > input_slots(v))
      throw std::invalid_argument("more children than ingoing slots");
    for (int c : children[v])
      if (parent[c] != v) throw std::invalid_argument("parent/child mismatch");
  }
}

FiniteTree FiniteTree::cayley(int d, int depth) {
  if (d < 2 || depth < 0) throw std::invalid_argument("need d >= 2 and depth >= 0");
  FiniteTree t;
  add_node(t, -1, d);
  // every node has d-1 ingoing slots; below the deepest layer they dangle
  std::vector<int> frontier{0};
  for (int layer = 1; layer <= depth; ++layer) {
    std::vector<int> next;
    for (int p : frontier)
      for (int c = 0; c < d - 1; ++c) next.push_back(add_node(t, p, d));
    frontier = std::move(next);
  }
  return t;
}

FiniteTree FiniteTree::decorated(int d, int g, int depth) {
  if (d < 2 || g < 0 || depth < 0) throw std::invalid_argument("bad decoration parameters");
  FiniteTree t;
  add_node(t, -1, d);
  std::vector<int> frontier{0};
  for (int layer = 1; layer <= depth; ++layer) {
    std::vector<int> next;
    for (int p : frontier) {
      for (int c = 0; c < d - 1; ++c) {
        // each branch edge is subdivided by g degree-2 sites
        int attach = p;
        for (int s = 0; s < g; ++s) attach = add_node(t, attach, 2);
        next.push_back(add_node(t, attach, d));
      }
    }
    frontier = std::move(next);
  }
  return t;
}

FiniteTree FiniteTree::layered(const DegreeSequence& seq, int depth) {
  if (depth < 0) throw std::invalid_argument("depth must be >= 0");
  FiniteTree t;
  add_node(t, -1, seq.at(1));
  std::vector<int> frontier{0};
  for (int layer = 1; layer <= depth; ++layer) {
    int d_here = seq.at(layer + 1);
    std::vector<int> next;
    for (int p : frontier)
      for (int c = 0; c < t.site_degree[p] - 1; ++c) next.push_back(add_node(t, p, d_here));
    frontier = std::move(next);
  }
  return t;
}

FiniteTree FiniteTree::bilayer_cayley(int g, int depth) {
  if (g < 1 || depth < 0) throw std::invalid_argument("need g >= 1 and depth >= 0");
  FiniteTree t;
  t.bilayer_g = g;
  add_node(t, -1, g + 2);
  std::vector<int> frontier{0};
  for (int layer = 1; layer <= depth; ++layer) {
    std::vector<int> next;
    for (int p : frontier)
      for (int c = 0; c < g; ++c) next.push_back(add_node(t, p, g + 2));
    frontier = std::move(next);
  }
  return t;
}

}  // namespace aklt
