#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "aklt/polynomial.hpp"
#include "aklt/rational.hpp"

namespace aklt {

// Bipartite cell: the root vertex has degree 1 (its single edge is the
// outgoing edge of the generated graph) and the ordered boundary slots tell
// where the next generation attaches; a vertex may fill several slots.
struct CellGraph {
  std::vector<int> vertices;
  std::vector<std::pair<int, int>> edges;
  int root = -1;
  std::vector<int> boundary;
  std::map<int, char> bipartition;  // 'A' or 'B'

  void validate() const;  // throws std::invalid_argument naming the invariant
  bool is_tree() const;
  int cell_degree(int v) const;
  // full degree in the augmented cell (pendant edges included; root exempt)
  int site_degree(int v) const;
  char side(int v) const;

  static CellGraph single_edge();
  static CellGraph star(int d);
  static CellGraph decorated_star(int d, int g);
  static CellGraph square();
  static CellGraph fig4();

  static CellGraph from_json(const std::string& text);
  std::string to_json() const;
};

// edge subset of the augmented cell with even degree at every non-root cell
// vertex; pendants and the root vertex carry the open indices
struct LoopDiagram {
  std::uint64_t edge_mask = 0;
  int pendant_count = 0;
};

struct DiagramClasses {
  // by_k[k] = diagrams touching exactly k pendants
  std::vector<std::vector<LoopDiagram>> by_k;
  // augmented edge list backing the masks: cell edges first, then one
  // pendant edge per boundary slot in order
  std::vector<std::pair<int, int>> aug_edges;
  size_t cell_edge_count = 0;

  size_t total() const;
};

DiagramClasses enumerate_diagrams(const CellGraph& cell, bool parallel = false,
                                  int edge_cap = 32);

struct TransferPoly {
  RatPoly p, q;  // p odd, q even, q(0) != 0
};

enum class CellConvention { paper, oracle };

// oracle: exact contraction of the cell transfer against the staggered
// boundary 1 + (+-t) sigma1, interpolated at |boundary|+1 rational nodes and
// normalized to q(0) = 1. paper: the verbatim diagram-weight rule
// W = prod over touched internal vertices of -1/(deg+1), raw sums.
TransferPoly transfer_polynomials(const CellGraph& cell, CellConvention conv);

// diagram calculus with calibrated signs (passing/closing factors, edge-glue
// and staggering signs, triple weight for closed loops); defined only when
// no vertex mixes a closed loop with another strand. Agrees with the oracle
// after normalization; kept as an independent route for tests.
std::optional<TransferPoly> signed_diagram_polynomials(const CellGraph& cell);

struct ConventionDiff {
  TransferPoly paper, oracle;  // both normalized to q(0) = 1
  std::string report;          // per-coefficient comparison, human readable
};
ConventionDiff convention_diff(const CellGraph& cell);

struct BreakingCriterion {
  Rat slope;  // p'(0)/q(0), exact
  bool breaks = false;
  std::optional<double> t_cell;  // smallest positive solution of p/q = -t
};
BreakingCriterion breaking_criterion(const CellGraph& cell);

enum class Phase { ordered, unique, boundary };
// quasi-Cayley threshold: ordered iff d > 3^(g+1) + 1
Phase decorated_threshold(int d, int g);

struct TreeCellCondition {
  Rat sum;  // sum over root-to-pendant paths of (1/3)^(path vertex count)
  bool breaks = false;
};
// also cross-checks |slope| == sum against breaking_criterion
TreeCellCondition tree_cell_condition(const CellGraph& cell);

}  // namespace aklt
