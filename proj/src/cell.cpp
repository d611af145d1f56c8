#include "aklt/cell.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "aklt/site_transfer.hpp"
#include "aklt/tree.hpp"

namespace aklt {

std::string RatPoly::to_string(const std::string& var) const {
  if (c.empty()) return "0";
  std::ostringstream out;
  bool first = true;
  for (size_t i = 0; i < c.size(); ++i) {
    if (c[i] == 0) continue;
    if (!first) out << " + ";
    out << "(" << rat_to_string(c[i]) << ")";
    if (i == 1) out << "*" << var;
    if (i > 1) out << "*" << var << "^" << i;
    first = false;
  }
  return out.str();
}

RatPoly RatPoly::lagrange(const std::vector<std::pair<Rat, Rat>>& points) {
  const size_t n = points.size();
  RatPoly acc;
  acc.c.assign(n, Rat(0));
  for (size_t i = 0; i < n; ++i) {
    // basis polynomial prod_{j!=i} (t - x_j)/(x_i - x_j)
    std::vector<Rat> basis{Rat(1)};
    Rat denom(1);
    for (size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      basis.push_back(Rat(0));
      for (size_t k = basis.size() - 1; k > 0; --k)
        basis[k] = basis[k - 1] - points[j].first * basis[k];
      basis[0] = -points[j].first * basis[0];
      denom *= points[i].first - points[j].first;
    }
    if (denom == 0) throw std::invalid_argument("interpolation nodes must be distinct");
    Rat scale = points[i].second / denom;
    for (size_t k = 0; k < basis.size(); ++k) acc.c[k] += scale * basis[k];
  }
  acc.trim();
  return acc;
}

int CellGraph::cell_degree(int v) const {
  int d = 0;
  for (auto& [a, b] : edges) d += (a == v) + (b == v);
  return d;
}

int CellGraph::site_degree(int v) const {
  int d = cell_degree(v);
  for (int b : boundary) d += (b == v);
  return d;
}

char CellGraph::side(int v) const {
  auto it = bipartition.find(v);
  if (it == bipartition.end()) throw std::invalid_argument("vertex missing from bipartition");
  return it->second;
}

void CellGraph::validate() const {
  if (vertices.empty()) throw std::invalid_argument("cell has no vertices");
  std::set<int> vs(vertices.begin(), vertices.end());
  if (vs.size() != vertices.size()) throw std::invalid_argument("duplicate vertex ids");
  if (!vs.count(root)) throw std::invalid_argument("root is not a vertex");
  std::set<std::pair<int, int>> es;
  for (auto [a, b] : edges) {
    if (!vs.count(a) || !vs.count(b)) throw std::invalid_argument("edge endpoint is not a vertex");
    if (a == b) throw std::invalid_argument("self loops are not allowed");
    if (!es.insert({std::min(a, b), std::max(a, b)}).second)
      throw std::invalid_argument("duplicate edge");
  }
  for (int v : vertices) {
    auto it = bipartition.find(v);
    if (it == bipartition.end()) throw std::invalid_argument("vertex missing from bipartition");
    if (it->second != 'A' && it->second != 'B')
      throw std::invalid_argument("bipartition labels must be A or B");
  }
  for (auto [a, b] : edges)
    if (side(a) == side(b)) throw std::invalid_argument("cell is not bipartite");
  // connectivity
  std::set<int> seen{root};
  std::deque<int> todo{root};
  while (!todo.empty()) {
    int v = todo.front();
    todo.pop_front();
    for (auto [a, b] : edges) {
      int o = a == v ? b : (b == v ? a : -1);
      if (o != -1 && seen.insert(o).second) todo.push_back(o);
    }
  }
  if (seen.size() != vs.size()) throw std::invalid_argument("cell is not connected");
  if (cell_degree(root) != 1) throw std::invalid_argument("root degree must be 1");
  if (boundary.empty()) throw std::invalid_argument("boundary must be nonempty");
  for (int b : boundary) {
    if (!vs.count(b)) throw std::invalid_argument("boundary id is not a vertex");
    if (b == root) throw std::invalid_argument("boundary must not contain the root");
  }
}

bool CellGraph::is_tree() const {
  return edges.size() + 1 == vertices.size();  // validated cells are connected
}

CellGraph CellGraph::single_edge() {
  CellGraph c;
  c.vertices = {0, 1};
  c.edges = {{0, 1}};
  c.root = 0;
  c.boundary = {1};
  c.bipartition = {{0, 'A'}, {1, 'B'}};
  return c;
}

CellGraph CellGraph::star(int d) {
  if (d < 2) throw std::invalid_argument("star cell needs d >= 2");
  CellGraph c;
  c.vertices = {0, 1};
  c.edges = {{0, 1}};
  c.root = 0;
  c.boundary.assign(d - 1, 1);
  c.bipartition = {{0, 'A'}, {1, 'B'}};
  return c;
}

CellGraph CellGraph::decorated_star(int d, int g) {
  if (d < 2 || g < 0) throw std::invalid_argument("need d >= 2 and g >= 0");
  CellGraph c;
  c.root = 0;
  for (int v = 0; v <= g + 1; ++v) {
    c.vertices.push_back(v);
    c.bipartition[v] = v % 2 == 0 ? 'A' : 'B';
    if (v > 0) c.edges.push_back({v - 1, v});
  }
  c.boundary.assign(d - 1, g + 1);
  return c;
}

CellGraph CellGraph::square() {
  CellGraph c;
  c.vertices = {0, 4, 1, 2, 3};  // 0 = root, 4 = apex of the cycle
  c.edges = {{0, 4}, {4, 1}, {1, 2}, {2, 3}, {3, 4}};
  c.root = 0;
  c.boundary = {1, 2, 3};
  c.bipartition = {{0, 'B'}, {4, 'A'}, {1, 'B'}, {2, 'A'}, {3, 'B'}};
  return c;
}

CellGraph CellGraph::fig4() {
  CellGraph c;
  c.vertices = {0, 1, 2, 3};
  c.edges = {{0, 1}, {1, 2}, {1, 3}};
  c.root = 0;
  c.boundary = {2, 3};
  c.bipartition = {{0, 'A'}, {1, 'B'}, {2, 'A'}, {3, 'A'}};
  return c;
}

CellGraph CellGraph::from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const std::exception& e) {
    throw std::invalid_argument(std::string("cell file is not valid JSON: ") + e.what());
  }
  CellGraph c;
  try {
    c.vertices = j.at("vertices").get<std::vector<int>>();
    for (auto& e : j.at("edges")) {
      if (!e.is_array() || e.size() != 2)
        throw std::invalid_argument("edges must be pairs");
      c.edges.push_back({e[0].get<int>(), e[1].get<int>()});
    }
    c.root = j.at("root").get<int>();
    c.boundary = j.at("boundary").get<std::vector<int>>();
    auto& bp = j.at("bipartition");
    for (int v : bp.at("A").get<std::vector<int>>()) c.bipartition[v] = 'A';
    for (int v : bp.at("B").get<std::vector<int>>()) c.bipartition[v] = 'B';
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("cell file schema error: ") + e.what());
  }
  c.validate();
  return c;
}

std::string CellGraph::to_json() const {
  nlohmann::json j;
  j["vertices"] = vertices;
  j["edges"] = nlohmann::json::array();
  for (auto& [a, b] : edges) j["edges"].push_back({a, b});
  j["root"] = root;
  j["boundary"] = boundary;
  std::vector<int> A, B;
  for (auto& [v, s] : bipartition) (s == 'A' ? A : B).push_back(v);
  j["bipartition"] = {{"A", A}, {"B", B}};
  return j.dump();
}

namespace {

// augmented cell bookkeeping shared by enumeration and the oracle sweep
struct Augmented {
  std::vector<std::pair<int, int>> edges;  // cell edges, then (slot vertex, ~slot) pendants
  size_t cell_edge_count = 0;
  std::vector<int> internal;                    // cell vertices except the root vertex
  std::map<int, std::uint64_t> incidence;       // internal vertex -> aug edge mask
  std::vector<int> pendant_sign;                // Neel sign per boundary slot
  int root_site = -1;                           // the root vertex's unique neighbor
  std::uint64_t root_edge_bit = 0;

  explicit Augmented(const CellGraph& c) {
    c.validate();
    edges = c.edges;
    cell_edge_count = edges.size();
    for (size_t s = 0; s < c.boundary.size(); ++s)
      edges.push_back({c.boundary[s], ~static_cast<int>(s)});
    if (edges.size() > 63) throw std::invalid_argument("augmented cell too large");
    for (int v : c.vertices)
      if (v != c.root) internal.push_back(v);
    for (size_t e = 0; e < edges.size(); ++e) {
      for (int v : {edges[e].first, edges[e].second}) {
        if (v == c.root || v < 0) continue;
        incidence[v] |= (1ull << e);
      }
      if (edges[e].first == c.root || edges[e].second == c.root)
        root_edge_bit = 1ull << e;
    }
    const char root_side = c.side(c.root);
    for (size_t s = 0; s < c.boundary.size(); ++s)
      pendant_sign.push_back(c.side(c.boundary[s]) == root_side ? -1 : +1);
    for (auto& [a, b] : c.edges) {
      if (a == c.root) root_site = b;
      if (b == c.root) root_site = a;
    }
  }

};

// depth-first enumeration; a vertex whose incident edges are exhausted must
// already have even degree, which prunes most of the tree
void enumerate_rec(const Augmented& aug, size_t e, std::uint64_t mask,
                   std::map<int, int>& parity, std::vector<LoopDiagram>& out) {
  if (e == aug.edges.size()) {
    LoopDiagram d;
    d.edge_mask = mask;
    d.pendant_count = __builtin_popcountll(mask >> aug.cell_edge_count);
    out.push_back(d);
    return;
  }
  for (int take = 0; take <= 1; ++take) {
    std::uint64_t bit = take ? (1ull << e) : 0;
    bool ok = true;
    // update parities of internal endpoints and check closure
    int touched[2] = {aug.edges[e].first, aug.edges[e].second};
    std::vector<int> flipped;
    if (take) {
      for (int v : touched) {
        if (v < 0) continue;
        auto it = parity.find(v);
        if (it == parity.end()) continue;
        it->second ^= 1;
        flipped.push_back(v);
      }
    }
    for (int v : touched) {
      auto it = parity.find(v);
      if (it == parity.end()) continue;
      // if no later edge touches v, its parity is final
      if ((aug.incidence.at(v) >> (e + 1)) == 0 && it->second != 0) ok = false;
    }
    if (ok) enumerate_rec(aug, e + 1, mask | bit, parity, out);
    for (int v : flipped) parity[v] ^= 1;
  }
}

}  // namespace

size_t DiagramClasses::total() const {
  size_t n = 0;
  for (auto& v : by_k) n += v.size();
  return n;
}

DiagramClasses enumerate_diagrams(const CellGraph& cell, bool parallel, int edge_cap) {
  Augmented aug(cell);
  const size_t E = aug.edges.size();
  if (static_cast<int>(E) > edge_cap) throw std::invalid_argument("edge cap exceeded");

  std::vector<LoopDiagram> found;
  if (!parallel) {
    std::map<int, int> parity;
    for (int v : aug.internal) parity[v] = 0;
    enumerate_rec(aug, 0, 0, parity, found);
  } else {
    // partition the search space by the assignment of the first block of edges
    const size_t block = std::min<size_t>(E, 10);
    const std::uint64_t prefixes = 1ull << block;
    std::vector<std::vector<LoopDiagram>> parts(prefixes);
#ifdef AKLT_HAVE_OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
    for (std::int64_t pre = 0; pre < static_cast<std::int64_t>(prefixes); ++pre) {
      std::map<int, int> parity;
      for (int v : aug.internal) parity[v] = 0;
      // replay the prefix, bailing out when a finished vertex has odd parity
      bool ok = true;
      for (size_t e = 0; e < block && ok; ++e) {
        if (pre & (1ull << e)) {
          for (int v : {aug.edges[e].first, aug.edges[e].second}) {
            auto it = parity.find(v);
            if (it != parity.end()) it->second ^= 1;
          }
        }
        for (int v : {aug.edges[e].first, aug.edges[e].second}) {
          auto it = parity.find(v);
          if (it != parity.end() && (aug.incidence.at(v) >> (e + 1)) == 0 && it->second != 0)
            ok = false;
        }
      }
      if (!ok) continue;
      if (block == E) {
        LoopDiagram d;
        d.edge_mask = pre;
        d.pendant_count = __builtin_popcountll(pre >> aug.cell_edge_count);
        parts[pre].push_back(d);
      } else {
        enumerate_rec(aug, block, pre, parity, parts[pre]);
      }
    }
    for (auto& p : parts) found.insert(found.end(), p.begin(), p.end());
  }

  std::sort(found.begin(), found.end(),
            [](const LoopDiagram& a, const LoopDiagram& b) { return a.edge_mask < b.edge_mask; });

  DiagramClasses out;
  out.aug_edges = aug.edges;
  out.cell_edge_count = aug.cell_edge_count;
  out.by_k.assign(cell.boundary.size() + 1, {});
  for (auto& d : found) out.by_k[d.pendant_count].push_back(d);
  return out;
}

namespace {

// orientation of the cell toward the root: per-site parent edge plus the
// list of cycle-closing edges, in augmented-edge indexing
struct SweepPlan {
  std::vector<int> order;               // sites, leaves first, root site last
  std::map<int, int> out_edge;          // site -> aug edge index toward the root
  std::map<int, std::vector<int>> tree_children;  // site -> child sites
  std::vector<int> inin;                // aug edge indices closing cycles
  std::map<int, std::vector<int>> pendants_at;    // site -> slot indices
  std::map<int, std::vector<int>> inin_at;        // site -> positions into inin
};

SweepPlan make_plan(const CellGraph& cell, const Augmented& aug) {
  SweepPlan plan;
  // BFS over cell edges from the root site, never crossing the root vertex
  std::map<int, int> state;  // 0 unseen, 1 seen
  state[aug.root_site] = 1;
  std::deque<int> todo{aug.root_site};
  for (size_t e = 0; e < aug.cell_edge_count; ++e)
    if (aug.edges[e].first == cell.root || aug.edges[e].second == cell.root)
      plan.out_edge[aug.root_site] = static_cast<int>(e);
  std::set<int> used_edges{plan.out_edge[aug.root_site]};
  std::vector<int> bfs_order{aug.root_site};
  while (!todo.empty()) {
    int v = todo.front();
    todo.pop_front();
    for (size_t e = 0; e < aug.cell_edge_count; ++e) {
      auto [a, b] = aug.edges[e];
      if (a == cell.root || b == cell.root) continue;
      int o = a == v ? b : (b == v ? a : -1);
      if (o == -1) continue;
      if (!state.count(o)) {
        state[o] = 1;
        plan.out_edge[o] = static_cast<int>(e);
        plan.tree_children[v].push_back(o);
        used_edges.insert(static_cast<int>(e));
        bfs_order.push_back(o);
        todo.push_back(o);
      }
    }
  }
  for (size_t e = 0; e < aug.cell_edge_count; ++e) {
    auto [a, b] = aug.edges[e];
    if (a == cell.root || b == cell.root) continue;
    if (!used_edges.count(static_cast<int>(e))) {
      int pos = static_cast<int>(plan.inin.size());
      plan.inin.push_back(static_cast<int>(e));
      plan.inin_at[a].push_back(pos);
      plan.inin_at[b].push_back(pos);
    }
  }
  for (size_t s = 0; s < cell.boundary.size(); ++s)
    plan.pendants_at[cell.boundary[s]].push_back(static_cast<int>(s));
  plan.order.assign(bfs_order.rbegin(), bfs_order.rend());
  return plan;
}

using Vec4 = std::array<Rat, 4>;

// exact site application: expand the product of input 4-vectors over words,
// skipping zero letters, and push each word through the dense site map
Vec4 apply_site_exact(int degree, const std::vector<Vec4>& inputs) {
  if (static_cast<int>(inputs.size()) != degree - 1)
    throw std::logic_error("site input count must be degree - 1");
  Vec4 out{Rat(0), Rat(0), Rat(0), Rat(0)};
  PauliWord word;
  std::function<void(size_t, Rat)> rec = [&](size_t i, Rat coeff) {
    if (i == inputs.size()) {
      auto t = dense_word_transfer(degree, word);
      for (int l = 0; l < 4; ++l) out[l] += coeff * t[l];
      return;
    }
    for (int l = 0; l < 4; ++l) {
      if (inputs[i][l] == 0) continue;
      PauliWord saved = word;
      word.push_back(l);
      rec(i + 1, coeff * inputs[i][l]);
      word = saved;
    }
  };
  rec(0, Rat(1));
  return out;
}

// exact evaluation of the cell transfer at boundary parameter t: the four
// Pauli components of the operator handed to the root edge
Vec4 sweep_cell(const CellGraph& cell, const Augmented& aug, const SweepPlan& plan,
                const Rat& t) {
  const size_t L = plan.inin.size();
  if (L > 8) throw std::invalid_argument("too many independent cycles for the sweep");
  Vec4 total{Rat(0), Rat(0), Rat(0), Rat(0)};
  std::vector<int> letters(L, 0);
  while (true) {
    Rat weight(1);
    for (size_t i = 0; i < L; ++i)
      if (letters[i] != 0) weight = -weight;  // singlet glue is +1 on identity, -1 on each axis

    std::map<int, Vec4> message;  // site -> outgoing 4-vector
    for (int v : plan.order) {
      std::vector<Vec4> inputs;
      auto itc = plan.tree_children.find(v);
      if (itc != plan.tree_children.end())
        for (int c : itc->second) inputs.push_back(message.at(c));
      auto itp = plan.pendants_at.find(v);
      if (itp != plan.pendants_at.end())
        for (int slot : itp->second)
          inputs.push_back(Vec4{Rat(1), Rat(aug.pendant_sign[slot]) * t, Rat(0), Rat(0)});
      auto iti = plan.inin_at.find(v);
      if (iti != plan.inin_at.end())
        for (int pos : iti->second) {
          Vec4 unit{Rat(0), Rat(0), Rat(0), Rat(0)};
          unit[letters[pos]] = Rat(1);
          inputs.push_back(unit);
        }
      message[v] = apply_site_exact(cell.site_degree(v), inputs);
    }
    const Vec4& r = message.at(aug.root_site);
    for (int l = 0; l < 4; ++l) total[l] += weight * r[l];

    // odometer over letter assignments
    size_t pos = 0;
    while (pos < L && letters[pos] == 3) letters[pos++] = 0;
    if (pos == L) break;
    ++letters[pos];
  }
  return total;
}

TransferPoly oracle_polynomials(const CellGraph& cell) {
  Augmented aug(cell);
  for (int v : aug.internal)
    if (cell.site_degree(v) < 2)
      throw std::invalid_argument("augmented cell has a degree-1 site");
  SweepPlan plan = make_plan(cell, aug);
  const long D = static_cast<long>(cell.boundary.size());
  std::vector<std::pair<Rat, Rat>> qs, ps;
  for (long j = 0; j <= D; ++j) {
    Rat tj(j, D + 1);
    Vec4 c = sweep_cell(cell, aug, plan, tj);
    if (c[2] != 0 || c[3] != 0)
      throw std::logic_error("cell output must stay in the span of identity and sigma1");
    qs.push_back({tj, c[0]});
    ps.push_back({tj, c[1]});
  }
  RatPoly q = RatPoly::lagrange(qs);
  RatPoly p = RatPoly::lagrange(ps);
  Rat q0 = q.eval(Rat(0));
  if (q0 == 0) throw std::logic_error("cell normalization q(0) vanished");
  q = (Rat(1) / q0) * q;
  p = (Rat(1) / q0) * p;
  if (!q.even_powers_only() || !p.odd_powers_only())
    throw std::logic_error("cell polynomials must split into even q and odd p");
  return {p, q};
}

TransferPoly paper_polynomials(const CellGraph& cell) {
  auto classes = enumerate_diagrams(cell);
  Augmented aug(cell);
  RatPoly p, q;
  p.c.assign(cell.boundary.size() + 1, Rat(0));
  q.c.assign(cell.boundary.size() + 1, Rat(0));
  for (size_t k = 0; k < classes.by_k.size(); ++k) {
    Rat sum(0);
    for (auto& d : classes.by_k[k]) {
      Rat w(1);
      for (int v : aug.internal) {
        int deg = __builtin_popcountll(d.edge_mask & aug.incidence.at(v));
        if (deg > 0) w *= Rat(-1, deg + 1);
      }
      sum += w;
    }
    (k % 2 ? p : q).c[k] = sum;
  }
  p.trim();
  q.trim();
  return {p, q};
}

}  // namespace

TransferPoly transfer_polynomials(const CellGraph& cell, CellConvention conv) {
  return conv == CellConvention::oracle ? oracle_polynomials(cell) : paper_polynomials(cell);
}

std::optional<TransferPoly> signed_diagram_polynomials(const CellGraph& cell) {
  auto classes = enumerate_diagrams(cell);
  Augmented aug(cell);
  SweepPlan plan = make_plan(cell, aug);

  RatPoly p, q;
  p.c.assign(cell.boundary.size() + 1, Rat(0));
  q.c.assign(cell.boundary.size() + 1, Rat(0));

  for (size_t k = 0; k < classes.by_k.size(); ++k) {
    for (auto& d : classes.by_k[k]) {
      // split the diagram into connected components over its edges
      std::map<int, int> comp;  // vertex (pendant slots as ~slot) -> component id
      int ncomp = 0;
      std::function<int(int)> find = [&](int v) { return comp.count(v) ? comp[v] : -1; };
      std::vector<std::vector<size_t>> comp_edges;
      for (size_t e = 0; e < aug.edges.size(); ++e) {
        if (!(d.edge_mask & (1ull << e))) continue;
        auto [a, b] = aug.edges[e];
        int ca = find(a), cb = find(b);
        int target;
        if (ca == -1 && cb == -1) {
          target = ncomp++;
          comp_edges.emplace_back();
        } else if (ca == -1 || cb == -1) {
          target = std::max(ca, cb);
        } else if (ca != cb) {
          // merge cb into ca
          for (auto& [v, cid] : comp)
            if (cid == cb) cid = ca;
          for (size_t x : comp_edges[cb]) comp_edges[ca].push_back(x);
          comp_edges[cb].clear();
          target = ca;
        } else {
          target = ca;
        }
        comp[a] = target;
        comp[b] = target;
        comp_edges[target].push_back(e);
      }

      int closed_loops = 0;
      bool applicable = true;
      for (int cid = 0; cid < ncomp; ++cid) {
        if (comp_edges[cid].empty()) continue;
        bool open = false;
        for (size_t e : comp_edges[cid]) {
          auto [a, b] = aug.edges[e];
          if (a == cell.root || b == cell.root || a < 0 || b < 0) open = true;
        }
        if (open) continue;
        ++closed_loops;
        // a closed component must be a simple cycle to carry a single axis
        std::set<int> vs;
        for (size_t e : comp_edges[cid]) {
          vs.insert(aug.edges[e].first);
          vs.insert(aug.edges[e].second);
        }
        for (int v : vs)
          if (__builtin_popcountll(d.edge_mask & aug.incidence.at(v)) != 2) applicable = false;
      }
      if (!applicable) return std::nullopt;

      Rat w(1);
      for (int v : aug.internal) {
        int deg = __builtin_popcountll(d.edge_mask & aug.incidence.at(v));
        if (deg == 0) continue;
        bool passing = d.edge_mask & (1ull << plan.out_edge.at(v));
        w *= Rat(passing ? -1 : 1, deg + 1);
      }
      for (int e : plan.inin)
        if (d.edge_mask & (1ull << e)) w = -w;
      for (size_t s = 0; s < cell.boundary.size(); ++s)
        if (d.edge_mask & (1ull << (classes.cell_edge_count + s)))
          w *= aug.pendant_sign[s];
      for (int l = 0; l < closed_loops; ++l) w *= 3;

      (k % 2 ? p : q).c[k] += w;
    }
  }
  Rat q0 = q.c[0];
  if (q0 == 0) return std::nullopt;
  p = (Rat(1) / q0) * p;
  q = (Rat(1) / q0) * q;
  return TransferPoly{p, q};
}

ConventionDiff convention_diff(const CellGraph& cell) {
  ConventionDiff out;
  out.oracle = transfer_polynomials(cell, CellConvention::oracle);
  TransferPoly paper_raw = transfer_polynomials(cell, CellConvention::paper);
  Rat q0 = paper_raw.q.eval(Rat(0));
  out.paper = {(Rat(1) / q0) * paper_raw.p, (Rat(1) / q0) * paper_raw.q};

  std::ostringstream rep;
  rep << "coefficient comparison (normalized to q(0) = 1)\n";
  long top = std::max({out.paper.p.degree(), out.paper.q.degree(), out.oracle.p.degree(),
                       out.oracle.q.degree()});
  for (long i = 0; i <= top; ++i) {
    Rat pp = out.paper.p.coeff(i), op = out.oracle.p.coeff(i);
    Rat pq = out.paper.q.coeff(i), oq = out.oracle.q.coeff(i);
    if (pp != op)
      rep << "p[t^" << i << "]: diagram-rule " << rat_to_string(pp) << " vs oracle "
          << rat_to_string(op) << "  DIFF\n";
    if (pq != oq)
      rep << "q[t^" << i << "]: diagram-rule " << rat_to_string(pq) << " vs oracle "
          << rat_to_string(oq) << "  DIFF\n";
  }
  if (rep.str().find("DIFF") == std::string::npos) rep << "all coefficients agree\n";
  out.report = rep.str();
  return out;
}

BreakingCriterion breaking_criterion(const CellGraph& cell) {
  TransferPoly tp = transfer_polynomials(cell, CellConvention::oracle);
  BreakingCriterion out;
  out.slope = tp.p.coeff(1) / tp.q.coeff(0);
  out.breaks = out.slope < Rat(-1);
  if (out.breaks) {
    auto h = [&](double t) { return tp.p.eval(t) / tp.q.eval(t) + t; };
    const int grid = 4096;
    double prev_t = 1e-9, prev_h = h(prev_t);
    for (int i = 1; i <= grid; ++i) {
      double t = static_cast<double>(i) / grid;
      double ht = h(t);
      if (prev_h < 0 && ht >= 0) {
        double lo = prev_t, hi = t;
        for (int it = 0; it < 200 && hi - lo > 1e-13; ++it) {
          double mid = 0.5 * (lo + hi);
          (h(mid) < 0 ? lo : hi) = mid;
        }
        out.t_cell = 0.5 * (lo + hi);
        break;
      }
      prev_t = t;
      prev_h = ht;
    }
  }
  return out;
}

Phase decorated_threshold(int d, int g) {
  if (d < 2 || g < 0) throw std::invalid_argument("need d >= 2 and g >= 0");
  Int threshold = 1;
  for (int i = 0; i <= g; ++i) threshold *= 3;
  threshold += 1;
  if (Int(d) > threshold) return Phase::ordered;
  if (Int(d) < threshold) return Phase::unique;
  return Phase::boundary;
}

TreeCellCondition tree_cell_condition(const CellGraph& cell) {
  cell.validate();
  if (!cell.is_tree()) throw std::invalid_argument("cell is not a tree");
  // depth of every vertex from the root vertex
  std::map<int, int> depth{{cell.root, 0}};
  std::deque<int> todo{cell.root};
  while (!todo.empty()) {
    int v = todo.front();
    todo.pop_front();
    for (auto [a, b] : cell.edges) {
      int o = a == v ? b : (b == v ? a : -1);
      if (o != -1 && !depth.count(o)) {
        depth[o] = depth[v] + 1;
        todo.push_back(o);
      }
    }
  }
  TreeCellCondition out;
  out.sum = Rat(0);
  for (int y : cell.boundary) {
    Int pw = 1;
    for (int i = 0; i < depth.at(y); ++i) pw *= 3;
    out.sum += Rat(Int(1), pw);
  }
  out.breaks = out.sum > Rat(1);

  Rat slope = breaking_criterion(cell).slope;
  Rat mag = slope < 0 ? -slope : slope;
  if (mag != out.sum)
    throw std::logic_error("tree cell path sum disagrees with |slope| of the transfer");
  return out;
}

FiniteTree FiniteTree::from_cell(const CellGraph& cell, int generations) {
  cell.validate();
  if (!cell.is_tree())
    throw std::invalid_argument("only tree cells generate trees; cyclic cells do not");
  if (generations < 1) throw std::invalid_argument("need at least one generation");

  FiniteTree t;
  // BFS order of cell sites from the root site, excluding the root vertex
  int root_site = -1;
  for (auto [a, b] : cell.edges) {
    if (a == cell.root) root_site = b;
    if (b == cell.root) root_site = a;
  }
  std::vector<int> order{root_site};
  std::map<int, int> cell_parent{{root_site, -1}};
  for (size_t i = 0; i < order.size(); ++i) {
    int v = order[i];
    for (auto [a, b] : cell.edges) {
      int o = a == v ? b : (b == v ? a : -1);
      if (o == -1 || o == cell.root || cell_parent.count(o)) continue;
      cell_parent[o] = v;
      order.push_back(o);
    }
  }

  std::function<void(int, int)> glue = [&](int attach, int gen) {
    std::map<int, int> node_of;
    for (int v : order) {
      int par = cell_parent[v] == -1 ? attach : node_of[cell_parent[v]];
      int id = t.node_count();
      t.parent.push_back(par);
      t.children.emplace_back();
      t.site_degree.push_back(cell.site_degree(v));
      t.depth.push_back(par < 0 ? 0 : t.depth[par] + 1);
      if (par >= 0) t.children[par].push_back(id);
      node_of[v] = id;
    }
    if (gen < generations)
      for (int slot : cell.boundary) glue(node_of[slot], gen + 1);
  };
  glue(-1, 1);
  t.validate();
  return t;
}

}  // namespace aklt
