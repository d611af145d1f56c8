#include "aklt/oracle.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <complex>
#include <map>
#include <random>
#include <sstream>
#include <stdexcept>

#include "aklt/bilayer.hpp"
#include "aklt/site_transfer.hpp"

namespace aklt {

namespace {

struct SweepEntry {
  double value = 0;
  int letter = 0;
};

// per-degree table over packed input words; every covered word feeds exactly
// one output letter, uncovered classes vanish. Built serially; sweeps
// prefetch before entering parallel regions.
const std::vector<SweepEntry>& sweep_table(int degree) {
  static std::map<int, std::vector<SweepEntry>> cache;
  auto it = cache.find(degree);
  if (it == cache.end()) {
    const int arity = degree - 1;
    if (arity > 10)
      throw std::invalid_argument("contraction budget exceeded: site degree too large");
    std::vector<SweepEntry> tbl(std::size_t(1) << (2 * arity));
    std::map<std::array<int, 3>, SweepEntry> by_counts;
    for (std::uint64_t w = 0; w < tbl.size(); ++w) {
      PauliWord word = PauliWord::from_packed(w, arity);
      auto cit = by_counts.find(word.axis_counts());
      if (cit == by_counts.end()) {
        auto four = dense_word_transfer(degree, word);
        SweepEntry e;
        for (int o = 0; o < 4; ++o)
          if (four[o] != 0) {
            if (e.value != 0) throw std::logic_error("site word with two output letters");
            e = {to_double(four[o]), o};
          }
        cit = by_counts.emplace(word.axis_counts(), e).first;
      }
      tbl[w] = cit->second;
    }
    it = cache.emplace(degree, std::move(tbl)).first;
  }
  return it->second;
}

const BilayerMap& cached_bilayer_map(int g) {
  static std::map<int, BilayerMap> cache;
  auto it = cache.find(g);
  if (it == cache.end()) it = cache.emplace(g, BilayerMap::build(g)).first;
  return it->second;
}

std::vector<int> pendant_prefix(const FiniteTree& t) {
  std::vector<int> p(t.node_count() + 1, 0);
  for (int v = 0; v < t.node_count(); ++v) p[v + 1] = p[v] + t.pendant_count(v);
  return p;
}

std::vector<std::vector<int>> depth_levels(const FiniteTree& t) {
  std::vector<std::vector<int>> levels(t.max_depth() + 1);
  for (int v = 0; v < t.node_count(); ++v) levels[t.depth[v]].push_back(v);
  return levels;
}

std::array<double, 4> bloch_vec4(const BlochVector& y) { return {1.0, y.x1, y.x2, y.x3}; }

BlochVector scaled(const BlochVector& y, double s) { return {s * y.x1, s * y.x2, s * y.x3}; }

// boundary pair in the frame the bilayer map works in: the bottom layer's
// Pauli signs are flipped relative to the physical operators
BilayerVec pair_message(const BlochVector& top, const BlochVector& bot) {
  std::array<double, 4> a = bloch_vec4(top), c = bloch_vec4(bot);
  BilayerVec m{};
  for (int l = 0; l < 4; ++l)
    for (int k = 0; k < 4; ++k) m[4 * l + k] = a[l] * c[k] * (k == 0 ? 1.0 : -1.0);
  return m;
}

constexpr int kNodeCap = 1 << 22;
constexpr int kDenseQubitCap = 24;

}  // namespace

RootObservable pauli_at_root(int axis) {
  if (axis < 1 || axis > 3) throw std::invalid_argument("pauli axis must be 1..3");
  return {axis};
}

RootObservable identity_observable() { return {0}; }

int boundary_qubit_count(const FiniteTree& t) {
  int p = 0;
  for (int v = 0; v < t.node_count(); ++v) p += t.pendant_count(v);
  return p * (t.bilayer_g > 0 ? 2 : 1);
}

BoundaryAssignment BoundaryAssignment::uniform(const FiniteTree& t, const BlochVector& y) {
  BoundaryAssignment a;
  a.y.assign(boundary_qubit_count(t), y);
  return a;
}

BoundaryAssignment BoundaryAssignment::neel(const FiniteTree& t, const BlochVector& y) {
  BoundaryAssignment a;
  for (auto [v, s] : t.pendant_slots()) {
    double sign = t.depth[v] % 2 == 0 ? 1.0 : -1.0;
    a.y.push_back(scaled(y, sign));
    if (t.bilayer_g > 0) a.y.push_back(scaled(y, -sign));
  }
  return a;
}

BoundaryAssignment BoundaryAssignment::from_product(const FiniteTree& t,
                                                    const ProductBoundary& b) {
  b.validate();
  if (b.site_count != boundary_qubit_count(t))
    throw std::invalid_argument("product boundary size must match the boundary qubit count");
  BoundaryAssignment a;
  for (int i = 0; i < b.site_count; ++i) a.y.push_back(scaled(b.x, b.signs[i]));
  return a;
}

BoundaryAssignment BoundaryAssignment::random_psd(const FiniteTree& t, unsigned seed) {
  std::mt19937_64 eng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> radius(0.0, 0.9);
  BoundaryAssignment a;
  const int n = boundary_qubit_count(t);
  for (int i = 0; i < n; ++i) {
    double x1, x2, x3, nrm;
    do {
      x1 = gauss(eng);
      x2 = gauss(eng);
      x3 = gauss(eng);
      nrm = std::sqrt(x1 * x1 + x2 * x2 + x3 * x3);
    } while (nrm < 1e-6);
    double r = radius(eng) / nrm;
    a.y.push_back({r * x1, r * x2, r * x3});
  }
  return a;
}

void BoundaryAssignment::validate(const FiniteTree& t) const {
  if (static_cast<int>(y.size()) != boundary_qubit_count(t))
    throw std::invalid_argument("boundary assignment size must match the boundary qubit count");
  for (const BlochVector& v : y)
    if (v.norm() > 1 + 1e-12)  // smallest eigenvalue 1-|y| under the -1e-12 floor
      throw std::invalid_argument("non-PSD boundary operator");
}

double contract_expectation(const FiniteTree& t, const BoundaryAssignment& b,
                            RootObservable obs, bool parallel) {
  t.validate();
  b.validate(t);
  if (obs.axis < 0 || obs.axis > 3)
    throw std::invalid_argument("observable axis out of range");
  if (t.node_count() > kNodeCap)
    throw std::invalid_argument("contraction budget exceeded: too many nodes");
  const auto prefix = pendant_prefix(t);
  const auto levels = depth_levels(t);
  std::atomic<bool> degenerate{false};

  if (t.bilayer_g > 0) {
    const BilayerMap& map = cached_bilayer_map(t.bilayer_g);
    std::vector<BilayerVec> msg(t.node_count());
    for (int lev = static_cast<int>(levels.size()) - 1; lev >= 0; --lev) {
      const auto& nodes = levels[lev];
      const int n = static_cast<int>(nodes.size());
#ifdef AKLT_HAVE_OPENMP
#pragma omp parallel for schedule(dynamic, 16) if (parallel)
#endif
      for (int i = 0; i < n; ++i) {
        const int v = nodes[i];
        std::vector<BilayerVec> in;
        in.reserve(t.bilayer_g);
        for (int c : t.children[v]) in.push_back(msg[c]);
        for (int s = 0; s < t.pendant_count(v); ++s) {
          int ps = prefix[v] + s;
          in.push_back(pair_message(b.y[2 * ps], b.y[2 * ps + 1]));
        }
        BilayerVec out = map.apply_mixed(in);
        if (std::abs(out[0]) < 1e-300) {
          degenerate = true;
          out[0] = 1;
        }
        for (int o = 15; o >= 0; --o) out[o] /= out[0];
        msg[v] = out;
      }
    }
    if (degenerate) throw std::runtime_error("vanishing normalization in transfer sweep");
    return obs.axis == 0 ? 1.0 : msg[0][4 * obs.axis];
  }

  for (int v = 0; v < t.node_count(); ++v) sweep_table(t.site_degree[v]);
  std::vector<std::array<double, 4>> msg(t.node_count());
  for (int lev = static_cast<int>(levels.size()) - 1; lev >= 0; --lev) {
    const auto& nodes = levels[lev];
    const int n = static_cast<int>(nodes.size());
#ifdef AKLT_HAVE_OPENMP
#pragma omp parallel for schedule(dynamic, 64) if (parallel)
#endif
    for (int i = 0; i < n; ++i) {
      const int v = nodes[i];
      const int k = t.input_slots(v);
      std::array<std::array<double, 4>, 10> in;
      int filled = 0;
      for (int c : t.children[v]) in[filled++] = msg[c];
      for (int s = 0; s < t.pendant_count(v); ++s)
        in[filled++] = bloch_vec4(b.y[prefix[v] + s]);
      const auto& tbl = sweep_table(t.site_degree[v]);
      std::array<double, 4> out{};
      for (std::uint32_t w = 0; w < tbl.size(); ++w) {
        const SweepEntry& e = tbl[w];
        if (e.value == 0) continue;
        double prod = e.value;
        std::uint32_t ww = w;
        for (int j = 0; j < k; ++j) {
          prod *= in[j][ww & 3u];
          ww >>= 2;
        }
        out[e.letter] += prod;
      }
      if (std::abs(out[0]) < 1e-300) {
        degenerate = true;
        out[0] = 1;
      }
      for (int o = 3; o >= 0; --o) out[o] /= out[0];
      msg[v] = out;
    }
  }
  if (degenerate) throw std::runtime_error("vanishing normalization in transfer sweep");
  return obs.axis == 0 ? 1.0 : msg[0][obs.axis];
}

std::int64_t dense_qubit_total(const FiniteTree& t) {
  const int bl = t.bilayer_g > 0 ? 2 : 1;
  std::int64_t pend = 0;
  for (int v = 0; v < t.node_count(); ++v) pend += t.pendant_count(v);
  return t.qubit_count() + bl * pend + bl;
}

double dense_expectation(const FiniteTree& t, const BoundaryAssignment& b,
                         RootObservable obs) {
  t.validate();
  b.validate(t);
  if (obs.axis < 0 || obs.axis > 3)
    throw std::invalid_argument("observable axis out of range");
  if (dense_qubit_total(t) > kDenseQubitCap)
    throw std::invalid_argument("dense state budget exceeded");
  using C = std::complex<double>;
  const int bl = t.bilayer_g > 0 ? 2 : 1;
  const auto prefix = pendant_prefix(t);

  // one qubit per intertwiner slot: slot 0 faces the parent, child slots
  // follow, pendant slots after those, and bilayer blocks end with the rung
  std::vector<int> base(t.node_count());
  int nq = 0;
  for (int v = 0; v < t.node_count(); ++v) {
    base[v] = nq;
    nq += bl * t.site_degree[v];
  }
  const int aux0 = nq;  // readout partner(s) of the root's outgoing leg(s)
  nq += bl;
  const int copy0 = nq;  // purification partner per boundary qubit
  nq += static_cast<int>(b.y.size());

  auto slot = [&](int v, int layer, int j) {
    return base[v] + layer * t.site_degree[v] + j;
  };

  std::vector<std::pair<int, int>> edges;
  std::vector<int> bq_site(b.y.size());
  for (int v = 0; v < t.node_count(); ++v) {
    const int nchild = static_cast<int>(t.children[v].size());
    for (int layer = 0; layer < bl; ++layer) {
      if (v == 0) edges.emplace_back(aux0 + layer, slot(v, layer, 0));
      for (int i = 0; i < nchild; ++i)
        edges.emplace_back(slot(v, layer, 1 + i), slot(t.children[v][i], layer, 0));
    }
    if (bl == 2)
      edges.emplace_back(slot(v, 0, t.site_degree[v] - 1),
                         slot(v, 1, t.site_degree[v] - 1));
    for (int s = 0; s < t.pendant_count(v); ++s) {
      const int ps = prefix[v] + s;
      for (int layer = 0; layer < bl; ++layer) {
        const int q = slot(v, layer, 1 + nchild + s);
        bq_site[bl * ps + layer] = q;
        edges.emplace_back(q, copy0 + bl * ps + layer);
      }
    }
  }

  // product of edge singlets |01> - |10>
  std::vector<C> psi(std::size_t(1) << nq, C(0));
  const int ne = static_cast<int>(edges.size());
  for (std::uint32_t m = 0; m < (1u << ne); ++m) {
    std::size_t idx = 0;
    double sgn = 1;
    for (int e = 0; e < ne; ++e) {
      if ((m >> e) & 1u) {
        idx |= std::size_t(1) << edges[e].first;
        sgn = -sgn;
      } else {
        idx |= std::size_t(1) << edges[e].second;
      }
    }
    psi[idx] += sgn;
  }

  auto apply2 = [&](std::vector<C>& vec, int q, const std::array<C, 4>& m2) {
    const std::size_t bit = std::size_t(1) << q;
    for (std::size_t idx = 0; idx < vec.size(); ++idx) {
      if (idx & bit) continue;
      const C a = vec[idx], c = vec[idx | bit];
      vec[idx] = m2[0] * a + m2[1] * c;
      vec[idx | bit] = m2[2] * a + m2[3] * c;
    }
  };

  // weight each pendant's purification by sqrt(1 + y.sigma) before the site
  // projectors act; tracing out the copy qubit then leaves the boundary
  // density matrix inside the projected network
  for (std::size_t qb = 0; qb < b.y.size(); ++qb) {
    const BlochVector& v = b.y[qb];
    const double r = v.norm();
    const double sp = std::sqrt(1 + r), sm = std::sqrt(std::max(0.0, 1 - r));
    const double alpha = (sp + sm) / 2;
    const double beta = r < 1e-15 ? 0.5 : (sp - sm) / (2 * r);
    apply2(psi, bq_site[qb],
           {C(alpha + beta * v.x3), C(beta * v.x1, -beta * v.x2),
            C(beta * v.x1, beta * v.x2), C(alpha - beta * v.x3)});
  }

  // symmetrize every site's block of qubits
  auto symmetrize = [&](std::uint32_t mask, int d) {
    std::vector<std::uint32_t> subs;
    subs.reserve(std::size_t(1) << d);
    std::uint32_t s = mask;
    while (true) {
      subs.push_back(s);
      if (!s) break;
      s = (s - 1) & mask;
    }
    std::vector<double> binom(d + 1, 1);
    for (int k = 1; k <= d; ++k) binom[k] = binom[k - 1] * (d - k + 1) / k;
    const std::uint32_t full = static_cast<std::uint32_t>((std::size_t(1) << nq) - 1);
    const std::uint32_t rest_mask = full & ~mask;
    std::vector<C> acc(d + 1);
    std::uint32_t r = rest_mask;
    while (true) {
      std::fill(acc.begin(), acc.end(), C(0));
      for (std::uint32_t sub : subs) acc[__builtin_popcount(sub)] += psi[r | sub];
      for (std::uint32_t sub : subs) {
        const int k = __builtin_popcount(sub);
        psi[r | sub] = acc[k] / binom[k];
      }
      if (!r) break;
      r = (r - 1) & rest_mask;
    }
  };
  for (int v = 0; v < t.node_count(); ++v)
    for (int layer = 0; layer < bl; ++layer) {
      std::uint32_t mask = 0;
      for (int j = 0; j < t.site_degree[v]; ++j) mask |= 1u << slot(v, layer, j);
      symmetrize(mask, t.site_degree[v]);
    }

  double den = 0;
  for (const C& a : psi) den += std::norm(a);
  if (den < 1e-300)
    throw std::runtime_error("vanishing normalization in dense contraction");
  if (obs.axis == 0) return 1.0;

  static const std::array<std::array<C, 4>, 4> sig = {{
      {C(1), C(0), C(0), C(1)},
      {C(0), C(1), C(1), C(0)},
      {C(0), C(0, -1), C(0, 1), C(0)},
      {C(1), C(0), C(0), C(-1)},
  }};
  std::vector<C> phi = psi;
  apply2(phi, aux0, sig[obs.axis]);
  C num(0);
  for (std::size_t idx = 0; idx < psi.size(); ++idx) num += std::conj(psi[idx]) * phi[idx];
  return num.real() / den;
}

std::string TreeFamily::label() const {
  switch (kind) {
    case FamilyKind::cayley: return "cayley";
    case FamilyKind::decorated: return "decorated";
    default: return "layered";
  }
}

std::string TreeFamily::params() const {
  std::ostringstream os;
  if (kind == FamilyKind::cayley) {
    os << "d=" << d;
  } else if (kind == FamilyKind::decorated) {
    os << "d=" << d << ";g=" << g;
  } else {
    os << "degs=";
    for (std::size_t i = 0; i < seq.prefix.size(); ++i)
      os << (i ? "." : "") << seq.prefix[i];
    if (!seq.tail.empty()) {
      os << "r";
      for (std::size_t i = 0; i < seq.tail.size(); ++i) os << (i ? "." : "") << seq.tail[i];
    }
  }
  return os.str();
}

FiniteTree TreeFamily::instantiate(int depth) const {
  if (depth < 0) throw std::invalid_argument("depth must be >= 0");
  // size guard before any allocation
  double frontier = 1, total = 1;
  for (int layer = 1; layer <= depth; ++layer) {
    int dl;
    if (kind == FamilyKind::layered)
      dl = seq.at(layer);
    else
      dl = d;
    frontier *= dl - 1;
    total += frontier * (kind == FamilyKind::decorated ? 1 + g : 1);
    if (total > kNodeCap) throw std::invalid_argument("contraction budget exceeded: tree too large");
  }
  switch (kind) {
    case FamilyKind::cayley: return FiniteTree::cayley(d, depth);
    case FamilyKind::decorated: return FiniteTree::decorated(d, g, depth);
    default: return FiniteTree::layered(seq, depth);
  }
}

double TreeFamily::scalar_map(double t, int depth) const {
  if (kind == FamilyKind::cayley) {
    double x = t;
    for (int i = 0; i <= depth; ++i) x = eval_F(d, x);
    return x;
  }
  if (kind == FamilyKind::decorated) {
    double x = eval_F(d, t);
    for (int layer = 1; layer <= depth; ++layer) {
      for (int j = 0; j < g; ++j) x = eval_F(2, x);
      x = eval_F(d, x);
    }
    return x;
  }
  return compose_sequence(seq, t, depth + 1).final_value();
}

TreeFamily TreeFamily::cayley(int d) {
  TreeFamily f;
  f.kind = FamilyKind::cayley;
  f.d = d;
  return f;
}

TreeFamily TreeFamily::decorated(int d, int g) {
  TreeFamily f;
  f.kind = FamilyKind::decorated;
  f.d = d;
  f.g = g;
  return f;
}

TreeFamily TreeFamily::layered(DegreeSequence seq) {
  TreeFamily f;
  f.kind = FamilyKind::layered;
  f.seq = std::move(seq);
  return f;
}

std::vector<ScanRow> order_parameter_scan(const TreeFamily& fam,
                                          const std::vector<double>& ts,
                                          const std::vector<int>& depths,
                                          int axis, bool parallel) {
  if (axis < 1 || axis > 3) throw std::invalid_argument("scan axis must be 1..3");
  std::vector<ScanRow> rows;
  for (int depth : depths) {
    FiniteTree tree = fam.instantiate(depth);
    for (double t : ts) {
      BlochVector y{axis == 1 ? t : 0, axis == 2 ? t : 0, axis == 3 ? t : 0};
      BoundaryAssignment bnd = BoundaryAssignment::uniform(tree, y);
      rows.push_back({fam.label(), fam.params(), t, depth,
                      contract_expectation(tree, bnd, pauli_at_root(axis), parallel),
                      fam.scalar_map(t, depth)});
    }
  }
  return rows;
}

std::string scan_to_csv(const std::vector<ScanRow>& rows) {
  std::ostringstream os;
  os.precision(17);
  os << "family,params,t,depth,expectation,scalar_map_value\n";
  for (const ScanRow& r : rows)
    os << r.family << ',' << r.params << ',' << r.t << ',' << r.depth << ','
       << r.expectation << ',' << r.scalar_map_value << '\n';
  return os.str();
}

ConvergenceResult converge_expectation(const TreeFamily& fam, double t, int axis,
                                       int max_depth, int period, double tol) {
  if (period < 1) throw std::invalid_argument("period must be >= 1");
  if (max_depth < period) throw std::invalid_argument("max depth must cover one period");
  std::vector<double> vals;
  for (int depth = 0; depth <= max_depth; ++depth) {
    FiniteTree tree = fam.instantiate(depth);
    BlochVector y{axis == 1 ? t : 0, axis == 2 ? t : 0, axis == 3 ? t : 0};
    vals.push_back(contract_expectation(tree, BoundaryAssignment::uniform(tree, y),
                                        pauli_at_root(axis)));
    if (depth >= period && std::abs(vals[depth] - vals[depth - period]) < tol)
      return {vals[depth], depth, true};
  }
  return {vals.back(), max_depth, false};
}

}  // namespace aklt
