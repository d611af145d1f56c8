#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "aklt/rational.hpp"

namespace aklt {

// Two AKLT layers glued by a singlet rung at every node.  A node consists of
// two degree-(g+2) sites, one per layer, joined by the rung edge; the g child
// legs of each layer pair up into g child slots and the two parent legs form
// the output slot.  States on a slot are encoded as 16 coefficients x_{lk} of
// sigma_l (x) sigma_k, index = 4*l + k, with x_{00} kept at 1 for normalized
// inputs.
using BilayerVec = std::array<double, 16>;

// Rung gluing frame.  `aligned` absorbs the antiferromagnetic sign of the
// singlet into the bottom layer, which is the frame where the mirror-symmetric
// subspace x_{0i} = x_{i0} is invariant; `signed_frame` keeps the raw singlet
// weights (1,-1,-1,-1) and anti-aligns the layers instead.
enum class BilayerBasis { aligned, signed_frame };

// Polynomial in the three symmetric coordinates
//   x1 = x_{0i} = x_{i0}   (single-sigma block)
//   x2 = x_{ij}, i != j    (off-diagonal two-sigma block)
//   x3 = x_{ii}            (diagonal two-sigma block)
// keyed by exponent triple.
struct TriPoly {
    std::map<std::array<int, 3>, Rat> terms;

    void add(std::array<int, 3> e, const Rat& c);
    Rat coeff(std::array<int, 3> e) const;
    Rat eval(const Rat& x1, const Rat& x2, const Rat& x3) const;
    double eval(double x1, double x2, double x3) const;
    std::string to_string() const;
    bool operator==(const TriPoly& other) const;

    // true when every term's x1 exponent has the given parity
    bool x1_parity_is(int parity) const;
};

// Symmetric-subspace components of the node map output, numerators of the
// projective update (x1', x2', x3') = (f1, f2, f3)/f0.
struct BilayerSystem {
    int g = 0;
    TriPoly f0, f1, f2, f3;

    // per-coefficient mismatches against the hand-tabulated reference system,
    // empty when they agree or no reference exists for this g
    std::string reference_diff;
};

// Exact transfer data for one node: for every assignment of Pauli letters to
// the g child slots, the 16 output coefficients.  Built once per (g, basis).
class BilayerMap {
  public:
    // g >= 1 child slots; table size 16^g, g <= 4
    static BilayerMap build(int g, BilayerBasis basis = BilayerBasis::aligned);

    int g() const { return g_; }
    BilayerBasis basis() const { return basis_; }

    // exact table entry: `pairs[p] = 4*l + k` letter pair fed into slot p
    Rat exact_entry(const std::vector<int>& pairs, int out) const;

    // raw (unnormalized) output when every child slot carries the same
    // operator x; products over slots are taken in double precision
    BilayerVec apply_uniform(const BilayerVec& x) const;

    // raw output for per-slot inputs, used when sweeping a tree whose child
    // messages differ
    BilayerVec apply_mixed(const std::vector<BilayerVec>& inputs) const;

    // apply_uniform followed by normalization to out[0] = 1;
    // returns nullopt when |out[0]| underflows
    std::optional<BilayerVec> apply_normalized(const BilayerVec& x) const;

    // exact raw output for per-slot exact inputs (16 rationals per slot)
    std::array<Rat, 16> apply_exact(
        const std::vector<std::array<Rat, 16>>& inputs) const;

  private:
    int g_ = 0;
    BilayerBasis basis_ = BilayerBasis::aligned;
    // sparse exact table and dense double mirror, indexed by the base-16
    // digit string of the slot letter pairs
    std::vector<std::vector<std::pair<int, Rat>>> table_;
    std::vector<BilayerVec> dtable_;

    friend BilayerSystem extract_system(int g);
};

// Expand the uniform node map over the symmetric subspace and return the four
// component polynomials.  Asserts that the subspace is exactly invariant (all
// outputs of one symmetry class produce identical polynomials) and that f1 is
// odd and f0, f2, f3 are even in x1.  Aligned frame only.
BilayerSystem extract_system(int g);

// Fixed-point search for the depth dynamics x -> F(x) = (f1,f2,f3)/f0.
// period1 solves F(x) = x; period2 solves F(x) = Theta(x) where
// Theta(x1,x2,x3) = (-x1,x2,x3) is the sublattice flip, so a root with
// x1 != 0 is a genuine two-cycle alternating between x and Theta(x).
enum class CycleKind { period1, period2 };

struct BilayerSolution {
    std::array<double, 3> x;   // (x1, x2, x3)
    int hits = 0;              // how many starts converged here
    double poly_residual = 0;  // max |equation| at the root
    double map_residual = 0;   // max |F(x) - target| via the dense table
    double min_eigenvalue = 0; // smallest eigenvalue of the 4x4 operator B(x)
};

struct SolveReport {
    int g = 0;
    CycleKind cycle = CycleKind::period1;
    int starts = 0;
    unsigned seed = 0;
    std::vector<BilayerSolution> solutions; // sorted by (x1, x2, x3)
    int diverged = 0; // starts that contributed no kept solution
};

// Damped-Newton multi-start inside the ball max|x_i| <= 0.9.  Start points
// depend only on (seed, start index), so results are identical for any thread
// count.  Solutions are deduplicated at 1e-8 and each survivor is re-verified
// through the dense node table; roots whose dense-map residual exceeds 1e-8
// are discarded as artifacts.
SolveReport solve_fixed_points(int g, CycleKind cycle, int starts,
                               unsigned seed, bool parallel = true);

// Search outside the symmetric subspace: damped Newton on all 15 operator
// coefficients directly through the dense table (finite-difference Jacobian,
// h = 1e-7).  Returns deduplicated in-ball roots of the period-1 or period-2
// condition as raw coefficient vectors (index = 4*l + k - 1), reported
// without interpretation.
std::vector<std::array<double, 15>> solve_full_space(int g, CycleKind cycle,
                                                     int starts, unsigned seed);

// Embed symmetric coordinates as a full 16-vector with x_{00} = 1.
BilayerVec symmetric_to_full(double x1, double x2, double x3);

// Smallest eigenvalue of sum_{lk} x_{lk} sigma_l (x) sigma_k.
double min_eigenvalue_4x4(const BilayerVec& x);

// Largest ratio |x_{n+1} - x*| / |x_n - x*| observed while iterating the g=1
// normalized map from `n_starts` random operators in the ball; < 1 certifies
// empirical contraction toward the symmetric fixed point.
double g1_empirical_contraction(int n_starts, unsigned seed);

} // namespace aklt
