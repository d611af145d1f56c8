#include "aklt/bilayer.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>
#include <sstream>
#include <stdexcept>

#include <Eigen/Dense>

#include "aklt/pauli.hpp"
#include "aklt/site_transfer.hpp"

namespace aklt {

namespace {

// Site coefficients depend only on the letter multiplicities, not their
// order, so one canonical word per count vector is enough.  Serial use only.
const std::array<Rat, 4>& site_coeffs(int d, const std::array<int, 3>& counts) {
    static std::map<std::pair<int, std::array<int, 3>>, std::array<Rat, 4>> cache;
    auto key = std::make_pair(d, counts);
    auto it = cache.find(key);
    if (it == cache.end()) {
        std::vector<int> letters;
        for (int a = 0; a < 3; ++a)
            letters.insert(letters.end(), counts[a], a + 1);
        while (static_cast<int>(letters.size()) < d - 1) letters.push_back(0);
        it = cache.emplace(key, dense_word_transfer(d, PauliWord(letters))).first;
    }
    return it->second;
}

std::string monomial_label(const std::array<int, 3>& e) {
    if (e[0] == 0 && e[1] == 0 && e[2] == 0) return "1";
    std::ostringstream os;
    bool first = true;
    for (int v = 0; v < 3; ++v) {
        if (e[v] == 0) continue;
        if (!first) os << "*";
        os << "x" << v + 1;
        if (e[v] > 1) os << "^" << e[v];
        first = false;
    }
    return os.str();
}

TriPoly shift_mul(const TriPoly& p, const std::array<int, 3>& s, const Rat& c) {
    TriPoly out;
    for (const auto& [e, v] : p.terms)
        out.add({e[0] + s[0], e[1] + s[1], e[2] + s[2]}, v * c);
    return out;
}

TriPoly poly_add(const TriPoly& a, const TriPoly& b) {
    TriPoly out = a;
    for (const auto& [e, v] : b.terms) out.add(e, v);
    return out;
}

TriPoly from_terms(
    std::initializer_list<std::pair<std::array<int, 3>, Rat>> terms) {
    TriPoly p;
    for (const auto& [e, c] : terms) p.add(e, c);
    return p;
}

struct ReferenceSystem {
    bool combined = false;          // true: period-2 combinations, not raw f's
    std::array<TriPoly, 4> f;       // f0..f3 when !combined
    std::array<TriPoly, 3> eq;      // f1+x1*f0, f2-x2*f0, f3-x3*f0 when combined
};

// Hand-tabulated closed forms kept for cross-checking.  Where these disagree
// with the machine-extracted coefficients, the extracted system is
// authoritative and the mismatch is reported, not repaired.
std::optional<ReferenceSystem> reference_system(int g) {
    ReferenceSystem r;
    if (g == 1) {
        r.f[0] = from_terms({{{0, 0, 0}, 1}, {{0, 0, 1}, Rat(1, 3)}});
        r.f[1] = from_terms({{{1, 0, 0}, Rat(-4, 9)}});
        r.f[2] = from_terms({{{0, 1, 0}, Rat(1, 9)}});
        r.f[3] = from_terms({{{0, 0, 0}, 1}, {{0, 0, 1}, Rat(1, 9)}});
        return r;
    }
    if (g == 2) {
        r.f[0] = from_terms({{{0, 0, 0}, 1},
                             {{2, 0, 0}, Rat(4, 3)},
                             {{0, 0, 1}, Rat(2, 3)},
                             {{0, 0, 2}, Rat(1, 3)},
                             {{0, 2, 0}, Rat(2, 3)}});
        r.f[1] = from_terms({{{1, 0, 0}, Rat(-8, 9)},
                             {{1, 0, 1}, Rat(-4, 15)},
                             {{1, 1, 0}, Rat(-8, 15)}});
        r.f[2] = from_terms({{{0, 1, 0}, Rat(2, 9)},
                             {{2, 0, 0}, Rat(4, 15)},
                             {{0, 1, 1}, Rat(16, 225)},
                             {{0, 2, 0}, Rat(2, 225)}});
        r.f[3] = from_terms({{{0, 0, 0}, Rat(1, 9)},
                             {{0, 0, 1}, Rat(2, 9)},
                             {{2, 0, 0}, Rat(4, 9)},
                             {{0, 0, 2}, Rat(3, 25)},
                             {{0, 2, 0}, Rat(4, 75)}});
        return r;
    }
    if (g == 3) {
        r.combined = true;
        r.eq[0] = from_terms({{{1, 0, 0}, -3},
                              {{3, 0, 0}, Rat(-37, 15)},
                              {{1, 2, 0}, Rat(-44, 75)},
                              {{1, 0, 1}, Rat(-8, 15)},
                              {{1, 1, 1}, Rat(18, 25)},
                              {{1, 0, 2}, Rat(14, 75)},
                              {{0, 0, 3}, Rat(3, 25)},
                              {{0, 3, 0}, Rat(4, 75)},
                              {{0, 2, 0}, Rat(58, 25)},
                              {{0, 0, 1}, 2},
                              {{2, 0, 0}, 6}});
        r.eq[1] = from_terms({{{0, 0, 0}, Rat(-2, 3)},
                              {{2, 0, 0}, Rat(7, 5)},
                              {{0, 2, 0}, Rat(14, 75)},
                              {{0, 0, 1}, Rat(6, 25)},
                              {{0, 0, 2}, Rat(1, 15)},
                              {{0, 1, 1}, Rat(11, 75)},
                              {{2, 1, 0}, Rat(34, 75)},
                              {{2, 0, 1}, Rat(4, 25)},
                              {{0, 2, 1}, Rat(4, 75)},
                              {{0, 3, 0}, Rat(2, 25)},
                              {{0, 0, 3}, Rat(1, 25)}});
        r.eq[2] = from_terms({{{0, 0, 0}, Rat(-8, 9)},
                              {{2, 0, 0}, Rat(142, 75)},
                              {{0, 2, 0}, Rat(8, 25)},
                              {{0, 0, 1}, Rat(1, 3)},
                              {{0, 0, 2}, Rat(13, 75)},
                              {{0, 0, 3}, Rat(1, 15)},
                              {{2, 1, 0}, Rat(16, 75)},
                              {{0, 2, 1}, Rat(8, 25)}});
        return r;
    }
    return std::nullopt;
}

void diff_pair(std::ostringstream& os, int g, const std::string& name,
               const TriPoly& extracted, const TriPoly& ref) {
    std::map<std::array<int, 3>, char> keys;
    for (const auto& [e, v] : extracted.terms) keys[e] = 0;
    for (const auto& [e, v] : ref.terms) keys[e] = 0;
    for (const auto& [e, unused] : keys) {
        Rat a = extracted.coeff(e);
        Rat b = ref.coeff(e);
        if (a != b)
            os << "g" << g << " " << name << "[" << monomial_label(e)
               << "]: extracted " << rat_to_string(a) << ", reference "
               << rat_to_string(b) << "\n";
    }
}

std::string build_reference_diff(const BilayerSystem& sys) {
    auto ref = reference_system(sys.g);
    if (!ref) return {};
    std::ostringstream os;
    if (!ref->combined) {
        diff_pair(os, sys.g, "f0", sys.f0, ref->f[0]);
        diff_pair(os, sys.g, "f1", sys.f1, ref->f[1]);
        diff_pair(os, sys.g, "f2", sys.f2, ref->f[2]);
        diff_pair(os, sys.g, "f3", sys.f3, ref->f[3]);
    } else {
        diff_pair(os, sys.g, "f1+x1*f0",
                  poly_add(sys.f1, shift_mul(sys.f0, {1, 0, 0}, 1)), ref->eq[0]);
        diff_pair(os, sys.g, "f2-x2*f0",
                  poly_add(sys.f2, shift_mul(sys.f0, {0, 1, 0}, -1)), ref->eq[1]);
        diff_pair(os, sys.g, "f3-x3*f0",
                  poly_add(sys.f3, shift_mul(sys.f0, {0, 0, 1}, -1)), ref->eq[2]);
    }
    return os.str();
}

}  // namespace

void TriPoly::add(std::array<int, 3> e, const Rat& c) {
    Rat& v = terms[e];
    v += c;
    if (v == 0) terms.erase(e);
}

Rat TriPoly::coeff(std::array<int, 3> e) const {
    auto it = terms.find(e);
    return it == terms.end() ? Rat(0) : it->second;
}

Rat TriPoly::eval(const Rat& x1, const Rat& x2, const Rat& x3) const {
    Rat acc = 0;
    for (const auto& [e, c] : terms) {
        Rat m = c;
        for (int i = 0; i < e[0]; ++i) m *= x1;
        for (int i = 0; i < e[1]; ++i) m *= x2;
        for (int i = 0; i < e[2]; ++i) m *= x3;
        acc += m;
    }
    return acc;
}

double TriPoly::eval(double x1, double x2, double x3) const {
    double acc = 0;
    for (const auto& [e, c] : terms) {
        double m = to_double(c);
        for (int i = 0; i < e[0]; ++i) m *= x1;
        for (int i = 0; i < e[1]; ++i) m *= x2;
        for (int i = 0; i < e[2]; ++i) m *= x3;
        acc += m;
    }
    return acc;
}

std::string TriPoly::to_string() const {
    if (terms.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [e, c] : terms) {
        if (!first) os << " + ";
        os << "(" << rat_to_string(c) << ")";
        std::string label = monomial_label(e);
        if (label != "1") os << "*" << label;
        first = false;
    }
    return os.str();
}

bool TriPoly::operator==(const TriPoly& other) const {
    return terms == other.terms;
}

bool TriPoly::x1_parity_is(int parity) const {
    for (const auto& [e, c] : terms)
        if (e[0] % 2 != parity) return false;
    return true;
}

BilayerMap BilayerMap::build(int g, BilayerBasis basis) {
    if (g < 1 || g > 4)
        throw std::invalid_argument("bilayer splitting number must be in 1..4");
    BilayerMap m;
    m.g_ = g;
    m.basis_ = basis;
    const int d = g + 2;
    const int combos = 1 << (4 * g);
    m.table_.resize(combos);
    m.dtable_.assign(combos, BilayerVec{});
    std::array<int, 4> u{1, 1, 1, 1};
    if (basis == BilayerBasis::signed_frame) u = {1, -1, -1, -1};

    for (int combo = 0; combo < combos; ++combo) {
        std::array<Rat, 16> acc{};
        bool any = false;
        for (int r = 0; r < 4; ++r) {
            std::array<int, 3> top{0, 0, 0}, bot{0, 0, 0};
            if (r) {
                ++top[r - 1];
                ++bot[r - 1];
            }
            for (int p = 0; p < g; ++p) {
                int digit = (combo >> (4 * p)) & 15;
                int l = digit >> 2, k = digit & 3;
                if (l) ++top[l - 1];
                if (k) ++bot[k - 1];
            }
            const auto& ct = site_coeffs(d, top);
            const auto& cb = site_coeffs(d, bot);
            for (int a = 0; a < 4; ++a) {
                if (ct[a] == 0) continue;
                for (int b = 0; b < 4; ++b) {
                    if (cb[b] == 0) continue;
                    acc[4 * a + b] += u[r] * ct[a] * cb[b];
                    any = true;
                }
            }
        }
        if (!any) continue;
        for (int o = 0; o < 16; ++o) {
            if (acc[o] == 0) continue;
            m.table_[combo].emplace_back(o, acc[o]);
            m.dtable_[combo][o] = to_double(acc[o]);
        }
    }
    return m;
}

Rat BilayerMap::exact_entry(const std::vector<int>& pairs, int out) const {
    if (static_cast<int>(pairs.size()) != g_)
        throw std::invalid_argument("need one letter pair per child slot");
    if (out < 0 || out > 15) throw std::invalid_argument("output index out of range");
    int combo = 0;
    for (int p = 0; p < g_; ++p) {
        if (pairs[p] < 0 || pairs[p] > 15)
            throw std::invalid_argument("letter pair out of range");
        combo |= pairs[p] << (4 * p);
    }
    for (const auto& [o, v] : table_[combo])
        if (o == out) return v;
    return Rat(0);
}

BilayerVec BilayerMap::apply_uniform(const BilayerVec& x) const {
    BilayerVec out{};
    const int combos = static_cast<int>(dtable_.size());
    for (int combo = 0; combo < combos; ++combo) {
        if (table_[combo].empty()) continue;
        double w = 1;
        for (int p = 0; p < g_; ++p) w *= x[(combo >> (4 * p)) & 15];
        if (w == 0) continue;
        const BilayerVec& row = dtable_[combo];
        for (const auto& [o, v] : table_[combo]) out[o] += w * row[o];
    }
    return out;
}

BilayerVec BilayerMap::apply_mixed(const std::vector<BilayerVec>& inputs) const {
    if (static_cast<int>(inputs.size()) != g_)
        throw std::invalid_argument("need one input operator per child slot");
    BilayerVec out{};
    const int combos = static_cast<int>(dtable_.size());
    for (int combo = 0; combo < combos; ++combo) {
        if (table_[combo].empty()) continue;
        double w = 1;
        for (int p = 0; p < g_; ++p) w *= inputs[p][(combo >> (4 * p)) & 15];
        if (w == 0) continue;
        for (const auto& [o, v] : table_[combo]) out[o] += w * dtable_[combo][o];
    }
    return out;
}

std::optional<BilayerVec> BilayerMap::apply_normalized(const BilayerVec& x) const {
    BilayerVec out = apply_uniform(x);
    if (std::abs(out[0]) < 1e-300) return std::nullopt;
    for (int o = 15; o >= 0; --o) out[o] /= out[0];
    return out;
}

std::array<Rat, 16> BilayerMap::apply_exact(
    const std::vector<std::array<Rat, 16>>& inputs) const {
    if (static_cast<int>(inputs.size()) != g_)
        throw std::invalid_argument("need one input operator per child slot");
    std::array<Rat, 16> out{};
    const int combos = static_cast<int>(table_.size());
    for (int combo = 0; combo < combos; ++combo) {
        if (table_[combo].empty()) continue;
        Rat w = 1;
        bool zero = false;
        for (int p = 0; p < g_ && !zero; ++p) {
            const Rat& c = inputs[p][(combo >> (4 * p)) & 15];
            if (c == 0)
                zero = true;
            else
                w *= c;
        }
        if (zero) continue;
        for (const auto& [o, v] : table_[combo]) out[o] += w * v;
    }
    return out;
}

BilayerSystem extract_system(int g) {
    BilayerMap m = BilayerMap::build(g, BilayerBasis::aligned);
    std::array<TriPoly, 16> comp;
    const int combos = 1 << (4 * g);
    for (int combo = 0; combo < combos; ++combo) {
        if (m.table_[combo].empty()) continue;
        std::array<int, 3> e{0, 0, 0};
        for (int p = 0; p < g; ++p) {
            int digit = (combo >> (4 * p)) & 15;
            int l = digit >> 2, k = digit & 3;
            if (l == 0 && k == 0) continue;
            if (l == 0 || k == 0)
                ++e[0];
            else if (l == k)
                ++e[2];
            else
                ++e[1];
        }
        for (const auto& [o, v] : m.table_[combo]) comp[o].add(e, v);
    }

    BilayerSystem sys;
    sys.g = g;
    sys.f0 = comp[0];
    sys.f1 = comp[1];
    sys.f2 = comp[6];
    sys.f3 = comp[5];
    for (int o : {2, 3, 4, 8, 12})
        if (!(comp[o] == sys.f1))
            throw std::logic_error("symmetric subspace is not invariant");
    for (int o : {7, 9, 11, 13, 14})
        if (!(comp[o] == sys.f2))
            throw std::logic_error("symmetric subspace is not invariant");
    for (int o : {10, 15})
        if (!(comp[o] == sys.f3))
            throw std::logic_error("symmetric subspace is not invariant");
    if (!sys.f0.x1_parity_is(0) || !sys.f1.x1_parity_is(1) ||
        !sys.f2.x1_parity_is(0) || !sys.f3.x1_parity_is(0))
        throw std::logic_error("sublattice flip parity violated");

    sys.reference_diff = build_reference_diff(sys);
    return sys;
}

namespace {

// double-precision monomial form for the Newton iterations
struct MonoPoly {
    struct Term {
        int a, b, c;
        double v;
    };
    std::vector<Term> t;

    static MonoPoly from(const TriPoly& p) {
        MonoPoly m;
        for (const auto& [e, c] : p.terms)
            m.t.push_back({e[0], e[1], e[2], to_double(c)});
        return m;
    }
    double eval(const std::array<double, 3>& x) const {
        double acc = 0;
        for (const auto& tm : t) {
            double v = tm.v;
            for (int i = 0; i < tm.a; ++i) v *= x[0];
            for (int i = 0; i < tm.b; ++i) v *= x[1];
            for (int i = 0; i < tm.c; ++i) v *= x[2];
            acc += v;
        }
        return acc;
    }
};

double norm_inf(const std::array<double, 3>& v) {
    return std::max({std::abs(v[0]), std::abs(v[1]), std::abs(v[2])});
}

// 3x3 linear solve with partial pivoting; false when singular
bool solve3(std::array<std::array<double, 3>, 3> a, std::array<double, 3> rhs,
            std::array<double, 3>& out) {
    std::array<int, 3> piv{0, 1, 2};
    for (int col = 0; col < 3; ++col) {
        int best = col;
        for (int r = col + 1; r < 3; ++r)
            if (std::abs(a[piv[r]][col]) > std::abs(a[piv[best]][col])) best = r;
        std::swap(piv[col], piv[best]);
        double p = a[piv[col]][col];
        if (std::abs(p) < 1e-14) return false;
        for (int r = col + 1; r < 3; ++r) {
            double f = a[piv[r]][col] / p;
            for (int c = col; c < 3; ++c) a[piv[r]][c] -= f * a[piv[col]][c];
            rhs[piv[r]] -= f * rhs[piv[col]];
        }
    }
    for (int col = 2; col >= 0; --col) {
        double s = rhs[piv[col]];
        for (int c = col + 1; c < 3; ++c) s -= a[piv[col]][c] * out[c];
        out[col] = s / a[piv[col]][col];
    }
    return true;
}

struct NewtonProblem {
    std::array<MonoPoly, 3> eq;

    std::array<double, 3> residual(const std::array<double, 3>& x) const {
        return {eq[0].eval(x), eq[1].eval(x), eq[2].eval(x)};
    }
};

std::optional<std::array<double, 3>> newton_from(const NewtonProblem& prob,
                                                 std::array<double, 3> x) {
    constexpr double fd_h = 1e-7;
    std::array<double, 3> res = prob.residual(x);
    double r = norm_inf(res);
    for (int iter = 0; iter < 120 && r >= 1e-13; ++iter) {
        std::array<std::array<double, 3>, 3> j;
        for (int v = 0; v < 3; ++v) {
            std::array<double, 3> xp = x;
            xp[v] += fd_h;
            std::array<double, 3> rp = prob.residual(xp);
            for (int i = 0; i < 3; ++i) j[i][v] = (rp[i] - res[i]) / fd_h;
        }
        std::array<double, 3> step{};
        if (!solve3(j, {-res[0], -res[1], -res[2]}, step)) return std::nullopt;
        double lam = 1;
        bool improved = false;
        for (int h = 0; h < 30; ++h) {
            std::array<double, 3> xn{x[0] + lam * step[0], x[1] + lam * step[1],
                                     x[2] + lam * step[2]};
            std::array<double, 3> rn = prob.residual(xn);
            if (norm_inf(rn) < r) {
                x = xn;
                res = rn;
                r = norm_inf(rn);
                improved = true;
                break;
            }
            lam *= 0.5;
        }
        if (!improved) break;
    }
    if (r >= 1e-12) return std::nullopt;
    return x;
}

std::array<double, 3> start_point(unsigned seed, int s) {
    std::uint64_t mix = static_cast<std::uint64_t>(seed) * 0x9E3779B97F4A7C15ull +
                        static_cast<std::uint64_t>(s + 1) * 0xBF58476D1CE4E5B9ull;
    std::mt19937_64 eng(mix);
    std::uniform_real_distribution<double> u(-0.9, 0.9);
    double a = u(eng), b = u(eng), c = u(eng);
    return {a, b, c};
}

}  // namespace

SolveReport solve_fixed_points(int g, CycleKind cycle, int starts, unsigned seed,
                               bool parallel) {
    if (starts < 1) throw std::invalid_argument("need at least one start");
    BilayerSystem sys = extract_system(g);
    BilayerMap map = BilayerMap::build(g, BilayerBasis::aligned);

    // period1: f_c - x_c f0 = 0; period2 flips the sign carried by x1
    Rat s1 = cycle == CycleKind::period2 ? Rat(1) : Rat(-1);
    NewtonProblem prob;
    prob.eq[0] = MonoPoly::from(poly_add(sys.f1, shift_mul(sys.f0, {1, 0, 0}, s1)));
    prob.eq[1] = MonoPoly::from(poly_add(sys.f2, shift_mul(sys.f0, {0, 1, 0}, -1)));
    prob.eq[2] = MonoPoly::from(poly_add(sys.f3, shift_mul(sys.f0, {0, 0, 1}, -1)));

    std::vector<std::optional<std::array<double, 3>>> found(starts);
#ifdef AKLT_HAVE_OPENMP
#pragma omp parallel for schedule(dynamic) if (parallel)
#endif
    for (int s = 0; s < starts; ++s)
        found[s] = newton_from(prob, start_point(seed, s));
    (void)parallel;

    SolveReport report;
    report.g = g;
    report.cycle = cycle;
    report.starts = starts;
    report.seed = seed;

    // merge in start order so thread count never changes the outcome
    for (int s = 0; s < starts; ++s) {
        if (!found[s] || norm_inf(*found[s]) > 0.9 + 1e-9) {
            ++report.diverged;
            continue;
        }
        bool matched = false;
        for (auto& sol : report.solutions) {
            double dist = std::max({std::abs(sol.x[0] - (*found[s])[0]),
                                    std::abs(sol.x[1] - (*found[s])[1]),
                                    std::abs(sol.x[2] - (*found[s])[2])});
            if (dist < 1e-8) {
                ++sol.hits;
                matched = true;
                break;
            }
        }
        if (!matched) {
            BilayerSolution sol;
            sol.x = *found[s];
            sol.hits = 1;
            report.solutions.push_back(sol);
        }
    }

    // dense-table re-verification; polynomial roots that fail it are artifacts
    std::vector<BilayerSolution> kept;
    for (auto& sol : report.solutions) {
        sol.poly_residual = norm_inf(prob.residual(sol.x));
        BilayerVec full = symmetric_to_full(sol.x[0], sol.x[1], sol.x[2]);
        BilayerVec y = map.apply_uniform(full);
        double y0 = y[0];
        double target_x1 = cycle == CycleKind::period2 ? -sol.x[0] : sol.x[0];
        BilayerVec target = symmetric_to_full(target_x1, sol.x[1], sol.x[2]);
        double res = 0;
        for (int o = 0; o < 16; ++o)
            res = std::max(res, std::abs(y[o] / y0 - target[o]));
        sol.map_residual = res;
        sol.min_eigenvalue = min_eigenvalue_4x4(full);
        if (res <= 1e-8)
            kept.push_back(sol);
        else
            report.diverged += sol.hits;
    }
    report.solutions = std::move(kept);
    std::sort(report.solutions.begin(), report.solutions.end(),
              [](const BilayerSolution& a, const BilayerSolution& b) {
                  return a.x < b.x;
              });
    return report;
}

namespace {

// period-2 flips the single-sigma block, the two-sigma blocks are even
void apply_flip(BilayerVec& v, CycleKind cycle) {
    if (cycle != CycleKind::period2) return;
    for (int i = 1; i < 4; ++i) {
        v[i] = -v[i];
        v[4 * i] = -v[4 * i];
    }
}

}  // namespace

std::vector<std::array<double, 15>> solve_full_space(int g, CycleKind cycle,
                                                     int starts, unsigned seed) {
    if (starts < 1) throw std::invalid_argument("need at least one start");
    BilayerMap map = BilayerMap::build(g, BilayerBasis::aligned);

    auto residual = [&](const BilayerVec& x, Eigen::VectorXd& out) -> bool {
        BilayerVec y = map.apply_uniform(x);
        if (std::abs(y[0]) < 1e-300) return false;
        BilayerVec target = x;
        apply_flip(target, cycle);
        for (int o = 1; o < 16; ++o) out[o - 1] = y[o] / y[0] - target[o];
        return true;
    };

    std::vector<std::optional<BilayerVec>> found(starts);
#ifdef AKLT_HAVE_OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
    for (int s = 0; s < starts; ++s) {
        std::uint64_t mix =
            static_cast<std::uint64_t>(seed) * 0x9E3779B97F4A7C15ull +
            static_cast<std::uint64_t>(s + 1) * 0x94D049BB133111EBull;
        std::mt19937_64 eng(mix);
        std::uniform_real_distribution<double> u(-0.9, 0.9);
        BilayerVec x{};
        x[0] = 1;
        for (int o = 1; o < 16; ++o) x[o] = u(eng);

        Eigen::VectorXd res(15), rn(15);
        if (!residual(x, res)) continue;
        double r = res.lpNorm<Eigen::Infinity>();
        bool dead = false;
        for (int iter = 0; iter < 150 && r >= 1e-13 && !dead; ++iter) {
            Eigen::MatrixXd jac(15, 15);
            const double h = 1e-7;
            for (int v = 1; v < 16; ++v) {
                BilayerVec xp = x;
                xp[v] += h;
                Eigen::VectorXd rp(15);
                if (!residual(xp, rp)) {
                    dead = true;
                    break;
                }
                jac.col(v - 1) = (rp - res) / h;
            }
            if (dead) break;
            Eigen::VectorXd step = jac.partialPivLu().solve(-res);
            if (!step.allFinite()) break;
            double lam = 1;
            bool improved = false;
            for (int hs = 0; hs < 30; ++hs) {
                BilayerVec xn = x;
                for (int o = 1; o < 16; ++o) xn[o] += lam * step[o - 1];
                if (residual(xn, rn) && rn.lpNorm<Eigen::Infinity>() < r) {
                    x = xn;
                    res = rn;
                    r = rn.lpNorm<Eigen::Infinity>();
                    improved = true;
                    break;
                }
                lam *= 0.5;
            }
            if (!improved) break;
        }
        if (dead || r >= 1e-11) continue;
        double big = 0;
        for (int o = 1; o < 16; ++o) big = std::max(big, std::abs(x[o]));
        if (big > 0.9 + 1e-9) continue;
        found[s] = x;
    }

    std::vector<std::array<double, 15>> out;
    for (int s = 0; s < starts; ++s) {
        if (!found[s]) continue;
        std::array<double, 15> v;
        for (int o = 1; o < 16; ++o) v[o - 1] = (*found[s])[o];
        bool dup = false;
        for (const auto& q : out) {
            double d = 0;
            for (int o = 0; o < 15; ++o) d = std::max(d, std::abs(q[o] - v[o]));
            if (d < 1e-7) {
                dup = true;
                break;
            }
        }
        if (!dup) out.push_back(v);
    }
    std::sort(out.begin(), out.end());
    return out;
}

BilayerVec symmetric_to_full(double x1, double x2, double x3) {
    BilayerVec v{};
    v[0] = 1;
    for (int i = 1; i < 4; ++i) {
        v[i] = x1;
        v[4 * i] = x1;
        for (int j = 1; j < 4; ++j) v[4 * i + j] = i == j ? x3 : x2;
    }
    return v;
}

double min_eigenvalue_4x4(const BilayerVec& x) {
    using cd = std::complex<double>;
    Eigen::Matrix2cd s[4];
    s[0] << 1, 0, 0, 1;
    s[1] << 0, 1, 1, 0;
    s[2] << 0, cd(0, -1), cd(0, 1), 0;
    s[3] << 1, 0, 0, -1;
    Eigen::Matrix4cd m = Eigen::Matrix4cd::Zero();
    for (int l = 0; l < 4; ++l)
        for (int k = 0; k < 4; ++k) {
            if (x[4 * l + k] == 0) continue;
            for (int a = 0; a < 2; ++a)
                for (int b = 0; b < 2; ++b)
                    for (int c = 0; c < 2; ++c)
                        for (int d = 0; d < 2; ++d)
                            m(2 * a + c, 2 * b + d) +=
                                x[4 * l + k] * s[l](a, b) * s[k](c, d);
        }
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> es(m, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

double g1_empirical_contraction(int n_starts, unsigned seed) {
    if (n_starts < 1) throw std::invalid_argument("need at least one start");
    BilayerMap m = BilayerMap::build(1, BilayerBasis::aligned);
    const double x3 = (-4.0 + std::sqrt(19.0)) / 3.0;
    BilayerVec star = symmetric_to_full(0, 0, x3);
    double worst = 0;
    for (int s = 0; s < n_starts; ++s) {
        std::uint64_t mix =
            static_cast<std::uint64_t>(seed) * 0x9E3779B97F4A7C15ull +
            static_cast<std::uint64_t>(s + 1) * 0xD1B54A32D192ED03ull;
        std::mt19937_64 eng(mix);
        std::uniform_real_distribution<double> u(-0.5, 0.5);
        BilayerVec x{};
        x[0] = 1;
        for (int o = 1; o < 16; ++o) x[o] = u(eng);
        double dprev = 0;
        for (int o = 0; o < 16; ++o) dprev = std::max(dprev, std::abs(x[o] - star[o]));
        for (int iter = 0; iter < 200 && dprev > 1e-13; ++iter) {
            auto y = m.apply_normalized(x);
            if (!y) break;
            double d = 0;
            for (int o = 0; o < 16; ++o) d = std::max(d, std::abs((*y)[o] - star[o]));
            if (dprev > 1e-12) worst = std::max(worst, d / dprev);
            x = *y;
            dprev = d;
        }
    }
    return worst;
}

}  // namespace aklt
