#pragma once

#include <optional>
#include <string>
#include <vector>

namespace aklt {

struct FiniteTree;

// F_d(t), the scalar transfer of the site boundary trace. Both closed forms
// are evaluated and cross-checked for |t| >= 1e-4; below that only the
// rational form is stable. Throws on |t| > 1 and on form disagreement.
double eval_F(int d, double t);
double eval_F_rational(int d, double t);  // -f'_{d+1}(t) / (d f_d(t))
double eval_F_coth(int d, double t);      // -(1/(d+1)) (d coth(d atanh t) - 1/t)

struct FixedPointResult {
  std::optional<double> t_star;  // smallest positive solution of F_d(t) = -t
  double residual = 0;           // |F_d(t*) + t*|
  double bracket_lo = 0, bracket_hi = 0;
};
FixedPointResult fixed_point(int d);

// finite prefix plus optional periodic tail; layer index is 1-based and the
// first layer is the outermost map of a composition
struct DegreeSequence {
  std::vector<int> prefix;
  std::vector<int> tail;

  int at(long i) const;  // 1-based
  bool finite() const { return tail.empty(); }
  static DegreeSequence constant(int d);
  // one integer per line; optional final line "repeat k" marks the last k
  // entries as the periodic tail
  static DegreeSequence parse(const std::string& text);
};

struct ComposeTrace {
  // iterates[k] = F applied k times starting from the innermost layer n;
  // iterates[0] = t0, iterates[n] = F_{d_1} o ... o F_{d_n} (t0)
  std::vector<double> iterates;
  double lower_bound = 0;  // analytic magnitude bound for the full composition
  double final_value() const { return iterates.back(); }
};
ComposeTrace compose_sequence(const DegreeSequence& seq, double t0, int n);

enum class Growth { ordered, unique, inconclusive };

struct GrowthStats {
  std::vector<double> partial_products;  // a_n = prod_{i<=n} 3/(d_i - 1)
  double ln_mu = 0;
  double mu = 1;
  Growth classification = Growth::inconclusive;
};
// periodic tails decide exactly; bare prefixes are inconclusive when the
// running mean of ln((d_i-1)/3) sits within the band around 0
GrowthStats classify_growth(const DegreeSequence& seq, double band = 1e-3);

struct LeafPathBound {
  bool satisfied = false;
  double lower_bound = 0;
};
// checks prod (deg-1)/3 >= C mu^n along every root-to-node path; when
// satisfied the uniform composition bound ((1/C) / (mu - 1) + 1)^{-1} applies
LeafPathBound leafpath_bound(const FiniteTree& tree, double C, double mu);

}  // namespace aklt
