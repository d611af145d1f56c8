#include "aklt/transfer_function.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "aklt/site_transfer.hpp"
#include "aklt/tree.hpp"

namespace aklt {

double eval_F_rational(int d, double t) {
  // f'_{d+1}(t) = t * g(t^2) with g a polynomial, so the quotient is stable at 0
  double g = 0;
  for (long k = 2; k <= d; k += 2)
    g += to_double(Rat(binomial(d, k), k + 1)) * k * std::pow(t, k - 2);
  return -(t * g) / (d * f_scalar(d, t));
}

double eval_F_coth(int d, double t) {
  if (t == 0.0) throw std::invalid_argument("coth form is singular at t = 0");
  const double a = d * std::atanh(t);
  const double coth = 1.0 / std::tanh(a);
  return -(d * coth - 1.0 / t) / (d + 1);
}

double eval_F(int d, double t) {
  if (d < 2) throw std::invalid_argument("degree must be >= 2");
  if (std::abs(t) > 1.0 + 1e-15) throw std::invalid_argument("|t| must be <= 1");
  if (t == 0.0) return 0.0;
  const double rational = eval_F_rational(d, t);
  if (std::abs(t) >= 1e-4) {
    const double coth = eval_F_coth(d, t);
    if (std::abs(rational - coth) > 1e-12)
      throw std::logic_error("closed forms of F_d disagree beyond 1e-12");
  }
  return rational;
}

FixedPointResult fixed_point(int d) {
  FixedPointResult out;
  const double eps = 1e-9;
  const int grid = 4096;
  auto g = [&](double t) { return eval_F(d, t) + t; };

  // g is convex with g(0) = 0, so the smallest positive root is the single
  // sign change from negative to nonnegative when the slope at 0 is negative
  double prev_t = eps, prev_g = g(eps);
  double lo = 0, hi = 0;
  bool bracketed = false;
  for (int i = 1; i <= grid; ++i) {
    double t = eps + (1.0 - eps) * i / grid;
    double gt = g(t);
    if (prev_g < 0 && gt >= 0) {
      lo = prev_t;
      hi = t;
      bracketed = true;
      break;
    }
    prev_t = t;
    prev_g = gt;
  }
  if (!bracketed) return out;

  out.bracket_lo = lo;
  out.bracket_hi = hi;
  for (int it = 0; it < 200 && (hi - lo) > 1e-13; ++it) {
    double mid = 0.5 * (lo + hi);
    if (g(mid) < 0)
      lo = mid;
    else
      hi = mid;
  }
  double t_star = 0.5 * (lo + hi);
  out.t_star = t_star;
  out.residual = std::abs(g(t_star));
  return out;
}

int DegreeSequence::at(long i) const {
  if (i < 1) throw std::invalid_argument("layer index is 1-based");
  const long p = static_cast<long>(prefix.size());
  if (i <= p) return prefix[i - 1];
  if (tail.empty()) throw std::invalid_argument("finite sequence exhausted");
  return tail[(i - p - 1) % tail.size()];
}

DegreeSequence DegreeSequence::constant(int d) {
  DegreeSequence s;
  s.tail = {d};
  return s;
}

DegreeSequence DegreeSequence::parse(const std::string& text) {
  std::istringstream in(text);
  std::vector<int> entries;
  long repeat = 0;
  std::string line;
  bool saw_repeat = false;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string head;
    if (!(ls >> head)) continue;  // blank line
    if (saw_repeat) throw std::invalid_argument("repeat directive must be the last line");
    if (head == "repeat") {
      if (!(ls >> repeat) || repeat < 1) throw std::invalid_argument("repeat needs a count >= 1");
      saw_repeat = true;
    } else {
      size_t pos = 0;
      int v = std::stoi(head, &pos);
      if (pos != head.size()) throw std::invalid_argument("bad degree entry: " + head);
      if (v < 2) throw std::invalid_argument("degrees must be >= 2");
      entries.push_back(v);
    }
    std::string rest;
    if (ls >> rest) throw std::invalid_argument("one entry per line");
  }
  if (entries.empty()) throw std::invalid_argument("empty degree sequence");
  if (repeat > static_cast<long>(entries.size()))
    throw std::invalid_argument("repeat count exceeds entry count");
  DegreeSequence s;
  s.prefix.assign(entries.begin(), entries.end() - repeat);
  s.tail.assign(entries.end() - repeat, entries.end());
  return s;
}

ComposeTrace compose_sequence(const DegreeSequence& seq, double t0, int n) {
  if (t0 < 0 || t0 > 1) throw std::invalid_argument("t0 must lie in [0,1]");
  if (n < 1) throw std::invalid_argument("need at least one layer");
  ComposeTrace out;
  out.iterates.reserve(n + 1);
  out.iterates.push_back(t0);
  // innermost map is layer n
  for (int k = 1; k <= n; ++k) {
    int d = seq.at(n - k + 1);
    out.iterates.push_back(eval_F(d, out.iterates.back()));
  }

  if (t0 > 0) {
    // bound = (a_n/t0 + 1 + sum_{k<n} a_k)^{-1}, a_k = prod_{i<=k} 3/(d_i-1)
    double a = 1, sum_a = 0;
    for (int k = 1; k <= n; ++k) {
      a *= 3.0 / (seq.at(k) - 1);
      if (k < n) sum_a += a;
    }
    out.lower_bound = 1.0 / (a / t0 + 1.0 + sum_a);
    if (std::abs(out.final_value()) < out.lower_bound * (1 - 1e-9) - 1e-15)
      throw std::logic_error("composition iterate fell below its analytic lower bound");
  }
  return out;
}

GrowthStats classify_growth(const DegreeSequence& seq, double band) {
  GrowthStats out;
  std::vector<int> entries = seq.prefix;
  entries.insert(entries.end(), seq.tail.begin(), seq.tail.end());
  double a = 1;
  for (int d : entries) {
    a *= 3.0 / (d - 1);
    out.partial_products.push_back(a);
  }

  const std::vector<int>& driver = seq.tail.empty() ? seq.prefix : seq.tail;
  double mean = 0;
  for (int d : driver) mean += std::log((d - 1) / 3.0);
  mean /= driver.size();
  out.ln_mu = mean;
  out.mu = std::exp(mean);

  if (seq.tail.empty() && std::abs(mean) <= band) {
    out.classification = Growth::inconclusive;
  } else {
    out.classification = mean > 0 ? Growth::ordered : Growth::unique;
  }
  return out;
}

LeafPathBound leafpath_bound(const FiniteTree& tree, double C, double mu) {
  if (C <= 0 || mu <= 1) throw std::invalid_argument("need C > 0 and mu > 1");
  tree.validate();
  LeafPathBound out;
  out.satisfied = true;
  // prod over the path root..v of (deg-1)/3, compared against C mu^(depth+1)
  std::vector<double> prod(tree.node_count(), 0.0);
  for (int v = 0; v < tree.node_count(); ++v) {
    double up = tree.parent[v] < 0 ? 1.0 : prod[tree.parent[v]];
    prod[v] = up * (tree.site_degree[v] - 1) / 3.0;
    double target = C * std::pow(mu, tree.depth[v] + 1);
    if (prod[v] < target * (1 - 1e-12)) out.satisfied = false;
  }
  out.lower_bound = 1.0 / ((1.0 / C) / (mu - 1.0) + 1.0);
  return out;
}

}  // namespace aklt
