#include "aklt/pauli.hpp"

#include <cmath>
#include <stdexcept>

namespace aklt {

double BlochVector::norm() const { return std::sqrt(x1 * x1 + x2 * x2 + x3 * x3); }

void ProductBoundary::validate() const {
  if (static_cast<int>(signs.size()) != site_count)
    throw std::invalid_argument("boundary signs size must equal site_count");
  for (int s : signs)
    if (s != 1 && s != -1) throw std::invalid_argument("boundary sign must be +1 or -1");
}

double traceless_norm(const HSOperator& op) {
  if (op.arity != 1) throw std::invalid_argument("traceless_norm requires arity 1");
  double s = 0;
  for (const auto& [w, c] : op.coeffs) {
    if (!w.is_identity()) s += c * c;
  }
  return std::sqrt(s);
}

std::vector<std::pair<PauliWord, double>> boundary_expand(const ProductBoundary& b) {
  b.validate();
  const double comp[4] = {1.0, b.x.x1, b.x.x2, b.x.x3};
  std::vector<std::pair<PauliWord, double>> out;
  std::vector<std::pair<PauliWord, double>> cur{{PauliWord(), 1.0}};
  for (int site = 0; site < b.site_count; ++site) {
    out.clear();
    out.reserve(cur.size() * 4);
    for (const auto& [w, c] : cur) {
      for (int l = 0; l < 4; ++l) {
        double f = l == 0 ? 1.0 : b.signs[site] * comp[l];
        if (f == 0.0) continue;
        PauliWord nw = w;
        nw.push_back(l);
        out.emplace_back(nw, c * f);
      }
    }
    std::swap(cur, out);
  }
  return cur;
}

}  // namespace aklt
