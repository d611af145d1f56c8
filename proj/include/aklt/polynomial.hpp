#pragma once

#include <string>
#include <utility>
#include <vector>

#include "aklt/rational.hpp"

namespace aklt {

// dense univariate polynomial with exact rational coefficients, c[i] * t^i
struct RatPoly {
  std::vector<Rat> c;

  RatPoly() = default;
  explicit RatPoly(std::vector<Rat> coeffs) : c(std::move(coeffs)) { trim(); }

  void trim() {
    while (!c.empty() && c.back() == 0) c.pop_back();
  }
  long degree() const { return static_cast<long>(c.size()) - 1; }  // -1 for zero
  Rat coeff(long i) const { return i >= 0 && i < static_cast<long>(c.size()) ? c[i] : Rat(0); }

  Rat eval(const Rat& t) const {
    Rat acc(0);
    for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * t + *it;
    return acc;
  }
  double eval(double t) const {
    double acc = 0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * t + to_double(*it);
    return acc;
  }
  RatPoly derivative() const {
    RatPoly d;
    for (long i = 1; i < static_cast<long>(c.size()); ++i) d.c.push_back(Rat(i) * c[i]);
    d.trim();
    return d;
  }
  bool even_powers_only() const {
    for (size_t i = 1; i < c.size(); i += 2)
      if (c[i] != 0) return false;
    return true;
  }
  bool odd_powers_only() const {
    for (size_t i = 0; i < c.size(); i += 2)
      if (c[i] != 0) return false;
    return true;
  }

  friend bool operator==(const RatPoly& a, const RatPoly& b) { return a.c == b.c; }
  friend RatPoly operator*(const Rat& s, RatPoly p) {
    for (auto& x : p.c) x *= s;
    p.trim();
    return p;
  }

  std::string to_string(const std::string& var = "t") const;

  // exact interpolation through distinct rational nodes
  static RatPoly lagrange(const std::vector<std::pair<Rat, Rat>>& points);
};

}  // namespace aklt
