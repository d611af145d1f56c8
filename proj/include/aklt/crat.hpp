#pragma once

#include "aklt/rational.hpp"

namespace aklt {

// complex number with exact rational parts; enough arithmetic for Pauli-word
// contractions where every phase is a power of i times a sign
struct CRat {
  Rat re{0}, im{0};

  CRat() = default;
  CRat(Rat r) : re(std::move(r)) {}
  CRat(Rat r, Rat i) : re(std::move(r)), im(std::move(i)) {}

  CRat& operator+=(const CRat& o) {
    re += o.re;
    im += o.im;
    return *this;
  }
  friend CRat operator+(CRat a, const CRat& b) { return a += b; }
  friend CRat operator-(const CRat& a, const CRat& b) { return {a.re - b.re, a.im - b.im}; }
  friend CRat operator*(const CRat& a, const CRat& b) {
    return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
  }
  friend CRat operator*(const Rat& s, const CRat& a) { return {s * a.re, s * a.im}; }
  bool is_zero() const { return re == 0 && im == 0; }

  // i^p for p mod 4
  static CRat unit_power(int p) {
    switch (((p % 4) + 4) % 4) {
      case 0: return {Rat(1), Rat(0)};
      case 1: return {Rat(0), Rat(1)};
      case 2: return {Rat(-1), Rat(0)};
      default: return {Rat(0), Rat(-1)};
    }
  }
};

}  // namespace aklt
