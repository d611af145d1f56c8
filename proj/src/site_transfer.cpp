#include "aklt/site_transfer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>

#include "aklt/crat.hpp"

namespace aklt {

namespace {

long popcount(unsigned long s) { return __builtin_popcountl(s); }

// action of a Pauli letter on one qubit basis state (bit 1 = up):
// returns whether the bit flips and the amplitude as a unit power of i times a sign
struct LetterAction {
  bool flips;
  int ipow;  // amplitude = i^ipow
};

LetterAction letter_action(int letter, int bit) {
  switch (letter) {
    case 0: return {false, 0};
    case 1: return {true, 0};
    case 2: return {true, bit ? 1 : 3};   // s2: up -> i down, down -> -i up
    default: return {false, bit ? 0 : 2}; // s3: up -> +, down -> -
  }
}

// <w_a| sigma_w |w_b> with w_k the unnormalized symmetric sum of strings with
// k up bits on arity(w) qubits
CRat symmetric_matrix_element(const PauliWord& w, long a, long b) {
  const int m = w.arity();
  if (a < 0 || a > m || b < 0 || b > m) return CRat{};
  unsigned long flip_mask = 0;
  for (int q = 0; q < m; ++q) {
    int l = w.letter(q);
    if (l == 1 || l == 2) flip_mask |= (1ul << q);
  }
  CRat acc;
  for (unsigned long s = 0; s < (1ul << m); ++s) {
    if (popcount(s) != b) continue;
    if (popcount(s ^ flip_mask) != a) continue;
    int ipow = 0;
    for (int q = 0; q < m; ++q) {
      ipow += letter_action(w.letter(q), (s >> q) & 1).ipow;
    }
    acc += CRat::unit_power(ipow);
  }
  return acc;
}

}  // namespace

std::optional<TransferCoefficient> closed_form_coefficient(int d, long k1, long k2, long k3) {
  if (d < 2) throw std::invalid_argument("site degree must be >= 2");
  if (k1 < 0 || k2 < 0 || k3 < 0 || k1 + k2 + k3 > d - 1)
    throw std::invalid_argument("axis counts must satisfy k1+k2+k3 <= d-1");
  const long karr[3] = {k1, k2, k3};
  int odd_axis = -1;
  int odd_count = 0;
  for (int i = 0; i < 3; ++i) {
    if (karr[i] % 2 != 0) {
      ++odd_count;
      odd_axis = i;
    }
  }
  if (odd_count >= 2) return std::nullopt;

  // promote the odd index by one; the resulting sign is one factor of -1
  long p1 = k1, p2 = k2, p3 = k3;
  Rat sign(1);
  if (odd_count == 1) {
    if (odd_axis == 0) ++p1;
    if (odd_axis == 1) ++p2;
    if (odd_axis == 2) ++p3;
    sign = Rat(-1);
  }
  const long k = p1 + p2 + p3;
  Rat value = sign * Rat(1, k + 1) * Rat(multinomial({p1 / 2, p2 / 2, p3 / 2}), 1) /
              Rat(multinomial({p1, p2, p3}), 1);
  return TransferCoefficient{value, odd_count == 0 ? 0 : odd_axis + 1};
}

std::array<Rat, 4> dense_word_transfer(int d, const PauliWord& w) {
  if (w.arity() != d - 1) throw std::invalid_argument("word arity must equal d-1");

  // A = sum_k (1/C(d,k)) * [[M(k-1,k-1), M(k-1,k)], [M(k,k-1), M(k,k)]]
  std::map<std::pair<long, long>, CRat> cache;
  auto elem = [&](long a, long b) {
    auto it = cache.find({a, b});
    if (it != cache.end()) return it->second;
    CRat v = symmetric_matrix_element(w, a, b);
    cache.emplace(std::make_pair(a, b), v);
    return v;
  };

  CRat A[2][2];
  for (long k = 0; k <= d; ++k) {
    Rat inv_c = Rat(1) / Rat(binomial(d, k), 1);
    A[0][0] += inv_c * elem(k - 1, k - 1);
    A[0][1] += inv_c * elem(k - 1, k);
    A[1][0] += inv_c * elem(k, k - 1);
    A[1][1] += inv_c * elem(k, k);
  }

  // conjugate by S = [[0,1],[-1,0]]: S A S^T = [[A11, -A10], [-A01, A00]]
  CRat B00 = A[1][1], B01 = Rat(-1) * A[1][0], B10 = Rat(-1) * A[0][1], B11 = A[0][0];

  const Rat scale = Rat(2, d + 1);
  CRat c0 = scale * (Rat(1, 2) * (B00 + B11));
  CRat c3 = scale * (Rat(1, 2) * (B00 - B11));
  CRat c1 = scale * (Rat(1, 2) * (B01 + B10));
  CRat diff = B10 - B01;  // c2 = -i (B10 - B01)/2
  CRat c2 = scale * CRat(diff.im / 2, -diff.re / 2);

  if (c0.im != 0 || c1.im != 0 || c2.im != 0 || c3.im != 0)
    throw std::logic_error("site transfer of a Pauli word must have real coefficients");
  return {c0.re, c1.re, c2.re, c3.re};
}

bool intertwiners_unital(int d) {
  PauliWord id;
  for (int i = 0; i < d - 1; ++i) id.push_back(0);
  auto c = dense_word_transfer(d, id);
  return c[0] == 1 && c[1] == 0 && c[2] == 0 && c[3] == 0;
}

HSOperator apply_site_transfer(int d, const HSOperator& input, SiteBackend backend) {
  if (input.arity != d - 1) throw std::invalid_argument("input arity must equal d-1");
  HSOperator out;
  out.arity = 1;
  auto add_letter = [&](int letter, double v) {
    if (v == 0.0) return;
    PauliWord w;
    w.push_back(letter);
    out.add(w, v);
  };
  for (const auto& [word, c] : input.coeffs) {
    if (c == 0.0) continue;
    bool handled = false;
    if (backend == SiteBackend::closed_form) {
      auto [k1, k2, k3] = word.axis_counts();
      if (auto tc = closed_form_coefficient(d, k1, k2, k3)) {
        add_letter(tc->output_letter, c * to_double(tc->value));
        handled = true;
      }
    }
    if (!handled) {
      auto coeffs = dense_word_transfer(d, word);
      for (int l = 0; l < 4; ++l) add_letter(l, c * to_double(coeffs[l]));
    }
  }
  return out;
}

namespace {

double word_discrepancy(int d, std::uint64_t packed) {
  const PauliWord w = PauliWord::from_packed(packed, d - 1);
  auto dense = dense_word_transfer(d, w);
  double out[4] = {0, 0, 0, 0};
  auto [k1, k2, k3] = w.axis_counts();
  if (auto tc = closed_form_coefficient(d, k1, k2, k3)) {
    out[tc->output_letter] = to_double(tc->value);
  } else {
    for (int l = 0; l < 4; ++l) out[l] = to_double(dense[l]);
  }
  double worst = 0;
  for (int l = 0; l < 4; ++l) worst = std::max(worst, std::abs(out[l] - to_double(dense[l])));
  return worst;
}

}  // namespace

double max_backend_discrepancy(int d, bool parallel) {
  const std::int64_t total = std::int64_t(1) << (2 * (d - 1));
  double worst = 0;
  if (parallel) {
#pragma omp parallel for reduction(max : worst) schedule(dynamic, 64)
    for (std::int64_t i = 0; i < total; ++i)
      worst = std::max(worst, word_discrepancy(d, std::uint64_t(i)));
  } else {
    for (std::int64_t i = 0; i < total; ++i)
      worst = std::max(worst, word_discrepancy(d, std::uint64_t(i)));
  }
  return worst;
}

std::vector<Rat> f_poly_coeffs(int d) {
  // f_d(t) = sum over even k <= d-1 of binom(d-1,k)/(k+1) t^k
  std::vector<Rat> c(d, Rat(0));
  for (long k = 0; k <= d - 1; k += 2) c[k] = Rat(binomial(d - 1, k), 1) / Rat(k + 1, 1);
  return c;
}

double f_scalar(int d, double t) {
  double acc = 0, tk = 1;
  for (long k = 0; k <= d - 1; ++k) {
    if (k % 2 == 0) acc += to_double(Rat(binomial(d - 1, k), k + 1)) * tk;
    tk *= t;
  }
  return acc;
}

double f_scalar_deriv(int d, double t) {
  double acc = 0, tk = 1;  // tk = t^(k-1)
  for (long k = 2; k <= d - 1; k += 2) {
    tk = std::pow(t, k - 1);
    acc += to_double(Rat(binomial(d - 1, k), k + 1)) * k * tk;
  }
  return acc;
}

BoundaryTraceValue boundary_trace(int d, const BlochVector& x) {
  const double t = x.norm();
  BoundaryTraceValue out{f_scalar(d, t), {0, 0, 0}};
  // sigma_i = -(x_i/(d t)) f'_{d+1}(t); the ratio f'_{d+1}(t)/t is a
  // polynomial in t^2, so evaluate that directly and stay finite at 0
  double g = 0;
  for (long k = 2; k <= d; k += 2) {
    g += to_double(Rat(binomial(d, k), k + 1)) * k * std::pow(t, k - 2);
  }
  for (int i = 0; i < 3; ++i) out.sigma[i] = -x[i] * g / d;
  return out;
}

}  // namespace aklt
