#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <vector>

namespace aklt {

// Word over {0,1,2,3}: 0 = identity, 1..3 = sigma_1..sigma_3. Packed two bits
// per letter; arity up to 31.
class PauliWord {
 public:
  PauliWord() : arity_(0), bits_(0) {}
  explicit PauliWord(const std::vector<int>& letters) : arity_(0), bits_(0) {
    for (int l : letters) push_back(l);
  }
  static PauliWord identity(int arity) {
    PauliWord w;
    w.arity_ = arity;
    return w;
  }

  void push_back(int letter) {
    if (letter < 0 || letter > 3) throw std::invalid_argument("pauli letter out of range");
    if (arity_ >= 31) throw std::invalid_argument("pauli word arity cap exceeded");
    bits_ |= static_cast<std::uint64_t>(letter) << (2 * arity_);
    ++arity_;
  }
  int letter(int i) const { return static_cast<int>((bits_ >> (2 * i)) & 3u); }
  int arity() const { return arity_; }
  bool is_identity() const { return bits_ == 0; }
  int weight() const {  // non-identity letter count
    int w = 0;
    for (int i = 0; i < arity_; ++i) w += letter(i) != 0;
    return w;
  }
  // occupation counts (k1,k2,k3)
  std::array<int, 3> axis_counts() const {
    std::array<int, 3> k{0, 0, 0};
    for (int i = 0; i < arity_; ++i) {
      int l = letter(i);
      if (l) ++k[l - 1];
    }
    return k;
  }
  std::uint64_t packed() const { return bits_; }
  static PauliWord from_packed(std::uint64_t bits, int arity) {
    PauliWord w;
    w.bits_ = bits;
    w.arity_ = arity;
    return w;
  }

  auto operator<=>(const PauliWord&) const = default;

 private:
  int arity_;
  std::uint64_t bits_;
};

// Hermitian operator on (C^2)^{otimes arity}, sparse over Pauli words with
// real coefficients.
struct HSOperator {
  int arity = 0;
  std::map<PauliWord, double> coeffs;

  static HSOperator identity(int arity) {
    HSOperator op;
    op.arity = arity;
    op.coeffs[PauliWord::identity(arity)] = 1.0;
    return op;
  }
  void add(const PauliWord& w, double c) {
    if (w.arity() != arity) throw std::invalid_argument("word arity mismatch");
    coeffs[w] += c;
  }
  double coeff(const PauliWord& w) const {
    auto it = coeffs.find(w);
    return it == coeffs.end() ? 0.0 : it->second;
  }
};

struct BlochVector {
  double x1 = 0, x2 = 0, x3 = 0;
  double norm() const;
  double operator[](int i) const { return i == 0 ? x1 : (i == 1 ? x2 : x3); }
};

// B(x) = prod over sites of (1 + sign_i * x.sigma); signs carry the bipartite
// character of the boundary.
struct ProductBoundary {
  BlochVector x;
  int site_count = 0;
  std::vector<int> signs;  // each +1 or -1, size == site_count

  static ProductBoundary uniform(const BlochVector& x, int m) {
    return ProductBoundary{x, m, std::vector<int>(m, +1)};
  }
  void validate() const;
};

// Euclidean norm of the (sigma_1,sigma_2,sigma_3) coefficients of an arity-1
// operator; equals the spectral norm of its traceless part.
double traceless_norm(const HSOperator& op);

// Full expansion of a ProductBoundary into Pauli words; summing the returned
// terms reconstructs B(x) exactly.
std::vector<std::pair<PauliWord, double>> boundary_expand(const ProductBoundary& b);

}  // namespace aklt
