#pragma once

#include <complex>
#include <stdexcept>
#include <vector>

namespace aklt {

using cplx = std::complex<double>;

// Minimal dense complex matrix for oracle-side contractions and tests.
struct CMat {
  int rows = 0, cols = 0;
  std::vector<cplx> a;

  CMat() = default;
  CMat(int r, int c) : rows(r), cols(c), a(static_cast<size_t>(r) * c, cplx(0)) {}
  cplx& operator()(int i, int j) { return a[static_cast<size_t>(i) * cols + j]; }
  const cplx& operator()(int i, int j) const { return a[static_cast<size_t>(i) * cols + j]; }

  static CMat identity(int n) {
    CMat m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = 1;
    return m;
  }
};

inline CMat pauli_matrix(int letter) {
  CMat m(2, 2);
  switch (letter) {
    case 0: m(0, 0) = 1; m(1, 1) = 1; break;
    case 1: m(0, 1) = 1; m(1, 0) = 1; break;
    case 2: m(0, 1) = cplx(0, -1); m(1, 0) = cplx(0, 1); break;
    case 3: m(0, 0) = 1; m(1, 1) = -1; break;
    default: throw std::invalid_argument("pauli letter out of range");
  }
  return m;
}

inline CMat kron(const CMat& x, const CMat& y) {
  CMat m(x.rows * y.rows, x.cols * y.cols);
  for (int i = 0; i < x.rows; ++i)
    for (int j = 0; j < x.cols; ++j) {
      const cplx v = x(i, j);
      if (v == cplx(0)) continue;
      for (int p = 0; p < y.rows; ++p)
        for (int q = 0; q < y.cols; ++q)
          m(i * y.rows + p, j * y.cols + q) = v * y(p, q);
    }
  return m;
}

inline CMat matmul(const CMat& x, const CMat& y) {
  if (x.cols != y.rows) throw std::invalid_argument("matmul shape mismatch");
  CMat m(x.rows, y.cols);
  for (int i = 0; i < x.rows; ++i)
    for (int k = 0; k < x.cols; ++k) {
      const cplx v = x(i, k);
      if (v == cplx(0)) continue;
      for (int j = 0; j < y.cols; ++j) m(i, j) += v * y(k, j);
    }
  return m;
}

inline CMat adjoint(const CMat& x) {
  CMat m(x.cols, x.rows);
  for (int i = 0; i < x.rows; ++i)
    for (int j = 0; j < x.cols; ++j) m(j, i) = std::conj(x(i, j));
  return m;
}

inline CMat operator+(const CMat& x, const CMat& y) {
  if (x.rows != y.rows || x.cols != y.cols) throw std::invalid_argument("add shape mismatch");
  CMat m = x;
  for (size_t i = 0; i < m.a.size(); ++i) m.a[i] += y.a[i];
  return m;
}

inline CMat operator*(cplx s, const CMat& x) {
  CMat m = x;
  for (auto& v : m.a) v *= s;
  return m;
}

inline cplx trace(const CMat& x) {
  cplx t = 0;
  for (int i = 0; i < x.rows && i < x.cols; ++i) t += x(i, i);
  return t;
}

}  // namespace aklt
