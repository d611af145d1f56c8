#pragma once

#include <array>
#include <optional>
#include <vector>

#include "aklt/pauli.hpp"
#include "aklt/rational.hpp"

namespace aklt {

// Pauli-basis matrix element of the single-site transfer map, for an input
// word whose axis counts are (k1,k2,k3). Covered classes: at most one ki odd.
struct TransferCoefficient {
  Rat value;          // never zero for covered classes
  int output_letter;  // 0 = identity, 1..3 = sigma axis
};

// closed form; empty optional means the class is not covered and must be
// resolved by the dense backend
std::optional<TransferCoefficient> closed_form_coefficient(int d, long k1, long k2, long k3);

enum class SiteBackend { closed_form, dense };

// exact Pauli coefficients (identity, s1, s2, s3) of the unital site map
// applied to a single input word of arity d-1; built densely from the
// intertwiners W_k = S * P_k, k = 0..d
std::array<Rat, 4> dense_word_transfer(int d, const PauliWord& w);

// sanity check on the intertwiner family: (2/(d+1)) * sum_k W_k W_k^* = 1
bool intertwiners_unital(int d);

// linear extension over all words of the input; both backends agree to 1e-12
HSOperator apply_site_transfer(int d, const HSOperator& input, SiteBackend backend);

struct BoundaryTraceValue {
  double f;                      // identity component, equals f_d(|x|)
  std::array<double, 3> sigma;   // sigma_i components
};

// identity and sigma components of the site map applied to the uniform
// product boundary B(x); analytic limit (1, 0) at x = 0
BoundaryTraceValue boundary_trace(int d, const BlochVector& x);

// largest |closed_form - dense| coefficient over every word of arity d-1;
// the parallel flag picks the OpenMP kernel, results are identical
double max_backend_discrepancy(int d, bool parallel = false);

// f_d(t) = ((1+t)^d - (1-t)^d)/(2dt) evaluated through its even polynomial
// expansion, which is stable at t = 0
double f_scalar(int d, double t);
double f_scalar_deriv(int d, double t);

// exact coefficients of f_d as a polynomial in t (index = power, size d)
std::vector<Rat> f_poly_coeffs(int d);

}  // namespace aklt
