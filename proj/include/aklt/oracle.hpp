#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "aklt/pauli.hpp"
#include "aklt/transfer_function.hpp"
#include "aklt/tree.hpp"

namespace aklt {

// readout at the root's dangling leg: axis 0 is the identity component
// (always 1 after normalization), 1..3 pick sigma_i; on bilayer trees the
// axis reads the top-layer qubit of the readout pair
struct RootObservable {
  int axis = 3;
};
RootObservable pauli_at_root(int axis);
RootObservable identity_observable();

// one Bloch vector per boundary qubit, ordered like pendant_slots(); bilayer
// trees carry two boundary qubits per pendant pair slot, top before bottom
struct BoundaryAssignment {
  std::vector<BlochVector> y;

  static BoundaryAssignment uniform(const FiniteTree& t, const BlochVector& y);
  // alternates sign with the depth parity of the owning node; on bilayer
  // trees the bottom layer takes the opposite sign of its top
  static BoundaryAssignment neel(const FiniteTree& t, const BlochVector& y);
  static BoundaryAssignment from_product(const FiniteTree& t, const ProductBoundary& b);
  static BoundaryAssignment random_psd(const FiniteTree& t, unsigned seed);
  // every operator 1 + y.sigma must be PSD up to the -1e-12 eigenvalue floor
  void validate(const FiniteTree& t) const;
};
int boundary_qubit_count(const FiniteTree& t);

// leaf-to-root transfer sweep; returns the normalized Pauli coefficient of
// the root readout operator. Messages are renormalized per node, so depth is
// limited only by node count. Subtrees at equal depth are swept in parallel
// when requested; results do not depend on the thread count.
double contract_expectation(const FiniteTree& t, const BoundaryAssignment& b,
                            RootObservable obs, bool parallel = true);

// independent cross-check: explicit state vector over every spin-1/2 of the
// valence-bond network (plus one purification qubit per boundary leg and the
// readout qubit); each pendant purification is weighted by sqrt(1 + y.sigma)
// so the boundary density matrix sits inside the projected network
double dense_expectation(const FiniteTree& t, const BoundaryAssignment& b,
                         RootObservable obs);
// qubits the dense path would allocate; it refuses above 24
std::int64_t dense_qubit_total(const FiniteTree& t);

enum class FamilyKind { cayley, decorated, layered };

// tree generator together with the matching one-dimensional map composition,
// used by scans to compare the tensor sweep against the scalar recursion
struct TreeFamily {
  FamilyKind kind = FamilyKind::cayley;
  int d = 3;
  int g = 0;
  DegreeSequence seq;

  std::string label() const;
  std::string params() const;  // comma-free, safe inside one CSV field
  FiniteTree instantiate(int depth) const;
  // boundary-to-root composition of F maps for the depth-n tree
  double scalar_map(double t, int depth) const;

  static TreeFamily cayley(int d);
  static TreeFamily decorated(int d, int g);
  static TreeFamily layered(DegreeSequence seq);
};

struct ScanRow {
  std::string family, params;
  double t = 0;
  int depth = 0;
  double expectation = 0;       // root sigma_axis under uniform B(t e_axis)
  double scalar_map_value = 0;  // matching scalar composition
};
std::vector<ScanRow> order_parameter_scan(const TreeFamily& fam,
                                          const std::vector<double>& ts,
                                          const std::vector<int>& depths,
                                          int axis = 3, bool parallel = true);
// header row then one line per row; column order fixed
std::string scan_to_csv(const std::vector<ScanRow>& rows);

// finite-depth stand-in for the infinite-volume limit: stop when depths a
// period apart agree within tol (period 2 covers alternating limits)
struct ConvergenceResult {
  double value = 0;
  int depth = 0;
  bool converged = false;
};
ConvergenceResult converge_expectation(const TreeFamily& fam, double t, int axis,
                                       int max_depth, int period = 1,
                                       double tol = 1e-9);

}  // namespace aklt
