// Wall-clock comparison of the OpenMP kernels against their serial reference
// paths. Each row also checks that both paths return identical results.
#include <chrono>
#include <cstdio>
#include <functional>
#include <string>

#ifdef AKLT_HAVE_OPENMP
#include <omp.h>
#endif

#include "aklt/bilayer.hpp"
#include "aklt/cell.hpp"
#include "aklt/oracle.hpp"
#include "aklt/site_transfer.hpp"
#include "aklt/tree.hpp"

using namespace aklt;
using clk = std::chrono::steady_clock;

namespace {

double ms_of(const std::function<void()>& f) {
  auto t0 = clk::now();
  f();
  return std::chrono::duration<double, std::milli>(clk::now() - t0).count();
}

void row(const char* name, double serial_ms, double parallel_ms, bool match) {
  std::printf("%-34s %10.1f %10.1f %8.2fx   %s\n", name, serial_ms, parallel_ms,
              serial_ms / parallel_ms, match ? "identical" : "MISMATCH");
}

}  // namespace

int main() {
#ifdef AKLT_HAVE_OPENMP
  std::printf("threads: %d\n", omp_get_max_threads());
#else
  std::printf("threads: 1 (no OpenMP)\n");
#endif
  std::printf("%-34s %10s %10s %9s\n", "kernel", "serial/ms", "omp/ms", "speedup");

  {
    double ds = 0, dp = 0;
    double ts = ms_of([&] { ds = max_backend_discrepancy(8, false); });
    double tp = ms_of([&] { dp = max_backend_discrepancy(8, true); });
    row("site backends d=8 (all words)", ts, tp, ds == dp);
  }
  {
    CellGraph cell = CellGraph::fig4();
    DiagramClasses a, b;
    double ts = ms_of([&] { a = enumerate_diagrams(cell, false); });
    double tp = ms_of([&] { b = enumerate_diagrams(cell, true); });
    bool ok = a.total() == b.total();
    for (size_t k = 0; ok && k < a.by_k.size(); ++k) {
      if (a.by_k[k].size() != b.by_k[k].size()) ok = false;
      for (size_t i = 0; ok && i < a.by_k[k].size(); ++i)
        if (a.by_k[k][i].edge_mask != b.by_k[k][i].edge_mask) ok = false;
    }
    row("loop diagrams (fig4 cell)", ts, tp, ok);
  }
  {
    FiniteTree tree = FiniteTree::cayley(3, 16);
    auto bnd = BoundaryAssignment::random_psd(tree, 5);
    double es = 0, ep = 0;
    double ts = ms_of([&] { es = contract_expectation(tree, bnd, pauli_at_root(3), false); });
    double tp = ms_of([&] { ep = contract_expectation(tree, bnd, pauli_at_root(3), true); });
    row("tree sweep (131071 nodes)", ts, tp, es == ep);
  }
  {
    SolveReport rs, rp;
    double ts = ms_of([&] { rs = solve_fixed_points(2, CycleKind::period2, 60, 7, false); });
    double tp = ms_of([&] { rp = solve_fixed_points(2, CycleKind::period2, 60, 7, true); });
    bool ok = rs.solutions.size() == rp.solutions.size() && rs.diverged == rp.diverged;
    for (size_t i = 0; ok && i < rs.solutions.size(); ++i)
      for (int j = 0; j < 3; ++j)
        if (rs.solutions[i].x[j] != rp.solutions[i].x[j]) ok = false;
    row("bilayer solve g=2 (60 starts)", ts, tp, ok);
  }
  return 0;
}
