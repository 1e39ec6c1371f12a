#pragma once

namespace cmp {

// Central tolerance record. Every comparison that feeds a verdict reads from here.
struct NumericPolicy {
  double rank_tol = 1e-10;         // relative threshold on R diagonals
  double compare_tol = 1e-9;       // generic comparison / membership tolerance
  double convergence_tol = 1e-12;  // iterative kernels (Jacobi)
  double boundary_tol = 1e-9;      // margins inside [-tol, tol] are Boundary
  double tie_tol = 1e-9;           // relative tie tolerance in index selection
  double lp_feasible_below = 1e-11;  // phase-1 optimum at or below: feasible
  double lp_infeasible_above = 1e-9; // phase-1 optimum above: infeasible

  static NumericPolicy strict();
  static NumericPolicy loose();
  // Reads CMP_NUM_POLICY (strict|loose); defaults to strict.
  static NumericPolicy from_env();
};

}  // namespace cmp
