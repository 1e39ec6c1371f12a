#pragma once

#include <string_view>
#include <vector>

#include "cmp/constraint.hpp"
#include "cmp/linalg.hpp"
#include "cmp/restricted_solver.hpp"

namespace cmp {

struct CoordinateScore {
  int j = 0;
  double t_tilde = 0.0;  // <r, A_j> / ||A_j||^2
  double t_star = 0.0;   // t_tilde clamped to the feasible interval
  double g_star = 0.0;   // min over the interval of ||r - t A_j||^2
  ExtendedInterval interval;
};

enum class StopReason { ResidualTol, MaxIter, Stall };
std::string_view to_string(StopReason r);

struct PursuitStep {
  int k = 0;
  std::vector<CoordinateScore> scores;  // all N coordinates, evaluated at the previous iterate
  IndexSet ties;                        // minimizers among j outside the previous index set
  int chosen = 0;
  IndexSet j_set;
  Vec x;
  double residual_sq = 0.0;
  bool informative = true;  // false when no candidate lowers the residual
  bool unique = true;       // uniqueness flag of the restricted solve
};

struct PursuitTrace {
  std::vector<PursuitStep> steps;
  StopReason terminated_by = StopReason::MaxIter;
  Vec final_x;
  double final_residual_sq = 0.0;
};

struct PursuitConfig {
  int max_iter = -1;            // < 0: min(m, N)
  double residual_tol = -1.0;   // < 0: 1e-10 * ||y||
  double tie_tol = 1e-9;        // relative to the squared residual
  double stall_tol = 1e-14;     // scaled by (1 + ||y||^2)
  SolverOptions solver{};
};

struct BranchConfig {
  PursuitConfig pursuit{};
  int max_branches = 4096;
};

// One-dimensional coordinate subproblem at x via the three-branch clamp.
CoordinateScore coordinate_score(const Mat& a, const Vec& y, const ConstraintModel& p, const Vec& x, int j);
// All j not in `exclude` with g* <= min g* + tie_tol * scale, ascending. A negative scale
// means 1 + min g*; the pursuit passes the current squared residual, which bounds every g*.
IndexSet select_index(const std::vector<CoordinateScore>& scores, double tie_tol, const IndexSet& exclude = {},
                      double scale = -1.0);

PursuitTrace cmp_run(const Mat& a, const Vec& y, const ConstraintModel& p, const PursuitConfig& config = {});
// Depth-first enumeration of every tie-induced sequence, deduplicated by the
// sequence of index sets. Throws BranchLimit past config.max_branches leaves.
std::vector<PursuitTrace> cmp_run_all_branches(const Mat& a, const Vec& y, const ConstraintModel& p,
                                               const BranchConfig& config = {});

struct RecoveryResult {
  bool support_recovered = false;
  bool vector_recovered = false;
  std::vector<PursuitTrace> traces;
};

RecoveryResult verify_exact_recovery(const Mat& a, const Vec& z, const ConstraintModel& p,
                                     const BranchConfig& config = {});

// Plain orthogonal matching pursuit: argmax |A_j^T r| over j outside the index
// set, lowest index on ties, unconstrained least-squares refit.
std::vector<int> omp_sequence(const Mat& a, const Vec& y, int steps);

}  // namespace cmp
