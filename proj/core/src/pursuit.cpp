#include "cmp/pursuit.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "cmp/error.hpp"
#include "cmp/oracle.hpp"

namespace cmp {

std::string_view to_string(StopReason r) {
  switch (r) {
    case StopReason::ResidualTol: return "ResidualTol";
    case StopReason::MaxIter: return "MaxIter";
    case StopReason::Stall: return "Stall";
  }
  return "Unknown";
}

CoordinateScore coordinate_score(const Mat& a, const Vec& y, const ConstraintModel& p, const Vec& x, int j) {
  const Vec r = y - a * x;
  const double nj = a.col(j).squaredNorm();
  if (nj == 0.0) fail(ErrorCode::ZeroColumn, "column " + std::to_string(j + 1) + " is zero");
  CoordinateScore s;
  s.j = j;
  s.interval = interval_at(p, x, j);
  s.t_tilde = r.dot(a.col(j)) / nj;
  s.t_star = s.interval.clamp(s.t_tilde);
  // ||r - t A_j||^2 = ||r||^2 - ||A_j||^2 (2 t t_tilde - t^2), evaluated at the clamped t.
  s.g_star = r.squaredNorm() - nj * (2.0 * s.t_star * s.t_tilde - s.t_star * s.t_star);
  return s;
}

IndexSet select_index(const std::vector<CoordinateScore>& scores, double tie_tol, const IndexSet& exclude,
                      double scale) {
  double best = 0.0;
  bool any = false;
  for (const CoordinateScore& s : scores) {
    if (set_contains(exclude, s.j)) continue;
    if (!any || s.g_star < best) best = s.g_star;
    any = true;
  }
  IndexSet out;
  if (!any) return out;
  const double cut = best + tie_tol * (scale < 0.0 ? 1.0 + std::abs(best) : scale);
  for (const CoordinateScore& s : scores)
    if (!set_contains(exclude, s.j) && s.g_star <= cut) out.push_back(s.j);
  std::sort(out.begin(), out.end());
  return out;
}

namespace {

struct Resolved {
  int max_iter;
  double tol_sq;
  double stall;
};

Resolved resolve(const Mat& a, const Vec& y, const PursuitConfig& c) {
  const int mi = c.max_iter >= 0 ? c.max_iter : static_cast<int>(std::min(a.rows(), a.cols()));
  const double tol = c.residual_tol >= 0 ? c.residual_tol : 1e-10 * y.norm();
  return Resolved{mi, tol * tol, c.stall_tol * (1.0 + y.squaredNorm())};
}

std::vector<CoordinateScore> all_scores(const Mat& a, const Vec& y, const ConstraintModel& p, const Vec& x) {
  std::vector<CoordinateScore> out;
  out.reserve(static_cast<std::size_t>(a.cols()));
  for (int j = 0; j < a.cols(); ++j) out.push_back(coordinate_score(a, y, p, x, j));
  return out;
}

bool is_informative(const std::vector<CoordinateScore>& scores, const IndexSet& ties, double r2) {
  for (const CoordinateScore& s : scores)
    if (s.j == ties.front()) return s.g_star < r2 - 1e-14 * (1.0 + r2);
  return false;
}

struct BranchState {
  const Mat& a;
  const Vec& y;
  const ConstraintModel& p;
  const BranchConfig& cfg;
  Resolved res;
  std::vector<PursuitTrace> out;
  std::set<std::vector<IndexSet>> seen;
};

void finish(BranchState& st, PursuitTrace trace, StopReason why, const Vec& x, double r2) {
  trace.terminated_by = why;
  trace.final_x = x;
  trace.final_residual_sq = r2;
  std::vector<IndexSet> key;
  for (const PursuitStep& s : trace.steps) key.push_back(s.j_set);
  if (!st.seen.insert(key).second) return;
  if (static_cast<int>(st.out.size()) >= st.cfg.max_branches)
    fail(ErrorCode::BranchLimit, "branch enumeration exceeded max_branches");
  st.out.push_back(std::move(trace));
}

void dfs(BranchState& st, PursuitTrace& trace, const Vec& x, const IndexSet& j, double r2) {
  const int k = static_cast<int>(trace.steps.size());
  if (r2 <= st.res.tol_sq) return finish(st, trace, StopReason::ResidualTol, x, r2);
  if (k >= st.res.max_iter) return finish(st, trace, StopReason::MaxIter, x, r2);
  const std::vector<CoordinateScore> scores = all_scores(st.a, st.y, st.p, x);
  const IndexSet ties = select_index(scores, st.cfg.pursuit.tie_tol, j, r2);
  if (ties.empty()) return finish(st, trace, StopReason::Stall, x, r2);
  for (int c : ties) {
    const IndexSet jn = set_union(j, IndexSet{c});
    const RestrictedSolution sol = solve_restricted(st.a, st.y, st.p, jn, st.cfg.pursuit.solver);
    std::vector<Vec> options{sol.x};
    if (st.p.is_nonconvex_demo() && !sol.unique) {
      const oracle::NonconvexSolution ns = oracle::nonconvex_line7_solve(st.a, st.y, jn);
      options = {ns.p, ns.q};
    }
    for (const Vec& xn : options) {
      PursuitStep step;
      step.k = k + 1;
      step.scores = scores;
      step.ties = ties;
      step.chosen = c;
      step.j_set = jn;
      step.x = xn;
      step.residual_sq = (st.a * xn - st.y).squaredNorm();
      step.informative = is_informative(scores, IndexSet{c}, r2);
      step.unique = sol.unique;
      trace.steps.push_back(step);
      if (step.residual_sq > st.res.tol_sq && r2 - step.residual_sq <= st.res.stall)
        finish(st, trace, StopReason::Stall, xn, step.residual_sq);
      else
        dfs(st, trace, xn, jn, step.residual_sq);
      trace.steps.pop_back();
    }
  }
}

}  // namespace

PursuitTrace cmp_run(const Mat& a, const Vec& y, const ConstraintModel& p, const PursuitConfig& config) {
  if (p.dimension() != a.cols()) fail(ErrorCode::InvalidArgument, "constraint dimension does not match the matrix");
  const Resolved res = resolve(a, y, config);
  PursuitTrace trace;
  Vec x = Vec::Zero(a.cols());
  IndexSet j;
  double r2 = y.squaredNorm();
  trace.terminated_by = StopReason::MaxIter;
  if (r2 <= res.tol_sq) {
    trace.terminated_by = StopReason::ResidualTol;
  } else {
    for (int k = 1; k <= res.max_iter; ++k) {
      PursuitStep step;
      step.k = k;
      step.scores = all_scores(a, y, p, x);
      step.ties = select_index(step.scores, config.tie_tol, j, r2);
      if (step.ties.empty()) {
        trace.terminated_by = StopReason::Stall;
        break;
      }
      step.chosen = step.ties.front();
      step.informative = is_informative(step.scores, step.ties, r2);
      j = set_union(j, IndexSet{step.chosen});
      const RestrictedSolution sol = solve_restricted(a, y, p, j, config.solver);
      step.j_set = j;
      step.x = sol.x;
      step.residual_sq = sol.objective;
      step.unique = sol.unique;
      const double prev = r2;
      x = sol.x;
      r2 = sol.objective;
      trace.steps.push_back(std::move(step));
      if (r2 <= res.tol_sq) {
        trace.terminated_by = StopReason::ResidualTol;
        break;
      }
      if (prev - r2 <= res.stall) {
        trace.terminated_by = StopReason::Stall;
        break;
      }
    }
  }
  trace.final_x = x;
  trace.final_residual_sq = r2;
  return trace;
}

std::vector<PursuitTrace> cmp_run_all_branches(const Mat& a, const Vec& y, const ConstraintModel& p,
                                               const BranchConfig& config) {
  if (p.dimension() != a.cols()) fail(ErrorCode::InvalidArgument, "constraint dimension does not match the matrix");
  BranchState st{a, y, p, config, resolve(a, y, config.pursuit), {}, {}};
  PursuitTrace trace;
  dfs(st, trace, Vec::Zero(a.cols()), IndexSet{}, y.squaredNorm());
  return std::move(st.out);
}

RecoveryResult verify_exact_recovery(const Mat& a, const Vec& z, const ConstraintModel& p,
                                     const BranchConfig& config) {
  const Vec y = a * z;
  const IndexSet s = support(z);
  BranchConfig cfg = config;
  cfg.pursuit.max_iter = static_cast<int>(s.size());
  RecoveryResult out;
  out.traces = cmp_run_all_branches(a, y, p, cfg);
  out.support_recovered = true;
  out.vector_recovered = true;
  for (const PursuitTrace& t : out.traces) {
    const bool reached = t.steps.size() == s.size() && (s.empty() || t.steps.back().j_set == s);
    if (!reached) {
      out.support_recovered = false;
      out.vector_recovered = false;
      continue;
    }
    const bool unique = s.empty() || t.steps.back().unique;
    if (!unique || (t.final_x - z).lpNorm<Eigen::Infinity>() > 1e-7) out.vector_recovered = false;
  }
  return out;
}

std::vector<int> omp_sequence(const Mat& a, const Vec& y, int steps) {
  std::vector<int> seq;
  IndexSet j;
  Vec r = y;
  for (int k = 0; k < steps; ++k) {
    int best = -1;
    double best_v = -1.0;
    for (int c = 0; c < a.cols(); ++c) {
      if (set_contains(j, c)) continue;
      const double v = std::abs(a.col(c).dot(r)) / a.col(c).norm();
      if (v > best_v) {
        best_v = v;
        best = c;
      }
    }
    if (best < 0) break;
    seq.push_back(best);
    j = set_union(j, IndexSet{best});
    const Mat aj = columns(a, j);
    r = y - aj * aj.colPivHouseholderQr().solve(y);
  }
  return seq;
}

}  // namespace cmp
