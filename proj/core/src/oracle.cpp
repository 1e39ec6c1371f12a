#include "cmp/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cmp/error.hpp"
#include "cmp/restricted_solver.hpp"

namespace cmp::oracle {

namespace {

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// Calls f on every k-subset of {0..n-1} in lexicographic order.
template <class F>
void for_each_subset(int n, int k, F&& f) {
  IndexSet s(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) s[static_cast<std::size_t>(i)] = i;
  while (true) {
    f(s);
    int i = k - 1;
    while (i >= 0 && s[static_cast<std::size_t>(i)] == n - k + i) --i;
    if (i < 0) return;
    ++s[static_cast<std::size_t>(i)];
    for (int t = i + 1; t < k; ++t) s[static_cast<std::size_t>(t)] = s[static_cast<std::size_t>(t - 1)] + 1;
  }
}

bool in_demo(double x1, double x2, double tol) {
  const bool curve = x1 >= -tol && x2 >= -tol && x2 <= 1.0 + tol && x2 * x2 >= x1 - tol;
  const bool segment = std::abs(x2) <= tol && x1 >= -tol && x1 <= 1.0 + tol;
  return curve || segment;
}

struct Candidate {
  Vec x;
  double f;
};

// Minimizes t -> ||c + t d - y||^2 over t in [lo, hi].
double clamp_ls(const Vec& c, const Vec& d, const Vec& y, double lo, double hi) {
  const double dd = d.squaredNorm();
  if (dd == 0.0) return lo;
  return std::clamp(d.dot(y - c) / dd, lo, hi);
}

// Minimizes a smooth function on [lo, hi] by a 401-point scan and golden-section refinement.
template <class F>
double scan_min(F&& f, double lo, double hi) {
  const int n = 400;
  const double h = (hi - lo) / n;
  int best = 0;
  double best_v = f(lo);
  for (int i = 1; i <= n; ++i) {
    const double v = f(lo + i * h);
    if (v < best_v) {
      best_v = v;
      best = i;
    }
  }
  double a = std::max(lo, lo + (best - 1) * h), b = std::min(hi, lo + (best + 1) * h);
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - gr * (b - a), d = a + gr * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > 1e-13) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - gr * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + gr * (b - a);
      fd = f(d);
    }
  }
  const double mid = 0.5 * (a + b);
  return f(mid) <= best_v ? mid : lo + best * h;
}

}  // namespace

L0Solution l0_brute(const Mat& a, const Vec& y, const ConstraintModel& p, int k_max) {
  const int n = static_cast<int>(a.cols());
  if (k_max < 0) fail(ErrorCode::InvalidArgument, "k_max must be nonnegative");
  k_max = std::min(k_max, n);
  double budget = 0.0;
  for (int k = 0; k <= k_max; ++k) budget += binomial(n, k);
  if (budget > 1e6) fail(ErrorCode::BudgetExceeded, "sum of C(N, k) exceeds 1e6");
  const double tol = 1e-8 * (1.0 + y.norm());
  L0Solution out;
  for (int k = 0; k <= k_max; ++k) {
    for_each_subset(n, k, [&](const IndexSet& s) {
      const RestrictedSolution sol = solve_restricted(a, y, p, s);
      ++out.subproblems_solved;
      if ((a * sol.x - y).norm() <= tol && contains(p, sol.x)) {
        out.supports.push_back(s);
        out.representatives.push_back(sol.x);
      }
    });
    if (!out.supports.empty()) {
      out.cardinality = k;
      return out;
    }
  }
  fail(ErrorCode::NoSolutionWithinKmax, "no feasible support of size <= k_max");
}

NonconvexSolution nonconvex_line7_solve(const Mat& a, const Vec& y, const IndexSet& j) {
  if (a.cols() != 2) fail(ErrorCode::InvalidArgument, "the nonconvex demo set is two-dimensional");
  NonconvexSolution out;
  out.p = Vec::Zero(2);
  out.q = Vec::Zero(2);
  const auto phi = [&](double x1, double x2) {
    return (a.col(0) * x1 + a.col(1) * x2 - y).squaredNorm();
  };
  if (j.empty()) {
    out.objective = y.squaredNorm();
    return out;
  }
  const Vec zero = Vec::Zero(a.rows());
  if (j.size() == 1) {
    // Both coordinate axes meet the set in [0, 1].
    const int c = j[0];
    const double t = clamp_ls(zero, a.col(c), y, 0.0, 1.0);
    out.p(c) = t;
    out.q = out.p;
    out.objective = phi(out.p(0), out.p(1));
    return out;
  }

  // Candidates: interior stationary point and the minimizers on every boundary piece.
  std::vector<Candidate> cands;
  const auto push = [&](double x1, double x2) {
    if (in_demo(x1, x2, 1e-12)) {
      Vec x(2);
      x << x1, x2;
      cands.push_back({x, phi(x1, x2)});
    }
  };
  if (full_column_rank(a)) {
    const Vec ls = least_squares(a, y);
    push(ls(0), ls(1));
  }
  push(0.0, clamp_ls(zero, a.col(1), y, 0.0, 1.0));             // x1 = 0
  push(clamp_ls(a.col(1), a.col(0), y, 0.0, 1.0), 1.0);         // x2 = 1
  push(clamp_ls(zero, a.col(0), y, 0.0, 1.0), 0.0);             // segment x2 = 0
  const double s = scan_min([&](double t) { return phi(t * t, t); }, 0.0, 1.0);  // x1 = x2^2
  push(s * s, s);

  // Grid cross-check over [0, 1.5]^2.
  const int g = 400;
  for (int i = 0; i < g; ++i)
    for (int k = 0; k < g; ++k) {
      const double x1 = 1.5 * i / (g - 1), x2 = 1.5 * k / (g - 1);
      if (in_demo(x1, x2, 0.0)) {
        const double v = phi(x1, x2);
        if (cands.empty() || v < cands.front().f - 1e-12) {
          Vec x(2);
          x << x1, x2;
          cands.insert(cands.begin(), {x, v});
        }
      }
    }
  const auto best = std::min_element(cands.begin(), cands.end(),
                                     [](const Candidate& l, const Candidate& r) { return l.f < r.f; });
  out.p = best->x;
  out.q = best->x;
  out.objective = best->f;

  // Rank-one data: the objective is constant along the null direction, so the
  // optimal set is the piece of that line through the minimizer inside the set.
  Eigen::JacobiSVD<Mat> svd(a, Eigen::ComputeFullV);
  const Vec sv = svd.singularValues();
  const bool rank_one = sv.size() < 2 || sv(1) <= 1e-12 * std::max(sv(0), 1e-300);
  if (rank_one) {
    Vec dir = svd.matrixV().col(1);
    const auto member_at = [&](double t) {
      const Vec x = best->x + t * dir;
      return in_demo(x(0), x(1), 1e-12);
    };
    const auto edge = [&](double sign) {
      // March outward in small steps, then bisect the membership boundary to 1e-8.
      const double step = 1e-3;
      double inside = 0.0;
      while (inside < 3.0 && member_at(sign * (inside + step))) inside += step;
      double lo = inside, hi = inside + step;
      while (hi - lo > 1e-10) {
        const double mid = 0.5 * (lo + hi);
        if (member_at(sign * mid)) lo = mid;
        else hi = mid;
      }
      return Vec(best->x + sign * lo * dir);
    };
    Vec e1 = edge(1.0), e2 = edge(-1.0);
    if ((e1 - e2).norm() > 1e-8) {
      if (e2(1) > e1(1) || (e2(1) == e1(1) && e2(0) > e1(0))) std::swap(e1, e2);
      out.kind = NonconvexSolution::Kind::Segment;
      out.p = e1;
      out.q = e2;
    }
  }
  return out;
}

}  // namespace cmp::oracle
