#include "cmp/restricted_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "cmp/error.hpp"
#include "cmp/oracle.hpp"

namespace cmp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Least squares on a column subset; min-norm when rank deficient.
Vec ls_subset(const Mat& a, const Vec& y, const IndexSet& cols, const NumericPolicy& policy) {
  const Mat sub = columns(a, cols);
  if (full_column_rank(sub, policy)) return least_squares(sub, y, policy);
  return min_norm_least_squares(sub, y);
}

double lambda_max(const Mat& m) {
  const Vec ev = jacobi_eigenvalues(m);
  return ev(ev.size() - 1);
}

Vec box_clamp(const Vec& x, const Vec& lo, const Vec& hi) { return x.cwiseMax(lo).cwiseMin(hi); }

// Orthonormal basis of {x : d^T x = 0}.
Mat nullspace_of_row(const Vec& d) {
  const Eigen::Index n = d.size();
  const Mat dm = d;
  Eigen::HouseholderQR<Mat> qr(dm);
  const Mat q = qr.householderQ() * Mat::Identity(n, n);
  return q.rightCols(n - 1);
}

struct BoxBounds {
  Vec lo, hi;
};

BoxBounds bounds_on(const BoxProduct& b, const IndexSet& j) {
  BoxBounds out{Vec(static_cast<Eigen::Index>(j.size())), Vec(static_cast<Eigen::Index>(j.size()))};
  for (std::size_t k = 0; k < j.size(); ++k) {
    out.lo(static_cast<Eigen::Index>(k)) = b.lower[j[k]].as_double();
    out.hi(static_cast<Eigen::Index>(k)) = b.upper[j[k]].as_double();
  }
  return out;
}

// Cone path: I- columns negated, I0 dropped, free columns projected out, NNLS on the rest.
Vec solve_cone(const Mat& a_j, const Vec& y, const BoxBounds& bb, const NumericPolicy& policy) {
  const Eigen::Index n = a_j.cols();
  IndexSet free_cols, sign_cols;
  std::vector<double> sign(static_cast<std::size_t>(n), 1.0);
  for (Eigen::Index k = 0; k < n; ++k) {
    const bool lo_inf = std::isinf(bb.lo(k)), hi_inf = std::isinf(bb.hi(k));
    if (lo_inf && hi_inf) {
      free_cols.push_back(static_cast<int>(k));
    } else if (hi_inf) {
      sign_cols.push_back(static_cast<int>(k));
    } else if (lo_inf) {
      sign_cols.push_back(static_cast<int>(k));
      sign[static_cast<std::size_t>(k)] = -1.0;
    }
  }
  Vec x = Vec::Zero(n);
  Mat a_s = columns(a_j, sign_cols);
  for (std::size_t k = 0; k < sign_cols.size(); ++k)
    a_s.col(static_cast<Eigen::Index>(k)) *= sign[static_cast<std::size_t>(sign_cols[k])];
  if (free_cols.empty()) {
    const Vec s = nnls(a_s, y, policy);
    for (std::size_t k = 0; k < sign_cols.size(); ++k)
      x(sign_cols[k]) = s(static_cast<Eigen::Index>(k)) == 0.0 ? 0.0 : sign[static_cast<std::size_t>(sign_cols[k])] * s(static_cast<Eigen::Index>(k));
    return x;
  }
  const Mat a_f = columns(a_j, free_cols);
  Vec s = Vec::Zero(static_cast<Eigen::Index>(sign_cols.size()));
  if (!sign_cols.empty()) {
    Eigen::CompleteOrthogonalDecomposition<Mat> cod(a_f);
    const Eigen::Index r = cod.rank();
    const Mat q = cod.householderQ() * Mat::Identity(a_f.rows(), r);
    const Mat proj_a = a_s - q * (q.transpose() * a_s);
    const Vec proj_y = y - q * (q.transpose() * y);
    s = nnls(proj_a, proj_y, policy);
  }
  const Vec rest = y - a_s * s;
  const Vec xf = full_column_rank(a_f, policy) ? least_squares(a_f, rest, policy) : min_norm_least_squares(a_f, rest);
  for (std::size_t k = 0; k < free_cols.size(); ++k) x(free_cols[k]) = xf(static_cast<Eigen::Index>(k));
  for (std::size_t k = 0; k < sign_cols.size(); ++k) {
    const double v = s(static_cast<Eigen::Index>(k));
    x(sign_cols[k]) = v == 0.0 ? 0.0 : sign[static_cast<std::size_t>(sign_cols[k])] * v;
  }
  return x;
}

// Polishes a projected-gradient iterate by solving the equality-constrained
// least-squares problem on its identified face.
Vec polish_simplex(const Mat& a, const Vec& y, const Vec& w, double cap, const Vec& x) {
  IndexSet f;
  for (Eigen::Index i = 0; i < x.size(); ++i)
    if (x(i) > 1e-10) f.push_back(static_cast<int>(i));
  Vec out = Vec::Zero(x.size());
  if (f.empty()) return out;
  const Mat af = columns(a, f);
  Vec wf(static_cast<Eigen::Index>(f.size()));
  for (std::size_t k = 0; k < f.size(); ++k) wf(static_cast<Eigen::Index>(k)) = w(f[k]);
  const bool cap_active = w.dot(x) >= cap - 1e-9 * std::max(1.0, cap);
  Vec xf;
  if (cap_active) {
    const Eigen::Index k = static_cast<Eigen::Index>(f.size());
    Mat kkt = Mat::Zero(k + 1, k + 1);
    kkt.topLeftCorner(k, k) = af.transpose() * af;
    kkt.block(0, k, k, 1) = wf;
    kkt.block(k, 0, 1, k) = wf.transpose();
    Vec rhs(k + 1);
    rhs.head(k) = af.transpose() * y;
    rhs(k) = cap;
    xf = kkt.completeOrthogonalDecomposition().solve(rhs).head(k);
  } else {
    xf = min_norm_least_squares(af, y);
  }
  for (std::size_t k = 0; k < f.size(); ++k) out(f[k]) = xf(static_cast<Eigen::Index>(k));
  return out;
}

double simplex_residual(const Mat& a, const Vec& y, const Vec& w, double cap, double l, const Vec& x) {
  const Vec g = a.transpose() * (a * x - y);
  return (x - project_weighted_simplex(x - g / l, w, cap)).lpNorm<Eigen::Infinity>();
}

Vec solve_simplex(const Mat& a, const Vec& y, const Vec& w, double cap, const SolverOptions& opt) {
  const Eigen::Index n = a.cols();
  const Mat g = a.transpose() * a;
  const Vec aty = a.transpose() * y;
  const double l = lambda_max(g);
  const auto f = [&](const Vec& v) { return 0.5 * (a * v - y).squaredNorm(); };
  Vec x = Vec::Zero(n), x_prev = x, z = x;
  double t = 1.0, fx = f(x);
  bool converged = false;
  for (int it = 0; it < opt.simplex_max_iter; ++it) {
    const Vec grad = g * z - aty;
    const Vec x_new = project_weighted_simplex(z - grad / l, w, cap);
    const double f_new = f(x_new);
    if (f_new > fx) {
      // Function-value restart of the momentum sequence.
      t = 1.0;
      z = x;
      continue;
    }
    x_prev = x;
    x = x_new;
    fx = f_new;
    const double t_new = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    z = x + ((t - 1.0) / t_new) * (x - x_prev);
    t = t_new;
    if (it % 10 == 0 && simplex_residual(a, y, w, cap, l, x) < opt.simplex_tol) {
      converged = true;
      break;
    }
  }
  const double r_x = simplex_residual(a, y, w, cap, l, x);
  converged = converged || r_x < opt.simplex_tol;
  const Vec xp = polish_simplex(a, y, w, cap, x);
  const bool feasible = (xp.array() >= 0.0).all() && w.dot(xp) <= cap * (1.0 + 1e-12);
  if (feasible) {
    const double r_p = simplex_residual(a, y, w, cap, l, xp);
    if (r_p <= r_x) return xp;
  }
  if (!converged) fail(ErrorCode::NotConverged, "projected gradient did not reach the residual target");
  return x;
}

}  // namespace

Vec nnls(const Mat& a, const Vec& y, const NumericPolicy& policy) {
  const Eigen::Index n = a.cols();
  Vec x = Vec::Zero(n);
  if (n == 0) return x;
  const double tol = 1e-13 * std::max(1.0, a.norm() * y.norm());
  std::vector<bool> passive(static_cast<std::size_t>(n), false);
  const int max_outer = 3 * static_cast<int>(n);
  int outer = 0;
  const auto passive_set = [&] {
    IndexSet p;
    for (Eigen::Index i = 0; i < n; ++i)
      if (passive[static_cast<std::size_t>(i)]) p.push_back(static_cast<int>(i));
    return p;
  };
  std::vector<bool> rejected(static_cast<std::size_t>(n), false);
  while (true) {
    const Vec wdual = a.transpose() * (y - a * x);
    int t = -1;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (passive[static_cast<std::size_t>(i)] || rejected[static_cast<std::size_t>(i)]) continue;
      if (wdual(i) > tol && (t < 0 || wdual(i) > wdual(t))) t = static_cast<int>(i);
    }
    if (t < 0) break;
    if (++outer > max_outer) fail(ErrorCode::CycleLimit, "NNLS exceeded its outer-loop budget");
    passive[static_cast<std::size_t>(t)] = true;
    IndexSet p = passive_set();
    Vec sp = ls_subset(a, y, p, policy);
    const auto pos_of = [&](int idx) {
      return static_cast<Eigen::Index>(std::lower_bound(p.begin(), p.end(), idx) - p.begin());
    };
    if (sp(pos_of(t)) <= 0.0) {
      // The new index would leave immediately: reject it for this round.
      passive[static_cast<std::size_t>(t)] = false;
      rejected[static_cast<std::size_t>(t)] = true;
      --outer;
      continue;
    }
    std::fill(rejected.begin(), rejected.end(), false);
    while (true) {
      bool all_pos = true;
      for (Eigen::Index k = 0; k < sp.size(); ++k)
        if (sp(k) <= 0.0) all_pos = false;
      if (all_pos) break;
      double alpha = 1.0;
      for (std::size_t k = 0; k < p.size(); ++k) {
        const double s = sp(static_cast<Eigen::Index>(k));
        if (s <= 0.0) {
          const double xi = x(p[k]);
          alpha = std::min(alpha, xi / (xi - s));
        }
      }
      for (std::size_t k = 0; k < p.size(); ++k) {
        const int i = p[k];
        x(i) += alpha * (sp(static_cast<Eigen::Index>(k)) - x(i));
      }
      for (int i : p)
        if (x(i) <= tol * 1e-3) {
          x(i) = 0.0;
          passive[static_cast<std::size_t>(i)] = false;
        }
      p = passive_set();
      if (p.empty()) {
        sp = Vec(0);
        break;
      }
      sp = ls_subset(a, y, p, policy);
    }
    x.setZero();
    for (std::size_t k = 0; k < p.size(); ++k) x(p[k]) = sp(static_cast<Eigen::Index>(k));
  }
  return x;
}

Vec bvls(const Mat& a, const Vec& y, const Vec& lo, const Vec& hi, const NumericPolicy& policy) {
  const Eigen::Index n = a.cols();
  Vec x = Vec::Zero(n);
  if (n == 0) return x;
  // state: 0 free, -1 at lower bound, +1 at upper bound
  std::vector<int> state(static_cast<std::size_t>(n), 0);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (lo(i) == 0.0) state[static_cast<std::size_t>(i)] = -1;
    else if (hi(i) == 0.0) state[static_cast<std::size_t>(i)] = 1;
  }
  const double tol = 1e-13 * std::max(1.0, a.norm() * y.norm());
  const int max_iter = 20 * static_cast<int>(n) + 100;
  std::vector<bool> skip(static_cast<std::size_t>(n), false);
  int released = -1;
  for (int iter = 0; iter < max_iter; ++iter) {
    IndexSet f;
    for (Eigen::Index i = 0; i < n; ++i)
      if (state[static_cast<std::size_t>(i)] == 0) f.push_back(static_cast<int>(i));
    Vec fixed_part = Vec::Zero(n);
    for (Eigen::Index i = 0; i < n; ++i)
      if (state[static_cast<std::size_t>(i)] != 0) fixed_part(i) = x(i);
    Vec s = x;
    if (!f.empty()) {
      const Vec sf = ls_subset(a, y - a * fixed_part, f, policy);
      for (std::size_t k = 0; k < f.size(); ++k) s(f[k]) = sf(static_cast<Eigen::Index>(k));
    }
    double alpha = 2.0;
    int blocking = -1;
    for (int i : f) {
      double cand;
      if (s(i) < lo(i)) cand = (lo(i) - x(i)) / (s(i) - x(i));
      else if (s(i) > hi(i)) cand = (hi(i) - x(i)) / (s(i) - x(i));
      else continue;
      cand = std::clamp(cand, 0.0, 1.0);
      if (cand < alpha) {
        alpha = cand;
        blocking = i;
      }
    }
    if (blocking >= 0) {
      if (alpha == 0.0 && blocking == released) {
        // The released variable cannot move inward; rebind it and try another.
        state[static_cast<std::size_t>(released)] = x(released) == lo(released) ? -1 : 1;
        skip[static_cast<std::size_t>(released)] = true;
        released = -1;
      } else {
        for (int i : f) x(i) += alpha * (s(i) - x(i));
        for (int i : f) {
          if (!std::isinf(lo(i)) && x(i) <= lo(i) + 1e-14 * std::max(1.0, std::abs(lo(i)))) {
            x(i) = lo(i);
            state[static_cast<std::size_t>(i)] = -1;
          } else if (!std::isinf(hi(i)) && x(i) >= hi(i) - 1e-14 * std::max(1.0, std::abs(hi(i)))) {
            x(i) = hi(i);
            state[static_cast<std::size_t>(i)] = 1;
          }
        }
        if (state[static_cast<std::size_t>(blocking)] == 0) {
          const bool to_lo = s(blocking) < lo(blocking);
          x(blocking) = to_lo ? lo(blocking) : hi(blocking);
          state[static_cast<std::size_t>(blocking)] = to_lo ? -1 : 1;
        }
        if (alpha > 0.0) std::fill(skip.begin(), skip.end(), false);
        released = -1;
        continue;
      }
    } else {
      if ((s - x).lpNorm<Eigen::Infinity>() > 0.0) std::fill(skip.begin(), skip.end(), false);
      x = s;
      released = -1;
    }
    const Vec g = a.transpose() * (a * x - y);
    int worst = -1;
    double worst_v = tol;
    for (Eigen::Index i = 0; i < n; ++i) {
      const int st = state[static_cast<std::size_t>(i)];
      if (st == 0 || lo(i) == hi(i) || skip[static_cast<std::size_t>(i)]) continue;
      const double viol = st < 0 ? -g(i) : g(i);
      if (viol > worst_v) {
        worst_v = viol;
        worst = static_cast<int>(i);
      }
    }
    if (worst < 0) return x;
    state[static_cast<std::size_t>(worst)] = 0;
    released = worst;
  }
  fail(ErrorCode::CycleLimit, "BVLS exceeded its iteration budget");
}

Vec project_weighted_simplex(const Vec& z, const Vec& w, double cap) {
  const Vec zp = z.cwiseMax(0.0);
  if (w.dot(zp) <= cap) return zp;
  std::vector<int> order;
  for (Eigen::Index i = 0; i < z.size(); ++i)
    if (z(i) > 0) order.push_back(static_cast<int>(i));
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    const double ra = z(a) / w(a), rb = z(b) / w(b);
    return ra != rb ? ra > rb : a < b;
  });
  double s1 = 0.0, s2 = 0.0, lambda = 0.0;
  for (std::size_t k = 0; k < order.size(); ++k) {
    const int i = order[k];
    s1 += w(i) * z(i);
    s2 += w(i) * w(i);
    lambda = (s1 - cap) / s2;
    const double next = k + 1 < order.size() ? z(order[k + 1]) / w(order[k + 1]) : 0.0;
    if (lambda >= next) break;
  }
  return (z - lambda * w).cwiseMax(0.0);
}

double kkt_residual(const Mat& a, const Vec& y, const ConstraintModel& p, const IndexSet& j, const Vec& x) {
  if (j.empty() || p.is_nonconvex_demo()) return 0.0;
  const Mat a_j = columns(a, j);
  Vec x_j(static_cast<Eigen::Index>(j.size()));
  for (std::size_t k = 0; k < j.size(); ++k) x_j(static_cast<Eigen::Index>(k)) = x(j[k]);
  const Vec g = a_j.transpose() * (a_j * x_j - y);
  if (const BoxProduct* b = p.as_box()) {
    const BoxBounds bb = bounds_on(*b, j);
    return (x_j - box_clamp(x_j - g, bb.lo, bb.hi)).lpNorm<Eigen::Infinity>();
  }
  if (const WeightedSimplex* s = p.as_simplex()) {
    Vec w(static_cast<Eigen::Index>(j.size()));
    for (std::size_t k = 0; k < j.size(); ++k) w(static_cast<Eigen::Index>(k)) = s->weights(j[k]);
    return simplex_residual(a_j, y, w, s->cap, lambda_max(a_j.transpose() * a_j), x_j);
  }
  const Hyperplane& h = *p.as_hyperplane();
  Vec d(static_cast<Eigen::Index>(j.size()));
  for (std::size_t k = 0; k < j.size(); ++k) d(static_cast<Eigen::Index>(k)) = h.d(j[k]);
  if (d.squaredNorm() == 0.0) return g.lpNorm<Eigen::Infinity>();
  return (g - d * (d.dot(g) / d.squaredNorm())).lpNorm<Eigen::Infinity>();
}

RestrictedSolution solve_restricted(const Mat& a, const Vec& y, const ConstraintModel& p, const IndexSet& j,
                                    const SolverOptions& opt) {
  const int n = static_cast<int>(a.cols());
  if (p.dimension() != n) fail(ErrorCode::InvalidArgument, "constraint dimension does not match the matrix");
  if (y.size() != a.rows()) fail(ErrorCode::InvalidArgument, "measurement length does not match the matrix");
  for (int i : j)
    if (i < 0 || i >= n) fail(ErrorCode::InvalidArgument, "index set entry out of range");
  RestrictedSolution sol;
  sol.x = Vec::Zero(n);
  if (j.empty()) {
    sol.objective = y.squaredNorm();
    return sol;
  }

  if (p.is_nonconvex_demo()) {
    const oracle::NonconvexSolution ns = oracle::nonconvex_line7_solve(a, y, j);
    sol.x = ns.p;
    for (int i = 0; i < n; ++i)
      if (!set_contains(j, i)) sol.x(i) = 0.0;
    sol.unique = ns.kind == oracle::NonconvexSolution::Kind::Unique;
    sol.objective = (a * sol.x - y).squaredNorm();
    if (opt.require_unique && !sol.unique) fail(ErrorCode::RankDeficient, "restricted minimizer is not unique");
    return sol;
  }

  const Mat a_j = columns(a, j);
  Vec x_j;
  IndexSet movable;  // coordinates of J whose range is not {0}
  if (const BoxProduct* b = p.as_box()) {
    const BoxBounds bb = bounds_on(*b, j);
    bool all_free = true, cone = true;
    for (Eigen::Index k = 0; k < bb.lo.size(); ++k) {
      if (!(std::isinf(bb.lo(k)) && std::isinf(bb.hi(k)))) all_free = false;
      if (!std::isinf(bb.lo(k)) && bb.lo(k) != 0.0) cone = false;
      if (!std::isinf(bb.hi(k)) && bb.hi(k) != 0.0) cone = false;
      if (!(bb.lo(k) == 0.0 && bb.hi(k) == 0.0)) movable.push_back(static_cast<int>(k));
    }
    if (all_free) {
      x_j = full_column_rank(a_j, opt.policy) ? least_squares(a_j, y, opt.policy) : min_norm_least_squares(a_j, y);
    } else if (cone) {
      x_j = solve_cone(a_j, y, bb, opt.policy);
    } else {
      x_j = bvls(a_j, y, bb.lo, bb.hi, opt.policy);
    }
    sol.unique = full_column_rank(columns(a_j, movable), opt.policy);
  } else if (const WeightedSimplex* s = p.as_simplex()) {
    Vec w(static_cast<Eigen::Index>(j.size()));
    for (std::size_t k = 0; k < j.size(); ++k) w(static_cast<Eigen::Index>(k)) = s->weights(j[k]);
    x_j = solve_simplex(a_j, y, w, s->cap, opt);
    sol.unique = full_column_rank(a_j, opt.policy);
  } else {
    const Hyperplane& h = *p.as_hyperplane();
    Vec d(static_cast<Eigen::Index>(j.size()));
    for (std::size_t k = 0; k < j.size(); ++k) d(static_cast<Eigen::Index>(k)) = h.d(j[k]);
    if (d.squaredNorm() == 0.0) {
      x_j = full_column_rank(a_j, opt.policy) ? least_squares(a_j, y, opt.policy) : min_norm_least_squares(a_j, y);
      sol.unique = full_column_rank(a_j, opt.policy);
    } else if (j.size() == 1) {
      x_j = Vec::Zero(1);
    } else {
      const Mat ns = nullspace_of_row(d);
      const Mat an = a_j * ns;
      const bool fr = full_column_rank(an, opt.policy);
      x_j = ns * (fr ? least_squares(an, y, opt.policy) : min_norm_least_squares(an, y));
      sol.unique = fr;
    }
  }
  if (opt.require_unique && !sol.unique) fail(ErrorCode::RankDeficient, "A_J is rank deficient");
  for (std::size_t k = 0; k < j.size(); ++k) sol.x(j[k]) = x_j(static_cast<Eigen::Index>(k));
  sol.objective = (a * sol.x - y).squaredNorm();
  sol.kkt_residual = kkt_residual(a, y, p, j, sol.x);
  return sol;
}

}  // namespace cmp
