#include <array>
#include <sstream>

#include "cmp/certify.hpp"
#include "cmp/error.hpp"
#include "cmp/fixtures.hpp"
#include "cmp/lp.hpp"
#include "cmp/pursuit.hpp"

namespace cmp {

namespace {

struct PrintedWitness {
  std::array<int, 3> sigma;
  std::array<Rational, 3> u;
  int w_column;  // 0-based column of H; -1 for w = e_2 + e_4
};

Rational q(long n, long d) { return make_rational(n, d); }

// The eight (sigma, u, w) certificates listed for Claim I, with the two typos corrected.
std::vector<PrintedWitness> printed_witnesses() {
  return {
      {{1, 1, 1}, {q(0, 1), q(0, 1), q(1, 3)}, -1},
      {{1, 1, -1}, {q(0, 1), q(0, 1), q(1, 2)}, 4},
      {{1, -1, 1}, {q(2, 3), q(2, 3), q(1, 6)}, 1},
      {{-1, 1, 1}, {q(2, 3), q(2, 3), q(1, 6)}, 3},
      {{1, -1, -1}, {q(0, 1), q(0, 1), q(1, 2)}, 4},
      {{-1, 1, -1}, {q(0, 1), q(0, 1), q(1, 2)}, 4},
      {{-1, -1, 1}, {q(4, 3), q(0, 1), q(5, 6)}, 0},
      {{-1, -1, -1}, {q(0, 1), q(0, 1), q(1, 2)}, 4},
  };
}

// u + D_sigma H w = 0 with u >= 0, u != 0, w >= 0.
bool witness_verifies(const RMat& h, const PrintedWitness& pw) {
  RVec w = RVec::Zero(h.cols());
  if (pw.w_column < 0) {
    w(1) = 1;
    w(3) = 1;
  } else {
    w(pw.w_column) = 1;
  }
  const RVec hw = h * w;
  bool nonzero = false;
  for (int i = 0; i < 3; ++i) {
    if (pw.u[i] < 0) return false;
    if (pw.u[i] != 0) nonzero = true;
    if (pw.u[i] + Rational(pw.sigma[i]) * hw(i) != 0) return false;
  }
  return nonzero;
}

bool exact_witness_valid(const RMat& h, const std::vector<int>& sigma, const MotzkinWitness<Rational>& mw) {
  if (!mw.exists) return false;
  Rational total = 0;
  for (Eigen::Index i = 0; i < mw.u.size(); ++i) {
    if (mw.u(i) < 0) return false;
    total += mw.u(i);
  }
  for (Eigen::Index i = 0; i < mw.w.size(); ++i)
    if (mw.w(i) < 0) return false;
  const RVec hw = h * mw.w;
  for (Eigen::Index i = 0; i < hw.size(); ++i)
    if (mw.u(i) + Rational(sigma[static_cast<std::size_t>(i)]) * hw(i) != 0) return false;
  return total > 0;
}

// H with columns h_j + h_i, h_j - h_i for each j in S^c and i in S = {0,1,2}.
RMat h_matrix(const RMat& g) {
  const int n = static_cast<int>(g.rows());
  RMat h(3, 6 * (n - 3));
  int col = 0;
  for (int j = 3; j < n; ++j)
    for (int i = 0; i < 3; ++i) {
      h.col(col++) = g.block(0, j, 3, 1) + g.block(0, i, 3, 1);
      h.col(col++) = g.block(0, j, 3, 1) - g.block(0, i, 3, 1);
    }
  return h;
}

std::vector<std::vector<int>> all_sigmas() {
  std::vector<std::vector<int>> out;
  for (int mask = 0; mask < 8; ++mask)
    out.push_back({mask & 1 ? -1 : 1, mask & 2 ? -1 : 1, mask & 4 ? -1 : 1});
  return out;
}

struct Items {
  CounterexampleItem unit, gram, erc, witnesses, claim, grid;
};

Items core_items(const Mat& a, const RMat& coeff, const std::vector<long>& radicands, const RMat& printed_gram,
                 int grid_points) {
  const int n = static_cast<int>(a.cols());
  const IndexSet s = {0, 1, 2};
  const RMat rad = [&] {
    RMat d = RMat::Zero(coeff.rows(), coeff.rows());
    for (Eigen::Index i = 0; i < coeff.rows(); ++i) d(i, i) = Rational(radicands[static_cast<std::size_t>(i)]);
    return d;
  }();
  const RMat g = coeff.transpose() * rad * coeff;
  Items it;

  {
    bool ok = true;
    double worst = 0.0;
    for (int j = 0; j < n; ++j) {
      ok = ok && g(j, j) == 1;
      worst = std::max(worst, std::abs(a.col(j).norm() - 1.0));
    }
    ok = ok && worst <= 1e-12;
    std::ostringstream d;
    d << "exact squared norms are 1: " << (ok ? "yes" : "no") << "; max float deviation " << worst;
    it.unit = {1, "unit columns", ok, d.str()};
  }
  {
    const bool exact = g == printed_gram;
    const double fdev = (gram(a).theta - to_double(printed_gram)).cwiseAbs().maxCoeff();
    std::ostringstream d;
    d << "exact Gram equals the printed entries: " << (exact ? "yes" : "no") << "; float deviation " << fdev;
    it.gram = {2, "Gram matrix", exact && fdev <= 1e-12, d.str()};
  }
  {
    const ErcData<Rational> ed = erc_from_gram<Rational>(g, s);
    RMat expected(3, 3);
    expected << 2, 1, 1, 1, 2, 1, 1, 1, 2;
    expected *= make_rational(3, 4);
    const double fl = erc_norm(a, s);
    const bool ok = ed.norm == 1 && ed.gss_inv == expected && std::abs(fl - 1.0) <= 1e-12;
    std::ostringstream d;
    d << "exact norm " << to_string(ed.norm) << "; inverse matches 3/4 [[2,1,1],[1,2,1],[1,1,2]]: "
      << (ed.gss_inv == expected ? "yes" : "no") << "; float norm " << fl;
    it.erc = {3, "exact recovery condition equals one", ok, d.str()};
  }
  {
    const RMat h = h_matrix(g);
    const RMat h4 = h.leftCols(6);
    int printed_ok = 0;
    for (const PrintedWitness& pw : printed_witnesses())
      if (witness_verifies(h4, pw)) ++printed_ok;
    int solved = 0;
    for (const std::vector<int>& sigma : all_sigmas())
      if (exact_witness_valid(h, sigma, motzkin_alternative(h, sigma))) ++solved;
    std::ostringstream d;
    d << printed_ok << "/8 listed certificates verify; " << solved << "/8 sign patterns solved by the LP";
    it.witnesses = {4, "Motzkin certificates", printed_ok == 8 && solved == 8, d.str()};
  }
  {
    DominanceProblem<Rational> prob;
    prob.p = submatrix(g, s, s);
    prob.p_kind.assign(3, RowKind::Abs);
    prob.q = submatrix(g, complement(n, s), s);
    prob.q_kind.assign(static_cast<std::size_t>(n - 3), RowKind::Abs);
    prob.sign_free = {0, 1, 2};
    const ConditionReport r = motzkin_dominance(prob);
    std::ostringstream d;
    d << "verdict " << to_string(r.verdict) << "; depth " << r.margins.at("depth").value << " ("
      << to_string(r.margins.at("depth").state) << ")";
    it.claim = {5, "strict dominance on the open orthants", r.verdict == Verdict::Holds, d.str()};
  }
  {
    const ConstraintModel p = ConstraintModel::free(n);
    int recovered = 0;
    int total = 0;
    for (const Vec& zs : counterexample_grid(grid_points)) {
      Vec z = Vec::Zero(n);
      z.head(3) = zs;
      ++total;
      const RecoveryResult r = verify_exact_recovery(a, z, p);
      if (r.vector_recovered && r.support_recovered) ++recovered;
    }
    std::ostringstream d;
    d << recovered << "/" << total << " grid vectors recovered on every branch";
    it.grid = {6, "grid recovery", recovered == total && total > 0, d.str()};
  }
  return it;
}

}  // namespace

std::vector<Vec> counterexample_grid(int points_per_axis) {
  if (points_per_axis < 3 || points_per_axis % 2 == 0)
    fail(ErrorCode::InvalidArgument, "points per axis must be odd and at least 3");
  const int half = (points_per_axis - 1) / 2;
  std::vector<double> axis;
  for (int k = half - 1; k >= 0; --k) axis.push_back(-(half == 1 ? 1.0 : 0.1 + k * 1.9 / (half - 1)));
  axis.push_back(0.0);
  for (int k = 0; k < half; ++k) axis.push_back(half == 1 ? 1.0 : 0.1 + k * 1.9 / (half - 1));
  std::vector<Vec> out;
  for (double x : axis)
    for (double y : axis)
      for (double z : axis) {
        if (x == 0.0 || y == 0.0 || z == 0.0) continue;
        out.push_back(Vec::Map(std::array<double, 3>{x, y, z}.data(), 3));
      }
  return out;
}

CounterexampleReport verify_counterexample(const CounterexampleOptions& opt) {
  CounterexampleReport rep;
  const Mat a = fixtures::counterexample_matrix();
  const RMat coeff = fixtures::counterexample_coefficients();
  const std::vector<long> rad = fixtures::counterexample_radicands();
  const RMat g = fixtures::counterexample_gram_exact();
  Items base = core_items(a, coeff, rad, g, opt.grid_points);
  rep.items = {base.unit, base.gram, base.erc, base.witnesses, base.claim, base.grid};

  {
    const std::vector<int> v = {1, 1, 0};
    bool ok = true;
    std::ostringstream d;
    d << "at v = (1,1,0):";
    for (int i = 0; i < 4; ++i) {
      Rational gi = 0;
      for (int k = 0; k < 3; ++k) gi += g(k, i) * Rational(v[static_cast<std::size_t>(k)]);
      gi = boost::multiprecision::abs(gi);
      ok = ok && gi == make_rational(2, 3);
      d << " g" << i + 1 << "=" << to_string(gi);
    }
    // Second step with z = (z1, 1, -1): the residual direction is (0, 1, -1) on S.
    const std::array<Rational, 4> want = {Rational(0), make_rational(4, 3), make_rational(4, 3), make_rational(5, 6)};
    const std::vector<int> w = {0, 1, -1};
    d << "; second step:";
    for (int i = 0; i < 4; ++i) {
      Rational gi = 0;
      for (int k = 0; k < 3; ++k) gi += g(k, i) * Rational(w[static_cast<std::size_t>(k)]);
      gi = boost::multiprecision::abs(gi);
      ok = ok && gi == want[static_cast<std::size_t>(i)];
      d << " g" << i + 1 << "=" << to_string(gi);
    }
    rep.items.push_back({7, "boundary tie", ok, d.str()});
  }

  {
    const int m = opt.extension_m;
    const int n = opt.extension_n;
    const Mat b = fixtures::counterexample_extension(m, n);
    RMat ce = RMat::Zero(m, n);
    ce.block(0, 0, 4, 4) = coeff;
    for (int k = 4; k < n; ++k) ce.block(0, k, 4, 1) = (k % 2 == 0 ? Rational(1) : Rational(-1)) * coeff.col(3);
    std::vector<long> r = rad;
    r.resize(static_cast<std::size_t>(m), 1);
    Items ext = core_items(b, ce, r, fixtures::counterexample_extension_gram_exact(n), opt.grid_points);
    const std::array<const CounterexampleItem*, 6> parts = {&ext.unit, &ext.gram, &ext.erc,
                                                           &ext.witnesses, &ext.claim, &ext.grid};
    bool ok = true;
    std::ostringstream d;
    d << m << "x" << n << " extension:";
    for (const CounterexampleItem* p : parts) {
      ok = ok && p->passed;
      d << " (" << p->id << ") " << (p->passed ? "pass" : "FAIL");
    }
    rep.items.push_back({8, "extension", ok, d.str()});
  }
  rep.all_passed = true;
  for (const CounterexampleItem& i : rep.items) rep.all_passed = rep.all_passed && i.passed;
  return rep;
}

}  // namespace cmp
