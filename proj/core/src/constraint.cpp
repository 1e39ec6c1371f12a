#include "cmp/constraint.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cmp/error.hpp"

namespace cmp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

ExtendedReal add(const ExtendedReal& a, const ExtendedReal& b) {
  if (a.is_finite() && b.is_finite()) return ExtendedReal(a.value() + b.value());
  if (!a.is_finite() && !b.is_finite() && a.kind() != b.kind())
    fail(ErrorCode::InvalidArgument, "sum of opposite infinities");
  return a.is_finite() ? b : a;
}

ExtendedReal mul(const ExtendedReal& a, double lambda) {
  if (a.is_finite()) return ExtendedReal(a.value() * lambda);
  if (lambda == 0.0) return ExtendedReal(0.0);
  return lambda > 0 ? a : -a;
}

void check_dim(const ConstraintModel& p, const Vec& v) {
  if (v.size() != p.dimension())
    fail(ErrorCode::InvalidArgument, "vector length " + std::to_string(v.size()) +
                                         " does not match constraint dimension " +
                                         std::to_string(p.dimension()));
}

ExtendedInterval make_interval(ExtendedReal lo, ExtendedReal hi, bool truncated = false) {
  // Points on the boundary within tolerance can produce endpoints a hair past 0.
  if (lo > ExtendedReal(0.0)) lo = ExtendedReal(0.0);
  if (hi < ExtendedReal(0.0)) hi = ExtendedReal(0.0);
  return ExtendedInterval{lo, hi, truncated};
}

bool demo_contains(const Vec& x, double tol) {
  const bool curve = x(0) >= -tol && x(1) >= -tol && x(1) <= 1.0 + tol && x(1) * x(1) >= x(0) - tol;
  const bool segment = std::abs(x(1)) <= tol && x(0) >= -tol && x(0) <= 1.0 + tol;
  return curve || segment;
}

}  // namespace

ExtendedReal::ExtendedReal(double v) {
  if (std::isnan(v)) fail(ErrorCode::InvalidArgument, "NaN endpoint");
  if (std::isinf(v)) {
    kind_ = v > 0 ? Kind::PosInf : Kind::NegInf;
  } else {
    kind_ = Kind::Finite;
    v_ = v;
  }
}

double ExtendedReal::value() const {
  if (kind_ != Kind::Finite) fail(ErrorCode::InvalidArgument, "value() of an infinite endpoint");
  return v_;
}

double ExtendedReal::as_double() const {
  switch (kind_) {
    case Kind::NegInf: return -kInf;
    case Kind::PosInf: return kInf;
    case Kind::Finite: break;
  }
  return v_;
}

ExtendedReal ExtendedReal::operator-() const {
  switch (kind_) {
    case Kind::NegInf: return pos_inf();
    case Kind::PosInf: return neg_inf();
    case Kind::Finite: break;
  }
  return ExtendedReal(-v_);
}

std::strong_ordering operator<=>(const ExtendedReal& a, const ExtendedReal& b) {
  const auto rank = [](ExtendedReal::Kind k) {
    return k == ExtendedReal::Kind::NegInf ? 0 : (k == ExtendedReal::Kind::Finite ? 1 : 2);
  };
  if (a.kind_ != b.kind_) return rank(a.kind_) <=> rank(b.kind_);
  if (a.kind_ != ExtendedReal::Kind::Finite) return std::strong_ordering::equal;
  if (a.v_ < b.v_) return std::strong_ordering::less;
  if (a.v_ > b.v_) return std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

bool operator==(const ExtendedReal& a, const ExtendedReal& b) { return (a <=> b) == 0; }

std::string to_string(const ExtendedReal& x) {
  switch (x.kind()) {
    case ExtendedReal::Kind::NegInf: return "-inf";
    case ExtendedReal::Kind::PosInf: return "inf";
    case ExtendedReal::Kind::Finite: break;
  }
  return std::to_string(x.value());
}

bool ExtendedInterval::contains(double t, double tol) const {
  return ExtendedReal(t + tol) >= lo && ExtendedReal(t - tol) <= hi;
}

double ExtendedInterval::clamp(double t) const {
  if (lo.is_finite() && t < lo.value()) return lo.value();
  if (hi.is_finite() && t > hi.value()) return hi.value();
  return t;
}

ConstraintModel::ConstraintModel(Variant v) : v_(std::move(v)), n_(0) {
  if (auto* b = std::get_if<BoxProduct>(&v_)) {
    if (b->lower.size() != b->upper.size())
      fail(ErrorCode::InvalidArgument, "box lower/upper lengths differ");
    for (std::size_t i = 0; i < b->lower.size(); ++i)
      if (b->lower[i] > ExtendedReal(0.0) || b->upper[i] < ExtendedReal(0.0))
        fail(ErrorCode::InvalidArgument, "box coordinate " + std::to_string(i + 1) + " does not contain 0");
    n_ = static_cast<int>(b->lower.size());
  } else if (auto* s = std::get_if<WeightedSimplex>(&v_)) {
    if (!(s->cap > 0)) fail(ErrorCode::InvalidArgument, "simplex cap must be positive");
    for (Eigen::Index i = 0; i < s->weights.size(); ++i)
      if (!(s->weights(i) > 0)) fail(ErrorCode::InvalidArgument, "simplex weights must be positive");
    n_ = static_cast<int>(s->weights.size());
  } else if (std::holds_alternative<NonconvexDemo>(v_)) {
    n_ = 2;
  } else {
    n_ = static_cast<int>(std::get<Hyperplane>(v_).d.size());
  }
}

ConstraintModel ConstraintModel::free(int n) {
  return box(std::vector<ExtendedReal>(static_cast<std::size_t>(n), ExtendedReal::neg_inf()),
             std::vector<ExtendedReal>(static_cast<std::size_t>(n), ExtendedReal::pos_inf()));
}

ConstraintModel ConstraintModel::nonneg(int n) {
  return box(std::vector<ExtendedReal>(static_cast<std::size_t>(n), ExtendedReal(0.0)),
             std::vector<ExtendedReal>(static_cast<std::size_t>(n), ExtendedReal::pos_inf()));
}

ConstraintModel ConstraintModel::nonpos(int n) {
  return box(std::vector<ExtendedReal>(static_cast<std::size_t>(n), ExtendedReal::neg_inf()),
             std::vector<ExtendedReal>(static_cast<std::size_t>(n), ExtendedReal(0.0)));
}

ConstraintModel ConstraintModel::box(const std::vector<double>& lower, const std::vector<double>& upper) {
  return box(std::vector<ExtendedReal>(lower.begin(), lower.end()),
             std::vector<ExtendedReal>(upper.begin(), upper.end()));
}

ConstraintModel ConstraintModel::box(std::vector<ExtendedReal> lower, std::vector<ExtendedReal> upper) {
  return ConstraintModel(BoxProduct{std::move(lower), std::move(upper)});
}

ConstraintModel ConstraintModel::simplex(Vec weights, double cap) {
  return ConstraintModel(WeightedSimplex{std::move(weights), cap});
}

ConstraintModel ConstraintModel::nonconvex_demo() { return ConstraintModel(NonconvexDemo{}); }

ConstraintModel ConstraintModel::hyperplane(Vec d) { return ConstraintModel(Hyperplane{std::move(d)}); }

bool ConstraintModel::is_cone() const {
  const BoxProduct* b = as_box();
  if (b == nullptr) return false;
  for (int i = 0; i < n_; ++i) {
    if (b->lower[i].is_finite() && b->lower[i].value() != 0.0) return false;
    if (b->upper[i].is_finite() && b->upper[i].value() != 0.0) return false;
  }
  return true;
}

std::string ConstraintModel::describe() const {
  if (const BoxProduct* b = as_box()) {
    const auto all = [&](ExtendedReal lo, ExtendedReal hi) {
      for (int i = 0; i < n_; ++i)
        if (!(b->lower[i] == lo && b->upper[i] == hi)) return false;
      return true;
    };
    if (all(ExtendedReal::neg_inf(), ExtendedReal::pos_inf())) return "free";
    if (all(ExtendedReal(0.0), ExtendedReal::pos_inf())) return "nonneg";
    if (all(ExtendedReal::neg_inf(), ExtendedReal(0.0))) return "nonpos";
    return is_cone() ? "cone" : "box";
  }
  if (as_simplex() != nullptr) return "simplex";
  if (is_nonconvex_demo()) return "nonconvex-demo";
  return "hyperplane";
}

ExtendedInterval interval_at(const ConstraintModel& p, const Vec& v, int j, double tol) {
  check_dim(p, v);
  if (j < 0 || j >= p.dimension()) fail(ErrorCode::InvalidArgument, "coordinate index out of range");
  if (!contains(p, v, tol)) fail(ErrorCode::NotMember, "point is not a member of the constraint set");

  if (const BoxProduct* b = p.as_box()) {
    return make_interval(add(b->lower[j], ExtendedReal(-v(j))), add(b->upper[j], ExtendedReal(-v(j))));
  }
  if (const WeightedSimplex* s = p.as_simplex()) {
    const double slack = s->cap - s->weights.dot(v);
    return make_interval(ExtendedReal(-v(j)), ExtendedReal(slack / s->weights(j)));
  }
  if (const Hyperplane* h = p.as_hyperplane()) {
    if (h->d(j) == 0.0) return make_interval(ExtendedReal::neg_inf(), ExtendedReal::pos_inf());
    return make_interval(ExtendedReal(0.0), ExtendedReal(0.0));
  }
  // Nonconvex demo.
  const double v1 = v(0), v2 = v(1);
  if (std::abs(v2) <= tol) {
    if (j == 0) return make_interval(ExtendedReal(-v1), ExtendedReal(1.0 - v1));
    if (v1 <= tol) return make_interval(ExtendedReal(0.0), ExtendedReal(1.0 - v2));
    // Feasible set {0} union [sqrt(v1), 1]; keep the piece containing 0.
    return make_interval(ExtendedReal(0.0), ExtendedReal(0.0), true);
  }
  if (j == 0) return make_interval(ExtendedReal(-v1), ExtendedReal(v2 * v2 - v1));
  const double lo = std::max(-v2, std::sqrt(std::max(v1, 0.0)) - v2);
  // For v1 in (0, 1] the point t = -v2 (landing on the segment) is isolated.
  const bool truncated = v1 > tol && v1 <= 1.0 + tol;
  return make_interval(ExtendedReal(lo), ExtendedReal(1.0 - v2), truncated);
}

bool contains(const ConstraintModel& p, const Vec& x, double tol) {
  check_dim(p, x);
  if (const BoxProduct* b = p.as_box()) {
    for (int i = 0; i < p.dimension(); ++i) {
      if (b->lower[i].is_finite() && x(i) < b->lower[i].value() - tol) return false;
      if (b->upper[i].is_finite() && x(i) > b->upper[i].value() + tol) return false;
    }
    return true;
  }
  if (const WeightedSimplex* s = p.as_simplex()) {
    if ((x.array() < -tol).any()) return false;
    return s->weights.dot(x) <= s->cap + tol;
  }
  if (const Hyperplane* h = p.as_hyperplane()) return std::abs(h->d.dot(x)) <= tol;
  return demo_contains(x, tol);
}

Vec coordinate_project(const Vec& x, const IndexSet& j) {
  Vec z = Vec::Zero(x.size());
  for (int i : j) z(i) = x(i);
  return z;
}

ConeClassification classify_cone(const ConstraintModel& p) {
  const BoxProduct* b = p.as_box();
  if (b == nullptr || !p.is_cone()) fail(ErrorCode::NotACone, "constraint is not a box-product cone");
  ConeClassification c;
  for (int i = 0; i < p.dimension(); ++i) {
    const bool lo_inf = !b->lower[i].is_finite(), hi_inf = !b->upper[i].is_finite();
    if (lo_inf && hi_inf) c.i1.push_back(i);
    else if (hi_inf) c.iplus.push_back(i);
    else if (lo_inf) c.iminus.push_back(i);
    else c.i0.push_back(i);
  }
  return c;
}

ConstraintModel cone_from_classification(const ConeClassification& c) {
  const int n = c.size();
  std::vector<ExtendedReal> lo(static_cast<std::size_t>(n), ExtendedReal(0.0));
  std::vector<ExtendedReal> hi(static_cast<std::size_t>(n), ExtendedReal(0.0));
  for (int i : c.i1) {
    lo[i] = ExtendedReal::neg_inf();
    hi[i] = ExtendedReal::pos_inf();
  }
  for (int i : c.iplus) hi[i] = ExtendedReal::pos_inf();
  for (int i : c.iminus) lo[i] = ExtendedReal::neg_inf();
  return ConstraintModel::box(std::move(lo), std::move(hi));
}

Decomposition decompose(const ConstraintModel& p) {
  const BoxProduct* b = p.as_box();
  if (b == nullptr) fail(ErrorCode::NotBoxProduct, "decomposition requires a box product");
  const std::size_t n = b->lower.size();
  std::vector<ExtendedReal> wl(n), wu(n), kl(n), ku(n);
  for (std::size_t i = 0; i < n; ++i) {
    const ExtendedReal& l = b->lower[i];
    const ExtendedReal& u = b->upper[i];
    wl[i] = l.is_finite() ? l : ExtendedReal(0.0);
    wu[i] = u.is_finite() ? u : ExtendedReal(0.0);
    kl[i] = l.is_finite() ? ExtendedReal(0.0) : ExtendedReal::neg_inf();
    ku[i] = u.is_finite() ? ExtendedReal(0.0) : ExtendedReal::pos_inf();
  }
  return Decomposition{ConstraintModel::box(std::move(wl), std::move(wu)),
                       ConstraintModel::box(std::move(kl), std::move(ku))};
}

std::pair<Vec, Vec> decompose_split(const ConstraintModel& p, const Vec& z) {
  const BoxProduct* b = p.as_box();
  if (b == nullptr) fail(ErrorCode::NotBoxProduct, "decomposition requires a box product");
  check_dim(p, z);
  Vec w = Vec::Zero(z.size()), k = Vec::Zero(z.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    const bool lo_fin = b->lower[i].is_finite(), hi_fin = b->upper[i].is_finite();
    if (!lo_fin && !hi_fin) {
      k(i) = z(i);
    } else if (lo_fin && !hi_fin) {
      w(i) = std::min(z(i), 0.0);
      k(i) = std::max(z(i), 0.0);
    } else if (!lo_fin && hi_fin) {
      w(i) = std::max(z(i), 0.0);
      k(i) = std::min(z(i), 0.0);
    } else {
      w(i) = z(i);
    }
  }
  return {w, k};
}

ConicHull conic_hull(const ConstraintModel& p) {
  ConicHull out;
  if (const BoxProduct* b = p.as_box()) {
    for (int i = 0; i < p.dimension(); ++i) {
      const bool neg = b->lower[i] < ExtendedReal(0.0), pos = b->upper[i] > ExtendedReal(0.0);
      if (neg && pos) out.classes.i1.push_back(i);
      else if (pos) out.classes.iplus.push_back(i);
      else if (neg) out.classes.iminus.push_back(i);
      else out.classes.i0.push_back(i);
    }
  } else if (p.as_simplex() != nullptr) {
    out.classes.iplus = range_set(p.dimension());
  } else {
    fail(ErrorCode::UnsupportedCombination, "conic hull is implemented for box products and simplices");
  }
  out.irreducible = out.classes.i0.empty();
  return out;
}

int dimension(const ConstraintModel& p) {
  const ConicHull h = conic_hull(p);
  return p.dimension() - static_cast<int>(h.classes.i0.size());
}

ConstraintModel scale(const ConstraintModel& p, double lambda) {
  const BoxProduct* b = p.as_box();
  if (b == nullptr) fail(ErrorCode::NotBoxProduct, "scaling is implemented for box products");
  std::vector<ExtendedReal> lo, hi;
  for (std::size_t i = 0; i < b->lower.size(); ++i) {
    ExtendedReal a = mul(b->lower[i], lambda), c = mul(b->upper[i], lambda);
    if (lambda < 0) std::swap(a, c);
    lo.push_back(a);
    hi.push_back(c);
  }
  return ConstraintModel::box(std::move(lo), std::move(hi));
}

ConstraintModel minkowski_sum(const ConstraintModel& a, const ConstraintModel& b) {
  const BoxProduct* x = a.as_box();
  const BoxProduct* y = b.as_box();
  if (x == nullptr || y == nullptr) fail(ErrorCode::NotBoxProduct, "Minkowski sum of box products only");
  if (a.dimension() != b.dimension()) fail(ErrorCode::InvalidArgument, "dimension mismatch");
  std::vector<ExtendedReal> lo, hi;
  for (std::size_t i = 0; i < x->lower.size(); ++i) {
    lo.push_back(add(x->lower[i], y->lower[i]));
    hi.push_back(add(x->upper[i], y->upper[i]));
  }
  return ConstraintModel::box(std::move(lo), std::move(hi));
}

Vec sample_member(const ConstraintModel& p, std::mt19937_64& rng, double spread) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const int n = p.dimension();
  Vec x = Vec::Zero(n);
  if (const BoxProduct* b = p.as_box()) {
    for (int i = 0; i < n; ++i) {
      const double lo = b->lower[i].is_finite() ? b->lower[i].value() : -spread;
      const double hi = b->upper[i].is_finite() ? b->upper[i].value() : spread;
      x(i) = unit(rng) < 0.3 ? 0.0 : lo + (hi - lo) * unit(rng);
    }
  } else if (const WeightedSimplex* s = p.as_simplex()) {
    std::exponential_distribution<double> ex(1.0);
    for (int i = 0; i < n; ++i) x(i) = ex(rng);
    x *= unit(rng) * s->cap / s->weights.dot(x);
    for (int i = 0; i < n; ++i)
      if (unit(rng) < 0.3) x(i) = 0.0;
  } else if (const Hyperplane* h = p.as_hyperplane()) {
    std::normal_distribution<double> g(0.0, 1.0);
    for (int i = 0; i < n; ++i) x(i) = g(rng);
    x -= h->d * (h->d.dot(x) / h->d.squaredNorm());
  } else {
    if (unit(rng) < 0.3) {
      x(0) = unit(rng);
    } else {
      x(1) = unit(rng);
      x(0) = unit(rng) * x(1) * x(1);
    }
  }
  return x;
}

bool sampled_cp_admissible(const ConstraintModel& p, int samples, std::mt19937_64& rng, double tol) {
  std::bernoulli_distribution coin(0.5);
  for (int s = 0; s < samples; ++s) {
    const Vec x = sample_member(p, rng);
    IndexSet j;
    for (int i : support(x))
      if (coin(rng)) j.push_back(i);
    if (!contains(p, coordinate_project(x, j), tol)) return false;
  }
  return true;
}

}  // namespace cmp
