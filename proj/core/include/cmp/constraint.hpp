#pragma once

#include <compare>
#include <initializer_list>
#include <random>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "cmp/linalg.hpp"

namespace cmp {

// Real number extended by -inf and +inf with a total order.
class ExtendedReal {
 public:
  enum class Kind { NegInf, Finite, PosInf };

  ExtendedReal() = default;
  ExtendedReal(double v);  // NOLINT: finite values convert implicitly; +-inf doubles map to the infinite kinds
  static ExtendedReal neg_inf() { return ExtendedReal(Kind::NegInf); }
  static ExtendedReal pos_inf() { return ExtendedReal(Kind::PosInf); }

  Kind kind() const { return kind_; }
  bool is_finite() const { return kind_ == Kind::Finite; }
  // Finite value; throws InvalidArgument for an infinite endpoint.
  double value() const;
  // Value as a double, using IEEE infinities for the infinite kinds.
  double as_double() const;
  ExtendedReal operator-() const;

  friend std::strong_ordering operator<=>(const ExtendedReal& a, const ExtendedReal& b);
  friend bool operator==(const ExtendedReal& a, const ExtendedReal& b);

 private:
  explicit ExtendedReal(Kind k) : kind_(k) {}
  Kind kind_ = Kind::Finite;
  double v_ = 0.0;
};

std::string to_string(const ExtendedReal& x);

struct ExtendedInterval {
  ExtendedReal lo;
  ExtendedReal hi;
  // Set when the true feasible set is a union and only the piece containing 0 is returned.
  bool truncated = false;

  bool contains(double t, double tol = 0.0) const;
  double clamp(double t) const;
};

struct BoxProduct {
  std::vector<ExtendedReal> lower;  // each <= 0
  std::vector<ExtendedReal> upper;  // each >= 0
};

// {x >= 0 : weights^T x <= cap}
struct WeightedSimplex {
  Vec weights;
  double cap = 1.0;
};

// Two-dimensional nonconvex fixture:
// {x : x >= 0, x2 <= 1, x2^2 >= x1} union {x : x2 = 0, 0 <= x1 <= 1}.
struct NonconvexDemo {};

// {x : d^T x = 0}. Not coordinate projection admissible when every d_i != 0;
// kept as a negative control.
struct Hyperplane {
  Vec d;
};

class ConstraintModel {
 public:
  using Variant = std::variant<BoxProduct, WeightedSimplex, NonconvexDemo, Hyperplane>;

  explicit ConstraintModel(Variant v);

  static ConstraintModel free(int n);
  static ConstraintModel nonneg(int n);
  static ConstraintModel nonpos(int n);
  // Doubles may be +-inf. Requires lower <= 0 <= upper.
  static ConstraintModel box(const std::vector<double>& lower, const std::vector<double>& upper);
  static ConstraintModel box(std::vector<ExtendedReal> lower, std::vector<ExtendedReal> upper);
  static ConstraintModel box(std::initializer_list<double> lower, std::initializer_list<double> upper) {
    return box(std::vector<double>(lower), std::vector<double>(upper));
  }
  static ConstraintModel simplex(Vec weights, double cap);
  static ConstraintModel nonconvex_demo();
  static ConstraintModel hyperplane(Vec d);

  int dimension() const { return n_; }
  const Variant& variant() const { return v_; }
  const BoxProduct* as_box() const { return std::get_if<BoxProduct>(&v_); }
  const WeightedSimplex* as_simplex() const { return std::get_if<WeightedSimplex>(&v_); }
  const Hyperplane* as_hyperplane() const { return std::get_if<Hyperplane>(&v_); }
  bool is_nonconvex_demo() const { return std::holds_alternative<NonconvexDemo>(v_); }
  bool is_convex() const { return !is_nonconvex_demo(); }
  // Box product whose endpoints are all 0 or infinite.
  bool is_cone() const;
  std::string describe() const;

 private:
  Variant v_;
  int n_;
};

struct ConeClassification {
  IndexSet i1, iplus, iminus, i0;
  int size() const {
    return static_cast<int>(i1.size() + iplus.size() + iminus.size() + i0.size());
  }
};

struct Decomposition {
  ConstraintModel w;  // compact box product
  ConstraintModel k;  // box-product cone
};

struct ConicHull {
  ConeClassification classes;
  bool irreducible = false;
};

// {t : v + t e_j in P}. Throws NotMember when v is not in P within tol.
ExtendedInterval interval_at(const ConstraintModel& p, const Vec& v, int j, double tol = 1e-9);
bool contains(const ConstraintModel& p, const Vec& x, double tol = 1e-9);
Vec coordinate_project(const Vec& x, const IndexSet& j);

ConeClassification classify_cone(const ConstraintModel& p);
// Cone with I1 free, I+ nonnegative, I- nonpositive and I0 frozen at zero.
ConstraintModel cone_from_classification(const ConeClassification& c);

Decomposition decompose(const ConstraintModel& p);
// Split z in P as z = w + k with w in W and k in K.
std::pair<Vec, Vec> decompose_split(const ConstraintModel& p, const Vec& z);

ConicHull conic_hull(const ConstraintModel& p);
int dimension(const ConstraintModel& p);

// lambda * P for a box product; endpoints swap when lambda < 0.
ConstraintModel scale(const ConstraintModel& p, double lambda);
// Minkowski sum of two box products.
ConstraintModel minkowski_sum(const ConstraintModel& a, const ConstraintModel& b);

// Random member of P. Magnitudes on infinite ranges are drawn from (0, spread].
Vec sample_member(const ConstraintModel& p, std::mt19937_64& rng, double spread = 2.0);
// Draws members x and subsets J of supp(x); false as soon as pi_J(x) leaves P.
bool sampled_cp_admissible(const ConstraintModel& p, int samples, std::mt19937_64& rng,
                           double tol = 1e-12);

}  // namespace cmp
