#pragma once

#include <Eigen/Dense>
#include <boost/multiprecision/eigen.hpp>
#include <boost/multiprecision/gmp.hpp>
#include <string>

namespace cmp {

// Exact GMP-backed rational; expression templates off so Eigen sees a plain value type.
using Rational =
    boost::multiprecision::number<boost::multiprecision::gmp_rational, boost::multiprecision::et_off>;
using RMat = Eigen::Matrix<Rational, Eigen::Dynamic, Eigen::Dynamic>;
using RVec = Eigen::Matrix<Rational, Eigen::Dynamic, 1>;

// Exact conversion: every finite double is a dyadic rational.
inline Rational to_rational(double x) { return Rational(x); }
inline double to_double(const Rational& q) { return q.convert_to<double>(); }
inline Rational make_rational(long num, long den) { return Rational(num) / Rational(den); }
inline std::string to_string(const Rational& q) { return q.str(); }

RMat to_rational(const Eigen::MatrixXd& m);
Eigen::MatrixXd to_double(const RMat& m);

}  // namespace cmp
