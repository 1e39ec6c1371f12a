#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cmp/certify.hpp"
#include "cmp/constraint.hpp"
#include "cmp/linalg.hpp"
#include "cmp/pursuit.hpp"
#include "cmp/rational.hpp"

namespace cmp::io {

// Comma- or whitespace-separated rows; blank lines and lines starting with '#' are skipped.
Mat read_matrix_csv(const std::string& path);
// Every number in the file, in reading order.
Vec read_vector_csv(const std::string& path);
std::string matrix_to_csv(const Mat& a);

struct MatrixSource {
  Mat a;
  std::optional<RMat> exact_gram;  // set for the built-in fixtures
};

// "fixture:counterexample", "fixture:extension[:MxN]", "fixture:nonconvex", "random:M,N,SEED", or a CSV path.
MatrixSource load_matrix(const std::string& spec);

// Shorthands: free, nonneg, nonpos, box:LO,HI, simplex:CAP, cone:CLASSES (one of f + - 0 per
// coordinate), nonconvex_demo; or inline JSON / a .json file, e.g.
// {"type":"box","lower":[...],"upper":[...]} with "-inf"/"inf" strings for infinite endpoints.
ConstraintModel parse_constraint(const std::string& spec, int n);

// free, nonneg, nonpos, or cone:CLASSES.
ConeClassification parse_classification(const std::string& spec, int n);

// "1,2,3" (1-based) to a sorted 0-based index set.
IndexSet parse_support(const std::string& spec, int n);

// JSON documents. Doubles are written with round-trip precision; index sets are 1-based.
std::string trace_to_json(const PursuitTrace& t, int indent = 2);
std::string traces_to_json(const std::vector<PursuitTrace>& ts, int indent = 2);
PursuitTrace trace_from_json(const std::string& text);

std::string report_to_json(const ConditionReport& r, int indent = 2);
std::string bundle_to_json(const CertificateBundle& b, int indent = 2);
std::string constants_to_json(const RecoveryConstants& c, int indent = 2);
std::string counterexample_to_json(const CounterexampleReport& r, int indent = 2);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& text);

}  // namespace cmp::io
