#include "cmp/io.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "cmp/error.hpp"
#include "cmp/fixtures.hpp"
#include "cmp/random.hpp"

namespace cmp::io {

using nlohmann::json;

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(cur);
  return out;
}

double parse_number(const std::string& tok) {
  std::string t;
  for (char c : tok)
    if (!std::isspace(static_cast<unsigned char>(c))) t += c;
  if (t == "inf" || t == "+inf" || t == "Infinity") return std::numeric_limits<double>::infinity();
  if (t == "-inf" || t == "-Infinity") return -std::numeric_limits<double>::infinity();
  try {
    std::size_t used = 0;
    const double v = std::stod(t, &used);
    if (used != t.size()) throw std::invalid_argument(t);
    return v;
  } catch (const std::exception&) {
    fail(ErrorCode::ParseError, "not a number: '" + tok + "'");
  }
}

std::vector<double> parse_row(const std::string& line) {
  std::string norm = line;
  for (char& c : norm)
    if (c == ',' || c == ';' || c == '\t') c = ' ';
  std::istringstream in(norm);
  std::vector<double> out;
  std::string tok;
  while (in >> tok) out.push_back(parse_number(tok));
  return out;
}

std::vector<std::vector<double>> read_rows(const std::string& path) {
  std::istringstream in(read_file(path));
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    rows.push_back(parse_row(line));
  }
  return rows;
}

json endpoint(double v) {
  if (std::isinf(v)) return v > 0 ? json("inf") : json("-inf");
  return json(v);
}

double endpoint_value(const json& j) {
  if (j.is_null()) fail(ErrorCode::ParseError, "null endpoint");
  if (j.is_string()) return parse_number(j.get<std::string>());
  return j.get<double>();
}

json vec_json(const Vec& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(endpoint(v(i)));
  return a;
}

Vec json_vec(const json& a) {
  Vec v(static_cast<Eigen::Index>(a.size()));
  for (std::size_t i = 0; i < a.size(); ++i) v(static_cast<Eigen::Index>(i)) = endpoint_value(a[i]);
  return v;
}

json set_json(const IndexSet& s) {
  json a = json::array();
  for (int i : s) a.push_back(i + 1);
  return a;
}

IndexSet json_set(const json& a) {
  IndexSet s;
  for (const json& x : a) s.push_back(x.get<int>() - 1);
  return s;
}

ConstraintModel constraint_from_json(const json& j, int n) {
  const std::string type = j.at("type").get<std::string>();
  if (type == "box") {
    std::vector<ExtendedReal> lo, hi;
    for (const json& x : j.at("lower")) lo.emplace_back(endpoint_value(x));
    for (const json& x : j.at("upper")) hi.emplace_back(endpoint_value(x));
    if (static_cast<int>(lo.size()) != n || static_cast<int>(hi.size()) != n)
      fail(ErrorCode::ParseError, "box bounds must have length " + std::to_string(n));
    return ConstraintModel::box(lo, hi);
  }
  if (type == "simplex") {
    Vec w = j.contains("weights") ? json_vec(j.at("weights")) : Vec::Ones(n);
    if (w.size() != n) fail(ErrorCode::ParseError, "simplex weights must have length " + std::to_string(n));
    return ConstraintModel::simplex(w, j.value("cap", 1.0));
  }
  if (type == "hyperplane") {
    Vec d = json_vec(j.at("d"));
    if (d.size() != n) fail(ErrorCode::ParseError, "hyperplane normal must have length " + std::to_string(n));
    return ConstraintModel::hyperplane(d);
  }
  if (type == "nonconvex_demo" || type == "nonconvex-demo") return ConstraintModel::nonconvex_demo();
  if (j.contains("n") && j.at("n").get<int>() != n)
    fail(ErrorCode::ParseError, "constraint dimension " + std::to_string(j.at("n").get<int>()) + " differs from N = " +
                                    std::to_string(n));
  if (type == "cone") return parse_constraint("cone:" + j.at("classes").get<std::string>(), n);
  return parse_constraint(type, n);
}

json margin_json(const Margin& m) {
  json j{{"value", m.value}, {"state", std::string(to_string(m.state))}};
  if (!m.exact.empty()) j["exact"] = m.exact;
  return j;
}

json report_json(const ConditionReport& r) {
  json j;
  j["condition_id"] = r.condition_id;
  j["verdict"] = std::string(to_string(r.verdict));
  j["margins"] = json::object();
  for (const auto& [k, m] : r.margins) j["margins"][k] = margin_json(m);
  j["witness"] = json::object();
  for (const auto& [k, v] : r.witness) j["witness"][k] = v;
  if (!r.notes.empty()) j["notes"] = r.notes;
  return j;
}

json trace_json(const PursuitTrace& t) {
  json j;
  j["terminated_by"] = std::string(to_string(t.terminated_by));
  j["final_residual_sq"] = t.final_residual_sq;
  j["final_x"] = vec_json(t.final_x);
  j["steps"] = json::array();
  for (const PursuitStep& s : t.steps) {
    json st;
    st["k"] = s.k;
    st["chosen"] = s.chosen + 1;
    st["ties"] = set_json(s.ties);
    st["J"] = set_json(s.j_set);
    st["x"] = vec_json(s.x);
    st["residual_sq"] = s.residual_sq;
    st["informative"] = s.informative;
    st["unique"] = s.unique;
    st["scores"] = json::array();
    for (const CoordinateScore& c : s.scores) {
      st["scores"].push_back({{"j", c.j + 1},
                              {"t_tilde", c.t_tilde},
                              {"t_star", c.t_star},
                              {"g_star", c.g_star},
                              {"interval", {endpoint(c.interval.lo.as_double()), endpoint(c.interval.hi.as_double())}},
                              {"truncated", c.interval.truncated}});
    }
    j["steps"].push_back(std::move(st));
  }
  return j;
}

StopReason stop_from_string(const std::string& s) {
  if (s == "ResidualTol") return StopReason::ResidualTol;
  if (s == "MaxIter") return StopReason::MaxIter;
  if (s == "Stall") return StopReason::Stall;
  fail(ErrorCode::ParseError, "unknown stop reason '" + s + "'");
}

}  // namespace

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::ParseError, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::InvalidArgument, "cannot write '" + path + "'");
  out << text;
}

Mat read_matrix_csv(const std::string& path) {
  const auto rows = read_rows(path);
  if (rows.empty()) fail(ErrorCode::ParseError, "'" + path + "' holds no matrix rows");
  const std::size_t cols = rows.front().size();
  Mat a(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != cols) fail(ErrorCode::ParseError, "ragged row " + std::to_string(i + 1) + " in '" + path + "'");
    for (std::size_t j = 0; j < cols; ++j) a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  }
  return a;
}

Vec read_vector_csv(const std::string& path) {
  std::vector<double> all;
  for (const auto& r : read_rows(path)) all.insert(all.end(), r.begin(), r.end());
  if (all.empty()) fail(ErrorCode::ParseError, "'" + path + "' holds no numbers");
  return Vec::Map(all.data(), static_cast<Eigen::Index>(all.size()));
}

std::string matrix_to_csv(const Mat& a) {
  std::ostringstream out;
  out.precision(17);
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) out << (j ? "," : "") << a(i, j);
    out << "\n";
  }
  return out.str();
}

MatrixSource load_matrix(const std::string& spec) {
  MatrixSource src;
  if (spec == "fixture:counterexample") {
    src.a = fixtures::counterexample_matrix();
    src.exact_gram = fixtures::counterexample_gram_exact();
    return src;
  }
  if (spec == "fixture:nonconvex") {
    src.a = fixtures::nonconvex_example().a;
    return src;
  }
  if (spec.rfind("fixture:extension", 0) == 0) {
    int m = 6, n = 6;
    if (spec.size() > std::string("fixture:extension").size()) {
      const std::string dims = spec.substr(std::string("fixture:extension:").size());
      const auto parts = split(dims, 'x');
      if (parts.size() != 2) fail(ErrorCode::ParseError, "extension size must read MxN");
      m = static_cast<int>(parse_number(parts[0]));
      n = static_cast<int>(parse_number(parts[1]));
    }
    src.a = fixtures::counterexample_extension(m, n);
    src.exact_gram = fixtures::counterexample_extension_gram_exact(n);
    return src;
  }
  if (spec.rfind("random:", 0) == 0) {
    const auto parts = split(spec.substr(7), ',');
    if (parts.size() != 3) fail(ErrorCode::ParseError, "random source must read random:M,N,SEED");
    std::mt19937_64 rng(static_cast<std::uint64_t>(parse_number(parts[2])));
    src.a = gaussian_unit_matrix(static_cast<int>(parse_number(parts[0])), static_cast<int>(parse_number(parts[1])), rng);
    return src;
  }
  src.a = read_matrix_csv(spec);
  return src;
}

ConstraintModel parse_constraint(const std::string& spec, int n) {
  if (spec.empty()) fail(ErrorCode::ParseError, "empty constraint");
  if (spec.front() == '{') {
    try {
      return constraint_from_json(json::parse(spec), n);
    } catch (const json::exception& e) {
      fail(ErrorCode::ParseError, std::string("constraint JSON: ") + e.what());
    }
  }
  if (spec.size() > 5 && spec.substr(spec.size() - 5) == ".json") return parse_constraint(read_file(spec), n);
  if (spec == "free") return ConstraintModel::free(n);
  if (spec == "nonneg") return ConstraintModel::nonneg(n);
  if (spec == "nonpos") return ConstraintModel::nonpos(n);
  if (spec == "nonconvex_demo" || spec == "nonconvex-demo") return ConstraintModel::nonconvex_demo();
  if (spec.rfind("box:", 0) == 0) {
    const auto parts = split(spec.substr(4), ',');
    if (parts.size() != 2) fail(ErrorCode::ParseError, "box shorthand must read box:LO,HI");
    return ConstraintModel::box(std::vector<double>(static_cast<std::size_t>(n), parse_number(parts[0])),
                                std::vector<double>(static_cast<std::size_t>(n), parse_number(parts[1])));
  }
  if (spec.rfind("simplex:", 0) == 0) return ConstraintModel::simplex(Vec::Ones(n), parse_number(spec.substr(8)));
  if (spec.rfind("cone:", 0) == 0) {
    const std::string cls = spec.substr(5);
    if (static_cast<int>(cls.size()) != n)
      fail(ErrorCode::ParseError, "cone classes must have one character per coordinate (" + std::to_string(n) + ")");
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> lo, hi;
    for (char c : cls) {
      switch (c) {
        case 'f': lo.push_back(-inf); hi.push_back(inf); break;
        case '+': lo.push_back(0.0); hi.push_back(inf); break;
        case '-': lo.push_back(-inf); hi.push_back(0.0); break;
        case '0': lo.push_back(0.0); hi.push_back(0.0); break;
        default: fail(ErrorCode::ParseError, std::string("unknown cone class '") + c + "'");
      }
    }
    return ConstraintModel::box(lo, hi);
  }
  fail(ErrorCode::ParseError, "unknown constraint '" + spec + "'");
}

ConeClassification parse_classification(const std::string& spec, int n) {
  const ConstraintModel p = parse_constraint(spec, n);
  if (!p.is_cone()) fail(ErrorCode::NotACone, "classification needs a cone, got " + p.describe());
  return classify_cone(p);
}

IndexSet parse_support(const std::string& spec, int n) {
  IndexSet s;
  for (const std::string& tok : split(spec, ',')) {
    if (tok.find_first_not_of(" \t") == std::string::npos) continue;
    const double v = parse_number(tok);
    const int i = static_cast<int>(v);
    if (i != v || i < 1 || i > n) fail(ErrorCode::ParseError, "support index '" + tok + "' outside 1.." + std::to_string(n));
    s.push_back(i - 1);
  }
  std::sort(s.begin(), s.end());
  if (std::adjacent_find(s.begin(), s.end()) != s.end()) fail(ErrorCode::ParseError, "duplicate support index");
  if (s.empty()) fail(ErrorCode::ParseError, "empty support");
  return s;
}

std::string trace_to_json(const PursuitTrace& t, int indent) { return trace_json(t).dump(indent); }

std::string traces_to_json(const std::vector<PursuitTrace>& ts, int indent) {
  json j;
  j["branches"] = json::array();
  for (const PursuitTrace& t : ts) j["branches"].push_back(trace_json(t));
  return j.dump(indent);
}

PursuitTrace trace_from_json(const std::string& text) {
  try {
    const json j = json::parse(text);
    PursuitTrace t;
    t.terminated_by = stop_from_string(j.at("terminated_by").get<std::string>());
    t.final_residual_sq = j.at("final_residual_sq").get<double>();
    t.final_x = json_vec(j.at("final_x"));
    for (const json& st : j.at("steps")) {
      PursuitStep s;
      s.k = st.at("k").get<int>();
      s.chosen = st.at("chosen").get<int>() - 1;
      s.ties = json_set(st.at("ties"));
      s.j_set = json_set(st.at("J"));
      s.x = json_vec(st.at("x"));
      s.residual_sq = st.at("residual_sq").get<double>();
      s.informative = st.at("informative").get<bool>();
      s.unique = st.at("unique").get<bool>();
      for (const json& c : st.at("scores")) {
        CoordinateScore cs;
        cs.j = c.at("j").get<int>() - 1;
        cs.t_tilde = c.at("t_tilde").get<double>();
        cs.t_star = c.at("t_star").get<double>();
        cs.g_star = c.at("g_star").get<double>();
        cs.interval.lo = ExtendedReal(endpoint_value(c.at("interval")[0]));
        cs.interval.hi = ExtendedReal(endpoint_value(c.at("interval")[1]));
        cs.interval.truncated = c.value("truncated", false);
        s.scores.push_back(cs);
      }
      t.steps.push_back(std::move(s));
    }
    return t;
  } catch (const json::exception& e) {
    fail(ErrorCode::ParseError, std::string("trace JSON: ") + e.what());
  }
}

std::string report_to_json(const ConditionReport& r, int indent) { return report_json(r).dump(indent); }

std::string bundle_to_json(const CertificateBundle& b, int indent) {
  json j;
  j["case_id"] = b.case_id;
  j["scope"] = b.scope;
  j["mode"] = std::string(to_string(b.mode));
  j["aggregate"] = std::string(to_string(b.aggregate));
  j["has_boundary"] = b.has_boundary();
  j["conditions"] = json::array();
  for (const ConditionReport& r : b.conditions) j["conditions"].push_back(report_json(r));
  if (!b.notes.empty()) j["notes"] = b.notes;
  return j.dump(indent);
}

std::string constants_to_json(const RecoveryConstants& c, int indent) {
  json j;
  j["K"] = c.k;
  if (c.delta_at_least_one)
    j["delta_hat"] = "ReportedAtLeastOne";
  else
    j["delta_hat"] = c.delta_hat;
  j["theta_hat"] = c.theta_hat;
  j["theta_hat_literal"] = c.theta_hat_literal;
  j["worst_support"] = set_json(c.worst_support);
  j["classification"] = {{"I1", set_json(c.classification.i1)},
                         {"I+", set_json(c.classification.iplus)},
                         {"I-", set_json(c.classification.iminus)},
                         {"I0", set_json(c.classification.i0)}};
  j["margin"] = c.margin;
  j["satisfied"] = c.satisfied;
  j["notes"] = {"theta_hat restricts j to the complement of supp(x); theta_hat_literal lets j range over every index"};
  return j.dump(indent);
}

std::string counterexample_to_json(const CounterexampleReport& r, int indent) {
  json j;
  j["all_passed"] = r.all_passed;
  j["items"] = json::array();
  for (const CounterexampleItem& i : r.items)
    j["items"].push_back({{"id", i.id}, {"name", i.name}, {"passed", i.passed}, {"detail", i.detail}});
  return j.dump(indent);
}

}  // namespace cmp::io
