#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <limits>
#include <random>
#include <string>

#include <json.hpp>

#include "cmp/error.hpp"
#include "cmp/io.hpp"
#include "oracles.hpp"

using namespace cmp;
namespace fs = std::filesystem;

namespace {

const double kInf = std::numeric_limits<double>::infinity();

fs::path scratch() {
  const fs::path dir = fs::temp_directory_path() / "cmp_test_io";
  fs::create_directories(dir);
  return dir;
}

int run(const std::string& args) {
  const std::string cmd = std::string(CMPURSUIT_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

}  // namespace

TEST_CASE("constraint shorthands") {
  CHECK(io::parse_constraint("free", 3).describe() == ConstraintModel::free(3).describe());
  CHECK(io::parse_constraint("nonneg", 3).describe() == ConstraintModel::nonneg(3).describe());
  CHECK(io::parse_constraint("box:-1,2", 2).describe() == ConstraintModel::box({-1, -1}, {2, 2}).describe());
  CHECK(io::parse_constraint("simplex:1.5", 2).describe() == ConstraintModel::simplex(Vec::Ones(2), 1.5).describe());
  CHECK(io::parse_constraint("cone:f+-0", 4).describe() ==
        ConstraintModel::box({-kInf, 0, -kInf, 0}, {kInf, kInf, 0, 0}).describe());
  CHECK(io::parse_constraint("nonconvex-demo", 2).is_nonconvex_demo());
  CHECK_THROWS_AS(io::parse_constraint("cone:f+", 3), Error);
  CHECK_THROWS_AS(io::parse_constraint("sphere", 3), Error);
}

TEST_CASE("constraint JSON") {
  const ConstraintModel b =
      io::parse_constraint(R"({"type":"box","lower":["-inf",0],"upper":[1,"inf"]})", 2);
  CHECK(b.describe() == ConstraintModel::box({-kInf, 0}, {1, kInf}).describe());
  const ConstraintModel s = io::parse_constraint(R"({"type":"simplex","weights":[1,2],"cap":3})", 2);
  Vec w(2);
  w << 1, 2;
  CHECK(s.describe() == ConstraintModel::simplex(w, 3).describe());
  const ConstraintModel h = io::parse_constraint(R"({"type":"hyperplane","d":[1,-1,2]})", 3);
  CHECK(h.as_hyperplane() != nullptr);
  const fs::path file = scratch() / "c.json";
  io::write_file(file.string(), R"({"type":"nonneg","n":4})");
  CHECK(io::parse_constraint(file.string(), 4).describe() == ConstraintModel::nonneg(4).describe());
  CHECK_THROWS_AS(io::parse_constraint(file.string(), 5), Error);
}

TEST_CASE("support parsing") {
  CHECK(io::parse_support("3,1,2", 4) == IndexSet{0, 1, 2});
  CHECK_THROWS_AS(io::parse_support("0,1", 4), Error);
  CHECK_THROWS_AS(io::parse_support("1,5", 4), Error);
  CHECK_THROWS_AS(io::parse_support("1,1", 4), Error);
  CHECK_THROWS_AS(io::parse_support("a", 4), Error);
}

TEST_CASE("matrix sources") {
  const io::MatrixSource c = io::load_matrix("fixture:counterexample");
  CHECK(c.a.rows() == 4);
  CHECK(c.exact_gram.has_value());
  const io::MatrixSource e = io::load_matrix("fixture:extension:5x7");
  CHECK(e.a.rows() == 5);
  CHECK(e.a.cols() == 7);
  const io::MatrixSource r1 = io::load_matrix("random:5,9,3");
  const io::MatrixSource r2 = io::load_matrix("random:5,9,3");
  CHECK(r1.a == r2.a);
  const fs::path file = scratch() / "a.csv";
  io::write_file(file.string(), "# header\n1,0\n0;1\n\n2 2\n");
  const Mat a = io::load_matrix(file.string()).a;
  CHECK(a.rows() == 3);
  CHECK(a(2, 1) == 2.0);
  CHECK_THROWS_AS(io::load_matrix((scratch() / "missing.csv").string()), Error);
}

TEST_CASE("trace JSON round trip and replay") {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g;
  const std::vector<ConstraintModel> models = {
      ConstraintModel::free(10), ConstraintModel::nonneg(10),
      ConstraintModel::box(std::vector<double>(10, -0.5), std::vector<double>(10, kInf))};
  for (int t = 0; t < 30; ++t) {
    const Mat a = oracle_ref::random_unit_columns(6, 10, rng);
    Vec y(6);
    for (int i = 0; i < 6; ++i) y(i) = g(rng);
    const ConstraintModel& p = models[static_cast<std::size_t>(t % 3)];
    const PursuitTrace tr = cmp_run(a, y, p);
    const PursuitTrace back = io::trace_from_json(io::trace_to_json(tr));
    REQUIRE(back.steps.size() == tr.steps.size());
    CHECK(back.terminated_by == tr.terminated_by);
    CHECK(back.final_x == tr.final_x);
    Vec prev = Vec::Zero(10);
    for (std::size_t k = 0; k < back.steps.size(); ++k) {
      const PursuitStep& s = back.steps[k];
      CHECK(s.chosen == tr.steps[k].chosen);
      CHECK(s.j_set == tr.steps[k].j_set);
      CHECK(s.x == tr.steps[k].x);
      for (const CoordinateScore& sc : s.scores) {
        const CoordinateScore re = coordinate_score(a, y, p, prev, sc.j);
        CHECK(std::abs(re.g_star - sc.g_star) <= 1e-12 * (1.0 + std::abs(sc.g_star)));
        CHECK(std::abs(re.t_star - sc.t_star) <= 1e-12 * (1.0 + std::abs(sc.t_star)));
        CHECK(re.interval.lo == sc.interval.lo);
        CHECK(re.interval.hi == sc.interval.hi);
      }
      prev = s.x;
    }
  }
}

TEST_CASE("report JSON uses one-based indices and string verdicts") {
  const CertificateBundle b = check_fixed_support(Mat::Identity(4, 4), {0, 2}, ConstraintModel::nonneg(4));
  const nlohmann::json j = nlohmann::json::parse(io::bundle_to_json(b));
  CHECK(j.at("case_id") == "nonneg_support_2");
  CHECK(j.at("aggregate") == "Holds");
  CHECK(j.at("conditions").is_array());
}

TEST_CASE("command-line exit codes") {
  const fs::path dir = scratch();
  const std::string eye = (dir / "eye.csv").string();
  io::write_file(eye, "1,0,0\n0,1,0\n0,0,1\n");
  const std::string out = (dir / "trace.json").string();

  CHECK(run("recover --matrix " + eye + " --y 0,0,1 --out " + out) == 0);
  nlohmann::json t = nlohmann::json::parse(io::read_file(out));
  CHECK(t.at("steps").size() == 1);
  CHECK(t.at("steps")[0].at("chosen") == 3);

  const std::string wide = (dir / "eye6.csv").string();
  io::write_file(wide, io::matrix_to_csv(Mat::Identity(6, 6)));
  CHECK(run("recover --matrix " + wide + " --y 1,2,3,4,5,6 --max-iter 5 --out " + out) == 2);
  t = nlohmann::json::parse(io::read_file(out));
  CHECK(t.at("steps").size() == 5);

  const std::string cert = (dir / "cert.json").string();
  CHECK(run("certify --matrix " + eye + " --support 1,2 --constraint free --out " + cert) == 0);
  nlohmann::json c = nlohmann::json::parse(io::read_file(cert));
  CHECK(c.at("aggregate") == "Holds");

  const std::string near = (dir / "near.csv").string();
  io::write_file(near, "1,0.99999999,0.5\n0,0.00014142,0.5\n0,0,0.70710678\n");
  CHECK(run("certify --matrix " + near + " --support 1,2 --constraint free --out " + cert) == 0);
  c = nlohmann::json::parse(io::read_file(cert));
  CHECK(c.at("aggregate") == "Fails");

  CHECK(run("certify --matrix " + eye + " --support 4 --out " + cert) == 1);
  CHECK(run("recover --bogus") == 1);
}
