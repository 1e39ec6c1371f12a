#include <cmath>
#include <filesystem>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "cmp/certify.hpp"
#include "cmp/error.hpp"
#include "cmp/io.hpp"
#include "cmp/numeric_policy.hpp"
#include "cmp/pursuit.hpp"
#include "montecarlo.hpp"

namespace {

using namespace cmp;

void emit(const std::string& out, const std::string& text) {
  if (out.empty() || out == "-")
    std::cout << text << (text.empty() || text.back() == '\n' ? "" : "\n");
  else
    io::write_file(out, text.back() == '\n' ? text : text + "\n");
}

// A file path, or an inline comma-separated list of numbers.
Vec load_vector(const std::string& spec) {
  if (std::filesystem::exists(spec)) return io::read_vector_csv(spec);
  std::vector<double> v;
  std::istringstream in(spec);
  std::string tok;
  while (std::getline(in, tok, ',')) {
    try {
      std::size_t used = 0;
      v.push_back(std::stod(tok, &used));
      if (used != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      fail(ErrorCode::ParseError, "'" + spec + "' is neither a file nor a list of numbers");
    }
  }
  return Vec::Map(v.data(), static_cast<Eigen::Index>(v.size()));
}

struct RecoverArgs {
  std::string matrix, y, constraint = "free", out;
  int max_iter = -1;
  double tol = -1.0;
  bool branch_all = false;
};

int cmd_recover(const RecoverArgs& args) {
  const Mat a = io::load_matrix(args.matrix).a;
  const Vec y = load_vector(args.y);
  if (y.size() != a.rows())
    fail(ErrorCode::InvalidArgument, "y has " + std::to_string(y.size()) + " entries, A has " +
                                         std::to_string(a.rows()) + " rows");
  const ConstraintModel p = io::parse_constraint(args.constraint, static_cast<int>(a.cols()));
  PursuitConfig cfg;
  cfg.max_iter = args.max_iter >= 0 ? args.max_iter : static_cast<int>(a.cols());
  cfg.residual_tol = args.tol;
  cfg.tie_tol = NumericPolicy::from_env().tie_tol;
  const double tol = args.tol >= 0 ? args.tol : 1e-10 * y.norm();
  if (args.branch_all) {
    BranchConfig bc;
    bc.pursuit = cfg;
    const std::vector<PursuitTrace> traces = cmp_run_all_branches(a, y, p, bc);
    emit(args.out, io::traces_to_json(traces));
    for (const PursuitTrace& t : traces)
      if (std::sqrt(t.final_residual_sq) > tol) return 2;
    return 0;
  }
  const PursuitTrace t = cmp_run(a, y, p, cfg);
  emit(args.out, io::trace_to_json(t));
  return std::sqrt(t.final_residual_sq) <= tol ? 0 : 2;
}

struct CertifyArgs {
  std::string matrix, support, constraint = "free", mode = "float", out;
  int trials = 400;
  std::uint64_t seed = 1;
};

int cmd_certify(const CertifyArgs& args) {
  const io::MatrixSource src = io::load_matrix(args.matrix);
  const int n = static_cast<int>(src.a.cols());
  CertifyOptions opt;
  opt.policy = NumericPolicy::from_env();
  opt.mode = args.mode == "rational" ? ArithmeticMode::Rational : ArithmeticMode::Float;
  opt.exact_gram = src.exact_gram;
  opt.sample_trials = args.trials;
  opt.seed = args.seed;
  const CertificateBundle b =
      check_fixed_support(src.a, io::parse_support(args.support, n), io::parse_constraint(args.constraint, n), opt);
  emit(args.out, io::bundle_to_json(b));
  return 0;
}

int cmd_counterexample(const std::string& out, int grid_points) {
  CounterexampleOptions opt;
  opt.grid_points = grid_points;
  const CounterexampleReport r = verify_counterexample(opt);
  emit(out, io::counterexample_to_json(r));
  return r.all_passed ? 0 : 2;
}

int cmd_montecarlo(tools::ExperimentConfig cfg, const std::string& support, const std::string& out) {
  if (!support.empty()) {
    const int n = cfg.matrix == "random" ? cfg.n : static_cast<int>(io::load_matrix(cfg.matrix).a.cols());
    cfg.support = io::parse_support(support, n);
  }
  emit(out, tools::rows_to_csv(tools::run_experiment(cfg)));
  return 0;
}

int cmd_constants(const std::string& matrix, int k, const std::string& classification, const std::string& out) {
  const Mat a = io::load_matrix(matrix).a;
  const int n = static_cast<int>(a.cols());
  const ConeClassification c = io::parse_classification(classification.empty() ? "free" : classification, n);
  emit(out, io::constants_to_json(recovery_constants(a, k, c)));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Constrained matching pursuit: recovery runs, fixed-support certificates and recovery sweeps"};
  app.require_subcommand(1);

  RecoverArgs rec;
  auto* recover = app.add_subcommand("recover", "Run the pursuit on A x = y and write the trace as JSON");
  recover->add_option("--matrix", rec.matrix, "CSV path, fixture:NAME or random:M,N,SEED")->required();
  recover->add_option("--y", rec.y, "CSV path or comma-separated values")->required();
  recover->add_option("--constraint", rec.constraint, "Constraint set")->capture_default_str();
  recover->add_option("--max-iter", rec.max_iter, "Iteration cap (default N)");
  recover->add_option("--tol", rec.tol, "Residual norm tolerance (default 1e-10 ||y||)");
  recover->add_flag("--branch-all", rec.branch_all, "Enumerate every tie-induced sequence");
  recover->add_option("--out", rec.out, "Output path (stdout when omitted)");

  CertifyArgs cert;
  auto* certify = app.add_subcommand("certify", "Evaluate the fixed-support recovery conditions");
  certify->add_option("--matrix", cert.matrix, "CSV path, fixture:NAME or random:M,N,SEED")->required();
  certify->add_option("--support", cert.support, "1-based support, e.g. 1,2,3")->required();
  certify->add_option("--constraint", cert.constraint, "Box-product cone")->capture_default_str();
  certify->add_option("--mode", cert.mode, "Arithmetic")
      ->check(CLI::IsMember({"float", "rational"}))
      ->capture_default_str();
  certify->add_option("--trials", cert.trials, "Recovery samples for sufficient-only cases")->capture_default_str();
  certify->add_option("--seed", cert.seed, "Seed for the recovery samples")->capture_default_str();
  certify->add_option("--out", cert.out, "Output path (stdout when omitted)");

  std::string ce_out;
  int ce_grid = 17;
  auto* counter = app.add_subcommand("counterexample", "Verify the built-in counterexample");
  counter->add_option("--out", ce_out, "Output path (stdout when omitted)");
  counter->add_option("--grid-points", ce_grid, "Grid points per axis (odd)")->capture_default_str();

  tools::ExperimentConfig mc;
  std::string mc_support, mc_out;
  auto* monte = app.add_subcommand("montecarlo", "Recovery-rate sweep written as CSV");
  monte->add_option("--matrix", mc.matrix, "random, or a fixed matrix source")->capture_default_str();
  monte->add_option("--m", mc.m, "Rows of random matrices")->capture_default_str();
  monte->add_option("--n", mc.n, "Columns of random matrices")->capture_default_str();
  monte->add_option("--k", mc.k_values, "Sparsity levels")->delimiter(',');
  monte->add_option("--constraint", mc.constraint, "Constraint set")->capture_default_str();
  monte->add_option("--trials", mc.trials, "Trials per sparsity level")->capture_default_str();
  monte->add_option("--seed", mc.seed, "Base seed")->capture_default_str();
  monte->add_option("--jobs", mc.jobs, "Worker threads")->capture_default_str();
  monte->add_option("--support", mc_support, "Plant on this 1-based support");
  monte->add_flag("--branch-all", mc.branch_all, "Require recovery on every tie-induced sequence");
  monte->add_option("--out", mc_out, "Output path (stdout when omitted)");

  std::string k_matrix, k_class, k_out;
  int k_k = 2;
  auto* consts = app.add_subcommand("constants", "Restricted isometry and orthogonality constants");
  consts->add_option("--matrix", k_matrix, "CSV path, fixture:NAME or random:M,N,SEED")->required();
  consts->add_option("--k", k_k, "Sparsity")->capture_default_str();
  consts->add_option("--classification", k_class, "Cone, e.g. free, nonneg or cone:ff+-");
  consts->add_option("--out", k_out, "Output path (stdout when omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*recover) return cmd_recover(rec);
    if (*certify) return cmd_certify(cert);
    if (*counter) return cmd_counterexample(ce_out, ce_grid);
    if (*monte) return cmd_montecarlo(mc, mc_support, mc_out);
    if (*consts) return cmd_constants(k_matrix, k_k, k_class, k_out);
  } catch (const cmp::Error& e) {
    std::cerr << "error [" << cmp::to_string(e.code()) << "]: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
