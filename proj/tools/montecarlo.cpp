#include "montecarlo.hpp"

#include <atomic>
#include <exception>
#include <sstream>
#include <thread>

#include "cmp/error.hpp"
#include "cmp/io.hpp"
#include "cmp/pursuit.hpp"
#include "cmp/random.hpp"

namespace cmp::tools {

namespace {

struct TrialOutcome {
  bool support = false;
  bool vector = false;
  double steps = 0.0;
};

TrialOutcome single_sequence(const Mat& a, const Vec& z, const ConstraintModel& p) {
  const IndexSet s = support(z);
  PursuitConfig cfg;
  cfg.max_iter = static_cast<int>(s.size());
  const PursuitTrace t = cmp_run(a, a * z, p, cfg);
  TrialOutcome out;
  out.steps = static_cast<double>(t.steps.size());
  out.support = t.steps.size() == s.size() && (s.empty() || t.steps.back().j_set == s);
  out.vector = out.support && (s.empty() || t.steps.back().unique) &&
               (t.final_x - z).lpNorm<Eigen::Infinity>() <= 1e-7;
  return out;
}

TrialOutcome branch_all(const Mat& a, const Vec& z, const ConstraintModel& p) {
  const RecoveryResult r = verify_exact_recovery(a, z, p);
  TrialOutcome out;
  out.support = r.support_recovered;
  out.vector = r.vector_recovered;
  double total = 0.0;
  for (const PursuitTrace& t : r.traces) total += static_cast<double>(t.steps.size());
  out.steps = r.traces.empty() ? 0.0 : total / static_cast<double>(r.traces.size());
  return out;
}

template <class F>
void parallel_for(int count, int jobs, F&& body) {
  if (jobs <= 1 || count <= 1) {
    for (int i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::atomic<bool> failed{false};
  std::vector<std::thread> pool;
  for (int w = 0; w < std::min(jobs, count); ++w) {
    pool.emplace_back([&] {
      for (int i = next++; i < count && !failed; i = next++) {
        try {
          body(i);
        } catch (...) {
          if (!failed.exchange(true)) error = std::current_exception();
        }
      }
    });
  }
  for (std::thread& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace

std::vector<ExperimentRow> run_experiment(const ExperimentConfig& config) {
  if (config.trials <= 0) fail(ErrorCode::InvalidArgument, "trials must be positive");
  const bool fresh = config.matrix == "random";
  std::optional<Mat> fixed;
  if (!fresh) fixed = io::load_matrix(config.matrix).a;
  const int m = fresh ? config.m : static_cast<int>(fixed->rows());
  const int n = fresh ? config.n : static_cast<int>(fixed->cols());
  const ConstraintModel p = io::parse_constraint(config.constraint, n);
  const IndexSet pool = plantable_indices(p);

  std::vector<ExperimentRow> rows;
  for (std::size_t ki = 0; ki < config.k_values.size(); ++ki) {
    const int k = config.k_values[ki];
    if (config.support && static_cast<int>(config.support->size()) != k)
      fail(ErrorCode::InvalidArgument, "--support size differs from K = " + std::to_string(k));
    if (k < 0 || k > static_cast<int>(pool.size()))
      fail(ErrorCode::InvalidArgument, "K = " + std::to_string(k) + " exceeds the plantable coordinates");
    std::vector<TrialOutcome> outcomes(static_cast<std::size_t>(config.trials));
    const std::uint64_t stream_base = static_cast<std::uint64_t>(ki) * static_cast<std::uint64_t>(config.trials);
    parallel_for(config.trials, config.jobs, [&](int t) {
      std::mt19937_64 rng = trial_rng(config.seed, stream_base + static_cast<std::uint64_t>(t));
      const Mat a = fresh ? gaussian_unit_matrix(m, n, rng) : *fixed;
      const IndexSet s = config.support ? *config.support : random_support(pool, k, rng);
      const Vec z = planted_vector(p, s, rng);
      outcomes[static_cast<std::size_t>(t)] = config.branch_all ? branch_all(a, z, p) : single_sequence(a, z, p);
    });
    ExperimentRow row;
    row.m = m;
    row.n = n;
    row.k = k;
    row.constraint = config.constraint;
    row.trials = config.trials;
    row.seed = config.seed;
    for (const TrialOutcome& o : outcomes) {
      row.support_rate += o.support ? 1.0 : 0.0;
      row.vector_rate += o.vector ? 1.0 : 0.0;
      row.mean_steps += o.steps;
    }
    row.support_rate /= config.trials;
    row.vector_rate /= config.trials;
    row.mean_steps /= config.trials;
    rows.push_back(row);
  }
  return rows;
}

std::string rows_to_csv(const std::vector<ExperimentRow>& rows) {
  std::ostringstream out;
  out.precision(17);
  out << "m,N,K,constraint,trials,support_rate,vector_rate,mean_steps,seed\n";
  for (const ExperimentRow& r : rows) {
    std::string c = r.constraint;
    if (c.find_first_of(",\"\n") != std::string::npos) {
      std::string q = "\"";
      for (char ch : c) q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
      c = q + "\"";
    }
    out << r.m << "," << r.n << "," << r.k << "," << c << "," << r.trials << "," << r.support_rate << ","
        << r.vector_rate << "," << r.mean_steps << "," << r.seed << "\n";
  }
  return out.str();
}

}  // namespace cmp::tools
