#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cmp/linalg.hpp"

namespace cmp::tools {

struct ExperimentConfig {
  std::string matrix = "random";  // "random" draws a fresh gaussian unit-column matrix per trial
  int m = 32;
  int n = 64;
  std::vector<int> k_values{2};
  std::string constraint = "free";
  int trials = 100;
  std::uint64_t seed = 1;
  int jobs = 1;
  std::optional<IndexSet> support;  // plant on this support instead of a random one
  bool branch_all = false;
};

struct ExperimentRow {
  int m = 0;
  int n = 0;
  int k = 0;
  std::string constraint;
  int trials = 0;
  double support_rate = 0.0;
  double vector_rate = 0.0;
  double mean_steps = 0.0;
  std::uint64_t seed = 0;
};

std::vector<ExperimentRow> run_experiment(const ExperimentConfig& config);
std::string rows_to_csv(const std::vector<ExperimentRow>& rows);

}  // namespace cmp::tools
