#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pec/datalog.hpp"

namespace pec::exp {

// Empty lists and unset options fall back to the per-experiment grids.
struct ExperimentConfig {
  int id = 1;
  Index m = 256;
  int k = 2;
  std::optional<double> delta;  // 0.1, or 0.3 for experiment 4
  std::vector<double> eps;
  std::vector<std::int64_t> kappa;
  std::vector<std::int64_t> r;
  std::vector<double> alpha;
  std::int64_t trials = 1000000;
  std::uint64_t seed = 1;
  std::string out;  // empty: stdout
};

// Fills every unset field with the experiment's default grid.
ExperimentConfig with_defaults(ExperimentConfig cfg);

// CSV text for one experiment; identical configs give identical bytes.
std::string run_experiment(const ExperimentConfig& cfg);

// Common-core query family: L dependency sets of size kappa sharing the
// first round(alpha kappa) indices, private indices otherwise.
std::vector<std::vector<Index>> common_core_queries(int L, std::int64_t kappa, double alpha);

struct MultiQueryConfig {
  int L;
  double alpha;
};
// The eight (L, alpha) configurations spanning n_eff in [500, 5000] at kappa = 500.
const std::vector<MultiQueryConfig>& multi_query_configs();

struct TableRow {
  char panel;
  bool coded;
  double eps;
  std::int64_t kappa;
  std::int64_t param;  // r for coded rows, N for uncoded rows
};
const std::vector<TableRow>& table_rows();

}  // namespace pec::exp
