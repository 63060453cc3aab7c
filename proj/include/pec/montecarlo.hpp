#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <variant>

#include "pec/caching.hpp"
#include "pec/datalog.hpp"
#include "pec/erasure.hpp"

// Seeded trial simulation. Trial t of a run with seed s draws every erasure
// from mix64(s, t, index), so an estimate depends only on (scenario, seed,
// trials) and never on thread count or scheduling.
namespace pec::mc {

struct McEstimate {
  std::int64_t successes = 0;
  std::int64_t trials = 0;
  double p_hat = 0.0;  // success rate
  double ci_low = 0.0;
  double ci_high = 0.0;
  double level = 0.95;
  std::uint64_t seed = 0;

  double pe_hat() const { return static_cast<double>(trials - successes) / static_cast<double>(trials); }
  double pe_ci_low() const { return 1.0 - ci_high; }
  double pe_ci_high() const { return 1.0 - ci_low; }
  bool operator==(const McEstimate&) const = default;
};

// E ~ Bin(kappa, eps); success iff E <= r.
struct CodedAnalytic {
  std::int64_t kappa;
  double eps;
  std::int64_t r;
};

// N exposed leaves; success iff none is erased.
struct UncAnalytic {
  std::int64_t n;
  double eps;
};

// A full noisy base is sampled and the real decoder runs on it.
struct EndToEnd {
  Fact query;
  Architecture arch;
  Index m;
  ErasureSpec spec;
  PollutionSpec pollution;
  std::variant<DerivationCache, CodedCache> plan;
};

using Scenario = std::variant<CodedAnalytic, UncAnalytic, EndToEnd>;

std::string scenario_name(const Scenario& s);
std::string scenario_params(const Scenario& s);

bool run_trial(const Scenario& s, std::uint64_t seed, std::uint64_t trial);

// OpenMP trial loop with an integer sum reduction.
McEstimate simulate(const Scenario& s, std::int64_t trials, std::uint64_t seed, double level = 0.95);
// Single-threaded reference; must agree bit for bit with simulate().
McEstimate simulate_serial(const Scenario& s, std::int64_t trials, std::uint64_t seed,
                           double level = 0.95);

// Exact beta-quantile interval; 0 successes gives low 0, all successes high 1.
std::pair<double, double> clopper_pearson(std::int64_t successes, std::int64_t trials, double level);

struct StructureFractions {
  double collision_frac;      // head tuples with a repeated coordinate
  double non_colliding_frac;  // merge heads whose merge steps all join distinct bodies
  std::int64_t samples;
};
StructureFractions sample_structure_fractions(Index m, const Architecture& arch, int d,
                                              std::int64_t samples, std::uint64_t seed);

}  // namespace pec::mc
