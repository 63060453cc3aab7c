#pragma once

#include <cstdint>
#include <vector>

#include "pec/datalog.hpp"

namespace pec {

// Either one erasure probability for every base fact or one per index.
class ErasureSpec {
public:
  static ErasureSpec uniform(double eps);
  static ErasureSpec per_fact(std::vector<double> eps);

  bool is_uniform() const { return per_fact_.empty(); }
  double uniform_eps() const;
  const std::vector<double>& per_fact_eps() const { return per_fact_; }
  // Erasure probability of base index i (1-based).
  double eps(Index i) const;
  // Indices covered by a per-fact spec; 0 for uniform.
  Index size() const { return static_cast<Index>(per_fact_.size()); }

private:
  ErasureSpec() = default;
  double eps_ = 0.0;
  std::vector<double> per_fact_;
};

// ln(1/(1-eps)): the additive survival cost of one fact.
double erasure_cost(double eps);

struct PollutionSpec {
  std::vector<Index> spurious;  // indices > m, never genuine
};

struct NoisyBase {
  Index m = 0;
  std::vector<bool> survivors;  // survivors[i-1] for index i
  std::vector<Index> spurious;
  std::uint64_t seed = 0;
  std::uint64_t trial = 0;

  bool survives(Index i) const { return i >= 1 && i <= m && survivors[i - 1]; }
  std::size_t survivor_count() const;
  // Surviving genuine facts plus spurious EDB-shaped facts.
  FactSet facts() const;
  std::string mask_string() const;
};

// Counter-based generator: a stateless bijective mix of (seed, stream, counter).
std::uint64_t mix64(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter);
double unit_uniform(std::uint64_t bits);
// Erasure threshold t such that bits < t happens with probability eps.
std::uint64_t erasure_threshold(double eps);

// Index i is erased in (seed, trial) iff mix64(seed, trial, i) < threshold(eps_i).
NoisyBase sample_noisy_base(Index m, const ErasureSpec& spec, const PollutionSpec& pollution,
                            std::uint64_t seed, std::uint64_t trial = 0);

// floor(ln(1/(1-delta)) / ln(1/(1-eps))); eps = 0 throws std::out_of_range.
std::int64_t resilience_threshold(double eps, double delta);

struct Vulnerability {
  double v;       // sum of per-fact costs
  double p_surv;  // exp(-v)
};
Vulnerability vulnerability(const std::vector<Index>& deps, const ErasureSpec& spec);

// Largest j such that the j cheapest costs fit in ln(1/(1-delta)).
// m bounds the index range of a uniform spec.
std::int64_t m_eff(const ErasureSpec& spec, double delta, Index m);

// max over lost facts of their depth from the survivors; Unreachable when
// any lost fact cannot be rederived. lost must be a subset of kb.facts.
Depth reconstruction_depth(const KnowledgeBase& kb, const Architecture& arch, const FactSet& lost);

// Sound / spurious / lost split of all level-d queries over [1..m] plus the
// spurious indices, comparing derivability from the full base and from the
// noisy base.
struct QueryPartition {
  std::size_t sound = 0;
  std::size_t spurious = 0;
  std::size_t lost = 0;
};
QueryPartition partition_queries(const NoisyBase& noisy, const Architecture& arch, int d);

}  // namespace pec
