#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "pec/datalog.hpp"
#include "pec/erasure.hpp"
#include "pec/reed_solomon.hpp"

namespace pec {

// Reliable facts stored beside the noisy base; the decoder must rederive q
// from survivors plus these facts.
struct DerivationCache {
  FactSet facts;
  double storage_bits = 0.0;
  std::vector<Index> protected_leaves;  // leaves of G that are not exposed
  std::size_t exposed_count = 0;        // kappa - |protected_leaves|
  double index_bits = 0.0;              // storage cost of one tuple coordinate
};

// Parity of a systematic RS code over the query's distinct leaf indices
// (symbol value = index - 1).
struct CodedCache {
  std::uint32_t prime = 0;
  std::size_t kappa = 0;
  int r = 0;
  std::vector<rs::Symbol> parity;
  std::vector<Index> positions;  // distinct dependency indices, ascending

  double storage_bits(Index m, BitAccounting acct) const;
};

struct JointPlan {
  std::size_t n_eff = 0;
  double overlap_index = 0.0;
  std::vector<Index> union_indices;
  std::optional<CodedCache> coded;
  std::optional<DerivationCache> unc;
};

// Exposed leaves: EDB vertices of G reachable from the root without passing
// through a cached vertex. With repeated coordinates a leaf under a cached
// vertex can still be exposed through another occurrence.
std::vector<Index> exposed_leaves(const Fact& q, const DerivationCache& cache, Index m,
                                  const Architecture& arch);

// Uniform-noise plan leaving at most N*(eps, delta) leaves exposed.
// Chain caches the shallowest prefix vertex leaving at most N* exposed;
// Merge caches level-1 vertices left to right until at most N* remain.
DerivationCache plan_derivation_cache(const Fact& q, Index m, const Architecture& arch,
                                      const ErasureSpec& spec, double delta,
                                      BitAccounting acct = BitAccounting::Ideal);

// Protects the kappa* costliest leaves by caching them as base facts.
// Leaves are ranked by (cost, index) ascending; the cheapest prefix whose
// total cost fits in ln(1/(1-delta)) stays exposed.
DerivationCache water_filling_cache(const Fact& q, Index m, const Architecture& arch,
                                    const ErasureSpec& per_fact, double delta,
                                    BitAccounting acct = BitAccounting::Ideal);

// Smallest protection set size by exhaustive search over leaf subsets.
std::size_t brute_force_protection(const std::vector<double>& costs, double delta);

// Restates the cache as exactly the given fact set, recomputing exposed
// leaves and storage against q's trace.
DerivationCache make_cache(const Fact& q, Index m, const Architecture& arch, FactSet facts,
                           BitAccounting acct = BitAccounting::Ideal);

// q in Cn(survivors U spurious U cache.facts).
bool derivation_decode(const Fact& q, const NoisyBase& noisy, const DerivationCache& cache,
                       const Architecture& arch);
// Leaf-set form of the same test: every exposed leaf survived.
bool exposed_leaves_survive(const Fact& q, const NoisyBase& noisy, const DerivationCache& cache,
                            const Architecture& arch);

DerivationCache rigidity_restrict(const DerivationCache& cache, const DerivationDag& dag);

// 1 - (1-eps)^N.
double unc_error_exact(std::int64_t n, double eps);

std::uint32_t choose_field_prime(Index m);

// Smallest r with Pr[Bin(kappa, eps) > r] <= delta.
std::int64_t min_parity_count(std::int64_t kappa, double eps, double delta);

// Pr[Bin(kappa, eps) > r].
double coded_error_exact(std::int64_t kappa, double eps, std::int64_t r);

// Field for a code of the given length over indices in [1, m]: the smallest
// prime above m, widened when kappa + r does not fit.
std::uint32_t coded_field_prime(Index m, std::size_t kappa, int r);

CodedCache plan_coded_cache(const std::vector<Index>& deps, Index m, double eps, double delta);
CodedCache plan_coded_cache(const Fact& q, Index m, const Architecture& arch, double eps,
                            double delta);
CodedCache make_coded_cache(const std::vector<Index>& deps, Index m, int r);

// Recovered dependency indices, or nullopt when too many were erased.
std::optional<std::vector<Index>> coded_decode(const NoisyBase& noisy, const CodedCache& cache);

JointPlan plan_joint(const std::vector<std::vector<Index>>& queries, double eps, double delta,
                     Index m, BitAccounting acct = BitAccounting::Ideal);

// Bits to list spurious indices so a decoder can discard them:
// N * ceil(log2(m + N)).
double pollution_identification_bits(Index m, std::size_t spurious_count);

}  // namespace pec
