#include "pec/caching.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "pec/stats.hpp"

namespace pec {

namespace {

// Leaves the decoder still needs: those reachable from the root along a
// path that avoids every cached vertex.
std::vector<Index> reachable_leaves(const DerivationDag& dag, const FactSet& facts) {
  std::vector<bool> blocked(dag.vertices.size(), false), seen(dag.vertices.size(), false);
  for (const Fact& f : facts) {
    const std::size_t v = dag.find(f);
    if (v != dag.vertices.size()) blocked[v] = true;
  }
  std::vector<Index> out;
  std::vector<std::size_t> stack{dag.find(dag.root)};
  while (!stack.empty()) {
    const std::size_t u = stack.back();
    stack.pop_back();
    if (seen[u] || blocked[u]) continue;
    seen[u] = true;
    if (dag.vertices[u].fact.is_edb()) out.push_back(dag.vertices[u].fact.index());
    for (std::size_t c : dag.vertices[u].children) stack.push_back(c);
  }
  std::sort(out.begin(), out.end());
  return out;
}

DerivationCache cache_from(const DerivationDag& dag, FactSet facts, double index_bits) {
  DerivationCache c;
  c.index_bits = index_bits;
  const auto exposed = reachable_leaves(dag, facts);
  std::set_difference(dag.leaves.begin(), dag.leaves.end(), exposed.begin(), exposed.end(),
                      std::back_inserter(c.protected_leaves));
  c.exposed_count = exposed.size();
  for (const Fact& f : facts) c.storage_bits += static_cast<double>(f.tuple.size()) * index_bits;
  c.facts = std::move(facts);
  return c;
}

std::vector<Index> sorted_unique(std::vector<Index> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

void check_delta(double delta) {
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("delta must lie in (0,1)");
}

}  // namespace

double CodedCache::storage_bits(Index m, BitAccounting acct) const {
  if (acct == BitAccounting::Ideal) return r * std::log2(static_cast<double>(m));
  return r * std::ceil(std::log2(static_cast<double>(prime)));
}

std::vector<Index> exposed_leaves(const Fact& q, const DerivationCache& cache, Index m,
                                  const Architecture& arch) {
  return reachable_leaves(build_dag(q, m, arch), cache.facts);
}

DerivationCache make_cache(const Fact& q, Index m, const Architecture& arch, FactSet facts,
                           BitAccounting acct) {
  return cache_from(build_dag(q, m, arch), std::move(facts), bits_per_index(m, acct));
}

DerivationCache plan_derivation_cache(const Fact& q, Index m, const Architecture& arch,
                                      const ErasureSpec& spec, double delta, BitAccounting acct) {
  check_delta(delta);
  const double eps = spec.uniform_eps();
  const DerivationDag dag = build_dag(q, m, arch);
  const double w = bits_per_index(m, acct);
  if (eps == 0.0) return cache_from(dag, {}, w);
  const auto n_star = static_cast<std::size_t>(resilience_threshold(eps, delta));
  if (dag.kappa <= n_star) return cache_from(dag, {}, w);

  FactSet chosen;
  if (arch.kind == ArchKind::Chain) {
    // The level-l prefix leaves exactly the distinct suffix coordinates exposed.
    for (int level = 1; level <= dag.depth(); ++level) {
      const Fact v = Fact::idb(level, {q.tuple.begin(), q.tuple.begin() + arch.arity(level)});
      if (reachable_leaves(dag, {v}).size() <= n_star) {
        chosen.insert(v);
        break;
      }
    }
  } else {
    const auto k = static_cast<std::size_t>(arch.k);
    for (std::size_t b = 0; b * k < q.tuple.size(); ++b) {
      if (reachable_leaves(dag, chosen).size() <= n_star) break;
      chosen.insert(Fact::idb(1, {q.tuple.begin() + b * k, q.tuple.begin() + (b + 1) * k}));
    }
  }
  return cache_from(dag, std::move(chosen), w);
}

DerivationCache water_filling_cache(const Fact& q, Index m, const Architecture& arch,
                                    const ErasureSpec& per_fact, double delta, BitAccounting acct) {
  check_delta(delta);
  if (per_fact.is_uniform()) throw std::invalid_argument("water filling needs a per-fact erasure spec");
  const DerivationDag dag = build_dag(q, m, arch);
  std::vector<std::pair<double, Index>> ranked;
  for (Index i : dag.leaves) ranked.emplace_back(erasure_cost(per_fact.eps(i)), i);
  std::sort(ranked.begin(), ranked.end());
  const double budget = -std::log1p(-delta);
  double acc = 0.0;
  std::size_t exposed = 0;
  while (exposed < ranked.size() && acc + ranked[exposed].first <= budget) {
    acc += ranked[exposed].first;
    ++exposed;
  }
  FactSet facts;
  for (std::size_t j = exposed; j < ranked.size(); ++j) facts.insert(Fact::edb(ranked[j].second));
  return cache_from(dag, std::move(facts), bits_per_index(m, acct));
}

std::size_t brute_force_protection(const std::vector<double>& costs, double delta) {
  check_delta(delta);
  if (costs.size() > 24) throw std::invalid_argument("exhaustive protection search limited to 24 leaves");
  const double budget = -std::log1p(-delta);
  const std::size_t n = costs.size();
  std::size_t best = n;
  for (std::uint32_t mask = 0; mask < (1U << n); ++mask) {
    // mask marks protected leaves
    double exposed_cost = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (!(mask & (1U << j))) exposed_cost += costs[j];
    }
    if (exposed_cost <= budget) {
      best = std::min<std::size_t>(best, static_cast<std::size_t>(std::popcount(mask)));
    }
  }
  return best;
}

bool derivation_decode(const Fact& q, const NoisyBase& noisy, const DerivationCache& cache,
                       const Architecture& arch) {
  FactSet base = noisy.facts();
  base.insert(cache.facts.begin(), cache.facts.end());
  return derivable(q, base, arch);
}

bool exposed_leaves_survive(const Fact& q, const NoisyBase& noisy, const DerivationCache& cache,
                            const Architecture& arch) {
  for (Index i : exposed_leaves(q, cache, noisy.m, arch)) {
    if (!noisy.survives(i)) return false;
  }
  return true;
}

DerivationCache rigidity_restrict(const DerivationCache& cache, const DerivationDag& dag) {
  FactSet kept;
  for (const Fact& f : cache.facts) {
    if (dag.contains(f)) kept.insert(f);
  }
  return cache_from(dag, std::move(kept), cache.index_bits);
}

double unc_error_exact(std::int64_t n, double eps) {
  if (n < 0) throw std::invalid_argument("exposed count must be non-negative");
  if (!(eps >= 0.0 && eps < 1.0)) throw std::invalid_argument("eps must lie in [0,1)");
  return -std::expm1(static_cast<double>(n) * std::log1p(-eps));
}

std::uint32_t choose_field_prime(Index m) {
  if (m < 2) throw std::invalid_argument("m must be >= 2");
  return rs::next_prime_above(m);
}

std::int64_t min_parity_count(std::int64_t kappa, double eps, double delta) {
  if (kappa < 1) throw std::invalid_argument("kappa must be >= 1");
  if (!(eps >= 0.0 && eps < 1.0)) throw std::invalid_argument("eps must lie in [0,1)");
  check_delta(delta);
  std::int64_t lo = 0, hi = kappa;  // sf(hi) = 0 <= delta
  while (lo < hi) {
    const std::int64_t mid = lo + (hi - lo) / 2;
    if (stats::binom_sf(kappa, eps, mid) <= delta) {
      hi = mid;
    } else {
      lo = mid + 1;
    }
  }
  return lo;
}

double coded_error_exact(std::int64_t kappa, double eps, std::int64_t r) {
  if (kappa < 0 || r < 0 || r > kappa) throw std::invalid_argument("need 0 <= r <= kappa");
  if (!(eps >= 0.0 && eps < 1.0)) throw std::invalid_argument("eps must lie in [0,1)");
  return stats::binom_sf(kappa, eps, r);
}

std::uint32_t coded_field_prime(Index m, std::size_t kappa, int r) {
  const std::uint32_t p = choose_field_prime(m);
  const std::size_t n = kappa + static_cast<std::size_t>(r);
  if (n <= p) return p;
  return rs::next_prime_above(std::max<std::uint64_t>(m, n - 1));
}

CodedCache make_coded_cache(const std::vector<Index>& deps, Index m, int r) {
  CodedCache c;
  c.positions = sorted_unique(deps);
  for (Index i : c.positions) {
    if (i < 1 || i > m) throw std::invalid_argument("dependency index outside [1,m]");
  }
  c.kappa = c.positions.size();
  c.r = r;
  c.prime = coded_field_prime(m, c.kappa, r);
  std::vector<rs::Symbol> message;
  message.reserve(c.kappa);
  for (Index i : c.positions) message.push_back(i - 1);
  c.parity = rs::encode(message, r, c.prime);
  return c;
}

CodedCache plan_coded_cache(const std::vector<Index>& deps, Index m, double eps, double delta) {
  const auto positions = sorted_unique(deps);
  if (positions.empty()) throw std::invalid_argument("coded cache needs at least one dependency");
  const auto r = min_parity_count(static_cast<std::int64_t>(positions.size()), eps, delta);
  return make_coded_cache(positions, m, static_cast<int>(r));
}

CodedCache plan_coded_cache(const Fact& q, Index m, const Architecture& arch, double eps,
                            double delta) {
  return plan_coded_cache(build_dag(q, m, arch).leaves, m, eps, delta);
}

std::optional<std::vector<Index>> coded_decode(const NoisyBase& noisy, const CodedCache& cache) {
  std::vector<std::optional<rs::Symbol>> received;
  received.reserve(cache.kappa);
  for (Index i : cache.positions) {
    if (noisy.survives(i)) {
      received.emplace_back(i - 1);
    } else {
      received.emplace_back(std::nullopt);
    }
  }
  const auto msg = rs::decode(received, cache.parity, cache.prime);
  if (!msg) return std::nullopt;
  std::vector<Index> out;
  out.reserve(msg->size());
  for (rs::Symbol s : *msg) out.push_back(s + 1);
  return out;
}

JointPlan plan_joint(const std::vector<std::vector<Index>>& queries, double eps, double delta,
                     Index m, BitAccounting acct) {
  if (queries.empty()) throw std::invalid_argument("joint plan needs at least one query");
  check_delta(delta);
  JointPlan plan;
  std::size_t total = 0;
  std::vector<Index> all;
  for (const auto& q : queries) {
    const auto s = sorted_unique(q);
    if (s.empty()) throw std::invalid_argument("dependency sets must be non-empty");
    if (s.front() < 1 || s.back() > m) throw std::invalid_argument("dependency index outside [1,m]");
    total += s.size();
    all.insert(all.end(), s.begin(), s.end());
  }
  plan.union_indices = sorted_unique(std::move(all));
  plan.n_eff = plan.union_indices.size();
  plan.overlap_index = static_cast<double>(total) / static_cast<double>(plan.n_eff);
  plan.coded = plan_coded_cache(plan.union_indices, m, eps, delta);

  DerivationCache unc;
  unc.index_bits = bits_per_index(m, acct);
  std::size_t exposed = plan.n_eff;
  if (eps > 0.0) {
    const auto n_star = static_cast<std::size_t>(resilience_threshold(eps, delta));
    exposed = std::min(exposed, n_star);
  }
  const std::size_t protect = plan.n_eff - exposed;
  for (std::size_t j = 0; j < protect; ++j) {
    unc.facts.insert(Fact::edb(plan.union_indices[j]));
    unc.protected_leaves.push_back(plan.union_indices[j]);
  }
  unc.exposed_count = exposed;
  unc.storage_bits = static_cast<double>(protect) * unc.index_bits;
  plan.unc = std::move(unc);
  return plan;
}

double pollution_identification_bits(Index m, std::size_t spurious_count) {
  if (m < 2) throw std::invalid_argument("m must be >= 2");
  if (spurious_count == 0) return 0.0;
  const auto width = pointer_bits(static_cast<Index>(m + spurious_count));
  return static_cast<double>(spurious_count) * width;
}

}  // namespace pec
