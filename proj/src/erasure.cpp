#include "pec/erasure.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace pec {

namespace {

void check_eps(double eps) {
  if (!(eps >= 0.0 && eps < 1.0)) throw std::invalid_argument("erasure probability must lie in [0,1)");
}

std::uint64_t fmix(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

ErasureSpec ErasureSpec::uniform(double eps) {
  check_eps(eps);
  ErasureSpec s;
  s.eps_ = eps;
  return s;
}

ErasureSpec ErasureSpec::per_fact(std::vector<double> eps) {
  if (eps.empty()) throw std::invalid_argument("per-fact erasure spec needs at least one entry");
  for (double e : eps) check_eps(e);
  ErasureSpec s;
  s.per_fact_ = std::move(eps);
  return s;
}

double ErasureSpec::uniform_eps() const {
  if (!is_uniform()) throw std::logic_error("erasure spec is per-fact, not uniform");
  return eps_;
}

double ErasureSpec::eps(Index i) const {
  if (is_uniform()) return eps_;
  if (i < 1 || i > per_fact_.size()) throw std::out_of_range("index outside the per-fact erasure spec");
  return per_fact_[i - 1];
}

double erasure_cost(double eps) {
  check_eps(eps);
  return -std::log1p(-eps);
}

std::size_t NoisyBase::survivor_count() const {
  return static_cast<std::size_t>(std::count(survivors.begin(), survivors.end(), true));
}

FactSet NoisyBase::facts() const {
  FactSet out;
  for (Index i = 1; i <= m; ++i) {
    if (survivors[i - 1]) out.insert(Fact::edb(i));
  }
  for (Index j : spurious) out.insert(Fact::edb(j));
  return out;
}

std::string NoisyBase::mask_string() const {
  std::string s;
  s.reserve(survivors.size());
  for (bool b : survivors) s += b ? '1' : '0';
  return s;
}

std::uint64_t mix64(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter) {
  std::uint64_t h = fmix(seed + 0x9e3779b97f4a7c15ULL);
  h = fmix(h ^ (stream + 0x632be59bd9b4e019ULL));
  return fmix(h ^ (counter + 0x8cb92ba72f3d8dd7ULL));
}

double unit_uniform(std::uint64_t bits) { return static_cast<double>(bits >> 11) * 0x1.0p-53; }

std::uint64_t erasure_threshold(double eps) {
  check_eps(eps);
  return static_cast<std::uint64_t>(std::ldexp(eps, 64));
}

NoisyBase sample_noisy_base(Index m, const ErasureSpec& spec, const PollutionSpec& pollution,
                            std::uint64_t seed, std::uint64_t trial) {
  if (m < 2) throw std::invalid_argument("m must be >= 2");
  if (!spec.is_uniform() && spec.size() != m) {
    throw std::invalid_argument("per-fact erasure spec length must equal m");
  }
  for (Index j : pollution.spurious) {
    if (j <= m) throw std::invalid_argument("spurious indices must exceed m");
  }
  NoisyBase out;
  out.m = m;
  out.seed = seed;
  out.trial = trial;
  out.spurious = pollution.spurious;
  out.survivors.resize(m);
  const std::uint64_t uniform_t = spec.is_uniform() ? erasure_threshold(spec.uniform_eps()) : 0;
  for (Index i = 1; i <= m; ++i) {
    const std::uint64_t t = spec.is_uniform() ? uniform_t : erasure_threshold(spec.eps(i));
    out.survivors[i - 1] = mix64(seed, trial, i) >= t;
  }
  return out;
}

std::int64_t resilience_threshold(double eps, double delta) {
  if (eps == 0.0) throw std::out_of_range("resilience threshold is infinite at eps = 0");
  if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("eps must lie in (0,1)");
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("delta must lie in (0,1)");
  const double ratio = std::log1p(-delta) / std::log1p(-eps);
  if (ratio >= 9.0e18) throw std::out_of_range("resilience threshold exceeds 64-bit range");
  return static_cast<std::int64_t>(std::floor(ratio));
}

Vulnerability vulnerability(const std::vector<Index>& deps, const ErasureSpec& spec) {
  std::vector<Index> sorted(deps);
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw std::invalid_argument("dependency indices must be distinct");
  }
  double v = 0.0;
  for (Index i : deps) v += erasure_cost(spec.eps(i));
  return {v, std::exp(-v)};
}

std::int64_t m_eff(const ErasureSpec& spec, double delta, Index m) {
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("delta must lie in (0,1)");
  if (spec.is_uniform()) {
    if (spec.uniform_eps() == 0.0) return m;
    return std::min<std::int64_t>(resilience_threshold(spec.uniform_eps(), delta), m);
  }
  std::vector<double> costs;
  costs.reserve(spec.size());
  for (double e : spec.per_fact_eps()) costs.push_back(erasure_cost(e));
  std::sort(costs.begin(), costs.end());
  const double budget = -std::log1p(-delta);
  double acc = 0.0;
  std::int64_t j = 0;
  for (double c : costs) {
    if (acc + c > budget) break;
    acc += c;
    ++j;
  }
  return j;
}

Depth reconstruction_depth(const KnowledgeBase& kb, const Architecture& arch, const FactSet& lost) {
  FactSet survivors = kb.facts;
  for (const Fact& f : lost) {
    if (!survivors.erase(f)) throw std::invalid_argument("lost facts must belong to the base");
  }
  Depth worst = Depth::finite(0);
  for (const Fact& f : lost) {
    worst = std::max(worst, derivation_depth(f, survivors, arch));
  }
  return worst;
}

QueryPartition partition_queries(const NoisyBase& noisy, const Architecture& arch, int d) {
  std::vector<Index> domain;
  for (Index i = 1; i <= noisy.m; ++i) domain.push_back(i);
  domain.insert(domain.end(), noisy.spurious.begin(), noisy.spurious.end());
  const auto a = static_cast<std::size_t>(arch.arity(d));
  const FactSet full = KnowledgeBase::full_base(noisy.m).facts;
  const FactSet noisy_facts = noisy.facts();

  QueryPartition out;
  std::vector<std::size_t> digits(a, 0);
  std::vector<Index> tuple(a);
  while (true) {
    for (std::size_t j = 0; j < a; ++j) tuple[j] = domain[digits[j]];
    const Fact q = Fact::idb(d, tuple);
    const bool in_full = derivable(q, full, arch);
    const bool in_noisy = derivable(q, noisy_facts, arch);
    if (in_full && in_noisy) ++out.sound;
    if (!in_full && in_noisy) ++out.spurious;
    if (in_full && !in_noisy) ++out.lost;
    std::size_t pos = 0;
    while (pos < a && ++digits[pos] == domain.size()) digits[pos++] = 0;
    if (pos == a) break;
  }
  return out;
}

}  // namespace pec
