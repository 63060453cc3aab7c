#include "pec/montecarlo.hpp"

#include <algorithm>
#include <boost/math/special_functions/beta.hpp>
#include <fmt/format.h>
#include <stdexcept>

namespace pec::mc {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

bool trial_end_to_end(const EndToEnd& e, std::uint64_t seed, std::uint64_t trial) {
  const NoisyBase noisy = sample_noisy_base(e.m, e.spec, e.pollution, seed, trial);
  return std::visit(Overloaded{
                        [&](const DerivationCache& c) { return derivation_decode(e.query, noisy, c, e.arch); },
                        [&](const CodedCache& c) {
                          const auto got = coded_decode(noisy, c);
                          return got.has_value() && *got == c.positions;
                        },
                    },
                    e.plan);
}

McEstimate finish(std::int64_t successes, std::int64_t trials, std::uint64_t seed, double level) {
  McEstimate est;
  est.successes = successes;
  est.trials = trials;
  est.p_hat = static_cast<double>(successes) / static_cast<double>(trials);
  std::tie(est.ci_low, est.ci_high) = clopper_pearson(successes, trials, level);
  est.level = level;
  est.seed = seed;
  return est;
}

void check_trials(std::int64_t trials) {
  if (trials < 1) throw std::invalid_argument("trials must be >= 1");
}

std::uint64_t bounded(std::uint64_t bits, std::uint64_t n) {
  return static_cast<std::uint64_t>((static_cast<unsigned __int128>(bits) * n) >> 64);
}

}  // namespace

std::string scenario_name(const Scenario& s) {
  return std::visit(Overloaded{
                        [](const CodedAnalytic&) { return std::string("coded_analytic"); },
                        [](const UncAnalytic&) { return std::string("unc_analytic"); },
                        [](const EndToEnd& e) {
                          return std::string(std::holds_alternative<CodedCache>(e.plan)
                                                 ? "end_to_end_coded"
                                                 : "end_to_end_derivation");
                        },
                    },
                    s);
}

std::string scenario_params(const Scenario& s) {
  return std::visit(Overloaded{
                        [](const CodedAnalytic& c) {
                          return fmt::format("kappa={};eps={};r={}", c.kappa, c.eps, c.r);
                        },
                        [](const UncAnalytic& u) { return fmt::format("N={};eps={}", u.n, u.eps); },
                        [](const EndToEnd& e) {
                          std::string p = fmt::format("arch={};k={};m={};query={}", to_string(e.arch.kind),
                                                      e.arch.k, e.m, to_string(e.query, e.arch));
                          if (e.spec.is_uniform()) p += fmt::format(";eps={}", e.spec.uniform_eps());
                          if (const auto* c = std::get_if<CodedCache>(&e.plan)) {
                            p += fmt::format(";r={};prime={}", c->r, c->prime);
                          } else {
                            p += fmt::format(";cached={}", std::get<DerivationCache>(e.plan).facts.size());
                          }
                          return p;
                        },
                    },
                    s);
}

bool run_trial(const Scenario& s, std::uint64_t seed, std::uint64_t trial) {
  return std::visit(Overloaded{
                        [&](const CodedAnalytic& c) {
                          const std::uint64_t t = erasure_threshold(c.eps);
                          std::int64_t erased = 0;
                          for (std::int64_t j = 1; j <= c.kappa; ++j) {
                            if (mix64(seed, trial, static_cast<std::uint64_t>(j)) < t && ++erased > c.r) {
                              return false;
                            }
                          }
                          return true;
                        },
                        [&](const UncAnalytic& u) {
                          const std::uint64_t t = erasure_threshold(u.eps);
                          for (std::int64_t j = 1; j <= u.n; ++j) {
                            if (mix64(seed, trial, static_cast<std::uint64_t>(j)) < t) return false;
                          }
                          return true;
                        },
                        [&](const EndToEnd& e) { return trial_end_to_end(e, seed, trial); },
                    },
                    s);
}

McEstimate simulate(const Scenario& s, std::int64_t trials, std::uint64_t seed, double level) {
  check_trials(trials);
  std::int64_t successes = 0;
#pragma omp parallel for reduction(+ : successes) schedule(static)
  for (std::int64_t t = 0; t < trials; ++t) {
    if (run_trial(s, seed, static_cast<std::uint64_t>(t))) ++successes;
  }
  return finish(successes, trials, seed, level);
}

McEstimate simulate_serial(const Scenario& s, std::int64_t trials, std::uint64_t seed, double level) {
  check_trials(trials);
  std::int64_t successes = 0;
  for (std::int64_t t = 0; t < trials; ++t) {
    if (run_trial(s, seed, static_cast<std::uint64_t>(t))) ++successes;
  }
  return finish(successes, trials, seed, level);
}

std::pair<double, double> clopper_pearson(std::int64_t successes, std::int64_t trials, double level) {
  if (trials < 1 || successes < 0 || successes > trials) {
    throw std::invalid_argument("need 0 <= successes <= trials, trials >= 1");
  }
  if (!(level > 0.0 && level < 1.0)) throw std::invalid_argument("level must lie in (0,1)");
  const double alpha = 1 - level;
  const auto x = static_cast<double>(successes);
  const auto n = static_cast<double>(trials);
  const double low = successes == 0 ? 0.0 : boost::math::ibeta_inv(x, n - x + 1, alpha / 2);
  const double high = successes == trials ? 1.0 : boost::math::ibeta_inv(x + 1, n - x, 1 - alpha / 2);
  return {low, high};
}

StructureFractions sample_structure_fractions(Index m, const Architecture& arch, int d,
                                              std::int64_t samples, std::uint64_t seed) {
  if (samples < 1) throw std::invalid_argument("samples must be >= 1");
  if (m < 2) throw std::invalid_argument("m must be >= 2");
  const auto a = static_cast<std::size_t>(arch.arity(d));
  std::int64_t collisions = 0, non_colliding = 0;
#pragma omp parallel for reduction(+ : collisions, non_colliding) schedule(static)
  for (std::int64_t s = 0; s < samples; ++s) {
    std::vector<Index> tuple(a);
    for (std::size_t j = 0; j < a; ++j) {
      tuple[j] = static_cast<Index>(1 + bounded(mix64(seed, static_cast<std::uint64_t>(s), j), m));
    }
    std::vector<Index> sorted(tuple);
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) ++collisions;
    if (arch.kind == ArchKind::Chain || build_dag(Fact::idb(d, tuple), m, arch).non_colliding) {
      ++non_colliding;
    }
  }
  const auto n = static_cast<double>(samples);
  return {static_cast<double>(collisions) / n, static_cast<double>(non_colliding) / n, samples};
}

}  // namespace pec::mc
