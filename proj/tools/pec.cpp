// pec: experiments, calculators, Monte Carlo runs and cache plans as CSV/JSON.
//
//   pec exp --exp 1 [--eps 0.1,0.2] [--kappa 50,5000] [--out file.csv]
//   pec calc penalty --eps 0.1,0.2 --kappa 50,5000
//   pec simulate --scenario coded --kappa 500 --eps 0.2 --r 100 --trials 1000000
//   pec plan --scheme coded --arch chain --m 256 --query 3,1,4,1,5 --eps 0.2 --out plan.json
//   pec simulate --plan plan.json --dump-noise masks.csv

#include <CLI11.hpp>
#include <chrono>
#include <cmath>
#include <fmt/format.h>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "pec/analysis.hpp"
#include "pec/cache_io.hpp"
#include "pec/caching.hpp"
#include "pec/csv.hpp"
#include "pec/datalog.hpp"
#include "pec/erasure.hpp"
#include "pec/experiments.hpp"
#include "pec/montecarlo.hpp"
#include "pec/stats.hpp"

namespace {

using namespace pec;
namespace an = pec::analysis;
using csv::num;

void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open output file: " + path);
  f << text;
  if (!f) throw std::runtime_error("cannot write output file: " + path);
}

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open input file: " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

std::int64_t as_int(double x, const std::string& name) {
  if (std::floor(x) != x || std::fabs(x) > 9.0e15) {
    throw std::invalid_argument(name + " must be an integer, got " + num(x));
  }
  return static_cast<std::int64_t>(x);
}

Index as_m(double x) {
  const std::int64_t m = as_int(x, "m");
  if (m < 2 || m > 0x7fffffff) throw std::invalid_argument("m must lie in [2, 2^31)");
  return static_cast<Index>(m);
}

// ---- calc ------------------------------------------------------------------

// One grid point: every declared parameter bound to a value.
class Point {
public:
  Point(std::map<std::string, double> v, std::string arch) : v_(std::move(v)), arch_(std::move(arch)) {}
  double operator[](const std::string& k) const { return v_.at(k); }
  std::int64_t i(const std::string& k) const { return as_int(v_.at(k), k); }
  Index m() const { return as_m(v_.at("m")); }
  Architecture arch() const { return Architecture(parse_arch_kind(arch_), static_cast<int>(i("k"))); }
  const std::string& arch_name() const { return arch_; }

private:
  std::map<std::string, double> v_;
  std::string arch_;
};

struct CalcOp {
  std::string help;
  std::vector<std::string> params;  // numeric grid parameters, in column order
  bool uses_arch = false;
  std::vector<std::string> outputs;
  std::function<std::vector<std::string>(const Point&)> eval;
};

an::CacheScheme scheme_of(double s) { return s == 0 ? an::CacheScheme::Coded : an::CacheScheme::Unc; }

const std::map<std::string, CalcOp>& calc_ops() {
  static const std::map<std::string, CalcOp> ops = {
      {"kl", {"D(p||q) in bits", {"p", "q"}, false, {"kl_bits"},
              [](const Point& x) { return std::vector{num(an::kl_bernoulli(x["p"], x["q"]))}; }}},
      {"entropy", {"binary entropy in bits", {"p"}, false, {"h_bits"},
                   [](const Point& x) { return std::vector{num(an::binary_entropy(x["p"]))}; }}},
      {"normal-quantile", {"inverse standard normal CDF", {"p"}, false, {"z"},
                           [](const Point& x) { return std::vector{num(stats::normal_quantile(x["p"]))}; }}},
      {"binom-sf", {"Pr[Bin(kappa, eps) > r]", {"kappa", "eps", "r"}, false, {"sf", "log_sf"},
                    [](const Point& x) {
                      return std::vector{num(stats::binom_sf(x.i("kappa"), x["eps"], x.i("r"))),
                                         num(stats::binom_log_sf(x.i("kappa"), x["eps"], x.i("r")))};
                    }}},
      {"binom-cdf", {"Pr[Bin(kappa, eps) <= r]", {"kappa", "eps", "r"}, false, {"cdf", "log_cdf"},
                     [](const Point& x) {
                       return std::vector{num(stats::binom_cdf(x.i("kappa"), x["eps"], x.i("r"))),
                                          num(stats::binom_log_cdf(x.i("kappa"), x["eps"], x.i("r")))};
                     }}},
      {"resilience", {"N*(eps, delta)", {"eps", "delta"}, false, {"n_star"},
                      [](const Point& x) {
                        return std::vector{std::to_string(resilience_threshold(x["eps"], x["delta"]))};
                      }}},
      {"min-parity", {"smallest r with Pr[Bin(kappa, eps) > r] <= delta", {"kappa", "eps", "delta"}, false,
                      {"r_star", "pe_exact"},
                      [](const Point& x) {
                        const auto r = min_parity_count(x.i("kappa"), x["eps"], x["delta"]);
                        return std::vector{std::to_string(r), num(coded_error_exact(x.i("kappa"), x["eps"], r))};
                      }}},
      {"coded-error", {"exact coded P_e", {"kappa", "eps", "r"}, false, {"pe_exact"},
                       [](const Point& x) {
                         return std::vector{num(coded_error_exact(x.i("kappa"), x["eps"], x.i("r")))};
                       }}},
      {"unc-error", {"exact uncoded P_e with N exposed leaves", {"n", "eps"}, false, {"pe_exact"},
                     [](const Point& x) { return std::vector{num(unc_error_exact(x.i("n"), x["eps"]))}; }}},
      {"penalty", {"derivation penalty sigma_unc / sigma_code", {"kappa", "eps", "delta", "m"}, false,
                   {"sigma_unc_bits", "sigma_code_bits", "ratio_exact", "ratio_refined",
                    "ratio_refined_unfloored"},
                   [](const Point& x) {
                     const auto rep = an::penalty_ratio(x.i("kappa"), x["eps"], x["delta"], x.m());
                     return std::vector{num(rep.sigma_unc_bits), num(rep.sigma_code_bits), num(rep.ratio_exact),
                                        num(rep.ratio_refined),
                                        num(an::refined_penalty(x.i("kappa"), x["eps"], x["delta"],
                                                                an::NStarVariant::Unfloored))};
                   }}},
      {"sigma", {"minimum cache bits (scheme 0 coded, 1 uncoded)", {"scheme", "kappa", "eps", "delta", "m"},
                 false, {"sigma_operational_bits", "sigma_normal_bits", "converse_bits"},
                 [](const Point& x) {
                   const auto s = scheme_of(x["scheme"]);
                   const auto normal = s == an::CacheScheme::Coded
                                           ? num(an::sigma_star(s, x.i("kappa"), x["eps"], x["delta"], x.m(),
                                                                an::SigmaMode::NormalApprox))
                                           : std::string("nan");
                   return std::vector{num(an::sigma_star(s, x.i("kappa"), x["eps"], x["delta"], x.m())), normal,
                                      num(an::coded_converse_bits(x.i("kappa"), x["eps"], x["delta"], x.m()))};
                 }}},
      {"dispersion", {"V = eps(1-eps)(log2 m)^2", {"eps", "m"}, false, {"v_bits2"},
                      [](const Point& x) { return std::vector{num(an::cache_dispersion(x["eps"], x.m()))}; }}},
      {"bahadur-rao", {"prefactor-corrected lower tail at alpha kappa", {"kappa", "eps", "alpha"}, false,
                       {"estimate", "tilt", "exact", "rel_err", "psi_bits", "c_alpha"},
                       [](const Point& x) {
                         const auto br = an::bahadur_rao_tail(x.i("kappa"), x["eps"], x["alpha"], an::Tail::Lower);
                         const auto r = static_cast<std::int64_t>(
                             std::floor(x["alpha"] * static_cast<double>(x.i("kappa")) + 1e-9));
                         const double exact = stats::binom_cdf(x.i("kappa"), x["eps"], r);
                         return std::vector{num(br.estimate), num(br.tilt), num(exact),
                                            num(std::fabs(br.estimate - exact) / exact),
                                            num(an::prefactor_scale(x.i("kappa"), x["eps"], x["alpha"])),
                                            num(an::bahadur_rao_constant(x["eps"], x["alpha"]))};
                       }}},
      {"moderate-dev", {"normal P_e at r = eps kappa + a sqrt(kappa)", {"kappa", "eps", "a"}, false, {"pe"},
                        [](const Point& x) {
                          return std::vector{num(an::moderate_dev_pe(x.i("kappa"), x["eps"], x["a"]))};
                        }}},
      {"regime", {"phase regime at cache fraction rho (scheme 0 coded, 1 uncoded)",
                  {"scheme", "rho", "eps", "kappa"}, false, {"regime", "pe_exact"},
                  [](const Point& x) {
                    const auto s = scheme_of(x["scheme"]);
                    return std::vector{an::to_string(an::classify_regime(s, x["rho"], x["eps"], x.i("kappa"))),
                                       num(an::regime_error(s, x["rho"], x["eps"], x.i("kappa")))};
                  }}},
      {"image-bound", {"E[min(1, 2^sigma / m^E)]", {"sigma", "kappa", "eps", "m"}, false, {"pc_upper"},
                       [](const Point& x) {
                         return std::vector{num(an::image_size_bound(x["sigma"], x.i("kappa"), x["eps"], x.m()))};
                       }}},
      {"converse-lb", {"strong converse lower bound on P_e", {"gamma", "kappa", "m"}, false, {"pe_lower"},
                       [](const Point& x) {
                         return std::vector{num(an::strong_converse_lb(x["gamma"], x.i("kappa"), x.m()))};
                       }}},
      {"exponents", {"coded and uncoded error exponents at rho", {"rho", "eps"}, false,
                     {"coded_bits", "unc_bits", "crossover_rho"},
                     [](const Point& x) {
                       const auto e = an::exponent_landscape(x["rho"], x["eps"]);
                       return std::vector{num(e.coded), num(e.unc), num(an::crossover_rho(x["eps"]))};
                     }}},
      {"exponent-gap", {"rho_unc(E) / rho_code(E)", {"e", "eps"}, false, {"gap", "crossover_e"},
                        [](const Point& x) {
                          return std::vector{num(an::exponent_gap(x["e"], x["eps"])), num(an::crossover_e(x["eps"]))};
                        }}},
      {"d-max", {"deepest uncached delta-reliable level", {"k", "eps", "delta"}, true, {"d_max"},
                 [](const Point& x) { return std::vector{std::to_string(an::d_max(x.arch(), x["eps"], x["delta"]))}; }}},
      {"depth-space", {"cache budget translated to depth", {"k", "sigma", "eps", "delta", "m"}, true,
                       {"r", "d_star", "width_coded", "width_unc", "d_max"},
                       [](const Point& x) {
                         const auto rep = an::depth_space_report(x.arch(), x["sigma"], x["eps"], x["delta"], x.m());
                         return std::vector{std::to_string(rep.r), num(rep.d_star), num(rep.width_coded),
                                            num(rep.width_unc), std::to_string(rep.d_max)};
                       }}},
      {"joint-gains", {"common-core multi-query gains", {"L", "kappa", "alpha", "delta"}, false,
                       {"n_eff", "g1", "g2"},
                       [](const Point& x) {
                         const auto g = an::joint_gains(static_cast<int>(x.i("L")), x.i("kappa"), x["alpha"],
                                                        x["delta"]);
                         return std::vector{num(g.n_eff), num(g.g1), num(g.g2)};
                       }}},
      {"tilted-exponent", {"min over u of the tilted log-MGF vs D(eps-gamma||eps)", {"eps", "gamma"}, false,
                      {"u_star", "u_star_closed", "neg_g_star", "kl_bits", "abs_diff"},
                      [](const Point& x) {
                        const auto c = an::tilted_exponent_check(x["eps"], x["gamma"]);
                        return std::vector{num(c.u_star), num(c.u_star_closed), num(c.neg_g_star), num(c.kl),
                                           num(c.abs_diff)};
                      }}},
      {"noisy-base", {"sound fraction and capacity shift of a noisy base",
                      {"m", "lost", "added", "kappa"}, false, {"m_tilde", "sound_fraction", "capacity_shift_bits"},
                      [](const Point& x) {
                        const auto s = an::noisy_base_stats(x.i("m"), x.i("lost"), x.i("added"), x.i("kappa"));
                        return std::vector{std::to_string(s.m_tilde), num(s.sound_fraction),
                                           num(s.capacity_shift_bits)};
                      }}},
      {"clopper-pearson", {"exact binomial confidence interval", {"successes", "trials", "level"}, false,
                           {"ci_low", "ci_high"},
                           [](const Point& x) {
                             const auto [lo, hi] = mc::clopper_pearson(x.i("successes"), x.i("trials"), x["level"]);
                             return std::vector{num(lo), num(hi)};
                           }}},
      {"pollution-bits", {"bits to identify N spurious indices", {"m", "n"}, false, {"bits"},
                          [](const Point& x) {
                            return std::vector{num(pollution_identification_bits(
                                x.m(), static_cast<std::size_t>(x.i("n"))))};
                          }}},
  };
  return ops;
}

std::string calc_listing() {
  std::string out = "available operations:\n";
  for (const auto& [name, op] : calc_ops()) {
    std::string ps;
    if (op.uses_arch) ps += " --arch";
    for (const auto& p : op.params) ps += " --" + p;
    out += fmt::format("  {:<16} {} ({})\n", name, op.help, ps.empty() ? "" : ps.substr(1));
  }
  return out;
}

std::string run_calc(const std::string& name, const std::map<std::string, std::vector<double>>& grids,
                     const std::vector<std::string>& archs) {
  const auto it = calc_ops().find(name);
  if (it == calc_ops().end()) throw std::invalid_argument("unknown calc operation '" + name + "'\n" + calc_listing());
  const CalcOp& op = it->second;
  for (const auto& p : op.params) {
    if (grids.at(p).empty()) throw std::invalid_argument("calc " + name + " requires --" + p);
  }
  std::vector<std::string> header;
  if (op.uses_arch) header.push_back("arch");
  header.insert(header.end(), op.params.begin(), op.params.end());
  header.insert(header.end(), op.outputs.begin(), op.outputs.end());
  csv::Table t;
  t.comment("calc", name);
  t.header(header);

  const std::vector<std::string> arch_list = op.uses_arch ? archs : std::vector<std::string>{""};
  for (const auto& arch : arch_list) {
    std::vector<std::size_t> idx(op.params.size(), 0);
    for (bool done = false; !done;) {
      std::map<std::string, double> v;
      std::vector<std::string> row;
      if (op.uses_arch) row.push_back(arch);
      for (std::size_t j = 0; j < op.params.size(); ++j) {
        const double x = grids.at(op.params[j])[idx[j]];
        v[op.params[j]] = x;
        row.push_back(num(x));
      }
      for (auto& cell : op.eval(Point(std::move(v), arch))) row.push_back(std::move(cell));
      t.row(std::move(row));
      // Odometer over the grids, last parameter fastest.
      done = true;
      for (std::size_t j = op.params.size(); j-- > 0;) {
        if (++idx[j] < grids.at(op.params[j]).size()) {
          done = false;
          break;
        }
        idx[j] = 0;
      }
    }
  }
  return t.str();
}

// ---- query / plan helpers ----------------------------------------------------

Fact query_from_tuple(const std::vector<Index>& tuple, const Architecture& arch) {
  for (int d = 1; d <= 64; ++d) {
    std::uint64_t a = 0;
    try {
      a = arch.arity(d);
    } catch (const std::out_of_range&) {
      break;
    }
    if (a == tuple.size()) return Fact::idb(d, tuple);
    if (a > tuple.size()) break;
  }
  throw std::invalid_argument(fmt::format("query of length {} is not a head tuple of {}({})", tuple.size(),
                                          to_string(arch.kind), arch.k));
}

std::string dump_masks(const mc::Scenario& s, std::int64_t trials, std::int64_t limit, std::uint64_t seed) {
  csv::Table t;
  t.comment("seed", std::to_string(seed));
  t.comment("mask", "character i is 1 when index i survived, 0 when erased");
  t.header({"trial", "survivors", "mask"});
  const std::int64_t rows = std::min(trials, limit);
  for (std::int64_t trial = 0; trial < rows; ++trial) {
    const auto tr = static_cast<std::uint64_t>(trial);
    NoisyBase nb;
    if (const auto* c = std::get_if<mc::CodedAnalytic>(&s)) {
      nb = sample_noisy_base(static_cast<Index>(c->kappa), ErasureSpec::uniform(c->eps), {}, seed, tr);
    } else if (const auto* u = std::get_if<mc::UncAnalytic>(&s)) {
      nb = sample_noisy_base(static_cast<Index>(u->n), ErasureSpec::uniform(u->eps), {}, seed, tr);
    } else {
      const auto& e = std::get<mc::EndToEnd>(s);
      nb = sample_noisy_base(e.m, e.spec, e.pollution, seed, tr);
    }
    t.row({std::to_string(trial), std::to_string(nb.survivor_count()), nb.mask_string()});
  }
  return t.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Erasure-resilient derivation caching: experiments, calculators and simulation"};
  app.require_subcommand(1);

  // exp
  auto* exp_cmd = app.add_subcommand("exp", "Run one of the six experiments and write its CSV");
  pec::exp::ExperimentConfig cfg;
  double delta = 0.0;
  exp_cmd->add_option("--exp", cfg.id, "Experiment id (1..6)")->required()->check(CLI::Range(1, 6));
  exp_cmd->add_option("--m", cfg.m, "Base size (default 256)");
  exp_cmd->add_option("--k", cfg.k, "Rule width k (default 2)");
  auto* delta_opt = exp_cmd->add_option("--delta", delta, "Target error (default 0.1; 0.3 for experiment 4)");
  exp_cmd->add_option("--eps", cfg.eps, "Erasure probabilities")->delimiter(',');
  exp_cmd->add_option("--kappa", cfg.kappa, "Dependency counts")->delimiter(',');
  exp_cmd->add_option("--r", cfg.r, "Parity counts (experiment 6 coded rows)")->delimiter(',');
  exp_cmd->add_option("--alpha", cfg.alpha, "Cache fractions (experiment 2)")->delimiter(',');
  exp_cmd->add_option("--trials", cfg.trials, "Monte Carlo trials (default 1000000)");
  exp_cmd->add_option("--seed", cfg.seed, "RNG seed (default 1)");
  exp_cmd->add_option("--out", cfg.out, "Output CSV path (default stdout)");

  // calc
  auto* calc_cmd = app.add_subcommand("calc", "Evaluate an analytic operation over a parameter grid");
  std::string calc_name;
  bool calc_list = false;
  std::string calc_out;
  std::vector<std::string> calc_arch{"chain"};
  std::map<std::string, std::vector<double>> grids;
  for (const auto& [name, op] : calc_ops()) {
    for (const auto& p : op.params) grids[p];
  }
  calc_cmd->add_option("op", calc_name, "Operation name (see --list)");
  calc_cmd->add_flag("--list", calc_list, "List operations and their parameters");
  calc_cmd->add_option("--arch", calc_arch, "chain and/or merge")->delimiter(',');
  calc_cmd->add_option("--out", calc_out, "Output CSV path (default stdout)");
  for (auto& [name, values] : grids) {
    calc_cmd->add_option("--" + name, values, "Comma-separated values")->delimiter(',');
  }

  // simulate
  auto* sim_cmd = app.add_subcommand("simulate", "Estimate success probability by seeded Monte Carlo");
  std::string scenario;
  std::string plan_path;
  std::int64_t sim_kappa = 0, sim_r = 0, sim_n = 0, sim_trials = 1000000, dump_limit = 100;
  std::int64_t spurious = 0;
  double sim_eps = 0.0, level = 0.95;
  std::uint64_t sim_seed = 1;
  std::string sim_out, dump_path;
  bool serial = false;
  auto* scen_opt = sim_cmd->add_option("--scenario", scenario, "coded or unc")->check(CLI::IsMember({"coded", "unc"}));
  auto* plan_opt = sim_cmd->add_option("--plan", plan_path, "Cache plan JSON for an end-to-end run");
  scen_opt->excludes(plan_opt);
  sim_cmd->add_option("--kappa", sim_kappa, "Dependencies (coded)");
  sim_cmd->add_option("--r", sim_r, "Parity symbols (coded)");
  sim_cmd->add_option("--n", sim_n, "Exposed leaves (unc)");
  auto* eps_opt = sim_cmd->add_option("--eps", sim_eps, "Erasure probability (overrides the plan's)");
  sim_cmd->add_option("--spurious", spurious, "Spurious facts added above m (end-to-end only)");
  sim_cmd->add_option("--trials", sim_trials, "Trials (default 1000000)");
  sim_cmd->add_option("--seed", sim_seed, "RNG seed (default 1)");
  sim_cmd->add_option("--level", level, "Confidence level (default 0.95)");
  sim_cmd->add_flag("--serial", serial, "Use the single-threaded reference loop");
  sim_cmd->add_option("--out", sim_out, "Output CSV path (default stdout)");
  sim_cmd->add_option("--dump-noise", dump_path, "Write per-trial survivor masks to this CSV");
  sim_cmd->add_option("--dump-limit", dump_limit, "Trials to dump (default 100)");

  // plan
  auto* plan_cmd = app.add_subcommand("plan", "Build a cache plan for one query and write it as JSON");
  std::string plan_scheme = "derivation", plan_arch = "chain", plan_acct = "ideal", plan_out;
  int plan_k = 2;
  Index plan_m = 256;
  double plan_eps = 0.0, plan_delta = 0.1;
  std::vector<Index> plan_query;
  plan_cmd->add_option("--scheme", plan_scheme, "derivation or coded")->check(CLI::IsMember({"derivation", "coded"}));
  plan_cmd->add_option("--arch", plan_arch, "chain or merge")->check(CLI::IsMember({"chain", "merge"}));
  plan_cmd->add_option("--k", plan_k, "Rule width k (default 2)");
  plan_cmd->add_option("--m", plan_m, "Base size (default 256)");
  plan_cmd->add_option("--eps", plan_eps, "Erasure probability")->required();
  plan_cmd->add_option("--delta", plan_delta, "Target error (default 0.1)");
  plan_cmd->add_option("--accounting", plan_acct, "ideal or integer")->check(CLI::IsMember({"ideal", "integer"}));
  plan_cmd->add_option("--query", plan_query, "Head tuple of the query, comma-separated")->required()->delimiter(',');
  plan_cmd->add_option("--out", plan_out, "Output JSON path (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*exp_cmd) {
      if (*delta_opt) cfg.delta = delta;
      write_output(cfg.out, pec::exp::run_experiment(cfg));
    } else if (*calc_cmd) {
      if (calc_list) {
        std::cout << calc_listing();
        return 0;
      }
      if (calc_name.empty()) throw std::invalid_argument("calc needs an operation name\n" + calc_listing());
      write_output(calc_out, run_calc(calc_name, grids, calc_arch));
    } else if (*sim_cmd) {
      mc::Scenario s = mc::UncAnalytic{0, 0.0};
      if (!plan_path.empty()) {
        const CachePlan p = plan_from_json_text(read_file(plan_path));
        const double eps = *eps_opt ? sim_eps : p.eps;
        PollutionSpec pol;
        for (std::int64_t j = 1; j <= spurious; ++j) pol.spurious.push_back(p.m + static_cast<Index>(j));
        mc::EndToEnd e{p.query, p.arch, p.m, ErasureSpec::uniform(eps), pol, DerivationCache{}};
        if (p.scheme == Scheme::Coded) {
          e.plan = *p.coded;
        } else {
          e.plan = *p.derivation;
        }
        s = e;
      } else if (scenario == "coded") {
        if (sim_kappa < 1 || sim_r < 0) throw std::invalid_argument("coded scenario needs --kappa >= 1 and --r >= 0");
        s = mc::CodedAnalytic{sim_kappa, ErasureSpec::uniform(sim_eps).uniform_eps(), sim_r};
      } else if (scenario == "unc") {
        if (sim_n < 0) throw std::invalid_argument("unc scenario needs --n >= 0");
        s = mc::UncAnalytic{sim_n, ErasureSpec::uniform(sim_eps).uniform_eps()};
      } else {
        throw std::invalid_argument("simulate needs --scenario coded|unc or --plan FILE");
      }
      const auto t0 = std::chrono::steady_clock::now();
      const auto est = serial ? mc::simulate_serial(s, sim_trials, sim_seed, level)
                              : mc::simulate(s, sim_trials, sim_seed, level);
      const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
      csv::Table t;
      t.comment("level", num(level));
      t.comment("p_hat", "success probability estimate; ci is Clopper-Pearson");
      t.header({"scenario", "params", "trials", "p_hat", "ci_low", "ci_high", "seed", "wall_ms"});
      t.row({mc::scenario_name(s), mc::scenario_params(s), std::to_string(est.trials), num(est.p_hat),
             num(est.ci_low), num(est.ci_high), std::to_string(est.seed), fmt::format("{:.1f}", ms)});
      write_output(sim_out, t.str());
      if (!dump_path.empty()) write_output(dump_path, dump_masks(s, sim_trials, dump_limit, sim_seed));
    } else if (*plan_cmd) {
      CachePlan p;
      p.m = plan_m;
      p.arch = Architecture(parse_arch_kind(plan_arch), plan_k);
      p.eps = plan_eps;
      p.delta = plan_delta;
      p.accounting = plan_acct == "integer" ? BitAccounting::Integer : BitAccounting::Ideal;
      p.query = query_from_tuple(plan_query, p.arch);
      require_well_formed(p.query, p.arch, p.m);
      if (plan_scheme == "coded") {
        p.scheme = Scheme::Coded;
        p.coded = plan_coded_cache(p.query, p.m, p.arch, p.eps, p.delta);
      } else {
        p.scheme = Scheme::Derivation;
        p.derivation = plan_derivation_cache(p.query, p.m, p.arch, ErasureSpec::uniform(p.eps), p.delta,
                                             p.accounting);
      }
      write_output(plan_out, to_json_text(p));
    }
  } catch (const std::exception& e) {
    std::cerr << "pec: error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
