#include "pec/experiments.hpp"

#include <cmath>
#include <fmt/format.h>
#include <stdexcept>

#include "pec/analysis.hpp"
#include "pec/caching.hpp"
#include "pec/csv.hpp"
#include "pec/erasure.hpp"
#include "pec/montecarlo.hpp"
#include "pec/stats.hpp"

namespace pec::exp {

namespace {

using csv::num;
namespace an = pec::analysis;

std::string ints(const std::vector<std::int64_t>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) out += (i ? ";" : "") + std::to_string(xs[i]);
  return out;
}

csv::Table echo(const ExperimentConfig& cfg, const std::string& title) {
  csv::Table t;
  t.comment("experiment", std::to_string(cfg.id) + " " + title);
  t.comment("m", std::to_string(cfg.m));
  t.comment("k", std::to_string(cfg.k));
  t.comment("delta", num(*cfg.delta));
  t.comment("eps", csv::join(cfg.eps));
  t.comment("kappa", ints(cfg.kappa));
  if (!cfg.alpha.empty()) t.comment("alpha", csv::join(cfg.alpha));
  if (!cfg.r.empty()) t.comment("r", ints(cfg.r));
  t.comment("trials", std::to_string(cfg.trials));
  t.comment("seed", std::to_string(cfg.seed));
  t.comment("units", "storage in bits (log base 2); probabilities in [0,1]");
  return t;
}

std::string penalty(const ExperimentConfig& cfg) {
  csv::Table t = echo(cfg, "single-query derivation penalty");
  t.header({"eps", "kappa", "n_star", "r_star", "sigma_unc_bits", "sigma_code_bits", "ratio_exact",
            "ratio_refined", "ratio_refined_unfloored", "ratio_limit"});
  const double delta = *cfg.delta;
  for (double eps : cfg.eps) {
    for (std::int64_t kappa : cfg.kappa) {
      const auto rep = an::penalty_ratio(kappa, eps, delta, cfg.m);
      t.row({num(eps), std::to_string(kappa), std::to_string(resilience_threshold(eps, delta)),
             std::to_string(min_parity_count(kappa, eps, delta)), num(rep.sigma_unc_bits),
             num(rep.sigma_code_bits), num(rep.ratio_exact), num(rep.ratio_refined),
             num(an::refined_penalty(kappa, eps, delta, an::NStarVariant::Unfloored)), num(1 / eps)});
    }
  }
  return t.str();
}

std::string exponents(const ExperimentConfig& cfg) {
  csv::Table t = echo(cfg, "strong converse exponent and prefactor");
  t.header({"eps", "alpha", "gamma", "kappa", "r", "pc_exact", "d_hat_bits", "kl_bits",
            "d_hat_rel_err", "br_estimate", "br_rel_err", "psi_bits", "psi_minus_half_log2_kappa",
            "c_alpha"});
  for (double eps : cfg.eps) {
    for (double alpha : cfg.alpha) {
      for (std::int64_t kappa : cfg.kappa) {
        const auto r = static_cast<std::int64_t>(std::floor(alpha * static_cast<double>(kappa) + 1e-9));
        const double log_pc = stats::binom_log_cdf(kappa, eps, r);
        const double pc = std::exp(log_pc);
        const double kl = an::kl_bernoulli(alpha, eps);
        const double d_hat = -log_pc / std::log(2.0) / static_cast<double>(kappa);
        const auto br = an::bahadur_rao_tail(kappa, eps, alpha, an::Tail::Lower);
        const double psi = an::prefactor_scale(kappa, eps, alpha);
        t.row({num(eps), num(alpha), num(eps - alpha), std::to_string(kappa), std::to_string(r), num(pc),
               num(d_hat), num(kl), num((d_hat - kl) / kl), num(br.estimate),
               num(std::fabs(br.estimate - pc) / pc), num(psi),
               num(psi - 0.5 * std::log2(static_cast<double>(kappa))),
               num(an::bahadur_rao_constant(eps, alpha))});
      }
    }
  }
  return t.str();
}

std::string dispersion(const ExperimentConfig& cfg) {
  csv::Table t = echo(cfg, "dispersion and coded phase transition");
  t.comment("phase_panel", "eps=0.3;kappa=100;500;1000;rho=0.20;0.25;0.28;0.30;0.32;0.35;0.40");
  t.header({"panel", "eps", "kappa", "rho", "r", "pe_exact", "delta_c", "delta_c_theory",
            "sigma_unc_bits", "unc_second_order_bits", "regime"});
  const double delta = *cfg.delta;
  const double l = std::log2(static_cast<double>(cfg.m));
  for (double eps : cfg.eps) {
    const double theory = stats::normal_quantile(1 - delta) * std::sqrt(eps * (1 - eps));
    for (std::int64_t kappa : cfg.kappa) {
      const std::int64_t r = min_parity_count(kappa, eps, delta);
      const double k = static_cast<double>(kappa);
      const double sigma_unc = an::sigma_star(an::CacheScheme::Unc, kappa, eps, delta, cfg.m);
      t.row({"dispersion", num(eps), std::to_string(kappa), num(static_cast<double>(r) / k),
             std::to_string(r), num(coded_error_exact(kappa, eps, r)),
             num((static_cast<double>(r) - eps * k) / std::sqrt(k)), num(theory), num(sigma_unc),
             num(sigma_unc - k * l), ""});
    }
  }
  const double eps = 0.3;
  for (std::int64_t kappa : {100, 500, 1000}) {
    for (double rho : {0.20, 0.25, 0.28, 0.30, 0.32, 0.35, 0.40}) {
      const auto r = static_cast<std::int64_t>(std::floor(rho * static_cast<double>(kappa) + 1e-9));
      t.row({"phase", num(eps), std::to_string(kappa), num(rho), std::to_string(r),
             num(coded_error_exact(kappa, eps, r)), "", "", "", "",
             an::to_string(an::classify_regime(an::CacheScheme::Coded, rho, eps, kappa))});
    }
  }
  return t.str();
}

std::string depth_resilience(const ExperimentConfig& cfg) {
  csv::Table t = echo(cfg, "depth-resilience duality");
  t.header({"eps", "n_star", "d_max_chain", "d_max_merge", "depth_ratio", "n_star_over_log2_n_star"});
  const double delta = *cfg.delta;
  for (double eps : cfg.eps) {
    const std::int64_t n_star = resilience_threshold(eps, delta);
    const auto dc = an::d_max(Architecture::chain(cfg.k), eps, delta);
    const auto dm = an::d_max(Architecture::merge(cfg.k), eps, delta);
    const double ns = static_cast<double>(n_star);
    t.row({num(eps), std::to_string(n_star), std::to_string(dc), std::to_string(dm),
           dm > 0 ? num(static_cast<double>(dc) / static_cast<double>(dm)) : "inf",
           n_star > 1 ? num(ns / std::log2(ns)) : "nan"});
  }
  return t.str();
}

std::string multi_query(const ExperimentConfig& cfg) {
  csv::Table t = echo(cfg, "multi-query penalty");
  t.header({"L", "alpha", "kappa", "eps", "n_eff", "omega", "r_star", "sigma_unc_bits",
            "sigma_code_bits", "ratio_exact", "ratio_refined", "refined_rel_err", "g1", "g2"});
  const double delta = *cfg.delta;
  for (double eps : cfg.eps) {
    for (std::int64_t kappa : cfg.kappa) {
      for (const auto& c : multi_query_configs()) {
        const auto sets = common_core_queries(c.L, kappa, c.alpha);
        const auto index_space = static_cast<Index>(c.L * kappa);
        const JointPlan plan = plan_joint(sets, eps, delta, std::max<Index>(index_space, 2));
        const auto n_eff = static_cast<std::int64_t>(plan.n_eff);
        const auto rep = an::penalty_ratio(n_eff, eps, delta, cfg.m);
        const auto g = an::joint_gains(c.L, kappa, c.alpha, delta);
        t.row({std::to_string(c.L), num(c.alpha), std::to_string(kappa), num(eps), std::to_string(n_eff),
               num(plan.overlap_index), std::to_string(plan.coded->r), num(rep.sigma_unc_bits),
               num(rep.sigma_code_bits), num(rep.ratio_exact), num(rep.ratio_refined),
               num(std::fabs(rep.ratio_refined - rep.ratio_exact) / rep.ratio_exact), num(g.g1),
               num(g.g2)});
      }
    }
  }
  return t.str();
}

std::string monte_carlo(const ExperimentConfig& cfg) {
  csv::Table t = echo(cfg, "Monte Carlo validation");
  t.header({"panel", "scheme", "eps", "kappa", "param", "pe_exact", "pe_hat", "pe_ci_low",
            "pe_ci_high", "trials", "seed"});
  // --r replaces the coded parity grid of both panels.
  std::vector<TableRow> rows;
  char last_panel = 0;
  for (const TableRow& row : table_rows()) {
    if (!row.coded || cfg.r.empty()) {
      rows.push_back(row);
    } else if (row.panel != last_panel) {
      for (std::int64_t r : cfg.r) rows.push_back({row.panel, true, row.eps, row.kappa, r});
    }
    last_panel = row.panel;
  }
  for (const TableRow& row : rows) {
    if (row.param < 0 || (row.coded && row.param > row.kappa)) {
      throw std::invalid_argument("Monte Carlo table parameter outside [0, kappa]");
    }
    const mc::Scenario s = row.coded ? mc::Scenario{mc::CodedAnalytic{row.kappa, row.eps, row.param}}
                                     : mc::Scenario{mc::UncAnalytic{row.param, row.eps}};
    const double exact = row.coded ? coded_error_exact(row.kappa, row.eps, row.param)
                                   : unc_error_exact(row.param, row.eps);
    const auto est = mc::simulate(s, cfg.trials, cfg.seed);
    t.row({std::string(1, row.panel), row.coded ? "coded" : "unc", num(row.eps),
           std::to_string(row.kappa), (row.coded ? "r=" : "N=") + std::to_string(row.param),
           num(exact), num(est.pe_hat()), num(est.pe_ci_low()), num(est.pe_ci_high()),
           std::to_string(est.trials), std::to_string(est.seed)});
  }
  return t.str();
}

}  // namespace

ExperimentConfig with_defaults(ExperimentConfig cfg) {
  if (cfg.id < 1 || cfg.id > 6) throw std::invalid_argument("experiment id must be 1..6");
  if (cfg.m < 2) throw std::invalid_argument("m must be >= 2");
  if (cfg.k < 2) throw std::invalid_argument("k must be >= 2");
  if (cfg.trials < 1) throw std::invalid_argument("trials must be >= 1");
  if (!cfg.delta) cfg.delta = cfg.id == 4 ? 0.3 : 0.1;
  auto fill = [](auto& v, auto defaults) {
    if (v.empty()) v = defaults;
  };
  switch (cfg.id) {
    case 1:
      fill(cfg.eps, std::vector<double>{0.1, 0.2});
      fill(cfg.kappa, std::vector<std::int64_t>{50, 100, 200, 500, 1000, 2000, 5000});
      break;
    case 2:
      fill(cfg.eps, std::vector<double>{0.3});
      fill(cfg.alpha, std::vector<double>{0.2, 0.15, 0.1});
      fill(cfg.kappa, std::vector<std::int64_t>{100, 200, 500, 1000, 2000, 5000});
      break;
    case 3:
      fill(cfg.eps, std::vector<double>{0.2});
      fill(cfg.kappa, std::vector<std::int64_t>{50, 100, 200, 500, 1000, 2000, 5000});
      break;
    case 4:
      fill(cfg.eps, std::vector<double>{0.02, 0.01, 0.005, 0.002});
      break;
    case 5:
      fill(cfg.eps, std::vector<double>{0.2});
      fill(cfg.kappa, std::vector<std::int64_t>{500});
      break;
    case 6:
      break;
  }
  for (double e : cfg.eps) {
    if (!(e > 0.0 && e < 1.0)) throw std::invalid_argument("eps grid values must lie in (0,1)");
  }
  for (auto k : cfg.kappa) {
    if (k < 1) throw std::invalid_argument("kappa grid values must be >= 1");
  }
  for (double a : cfg.alpha) {
    if (!(a > 0.0 && a < 1.0)) throw std::invalid_argument("alpha grid values must lie in (0,1)");
  }
  if (!(*cfg.delta > 0.0 && *cfg.delta < 1.0)) throw std::invalid_argument("delta must lie in (0,1)");
  return cfg;
}

std::string run_experiment(const ExperimentConfig& raw) {
  const ExperimentConfig cfg = with_defaults(raw);
  switch (cfg.id) {
    case 1: return penalty(cfg);
    case 2: return exponents(cfg);
    case 3: return dispersion(cfg);
    case 4: return depth_resilience(cfg);
    case 5: return multi_query(cfg);
    default: return monte_carlo(cfg);
  }
}

std::vector<std::vector<Index>> common_core_queries(int L, std::int64_t kappa, double alpha) {
  if (L < 1 || kappa < 1) throw std::invalid_argument("need L >= 1 and kappa >= 1");
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw std::invalid_argument("alpha must lie in [0,1]");
  const auto core = static_cast<std::int64_t>(std::llround(alpha * static_cast<double>(kappa)));
  std::vector<std::vector<Index>> out;
  Index next = static_cast<Index>(core) + 1;
  for (int l = 0; l < L; ++l) {
    std::vector<Index> s;
    for (std::int64_t i = 1; i <= core; ++i) s.push_back(static_cast<Index>(i));
    for (std::int64_t i = core; i < kappa; ++i) s.push_back(next++);
    out.push_back(std::move(s));
  }
  return out;
}

const std::vector<MultiQueryConfig>& multi_query_configs() {
  static const std::vector<MultiQueryConfig> configs = {
      {1, 0.0}, {2, 0.0}, {2, 0.3}, {2, 0.6}, {5, 0.0}, {5, 0.3}, {10, 0.0}, {10, 0.5}};
  return configs;
}

const std::vector<TableRow>& table_rows() {
  static const std::vector<TableRow> rows = {
      {'A', true, 0.2, 500, 90},  {'A', true, 0.2, 500, 100}, {'A', true, 0.2, 500, 111},
      {'A', true, 0.2, 500, 120}, {'A', false, 0.2, 500, 10}, {'A', false, 0.2, 500, 3},
      {'A', false, 0.2, 500, 1},  {'B', true, 0.3, 100, 20},  {'B', true, 0.3, 100, 25},
      {'B', true, 0.3, 100, 30},  {'B', true, 0.3, 100, 35},  {'B', false, 0.3, 100, 5},
      {'B', false, 0.3, 100, 3},  {'B', false, 0.3, 100, 1}};
  return rows;
}

}  // namespace pec::exp
