#include "pec/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "pec/caching.hpp"
#include "pec/erasure.hpp"
#include "pec/stats.hpp"

namespace pec::analysis {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kInf = std::numeric_limits<double>::infinity();

void check_open_unit(double x, const char* name) {
  if (!(x > 0.0 && x < 1.0)) throw std::invalid_argument(std::string(name) + " must lie in (0,1)");
}

double xlog2y(double x, double y) { return x == 0.0 ? 0.0 : x * std::log2(y); }

// Root of a function that is negative at lo and positive at hi.
template <class F>
double bisect(F f, double lo, double hi, double tol = 1e-13) {
  for (int it = 0; it < 200 && hi - lo > tol; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (f(mid) < 0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double log2m(Index m) {
  if (m < 2) throw std::invalid_argument("m must be >= 2");
  return std::log2(static_cast<double>(m));
}

}  // namespace

double kl_bernoulli(double p, double q) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("p must lie in [0,1]");
  check_open_unit(q, "q");
  const double d = xlog2y(p, p / q) + xlog2y(1 - p, (1 - p) / (1 - q));
  return std::max(0.0, d);
}

double binary_entropy(double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("p must lie in [0,1]");
  return -xlog2y(p, p) - xlog2y(1 - p, 1 - p);
}

BahadurRao bahadur_rao_tail(std::int64_t kappa, double eps, double alpha, Tail side) {
  if (kappa < 1) throw std::invalid_argument("kappa must be >= 1");
  check_open_unit(eps, "eps");
  check_open_unit(alpha, "alpha");
  if (alpha == eps) throw std::out_of_range("tilt vanishes at alpha = eps");
  if (side == Tail::Lower && alpha > eps) throw std::invalid_argument("lower tail needs alpha < eps");
  if (side == Tail::Upper && alpha < eps) throw std::invalid_argument("upper tail needs alpha > eps");
  const double tilt = std::log(alpha * (1 - eps) / (eps * (1 - alpha)));
  const double k = static_cast<double>(kappa);
  const double pref = std::fabs(-std::expm1(tilt)) * std::sqrt(2 * std::numbers::pi * k * alpha * (1 - alpha));
  const double estimate = std::exp2(-k * kl_bernoulli(alpha, eps)) / pref;
  return {estimate, tilt};
}

double bahadur_rao_constant(double eps, double alpha) {
  check_open_unit(eps, "eps");
  check_open_unit(alpha, "alpha");
  if (alpha == eps) throw std::out_of_range("tilt vanishes at alpha = eps");
  const double tilt = std::log(alpha * (1 - eps) / (eps * (1 - alpha)));
  return std::log2(std::fabs(-std::expm1(tilt)) * std::sqrt(2 * std::numbers::pi * alpha * (1 - alpha)));
}

double prefactor_scale(std::int64_t kappa, double eps, double alpha) {
  const auto r = static_cast<std::int64_t>(std::floor(alpha * static_cast<double>(kappa) + 1e-9));
  const double log2_pc = stats::binom_log_cdf(kappa, eps, r) / std::numbers::ln2;
  return -log2_pc - static_cast<double>(kappa) * kl_bernoulli(alpha, eps);
}

double moderate_dev_pe(std::int64_t kappa, double eps, double a) {
  if (kappa < 1) throw std::invalid_argument("kappa must be >= 1");
  check_open_unit(eps, "eps");
  if (!(a > 0.0)) throw std::invalid_argument("a must be positive");
  return stats::normal_sf(a / std::sqrt(eps * (1 - eps)));
}

double cache_dispersion(double eps, Index m) {
  const double l = log2m(m);
  return eps * (1 - eps) * l * l;
}

double sigma_star(CacheScheme scheme, std::int64_t kappa, double eps, double delta, Index m,
                  SigmaMode mode) {
  if (kappa < 1) throw std::invalid_argument("kappa must be >= 1");
  check_open_unit(eps, "eps");
  check_open_unit(delta, "delta");
  const double l = log2m(m);
  const double k = static_cast<double>(kappa);
  if (scheme == CacheScheme::Unc) {
    const std::int64_t n_star = resilience_threshold(eps, delta);
    return static_cast<double>(std::max<std::int64_t>(kappa - n_star, 0)) * l;
  }
  if (mode == SigmaMode::Operational) {
    return static_cast<double>(min_parity_count(kappa, eps, delta)) * l;
  }
  return k * eps * l + std::sqrt(k * cache_dispersion(eps, m)) * stats::normal_quantile(1 - delta) +
         0.5 * std::log2(k);
}

double coded_converse_bits(std::int64_t kappa, double eps, double delta, Index m) {
  check_open_unit(eps, "eps");
  check_open_unit(delta, "delta");
  return (eps - delta) * static_cast<double>(kappa) * log2m(m) - binary_entropy(delta);
}

double refined_penalty(std::int64_t n, double eps, double delta, NStarVariant variant) {
  if (n < 1) throw std::invalid_argument("n must be >= 1");
  check_open_unit(eps, "eps");
  check_open_unit(delta, "delta");
  const double nd = static_cast<double>(n);
  const double n_star = variant == NStarVariant::Floored
                            ? static_cast<double>(resilience_threshold(eps, delta))
                            : std::log1p(-delta) / std::log1p(-eps);
  return 1 / eps - n_star / (eps * nd) -
         stats::normal_quantile(1 - delta) * std::sqrt(1 - eps) / (std::pow(eps, 1.5) * std::sqrt(nd));
}

PenaltyReport penalty_ratio(std::int64_t n, double eps, double delta, Index m, NStarVariant variant) {
  PenaltyReport rep{};
  rep.sigma_unc_bits = sigma_star(CacheScheme::Unc, n, eps, delta, m);
  rep.sigma_code_bits = sigma_star(CacheScheme::Coded, n, eps, delta, m);
  rep.ratio_exact = rep.sigma_code_bits > 0 ? rep.sigma_unc_bits / rep.sigma_code_bits : kInf;
  rep.ratio_refined = refined_penalty(n, eps, delta, variant);
  rep.kappa_or_neff = n;
  rep.eps = eps;
  rep.delta = delta;
  rep.m = m;
  return rep;
}

std::string to_string(PhaseRegime r) {
  static const char* names[] = {"C1", "C2", "C3", "C4", "C5", "U1", "U2", "U3"};
  return names[static_cast<int>(r)];
}

PhaseRegime classify_regime(CacheScheme scheme, double rho, double eps, std::int64_t kappa,
                            std::optional<double> window_c, double eta) {
  if (!(rho >= 0.0 && rho <= 1.0)) throw std::invalid_argument("rho must lie in [0,1]");
  check_open_unit(eps, "eps");
  if (kappa < 1) throw std::invalid_argument("kappa must be >= 1");
  if (!(eta > 0.0)) throw std::invalid_argument("eta must be positive");
  const double k = static_cast<double>(kappa);
  if (scheme == CacheScheme::Unc) {
    if (rho == 1.0) return PhaseRegime::U3;
    return (1 - rho) * k <= eta * k ? PhaseRegime::U2 : PhaseRegime::U1;
  }
  const double dev = rho - eps;
  if (std::fabs(dev) > eta) return dev < 0 ? PhaseRegime::C1 : PhaseRegime::C5;
  const double window = window_c.value_or(3.0 * std::sqrt(eps * (1 - eps)));
  if (std::fabs(dev) * std::sqrt(k) <= window) return PhaseRegime::C3;
  return dev < 0 ? PhaseRegime::C2 : PhaseRegime::C4;
}

double regime_error(CacheScheme scheme, double rho, double eps, std::int64_t kappa) {
  if (!(rho >= 0.0 && rho <= 1.0)) throw std::invalid_argument("rho must lie in [0,1]");
  const auto r = static_cast<std::int64_t>(std::floor(rho * static_cast<double>(kappa) + 1e-9));
  if (scheme == CacheScheme::Coded) return coded_error_exact(kappa, eps, std::min(r, kappa));
  return unc_error_exact(std::max<std::int64_t>(kappa - r, 0), eps);
}

double image_size_bound(double sigma_bits, std::int64_t kappa, double eps, Index m) {
  if (!(sigma_bits >= 0.0)) throw std::invalid_argument("sigma must be non-negative");
  if (kappa < 1) throw std::invalid_argument("kappa must be >= 1");
  if (!(eps >= 0.0 && eps < 1.0)) throw std::invalid_argument("eps must lie in [0,1)");
  const double l = log2m(m);
  stats::CompensatedSum acc;
  for (std::int64_t e = 0; e <= kappa; ++e) {
    const double lp = stats::binom_log_pmf(kappa, eps, e);
    if (lp == -kInf) continue;
    const double cap = std::min(0.0, (sigma_bits - static_cast<double>(e) * l) * std::numbers::ln2);
    acc.add(std::exp(lp + cap));
  }
  return std::min(1.0, acc.value());
}

double strong_converse_lb(double gamma, std::int64_t kappa, Index m) {
  if (!(gamma > 0.0 && gamma < 1.0)) throw std::invalid_argument("gamma must lie in (0,1)");
  if (kappa < 1) throw std::invalid_argument("kappa must be >= 1");
  const double k = static_cast<double>(kappa);
  const double v = 1 - std::exp(-gamma * gamma * k / 2) - std::exp2((1 - gamma * k / 2) * log2m(m));
  return std::clamp(v, 0.0, 1.0);
}

Exponents exponent_landscape(double rho, double eps) {
  check_open_unit(eps, "eps");
  if (!(rho >= eps && rho <= 1.0)) throw std::invalid_argument("rho must lie in [eps,1]");
  return {kl_bernoulli(rho, eps), (1 - rho) * std::fabs(std::log2(1 - eps))};
}

double crossover_rho(double eps) {
  check_open_unit(eps, "eps");
  return bisect([eps](double rho) {
    const auto x = exponent_landscape(rho, eps);
    return x.coded - x.unc;
  }, eps, 1.0);
}

double kl_inverse_upper(double e, double eps) {
  check_open_unit(eps, "eps");
  const double top = -std::log2(eps);
  if (!(e >= 0.0 && e <= top)) throw std::invalid_argument("exponent outside [0, log2(1/eps)]");
  if (e == top) return 1.0;
  return bisect([e, eps](double rho) { return kl_bernoulli(rho, eps) - e; }, eps, 1.0);
}

double exponent_gap(double e, double eps) {
  if (!(eps > 0.0 && eps <= 0.5)) throw std::invalid_argument("exponent gap needs eps in (0,1/2]");
  const double cap = std::fabs(std::log2(1 - eps));
  if (!(e > 0.0 && e <= cap)) throw std::invalid_argument("E must lie in (0, |log2(1-eps)|]");
  const double rho_unc = 1 - e / cap;
  return rho_unc / kl_inverse_upper(e, eps);
}

double crossover_e(double eps) {
  const double cap = std::fabs(std::log2(1 - eps));
  return bisect([eps](double e) { return 1.0 - exponent_gap(e, eps); }, 1e-15, cap);
}

std::int64_t d_max(const Architecture& arch, double eps, double delta) {
  const std::int64_t n_star = resilience_threshold(eps, delta);
  std::int64_t best = 0;
  if (arch.kind == ArchKind::Chain) return std::max<std::int64_t>(n_star - arch.k + 1, 0);
  for (int d = 1; d < 62; ++d) {
    if (static_cast<std::int64_t>(arch.arity(d)) > n_star) break;
    best = d;
  }
  return best;
}

DepthSpaceReport depth_space_report(const Architecture& arch, double sigma_bits, double eps,
                                    double delta, Index m, std::optional<int> d) {
  if (!(sigma_bits >= 0.0)) throw std::invalid_argument("sigma must be non-negative");
  check_open_unit(eps, "eps");
  check_open_unit(delta, "delta");
  DepthSpaceReport rep{};
  rep.arch = arch.kind;
  rep.r = static_cast<std::int64_t>(std::floor(sigma_bits / log2m(m) + 1e-9));
  const double r = static_cast<double>(rep.r);
  const double k = arch.k;
  const double kappa_star = r / eps;
  rep.d_star = arch.kind == ArchKind::Chain ? kappa_star - k + 1 : 1 + std::log2(kappa_star / k);

  if (delta < 0.5) {
    // Coded: z runs from Phi^-1(1-delta) to -Phi^-1(1-delta) across
    // Delta-kappa = 2 z sqrt(kappa* eps(1-eps)) / eps.
    const double z = stats::normal_quantile(1 - delta);
    const double dk = 2 * z * std::sqrt(kappa_star * eps * (1 - eps)) / eps;
    rep.width_coded = arch.kind == ArchKind::Chain ? dk : dk / (kappa_star * std::numbers::ln2);
    // Uncoded: exposed count N moves from ln(1-delta) to ln(delta) over ln(1-eps).
    const double n_lo = std::log1p(-delta) / std::log1p(-eps);
    const double n_hi = std::log(delta) / std::log1p(-eps);
    rep.width_unc = arch.kind == ArchKind::Chain ? n_hi - n_lo : std::log2((r + n_hi) / (r + n_lo));
  } else {
    rep.width_coded = kNaN;
    rep.width_unc = kNaN;
  }
  if (d) rep.alpha_of_d = r / static_cast<double>(arch.arity(*d));
  rep.d_max = d_max(arch, eps, delta);
  return rep;
}

JointGains joint_gains(int L, std::int64_t kappa, double alpha, double delta) {
  if (L < 1) throw std::invalid_argument("L must be >= 1");
  if (kappa < 1) throw std::invalid_argument("kappa must be >= 1");
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw std::invalid_argument("alpha must lie in [0,1]");
  check_open_unit(delta, "delta");
  const double k = static_cast<double>(kappa);
  const double n_eff = (L - (L - 1) * alpha) * k;
  const double g1 = L * k / n_eff;
  const double g2 = L * std::sqrt(k) * stats::normal_quantile(1 - delta / L) /
                    (std::sqrt(n_eff) * stats::normal_quantile(1 - delta));
  return {n_eff, g1, g2};
}

CapacityRegion capacity_region_sigma(std::int64_t n_eff, double eps, const std::vector<double>& deltas,
                                     Index m) {
  if (deltas.empty()) throw std::invalid_argument("need at least one reliability target");
  const double dmin = *std::min_element(deltas.begin(), deltas.end());
  return {sigma_star(CacheScheme::Coded, n_eff, eps, dmin, m),
          sigma_star(CacheScheme::Unc, n_eff, eps, dmin, m), dmin};
}

LargeLLimits large_l_limits(std::int64_t kappa, double alpha, double eps, double delta, Index m, int L) {
  const JointGains g = joint_gains(L, kappa, alpha, delta);
  const auto n_eff = static_cast<std::int64_t>(std::llround(g.n_eff));
  LargeLLimits out{};
  const double l = log2m(m);
  out.coded_per_query = sigma_star(CacheScheme::Coded, n_eff, eps, delta, m) / L;
  out.unc_per_query = sigma_star(CacheScheme::Unc, n_eff, eps, delta, m) / L;
  out.coded_limit = eps * (1 - alpha) * static_cast<double>(kappa) * l;
  out.unc_limit = (1 - alpha) * static_cast<double>(kappa) * l;
  out.penalty = out.coded_per_query > 0 ? out.unc_per_query / out.coded_per_query : kInf;
  out.penalty_limit = 1 / eps;
  return out;
}

NoisyBaseStats noisy_base_stats(std::int64_t m, std::int64_t lost, std::int64_t added,
                                std::int64_t kappa_tilde) {
  if (lost < 0 || added < 0 || lost > m) throw std::invalid_argument("need 0 <= lost <= m, added >= 0");
  if (kappa_tilde < 0) throw std::invalid_argument("kappa must be non-negative");
  const std::int64_t mt = m - lost + added;
  if (mt < 2) throw std::invalid_argument("noisy base must keep at least 2 facts");
  const double ratio = static_cast<double>(m - lost) / static_cast<double>(mt);
  return {mt, std::pow(ratio, static_cast<double>(kappa_tilde)),
          static_cast<double>(kappa_tilde) * std::log2(static_cast<double>(mt) / static_cast<double>(m))};
}

TiltedExponentCheck tilted_exponent_check(double eps, double gamma) {
  check_open_unit(eps, "eps");
  if (!(gamma > 0.0 && gamma < eps)) throw std::invalid_argument("need 0 < gamma < eps");
  const double ep = eps - gamma;
  const auto g0 = [eps, ep](double u) {
    return u * ep + std::log1p(eps * std::expm1(-u * std::numbers::ln2)) / std::numbers::ln2;
  };
  const auto slope = [eps, ep](double u) {
    const double t = eps * std::exp2(-u);
    return ep - t / (1 - eps + t);
  };
  double hi = 1.0;
  while (slope(hi) < 0 && hi < 4096) hi *= 2;
  double lo = 0.0;
  const double phi = (std::sqrt(5.0) - 1) / 2;
  double a = hi - phi * (hi - lo);
  double b = lo + phi * (hi - lo);
  double fa = g0(a), fb = g0(b);
  for (int it = 0; it < 300 && hi - lo > 1e-14; ++it) {
    if (fa < fb) {
      hi = b;
      b = a;
      fb = fa;
      a = hi - phi * (hi - lo);
      fa = g0(a);
    } else {
      lo = a;
      a = b;
      fa = fb;
      b = lo + phi * (hi - lo);
      fb = g0(b);
    }
  }
  TiltedExponentCheck out{};
  out.u_star = 0.5 * (lo + hi);
  const double alpha = ep * (1 - eps) / (eps * (1 - ep));
  out.u_star_closed = -std::log2(alpha);
  out.neg_g_star = -g0(out.u_star);
  out.kl = kl_bernoulli(ep, eps);
  out.abs_diff = std::fabs(out.neg_g_star - out.kl);
  return out;
}

}  // namespace pec::analysis
