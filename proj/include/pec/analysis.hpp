#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pec/datalog.hpp"

// Closed-form and asymptotic calculators. Logs are base 2 and storage is in
// bits unless a name says otherwise.
namespace pec::analysis {

// D(p||q) in bits, with 0 log 0 = 0.
double kl_bernoulli(double p, double q);
// Binary entropy in bits.
double binary_entropy(double p);

enum class Tail { Lower, Upper };

struct BahadurRao {
  double estimate;
  double tilt;  // t* = ln(alpha(1-eps) / (eps(1-alpha)))
};
// Prefactor-corrected tail of Bin(kappa, eps) at alpha*kappa.
BahadurRao bahadur_rao_tail(std::int64_t kappa, double eps, double alpha, Tail side);
// c(alpha) = log2(|1 - e^t*| sqrt(2 pi alpha (1-alpha))), the limit of
// psi(kappa) - log2(kappa)/2.
double bahadur_rao_constant(double eps, double alpha);
// psi(kappa) = -log2 Pr[Bin(kappa, eps) <= alpha kappa] - kappa D(alpha||eps).
double prefactor_scale(std::int64_t kappa, double eps, double alpha);

// Normal-approximate P_e with r = eps*kappa + a*sqrt(kappa): Phi_bar(a / sqrt(eps(1-eps))).
double moderate_dev_pe(std::int64_t kappa, double eps, double a);

enum class CacheScheme { Coded, Unc };
enum class SigmaMode { Operational, NormalApprox };

// V = eps (1-eps) (log2 m)^2.
double cache_dispersion(double eps, Index m);
// Operational: coded r* log2 m, uncoded (kappa - N*)+ log2 m.
// NormalApprox coded: kappa eps log2 m + sqrt(kappa V) Phi^-1(1-delta) + log2(kappa)/2.
double sigma_star(CacheScheme scheme, std::int64_t kappa, double eps, double delta, Index m,
                  SigmaMode mode = SigmaMode::Operational);
// Fano lower bound (eps - delta) kappa log2 m - h(delta) on any reliable coded cache.
double coded_converse_bits(std::int64_t kappa, double eps, double delta, Index m);

enum class NStarVariant { Floored, Unfloored };

struct PenaltyReport {
  double sigma_unc_bits;
  double sigma_code_bits;
  double ratio_exact;
  double ratio_refined;
  std::int64_t kappa_or_neff;
  double eps;
  double delta;
  Index m;
};

// 1/eps - N*/(eps n) - Phi^-1(1-delta) sqrt(1-eps) / (eps^1.5 sqrt n).
double refined_penalty(std::int64_t n, double eps, double delta,
                       NStarVariant variant = NStarVariant::Floored);
PenaltyReport penalty_ratio(std::int64_t n, double eps, double delta, Index m,
                            NStarVariant variant = NStarVariant::Floored);

enum class PhaseRegime { C1, C2, C3, C4, C5, U1, U2, U3 };
std::string to_string(PhaseRegime r);

inline constexpr double kDeepBand = 0.01;

// Coded: |rho - eps| > eta is deep (C1/C5); otherwise C3 when
// |rho - eps| sqrt(kappa) <= window_c, else C2/C4. The default window is
// three CLT standard deviations, 3 sqrt(eps(1-eps)).
// Uncoded: rho = 1 is U3; (1-rho) kappa <= eta kappa is U2; else U1.
PhaseRegime classify_regime(CacheScheme scheme, double rho, double eps, std::int64_t kappa,
                            std::optional<double> window_c = std::nullopt, double eta = kDeepBand);
// Exact P_e at cache fraction rho: coded Pr[E > floor(rho kappa)],
// uncoded 1 - (1-eps)^(kappa - floor(rho kappa)).
double regime_error(CacheScheme scheme, double rho, double eps, std::int64_t kappa);

// E[min(1, 2^sigma / m^E)] with E ~ Bin(kappa, eps).
double image_size_bound(double sigma_bits, std::int64_t kappa, double eps, Index m);
// 1 - e^{-gamma^2 kappa / 2} - m^{1 - gamma kappa / 2}, clamped to [0, 1].
double strong_converse_lb(double gamma, std::int64_t kappa, Index m);

struct Exponents {
  double coded;  // D(rho||eps)
  double unc;    // (1-rho) |log2(1-eps)|
};
Exponents exponent_landscape(double rho, double eps);
double crossover_rho(double eps);
// Upper-branch inverse: the rho in [eps, 1] with D(rho||eps) = e.
double kl_inverse_upper(double e, double eps);
// h(E) = rho_unc(E) / rho_code(E), E in (0, |log2(1-eps)|].
double exponent_gap(double e, double eps);
double crossover_e(double eps);

struct DepthSpaceReport {
  ArchKind arch;
  std::int64_t r;          // floor(sigma / log2 m)
  double d_star;           // depth where sigma = eps kappa_A(d) log2 m
  double width_coded;      // depth span over which P_e moves from delta to 1-delta
  double width_unc;
  std::optional<double> alpha_of_d;
  std::int64_t d_max;      // deepest level that stays delta-reliable with no cache
};
DepthSpaceReport depth_space_report(const Architecture& arch, double sigma_bits, double eps,
                                    double delta, Index m, std::optional<int> d = std::nullopt);
std::int64_t d_max(const Architecture& arch, double eps, double delta);

struct JointGains {
  double n_eff;
  double g1;
  double g2;
};
// Common-core model: n_eff = (L - (L-1) alpha) kappa.
JointGains joint_gains(int L, std::int64_t kappa, double alpha, double delta);

struct CapacityRegion {
  double coded_bits;
  double unc_bits;
  double delta_min;
};
CapacityRegion capacity_region_sigma(std::int64_t n_eff, double eps,
                                     const std::vector<double>& deltas, Index m);

struct LargeLLimits {
  double coded_per_query;  // sigma_code / L at the given L
  double unc_per_query;
  double coded_limit;      // eps (1-alpha) kappa log2 m
  double unc_limit;        // (1-alpha) kappa log2 m
  double penalty;
  double penalty_limit;    // 1/eps
};
LargeLLimits large_l_limits(std::int64_t kappa, double alpha, double eps, double delta, Index m,
                            int L);

struct NoisyBaseStats {
  std::int64_t m_tilde;
  double sound_fraction;
  double capacity_shift_bits;
};
NoisyBaseStats noisy_base_stats(std::int64_t m, std::int64_t lost, std::int64_t added,
                                std::int64_t kappa_tilde);

struct TiltedExponentCheck {
  double u_star;         // numerical minimizer
  double u_star_closed;  // -log2 alpha, alpha = eps'(1-eps) / (eps(1-eps'))
  double neg_g_star;     // -min g0
  double kl;             // D(eps - gamma || eps)
  double abs_diff;
};
// Minimizes g0(u) = u (eps - gamma) + log2(1 - eps + eps 2^-u) over u >= 0
// by golden-section search.
TiltedExponentCheck tilted_exponent_check(double eps, double gamma);

}  // namespace pec::analysis
