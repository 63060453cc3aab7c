#include <boost/math/distributions/binomial.hpp>
#include <boost/math/distributions/normal.hpp>
#include <cmath>
#include <doctest.h>
#include <numeric>
#include <random>

#include "pec/analysis.hpp"
#include "pec/caching.hpp"
#include "pec/erasure.hpp"

using namespace pec;
using namespace pec::analysis;

namespace {

double oracle_binom_cdf(std::int64_t n, double p, std::int64_t r) {
  return boost::math::cdf(boost::math::binomial_distribution<double>(static_cast<double>(n), p),
                          static_cast<double>(r));
}

double oracle_binom_sf(std::int64_t n, double p, std::int64_t r) {
  return boost::math::cdf(boost::math::complement(
      boost::math::binomial_distribution<double>(static_cast<double>(n), p), static_cast<double>(r)));
}

double oracle_phi_bar(double z) {
  return boost::math::cdf(boost::math::complement(boost::math::normal_distribution<double>(), z));
}

double oracle_phi_inv(double p) { return boost::math::quantile(boost::math::normal_distribution<double>(), p); }

std::vector<Index> iota_tuple(std::size_t n) {
  std::vector<Index> t(n);
  std::iota(t.begin(), t.end(), Index{1});
  return t;
}

}  // namespace

TEST_CASE("kl divergence values at the exponent operating points") {
  CHECK(std::fabs(kl_bernoulli(0.20, 0.3) - 0.0371) <= 5e-4);
  CHECK(std::fabs(kl_bernoulli(0.15, 0.3) - 0.0881) <= 5e-4);
  CHECK(std::fabs(kl_bernoulli(0.10, 0.3) - 0.1678) <= 5e-4);
  CHECK(kl_bernoulli(0.3, 0.3) == 0.0);
  CHECK(kl_bernoulli(0.0, 0.3) == doctest::Approx(-std::log2(0.7)));
  CHECK(kl_bernoulli(1.0, 0.3) == doctest::Approx(-std::log2(0.3)));
  CHECK(binary_entropy(0.5) == 1.0);
  CHECK(binary_entropy(0.0) == 0.0);
}

TEST_CASE("kl divergence is non-negative, zero only on the diagonal, convex in p") {
  for (double q = 0.05; q < 1.0; q += 0.05) {
    double prev2 = NAN, prev1 = NAN;
    for (double p = 0.0; p <= 1.0 + 1e-12; p += 0.01) {
      const double v = kl_bernoulli(std::min(p, 1.0), q);
      CHECK(v >= 0.0);
      if (std::fabs(p - q) > 1e-9) CHECK(v > 0.0);
      if (!std::isnan(prev2)) CHECK(prev2 + v - 2 * prev1 > -1e-12);
      prev2 = prev1;
      prev1 = v;
    }
  }
}

TEST_CASE("bahadur-rao tilt and validity range") {
  CHECK(bahadur_rao_tail(5000, 0.3, 0.2, Tail::Lower).tilt == doctest::Approx(std::log(7.0 / 12.0)));
  CHECK(std::fabs(bahadur_rao_tail(5000, 0.3, 0.3 - 1e-9, Tail::Lower).tilt) < 1e-7);
  CHECK_THROWS(bahadur_rao_tail(5000, 0.3, 0.3, Tail::Lower));
  CHECK_THROWS(bahadur_rao_tail(5000, 0.3, 0.4, Tail::Lower));
  CHECK_THROWS(bahadur_rao_tail(5000, 0.3, 0.2, Tail::Upper));
}

TEST_CASE("bahadur-rao estimate tracks the exact lower tail and sharpens with kappa") {
  for (double alpha : {0.10, 0.15, 0.20}) {
    const auto rel = [&](std::int64_t kappa) {
      const auto r = static_cast<std::int64_t>(std::floor(alpha * static_cast<double>(kappa) + 1e-9));
      const double exact = oracle_binom_cdf(kappa, 0.3, r);
      return std::fabs(bahadur_rao_tail(kappa, 0.3, alpha, Tail::Lower).estimate - exact) / exact;
    };
    CHECK(rel(500) <= 0.10);
    CHECK(rel(5000) <= 0.02);
    CHECK(rel(5000) < rel(500));
  }
  // Upper tail at alpha = 0.4 over eps = 0.3.
  const double exact = oracle_binom_sf(5000, 0.3, 1999);
  CHECK(bahadur_rao_tail(5000, 0.3, 0.4, Tail::Upper).estimate == doctest::Approx(exact).epsilon(0.02));
}

TEST_CASE("prefactor scale approaches the bahadur-rao constant") {
  const std::vector<std::pair<double, double>> want{{0.20, -1.26}, {0.15, -0.93}, {0.10, -0.84}};
  for (const auto& [alpha, c] : want) {
    CHECK(std::fabs(bahadur_rao_constant(0.3, alpha) - c) <= 0.05);
    CHECK(std::fabs(prefactor_scale(5000, 0.3, alpha) - 0.5 * std::log2(5000.0) - c) <= 0.05);
    const double exact = oracle_binom_cdf(5000, 0.3, static_cast<std::int64_t>(std::floor(alpha * 5000 + 1e-9)));
    CHECK(prefactor_scale(5000, 0.3, alpha) ==
          doctest::Approx(-std::log2(exact) - 5000 * kl_bernoulli(alpha, 0.3)).epsilon(1e-9));
  }
}

TEST_CASE("moderate deviation estimate") {
  CHECK(moderate_dev_pe(10000, 0.2, 1e-12) == doctest::Approx(0.5));
  CHECK(moderate_dev_pe(10000, 0.2, std::sqrt(0.16)) == doctest::Approx(0.15865525393145707).epsilon(1e-8));
  const double exact = oracle_binom_sf(10000, 0.2, 2000 + 300);
  CHECK(std::fabs(moderate_dev_pe(10000, 0.2, 3.0) - exact) <= 0.02);
}

TEST_CASE("operational cache sizes") {
  CHECK(sigma_star(CacheScheme::Unc, 500, 0.2, 0.1, 256) == 4000.0);
  const auto r = min_parity_count(500, 0.2, 0.1);
  CHECK(r == 112);
  CHECK(sigma_star(CacheScheme::Coded, 500, 0.2, 0.1, 256) == 8.0 * static_cast<double>(r));
  CHECK(cache_dispersion(0.2, 256) == doctest::Approx(0.16 * 64));
  // The normal approximation lands within a few parity symbols of the operational size.
  const double approx = sigma_star(CacheScheme::Coded, 500, 0.2, 0.1, 256, SigmaMode::NormalApprox);
  CHECK(std::fabs(approx - 8.0 * static_cast<double>(r)) <= 8.0 * 6);
}

TEST_CASE("uncoded size has no square-root term: differences are exact multiples of log m") {
  for (double eps : {0.01, 0.1, 0.2}) {
    const std::int64_t n = resilience_threshold(eps, 0.1);
    for (std::int64_t a = n + 1; a <= n + 2000; a += 137) {
      for (std::int64_t b = n + 1; b <= n + 2000; b += 211) {
        CHECK(sigma_star(CacheScheme::Unc, a, eps, 0.1, 256) - sigma_star(CacheScheme::Unc, b, eps, 0.1, 256) ==
              static_cast<double>(a - b) * 8.0);
      }
    }
  }
}

TEST_CASE("coded converse sits below the operational coded size") {
  for (std::int64_t kappa : {50, 500, 5000}) {
    for (double eps : {0.05, 0.2, 0.4}) {
      for (double delta : {0.01, 0.1, 0.3}) {
        CHECK(coded_converse_bits(kappa, eps, delta, 256) <= sigma_star(CacheScheme::Coded, kappa, eps, delta, 256));
      }
    }
  }
}

TEST_CASE("single-query penalty ratios") {
  CHECK(std::fabs(penalty_ratio(50, 0.1, 0.1, 256).ratio_exact - 6.12) <= 0.03);
  CHECK(std::fabs(penalty_ratio(5000, 0.1, 0.1, 256).ratio_exact - 9.49) <= 0.03);
  CHECK(std::fabs(penalty_ratio(50, 0.2, 0.1, 256).ratio_exact - 3.57) <= 0.03);
  CHECK(std::fabs(penalty_ratio(5000, 0.2, 0.1, 256).ratio_exact - 4.83) <= 0.03);
  const auto rep = penalty_ratio(50, 0.2, 0.1, 256);
  CHECK(rep.sigma_unc_bits == 400.0);
  CHECK(rep.ratio_refined == doctest::Approx(3.19).epsilon(0.01));
  for (double eps : {0.1, 0.2}) {
    const auto far = penalty_ratio(5'000'000, eps, 0.1, 256);
    CHECK(far.ratio_exact == doctest::Approx(1 / eps).epsilon(0.01));
    CHECK(far.ratio_refined == doctest::Approx(1 / eps).epsilon(0.01));
  }
}

TEST_CASE("refined penalty error shrinks like one over root n") {
  for (double eps : {0.1, 0.2}) {
    double worst = 0.0;
    for (std::int64_t n = 50; n <= 5000; n += 50) {
      const auto rep = penalty_ratio(n, eps, 0.1, 256);
      worst = std::max(worst, std::fabs(rep.ratio_exact - rep.ratio_refined) * std::sqrt(static_cast<double>(n)));
    }
    CHECK(worst < 25.0);
  }
  CHECK(refined_penalty(50, 0.1, 0.1) == doctest::Approx(4.36).epsilon(0.005));
  // At eps = 0.1 the unfloored threshold is exactly 1; at eps = 0.2 it is 0.47 against a floor of 0.
  CHECK(refined_penalty(50, 0.1, 0.1, NStarVariant::Unfloored) == doctest::Approx(refined_penalty(50, 0.1, 0.1)));
  CHECK(refined_penalty(50, 0.2, 0.1, NStarVariant::Unfloored) < refined_penalty(50, 0.2, 0.1));
}

TEST_CASE("phase classifier examples and totality") {
  CHECK(classify_regime(CacheScheme::Coded, 0.2, 0.2, 10000) == PhaseRegime::C3);
  CHECK(classify_regime(CacheScheme::Coded, 0.1, 0.2, 10000) == PhaseRegime::C1);
  CHECK(classify_regime(CacheScheme::Coded, 0.3, 0.2, 10000) == PhaseRegime::C5);
  // The near band is empty until the 3-sigma window shrinks below eta, so use kappa = 1e6.
  CHECK(classify_regime(CacheScheme::Coded, 0.195, 0.2, 10000) == PhaseRegime::C3);
  CHECK(classify_regime(CacheScheme::Coded, 0.195, 0.2, 1000000) == PhaseRegime::C2);
  CHECK(classify_regime(CacheScheme::Coded, 0.205, 0.2, 1000000) == PhaseRegime::C4);
  CHECK(classify_regime(CacheScheme::Coded, 0.205, 0.2, 1000000, 10.0) == PhaseRegime::C3);
  CHECK(classify_regime(CacheScheme::Unc, 1.0, 0.2, 100) == PhaseRegime::U3);
  CHECK(regime_error(CacheScheme::Unc, 1.0, 0.2, 100) == 0.0);
  CHECK(classify_regime(CacheScheme::Unc, 0.995, 0.2, 1000) == PhaseRegime::U2);
  CHECK(classify_regime(CacheScheme::Unc, 0.5, 0.2, 1000) == PhaseRegime::U1);
  CHECK(to_string(PhaseRegime::C3) == "C3");
  for (double rho = 0.0; rho <= 1.0; rho += 0.001) {
    CHECK_NOTHROW(classify_regime(CacheScheme::Coded, rho, 0.2, 1000));
    CHECK_NOTHROW(classify_regime(CacheScheme::Unc, rho, 0.2, 1000));
  }
}

TEST_CASE("critical window matches the normal tail at kappa = 1e4") {
  for (double c : {-1.0, 0.0, 1.0, 2.0}) {
    const double rho = 0.2 + c / 100.0;
    const double want = oracle_phi_bar(c / std::sqrt(0.16));
    CHECK(std::fabs(regime_error(CacheScheme::Coded, rho, 0.2, 10000) - want) <= 0.02);
  }
}

TEST_CASE("image-size bound examples and domination of the exact success probability") {
  CHECK(image_size_bound(0.0, 1, 0.3, 256) == doctest::Approx(0.7 + 0.3 / 256));
  CHECK(image_size_bound(8.0 * 40, 40, 0.3, 256) == doctest::Approx(1.0));
  int checked = 0;
  for (std::int64_t kappa : {10, 50, 200, 500, 1000}) {
    for (double eps : {0.05, 0.2, 0.4}) {
      for (double frac : {0.0, 0.1, 0.25}) {
        const auto r = static_cast<std::int64_t>(frac * static_cast<double>(kappa));
        const double pc = oracle_binom_cdf(kappa, eps, r);
        CHECK(image_size_bound(8.0 * static_cast<double>(r), kappa, eps, 256) >= pc - 1e-12);
        ++checked;
      }
    }
  }
  CHECK(checked >= 45);
}

TEST_CASE("strong converse lower bound") {
  CHECK(strong_converse_lb(0.1, 5000, 256) == doctest::Approx(1 - std::exp(-25.0)).epsilon(1e-15));
  CHECK(strong_converse_lb(0.1, 10, 256) == 0.0);
  // Below capacity by gamma: r = (eps - gamma) kappa parity symbols.
  int checked = 0;
  for (std::int64_t kappa : {100, 500, 1000, 2000, 5000}) {
    for (double gamma : {0.02, 0.05, 0.1, 0.15, 0.19}) {
      for (double eps : {0.2, 0.3}) {
        const auto r = static_cast<std::int64_t>(std::floor((eps - gamma) * static_cast<double>(kappa)));
        const double pe = oracle_binom_sf(kappa, eps, r);
        CHECK(strong_converse_lb(gamma, kappa, 256) <= pe + 1e-12);
        ++checked;
      }
    }
  }
  CHECK(checked == 50);
}

TEST_CASE("exponent landscape and crossovers") {
  const auto e = exponent_landscape(0.5, 0.2);
  CHECK(e.coded == doctest::Approx(kl_bernoulli(0.5, 0.2)));
  CHECK(e.unc == doctest::Approx(0.5 * -std::log2(0.8)));
  const double rs = crossover_rho(0.2);
  CHECK(rs > 0.2);
  CHECK(rs < 1.0);
  CHECK(exponent_landscape(rs, 0.2).coded == doctest::Approx(exponent_landscape(rs, 0.2).unc).epsilon(1e-8));
  // Sign-change oracle: the difference crosses zero exactly once on a fine grid.
  int changes = 0;
  double prev = exponent_landscape(0.2 + 1e-6, 0.2).coded - exponent_landscape(0.2 + 1e-6, 0.2).unc;
  for (double rho = 0.201; rho < 1.0; rho += 0.001) {
    const auto x = exponent_landscape(rho, 0.2);
    const double cur = x.coded - x.unc;
    if ((cur > 0) != (prev > 0)) ++changes;
    prev = cur;
  }
  CHECK(changes == 1);
}

TEST_CASE("exponent gap limits and monotonicity") {
  for (double eps : {0.05, 0.1, 0.2, 0.5}) {
    const double top = -std::log2(1 - eps);
    CHECK(exponent_gap(top * 1e-9, eps) == doctest::Approx(1 / eps).epsilon(1e-3));
    CHECK(exponent_gap(top, eps) == doctest::Approx(0.0).epsilon(1e-9));
    double prev = INFINITY;
    for (int i = 1; i <= 200; ++i) {
      const double h = exponent_gap(top * i / 200.0, eps);
      CHECK(h < prev);
      prev = h;
    }
    const double es = crossover_e(eps);
    CHECK(exponent_gap(es, eps) == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(kl_bernoulli(kl_inverse_upper(es, eps), eps) == doctest::Approx(es).epsilon(1e-9));
  }
}

TEST_CASE("depth-resilience examples") {
  CHECK(d_max(Architecture::chain(2), 0.002, 0.3) == 177);
  CHECK(d_max(Architecture::merge(2), 0.002, 0.3) == 7);
  CHECK(static_cast<double>(d_max(Architecture::chain(2), 0.002, 0.3)) / 7.0 == doctest::Approx(25.2857).epsilon(1e-4));
  const auto c = depth_space_report(Architecture::chain(2), 800.0, 0.2, 0.1, 256, 600);
  CHECK(c.r == 100);
  CHECK(c.d_star == doctest::Approx(499.0));
  const auto mg = depth_space_report(Architecture::merge(2), 800.0, 0.2, 0.1, 256, 9);
  CHECK(mg.d_star == doctest::Approx(1 + std::log2(250.0)));
  CHECK(c.width_coded > 0.0);
  CHECK(c.width_unc > 0.0);
  CHECK(mg.width_coded < c.width_coded);
  for (int d = 500; d <= 800; d += 25) {
    CHECK(*depth_space_report(Architecture::chain(2), 800.0, 0.2, 0.1, 256, d).alpha_of_d < 0.2);
  }
  CHECK(*mg.alpha_of_d < 0.2);
}

TEST_CASE("d_max agrees with the resilience threshold by exhaustive depth scan") {
  for (double eps : {0.001, 0.002, 0.01, 0.05}) {
    for (double delta : {0.05, 0.1, 0.3}) {
      const auto n = resilience_threshold(eps, delta);
      for (int k : {2, 3}) {
        std::int64_t chain = 0, merge = 0;
        for (int d = 1; d <= 5000; ++d) {
          if (static_cast<std::int64_t>(Architecture::chain(k).arity(d)) <= n) chain = d;
          if (d <= 30 && static_cast<std::int64_t>(Architecture::merge(k).arity(d)) <= n) merge = d;
        }
        CHECK(d_max(Architecture::chain(k), eps, delta) == chain);
        CHECK(d_max(Architecture::merge(k), eps, delta) == merge);
      }
    }
  }
}

TEST_CASE("merge amplification: each cached depth adds one reliable level") {
  const auto arch = Architecture::merge(2);
  const double eps = 0.002, delta = 0.3;
  const auto n_star = static_cast<std::size_t>(resilience_threshold(eps, delta));
  const auto base = d_max(arch, eps, delta);
  for (int l0 = 0; l0 <= 2; ++l0) {
    std::int64_t reliable = 0;
    for (int d = 1; d <= base + l0 + 1; ++d) {
      const std::size_t arity = arch.arity(d);
      const std::size_t exposed_target = d - l0 >= 1 ? arch.arity(d - l0) : 0;
      const Fact q = Fact::idb(d, iota_tuple(arity));
      FactSet cached;
      // Cache leftmost depth-1 blocks until exactly the target width stays exposed.
      for (std::size_t b = 0; b * 2 < arity - exposed_target; ++b) {
        cached.insert(Fact::idb(1, {static_cast<Index>(2 * b + 1), static_cast<Index>(2 * b + 2)}));
      }
      const auto cache = make_cache(q, static_cast<Index>(arity), arch, cached);
      CHECK(cache.exposed_count == exposed_target);
      if (cache.exposed_count <= n_star) reliable = d;
    }
    CHECK(reliable == base + l0);
  }
}

TEST_CASE("joint gains") {
  const auto g = joint_gains(2, 500, 0.0, 0.1);
  CHECK(std::fabs(g.g2 - 1.81) <= 0.01);
  CHECK(g.g2 == doctest::Approx(2 * oracle_phi_inv(0.95) / (std::sqrt(2.0) * oracle_phi_inv(0.9))).epsilon(1e-8));
  CHECK(g.g1 == 1.0);
  const auto one = joint_gains(1, 500, 0.3, 0.1);
  CHECK(one.g1 == 1.0);
  CHECK(one.g2 == doctest::Approx(1.0));
  const auto core = joint_gains(4, 500, 0.5, 0.1);
  CHECK(core.n_eff == doctest::Approx(1250.0));
  CHECK(core.g1 == doctest::Approx(4.0 / 2.5));
}

TEST_CASE("capacity region uses the strictest reliability target") {
  const auto reg = capacity_region_sigma(1000, 0.2, {0.3, 0.01, 0.1}, 256);
  CHECK(reg.delta_min == 0.01);
  CHECK(reg.coded_bits == sigma_star(CacheScheme::Coded, 1000, 0.2, 0.01, 256));
  CHECK(reg.unc_bits == sigma_star(CacheScheme::Unc, 1000, 0.2, 0.01, 256));
}

TEST_CASE("large-L per-query sizes approach their limits") {
  const auto a = large_l_limits(500, 0.3, 0.2, 0.1, 256, 2000);
  CHECK(a.coded_per_query == doctest::Approx(a.coded_limit).epsilon(0.01));
  CHECK(a.unc_per_query == doctest::Approx(a.unc_limit).epsilon(0.01));
  CHECK(a.penalty == doctest::Approx(a.penalty_limit).epsilon(0.01));
  CHECK(a.penalty_limit == 5.0);
}

TEST_CASE("noisy base statistics") {
  const auto bal = noisy_base_stats(256, 20, 20, 10);
  CHECK(bal.capacity_shift_bits == 0.0);
  CHECK(bal.sound_fraction == doctest::Approx(std::pow(1 - 20.0 / 256, 10)));
  const auto lossy = noisy_base_stats(256, 26, 0, 5);
  CHECK(lossy.m_tilde == 230);
  CHECK(lossy.sound_fraction == 1.0);
  CHECK(lossy.capacity_shift_bits == doctest::Approx(5 * std::log2(230.0 / 256)));
  CHECK_THROWS(noisy_base_stats(4, 3, 0, 1));
}

TEST_CASE("noisy base sound fraction matches sampled uniform queries") {
  // m = 64, 8 lost, 16 spurious: a uniform query of 3 coordinates over the noisy base is sound
  // iff every coordinate lands on one of the 56 kept facts.
  const auto s = noisy_base_stats(64, 8, 16, 3);
  std::mt19937_64 rng(4);
  const int n = 200000;
  int sound = 0;
  for (int t = 0; t < n; ++t) {
    bool ok = true;
    for (int j = 0; j < 3; ++j) ok = ok && (rng() % 72) < 56;
    sound += ok;
  }
  const double p = s.sound_fraction;
  CHECK(std::fabs(sound / static_cast<double>(n) - p) <= 4 * std::sqrt(p * (1 - p) / n));
}

TEST_CASE("minimized exponent function equals the kl divergence on a 20-point grid") {
  int n = 0;
  for (double eps : {0.1, 0.2, 0.3, 0.4, 0.5}) {
    for (double frac : {0.1, 0.3, 0.6, 0.9}) {
      const double gamma = frac * eps;
      const auto chk = tilted_exponent_check(eps, gamma);
      CHECK(chk.abs_diff <= 1e-9);
      CHECK(chk.kl == doctest::Approx(kl_bernoulli(eps - gamma, eps)));
      CHECK(chk.u_star == doctest::Approx(chk.u_star_closed).epsilon(1e-5));
      ++n;
    }
  }
  CHECK(n == 20);
  const auto tiny = tilted_exponent_check(0.3, 1e-7);
  CHECK(tiny.neg_g_star < 1e-12);
  CHECK(tiny.kl < 1e-12);
}
