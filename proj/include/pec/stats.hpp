#pragma once

#include <cstdint>

// Normal and binomial primitives shared by the planners, the analytic
// calculators and the Monte Carlo engine. All logs here are natural.
namespace pec::stats {

// Standard normal CDF and upper tail, exact to double precision via erfc.
double normal_cdf(double x);
double normal_sf(double x);

// Inverse normal CDF. Acklam's rational approximation (relative error
// below 1.2e-9) followed by one Halley step against erfc.
double normal_quantile(double p);

// Binomial(n, p) log-pmf by Loader's saddle-point expansion, which keeps
// relative error near machine precision for n up to 1e7.
double binom_log_pmf(std::int64_t n, double p, std::int64_t x);
double binom_pmf(std::int64_t n, double p, std::int64_t x);

// ln Pr[X <= r] and ln Pr[X > r] for X ~ Bin(n, p). The smaller tail is
// summed directly (compensated, scaled by its largest term); the larger
// one is its complement. Out-of-range r is clamped: r < 0 gives cdf 0,
// r >= n gives cdf 1.
double binom_log_cdf(std::int64_t n, double p, std::int64_t r);
double binom_log_sf(std::int64_t n, double p, std::int64_t r);
double binom_cdf(std::int64_t n, double p, std::int64_t r);
double binom_sf(std::int64_t n, double p, std::int64_t r);

// Neumaier compensated accumulator.
class CompensatedSum {
public:
  void add(double x);
  double value() const { return sum_ + comp_; }

private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

}  // namespace pec::stats
