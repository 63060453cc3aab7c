#include "pec/stats.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace pec::stats {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kLnSqrt2Pi = 0.918938533204672741780329736406;

// ln(n!) - [(n + 1/2) ln n - n + ln sqrt(2 pi)]
double stirlerr(double n) {
  constexpr double s0 = 1.0 / 12.0;
  constexpr double s1 = 1.0 / 360.0;
  constexpr double s2 = 1.0 / 1260.0;
  constexpr double s3 = 1.0 / 1680.0;
  constexpr double s4 = 1.0 / 1188.0;
  if (n <= 15.0) {
    return std::lgamma(n + 1.0) - (n + 0.5) * std::log(n) + n - kLnSqrt2Pi;
  }
  const double nn = n * n;
  if (n > 500) return (s0 - s1 / nn) / n;
  if (n > 80) return (s0 - (s1 - s2 / nn) / nn) / n;
  if (n > 35) return (s0 - (s1 - (s2 - s3 / nn) / nn) / nn) / n;
  return (s0 - (s1 - (s2 - (s3 - s4 / nn) / nn) / nn) / nn) / n;
}

// x ln(x/np) + np - x, evaluated without cancellation near x = np.
double bd0(double x, double np) {
  if (std::fabs(x - np) < 0.1 * (x + np)) {
    double v = (x - np) / (x + np);
    double s = (x - np) * v;
    double ej = 2 * x * v;
    v = v * v;
    for (int j = 1; j < 1000; ++j) {
      ej *= v;
      const double s1 = s + ej / (2 * j + 1);
      if (s1 == s) return s1;
      s = s1;
    }
    return s;
  }
  return x * std::log(x / np) + np - x;
}

void check_args(std::int64_t n, double p) {
  if (n < 0) throw std::invalid_argument("binomial: n must be non-negative");
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("binomial: p must lie in [0,1]");
}

// ln sum_{i in [lo, hi]} pmf(i), walking away from `start` (one of the
// endpoints, the one nearest the mode) until terms stop contributing.
double log_tail_sum(std::int64_t n, double p, std::int64_t lo, std::int64_t hi, bool upward) {
  if (lo > hi) return -kInf;
  const std::int64_t start = upward ? lo : hi;
  const double anchor = binom_log_pmf(n, p, start);
  if (anchor == -kInf) {
    // The boundary term underflows only in degenerate p; fall back to a
    // full scan for the largest term.
    double best = -kInf;
    for (std::int64_t i = lo; i <= hi; ++i) best = std::fmax(best, binom_log_pmf(n, p, i));
    if (best == -kInf) return -kInf;
    CompensatedSum acc;
    for (std::int64_t i = lo; i <= hi; ++i) acc.add(std::exp(binom_log_pmf(n, p, i) - best));
    return best + std::log(acc.value());
  }
  CompensatedSum acc;
  acc.add(1.0);
  const std::int64_t step = upward ? 1 : -1;
  for (std::int64_t i = start + step; i >= lo && i <= hi; i += step) {
    const double t = std::exp(binom_log_pmf(n, p, i) - anchor);
    acc.add(t);
    if (t < 1e-20 * acc.value()) break;
  }
  return anchor + std::log(acc.value());
}

double log1mexp(double a) {
  // ln(1 - e^a) for a <= 0
  if (a > -0.693147180559945) return std::log(-std::expm1(a));
  return std::log1p(-std::exp(a));
}

}  // namespace

void CompensatedSum::add(double x) {
  const double t = sum_ + x;
  if (std::fabs(sum_) >= std::fabs(x)) {
    comp_ += (sum_ - t) + x;
  } else {
    comp_ += (x - t) + sum_;
  }
  sum_ = t;
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double normal_sf(double x) { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

double normal_quantile(double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("normal_quantile: p must lie in [0,1]");
  if (p == 0.0) return -kInf;
  if (p == 1.0) return kInf;
  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                 -2.759285104469687e+02, 1.383577518672690e+02,
                                 -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                 -1.556989798598866e+02, 6.680131188771972e+01,
                                 -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                 -2.400758277161838e+00, -2.549732539343734e+00,
                                 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                 2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double p_low = 0.02425;
  double x;
  if (p < p_low) {
    const double q = std::sqrt(-2 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1);
  } else if (p <= 1 - p_low) {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1);
  } else {
    const double q = std::sqrt(-2 * std::log1p(-p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1);
  }
  // Halley refinement; the residual is taken on the smaller tail.
  const double e = (p < 0.5) ? normal_cdf(x) - p : (1.0 - p) - normal_sf(x);
  const double u = e * std::sqrt(2 * std::numbers::pi) * std::exp(x * x / 2);
  return x - u / (1 + x * u / 2);
}

double binom_log_pmf(std::int64_t n, double p, std::int64_t x) {
  check_args(n, p);
  if (x < 0 || x > n) return -kInf;
  const double q = 1.0 - p;
  const double nd = static_cast<double>(n);
  const double xd = static_cast<double>(x);
  if (p == 0.0) return x == 0 ? 0.0 : -kInf;
  if (q == 0.0) return x == n ? 0.0 : -kInf;
  if (x == 0) {
    if (n == 0) return 0.0;
    return p < 0.1 ? -bd0(nd, nd * q) - nd * p : nd * std::log(q);
  }
  if (x == n) {
    return q < 0.1 ? -bd0(nd, nd * p) - nd * q : nd * std::log(p);
  }
  const double lc = stirlerr(nd) - stirlerr(xd) - stirlerr(nd - xd) - bd0(xd, nd * p) -
                    bd0(nd - xd, nd * q);
  const double lf = std::log(2 * std::numbers::pi) + std::log(xd) + std::log1p(-xd / nd);
  return lc - 0.5 * lf;
}

double binom_pmf(std::int64_t n, double p, std::int64_t x) {
  return std::exp(binom_log_pmf(n, p, x));
}

double binom_log_cdf(std::int64_t n, double p, std::int64_t r) {
  check_args(n, p);
  if (r < 0) return -kInf;
  if (r >= n) return 0.0;
  if (static_cast<double>(r) < static_cast<double>(n) * p) {
    return log_tail_sum(n, p, 0, r, false);
  }
  return log1mexp(log_tail_sum(n, p, r + 1, n, true));
}

double binom_log_sf(std::int64_t n, double p, std::int64_t r) {
  check_args(n, p);
  if (r < 0) return 0.0;
  if (r >= n) return -kInf;
  if (static_cast<double>(r) < static_cast<double>(n) * p) {
    return log1mexp(log_tail_sum(n, p, 0, r, false));
  }
  return log_tail_sum(n, p, r + 1, n, true);
}

double binom_cdf(std::int64_t n, double p, std::int64_t r) {
  return std::exp(binom_log_cdf(n, p, r));
}

double binom_sf(std::int64_t n, double p, std::int64_t r) {
  return std::exp(binom_log_sf(n, p, r));
}

}  // namespace pec::stats
