#include "pec/reed_solomon.hpp"

#include <stdexcept>
#include <string>

namespace pec::rs {

namespace {

std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t p) { return a * b % p; }

std::uint64_t powmod(std::uint64_t a, std::uint64_t e, std::uint64_t p) {
  std::uint64_t r = 1 % p;
  a %= p;
  while (e) {
    if (e & 1U) r = mulmod(r, a, p);
    a = mulmod(a, a, p);
    e >>= 1U;
  }
  return r;
}

std::uint64_t inv(std::uint64_t a, std::uint64_t p) { return powmod(a, p - 2, p); }

std::uint64_t sub(std::uint64_t a, std::uint64_t b, std::uint64_t p) { return (a + p - b) % p; }

// In-place batch inversion (Montgomery's trick); no zero entries allowed.
void invert_all(std::vector<std::uint64_t>& xs, std::uint64_t p) {
  std::vector<std::uint64_t> prefix(xs.size());
  std::uint64_t acc = 1;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    prefix[i] = acc;
    acc = mulmod(acc, xs[i], p);
  }
  std::uint64_t inv_acc = inv(acc, p);
  for (std::size_t i = xs.size(); i-- > 0;) {
    const std::uint64_t xi = xs[i];
    xs[i] = mulmod(inv_acc, prefix[i], p);
    inv_acc = mulmod(inv_acc, xi, p);
  }
}

struct Interpolant {
  std::vector<std::uint64_t> xs, ys, weights;
  std::uint64_t p;

  // Nodes are {0, ..., n-1} minus `missing`. The barycentric weight is
  // 1 / prod_{l != j} (x_j - l) over the nodes; over the full range that
  // product is x_j! (n-1-x_j)! (-1)^(n-1-x_j), and each missing node l
  // contributes a factor (x_j - l) that must be taken back out.
  Interpolant(std::vector<std::uint64_t> x, std::vector<std::uint64_t> y, std::uint64_t prime, std::size_t n,
              const std::vector<std::uint64_t>& missing)
      : xs(std::move(x)), ys(std::move(y)), p(prime) {
    std::vector<std::uint64_t> fact(n + 1, 1);
    for (std::size_t i = 1; i <= n; ++i) fact[i] = mulmod(fact[i - 1], i, p);
    weights.resize(xs.size());
    for (std::size_t j = 0; j < xs.size(); ++j) {
      const std::size_t xj = xs[j];
      const std::uint64_t w = mulmod(fact[xj], fact[n - 1 - xj], p);
      weights[j] = (n - 1 - xj) % 2 == 1 ? (p - w) % p : w;
    }
    invert_all(weights, p);
    for (std::size_t j = 0; j < xs.size(); ++j) {
      for (std::uint64_t l : missing) weights[j] = mulmod(weights[j], sub(xs[j], l, p), p);
    }
  }

  // Barycentric evaluation at a point that is not a node.
  std::uint64_t at(std::uint64_t x) const {
    std::vector<std::uint64_t> diffs(xs.size());
    for (std::size_t j = 0; j < xs.size(); ++j) diffs[j] = sub(x, xs[j], p);
    invert_all(diffs, p);
    std::uint64_t num = 0, den = 0;
    for (std::size_t j = 0; j < xs.size(); ++j) {
      const std::uint64_t t = mulmod(weights[j], diffs[j], p);
      num = (num + mulmod(t, ys[j], p)) % p;
      den = (den + t) % p;
    }
    return mulmod(num, inv(den, p), p);
  }
};

void check_fits(std::size_t kappa, std::size_t r, std::uint32_t prime) {
  if (!is_prime(prime)) throw std::invalid_argument("field size must be prime");
  if (kappa + r > prime) {
    throw std::invalid_argument("code length " + std::to_string(kappa + r) +
                                " exceeds the field size " + std::to_string(prime));
  }
}

}  // namespace

bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t d = 2; d * d <= n; ++d) {
    if (n % d == 0) return false;
  }
  return true;
}

std::uint32_t next_prime_above(std::uint64_t n) {
  std::uint64_t c = n + 1;
  while (!is_prime(c)) ++c;
  if (c > 0xffffffffULL) throw std::out_of_range("prime exceeds 32-bit symbol range");
  return static_cast<std::uint32_t>(c);
}

std::vector<Symbol> encode(const std::vector<Symbol>& message, int r, std::uint32_t prime) {
  if (r < 0) throw std::invalid_argument("parity count must be non-negative");
  check_fits(message.size(), static_cast<std::size_t>(r), prime);
  std::vector<Symbol> parity;
  if (r == 0 || message.empty()) {
    parity.assign(static_cast<std::size_t>(r), 0);
    return parity;
  }
  std::vector<std::uint64_t> xs, ys;
  for (std::size_t j = 0; j < message.size(); ++j) {
    if (message[j] >= prime) throw std::invalid_argument("message symbol not reduced mod p");
    xs.push_back(j);
    ys.push_back(message[j]);
  }
  const Interpolant f(std::move(xs), std::move(ys), prime, message.size(), {});
  for (int i = 0; i < r; ++i) {
    parity.push_back(static_cast<Symbol>(f.at(message.size() + static_cast<std::size_t>(i))));
  }
  return parity;
}

std::optional<std::vector<Symbol>> decode(const std::vector<std::optional<Symbol>>& received,
                                          const std::vector<Symbol>& parity, std::uint32_t prime) {
  const std::size_t kappa = received.size();
  check_fits(kappa, parity.size(), prime);
  std::vector<std::uint64_t> xs, ys;
  std::vector<std::size_t> erased;
  for (std::size_t j = 0; j < kappa; ++j) {
    if (received[j]) {
      if (*received[j] >= prime) throw std::invalid_argument("received symbol not reduced mod p");
      xs.push_back(j);
      ys.push_back(*received[j]);
    } else {
      erased.push_back(j);
    }
  }
  if (erased.size() > parity.size()) return std::nullopt;
  std::vector<Symbol> out(kappa);
  for (std::size_t j = 0; j < kappa; ++j) {
    if (received[j]) out[j] = *received[j];
  }
  if (erased.empty()) return out;
  for (std::size_t i = 0; i < erased.size(); ++i) {
    if (parity[i] >= prime) throw std::invalid_argument("parity symbol not reduced mod p");
    xs.push_back(kappa + i);
    ys.push_back(parity[i]);
  }
  // Nodes: survivors plus parity points kappa .. kappa+e-1, i.e. [0, kappa+e) minus the erased.
  const std::vector<std::uint64_t> missing(erased.begin(), erased.end());
  const Interpolant f(std::move(xs), std::move(ys), prime, kappa + erased.size(), missing);
  for (std::size_t j : erased) out[j] = static_cast<Symbol>(f.at(j));
  return out;
}

}  // namespace pec::rs
