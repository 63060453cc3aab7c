#pragma once

#include <cstdint>
#include <optional>
#include <vector>

// Systematic Reed-Solomon erasure code over a prime field GF(p).
// Message symbol j is the value at point j of the unique polynomial of
// degree < kappa through the message; parity i is its value at kappa + i.
// Any kappa of the kappa + r points determine the polynomial, so up to r
// erased message symbols are recoverable. Requires kappa + r <= p.
namespace pec::rs {

using Symbol = std::uint32_t;

bool is_prime(std::uint64_t n);
// Smallest prime strictly greater than n.
std::uint32_t next_prime_above(std::uint64_t n);

// Throws std::invalid_argument if the code does not fit in the field or a
// symbol is not reduced.
std::vector<Symbol> encode(const std::vector<Symbol>& message, int r, std::uint32_t prime);

// received[j] is nullopt when message symbol j was erased. Returns the full
// message, or nullopt when more symbols were erased than parity can cover.
std::optional<std::vector<Symbol>> decode(const std::vector<std::optional<Symbol>>& received,
                                          const std::vector<Symbol>& parity, std::uint32_t prime);

}  // namespace pec::rs
