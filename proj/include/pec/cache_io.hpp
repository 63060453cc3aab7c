#pragma once

#include <optional>
#include <string>

#include "pec/caching.hpp"

// Versioned JSON form of a cache plan, used for CLI round trips.
//
// {
//   "format": "pec-cache-plan", "version": 1,
//   "scheme": "derivation" | "coded",
//   "params": {"m", "arch", "k", "eps", "delta", "accounting"},
//   "query": {"depth", "tuple"},
//   derivation: "facts": [{"tag":"edb","index"} | {"tag":"idb","depth","tuple"}],
//               "storage_bits", "exposed_count", "protected_leaves"
//   coded:      "prime", "kappa", "r", "positions",
//               "parity_hex" (fixed-width lowercase hex per symbol)
// }
namespace pec {

enum class Scheme { Derivation, Coded };

struct CachePlan {
  Scheme scheme = Scheme::Derivation;
  Index m = 2;
  Architecture arch = Architecture::chain(2);
  double eps = 0.0;
  double delta = 0.1;
  BitAccounting accounting = BitAccounting::Ideal;
  Fact query;
  std::optional<DerivationCache> derivation;
  std::optional<CodedCache> coded;
};

inline constexpr int kCachePlanVersion = 1;

std::string to_json_text(const CachePlan& plan);
// Throws std::invalid_argument on malformed input or an unknown version.
CachePlan plan_from_json_text(const std::string& text);

std::string parity_to_hex(const std::vector<rs::Symbol>& parity, std::uint32_t prime);
std::vector<rs::Symbol> parity_from_hex(const std::string& hex, std::size_t count,
                                        std::uint32_t prime);

}  // namespace pec
