#include "pec/cache_io.hpp"

#include <stdexcept>

#include "json.hpp"

namespace pec {

namespace {

using nlohmann::json;

int hex_width(std::uint32_t prime) {
  int w = 1;
  while ((std::uint64_t{1} << (4 * w)) < prime) ++w;
  return w;
}

json fact_to_json(const Fact& f) {
  if (f.is_edb()) return json{{"tag", "edb"}, {"index", f.index()}};
  return json{{"tag", "idb"}, {"depth", f.depth}, {"tuple", f.tuple}};
}

Fact fact_from_json(const json& j) {
  const std::string tag = j.at("tag").get<std::string>();
  if (tag == "edb") return Fact::edb(j.at("index").get<Index>());
  if (tag == "idb") return Fact::idb(j.at("depth").get<int>(), j.at("tuple").get<std::vector<Index>>());
  throw std::invalid_argument("unknown fact tag '" + tag + "'");
}

}  // namespace

std::string parity_to_hex(const std::vector<rs::Symbol>& parity, std::uint32_t prime) {
  static constexpr char digits[] = "0123456789abcdef";
  const int w = hex_width(prime);
  std::string out;
  out.reserve(parity.size() * static_cast<std::size_t>(w));
  for (rs::Symbol s : parity) {
    for (int i = w - 1; i >= 0; --i) out += digits[(s >> (4 * i)) & 0xfU];
  }
  return out;
}

std::vector<rs::Symbol> parity_from_hex(const std::string& hex, std::size_t count,
                                        std::uint32_t prime) {
  const auto w = static_cast<std::size_t>(hex_width(prime));
  if (hex.size() != count * w) throw std::invalid_argument("parity_hex length does not match r");
  std::vector<rs::Symbol> out;
  for (std::size_t j = 0; j < count; ++j) {
    rs::Symbol s = 0;
    for (std::size_t i = 0; i < w; ++i) {
      const char c = hex[j * w + i];
      int v;
      if (c >= '0' && c <= '9') {
        v = c - '0';
      } else if (c >= 'a' && c <= 'f') {
        v = c - 'a' + 10;
      } else {
        throw std::invalid_argument("parity_hex contains a non-hex character");
      }
      s = (s << 4) | static_cast<rs::Symbol>(v);
    }
    if (s >= prime) throw std::invalid_argument("parity symbol not reduced mod p");
    out.push_back(s);
  }
  return out;
}

std::string to_json_text(const CachePlan& plan) {
  json j;
  j["format"] = "pec-cache-plan";
  j["version"] = kCachePlanVersion;
  j["scheme"] = plan.scheme == Scheme::Derivation ? "derivation" : "coded";
  j["params"] = json{{"m", plan.m},
                     {"arch", to_string(plan.arch.kind)},
                     {"k", plan.arch.k},
                     {"eps", plan.eps},
                     {"delta", plan.delta},
                     {"accounting", plan.accounting == BitAccounting::Ideal ? "ideal" : "integer"}};
  j["query"] = json{{"depth", plan.query.depth}, {"tuple", plan.query.tuple}};
  if (plan.scheme == Scheme::Derivation) {
    if (!plan.derivation) throw std::invalid_argument("derivation plan has no cache");
    const auto& c = *plan.derivation;
    json facts = json::array();
    for (const Fact& f : c.facts) facts.push_back(fact_to_json(f));
    j["facts"] = facts;
    j["storage_bits"] = c.storage_bits;
    j["exposed_count"] = c.exposed_count;
    j["protected_leaves"] = c.protected_leaves;
  } else {
    if (!plan.coded) throw std::invalid_argument("coded plan has no cache");
    const auto& c = *plan.coded;
    j["prime"] = c.prime;
    j["kappa"] = c.kappa;
    j["r"] = c.r;
    j["positions"] = c.positions;
    j["parity_hex"] = parity_to_hex(c.parity, c.prime);
  }
  return j.dump(2) + "\n";
}

CachePlan plan_from_json_text(const std::string& text) {
  try {
    const json j = json::parse(text);
    if (j.at("format").get<std::string>() != "pec-cache-plan") {
      throw std::invalid_argument("not a cache plan document");
    }
    const int version = j.at("version").get<int>();
    if (version != kCachePlanVersion) {
      throw std::invalid_argument("unsupported cache plan version " + std::to_string(version));
    }
    CachePlan plan;
    const json& p = j.at("params");
    plan.m = p.at("m").get<Index>();
    plan.arch = Architecture(parse_arch_kind(p.at("arch").get<std::string>()), p.at("k").get<int>());
    plan.eps = p.at("eps").get<double>();
    plan.delta = p.at("delta").get<double>();
    const std::string acct = p.at("accounting").get<std::string>();
    if (acct != "ideal" && acct != "integer") throw std::invalid_argument("unknown accounting mode");
    plan.accounting = acct == "ideal" ? BitAccounting::Ideal : BitAccounting::Integer;
    plan.query = Fact::idb(j.at("query").at("depth").get<int>(),
                           j.at("query").at("tuple").get<std::vector<Index>>());
    require_well_formed(plan.query, plan.arch, plan.m);

    const std::string scheme = j.at("scheme").get<std::string>();
    if (scheme == "derivation") {
      plan.scheme = Scheme::Derivation;
      DerivationCache c;
      for (const json& f : j.at("facts")) c.facts.insert(fact_from_json(f));
      c.storage_bits = j.at("storage_bits").get<double>();
      c.exposed_count = j.at("exposed_count").get<std::size_t>();
      c.protected_leaves = j.at("protected_leaves").get<std::vector<Index>>();
      c.index_bits = bits_per_index(plan.m, plan.accounting);
      plan.derivation = std::move(c);
    } else if (scheme == "coded") {
      plan.scheme = Scheme::Coded;
      CodedCache c;
      c.prime = j.at("prime").get<std::uint32_t>();
      c.kappa = j.at("kappa").get<std::size_t>();
      c.r = j.at("r").get<int>();
      c.positions = j.at("positions").get<std::vector<Index>>();
      if (c.positions.size() != c.kappa) throw std::invalid_argument("positions length must equal kappa");
      if (c.r < 0) throw std::invalid_argument("parity count must be non-negative");
      if (!rs::is_prime(c.prime) || c.prime <= plan.m) {
        throw std::invalid_argument("field size must be a prime above m");
      }
      c.parity = parity_from_hex(j.at("parity_hex").get<std::string>(),
                                 static_cast<std::size_t>(c.r), c.prime);
      plan.coded = std::move(c);
    } else {
      throw std::invalid_argument("unknown scheme '" + scheme + "'");
    }
    return plan;
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("malformed cache plan: ") + e.what());
  }
}

}  // namespace pec
