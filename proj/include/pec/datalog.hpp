#pragma once

#include <compare>
#include <cstdint>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

// Ground evaluation of the two faithful rule systems used throughout:
//
//   Chain(k):  T_k(x1..xk)        <- A(x1), ..., A(xk)
//              T_{j+1}(x.., y)    <- T_j(x..), A(y)
//   Merge(k):  R_1(x1..xk)        <- A(x1), ..., A(xk)
//              R_{d+1}(x.., y..)  <- R_d(x..), R_d(y..)
//
// IDB facts carry their relation level `depth` (d >= 1) and a head tuple of
// length k+d-1 (Chain) or k*2^(d-1) (Merge). Every head has exactly one
// rule instantiation that can produce it, so derivation traces are unique.
namespace pec {

using Index = std::uint32_t;

enum class ArchKind { Chain, Merge };

struct Architecture {
  ArchKind kind;
  int k;

  Architecture(ArchKind kind_, int k_);
  static Architecture chain(int k) { return {ArchKind::Chain, k}; }
  static Architecture merge(int k) { return {ArchKind::Merge, k}; }

  // Head arity at relation level d. Throws std::out_of_range on overflow.
  std::uint64_t arity(int d) const;
  bool operator==(const Architecture&) const = default;
};

std::string to_string(ArchKind kind);
ArchKind parse_arch_kind(const std::string& s);

enum class FactTag : std::uint8_t { Edb = 0, Idb = 1 };

// Ordering is the canonical scan order: (tag, depth, lexicographic tuple).
struct Fact {
  FactTag tag = FactTag::Edb;
  int depth = 0;  // 0 for EDB facts
  std::vector<Index> tuple;

  static Fact edb(Index i) { return Fact{FactTag::Edb, 0, {i}}; }
  static Fact idb(int depth, std::vector<Index> tuple) {
    return Fact{FactTag::Idb, depth, std::move(tuple)};
  }
  bool is_edb() const { return tag == FactTag::Edb; }
  Index index() const { return tuple.front(); }

  auto operator<=>(const Fact&) const = default;
  bool operator==(const Fact&) const = default;
};

using FactSet = std::set<Fact>;

std::string to_string(const Fact& f, const Architecture& arch);

// Throws std::invalid_argument unless f has the shape required by arch and
// every coordinate lies in [1, m]. Pass m = 0 to skip the range check.
void require_well_formed(const Fact& f, const Architecture& arch, Index m);
bool is_well_formed(const Fact& f, const Architecture& arch, Index m);

// The body atoms of the unique rule instantiation producing an IDB fact,
// deduplicated, in rule-body order. Empty for EDB facts.
std::vector<Fact> predecessors(const Fact& f, const Architecture& arch);

struct KnowledgeBase {
  Index m;
  FactSet facts;

  KnowledgeBase(Index m_, FactSet facts_ = {});
  static KnowledgeBase full_base(Index m);
  bool contains(const Fact& f) const { return facts.count(f) != 0; }
};

// Depth of a fact relative to a base: a natural number or Unreachable.
class Depth {
public:
  static Depth finite(int d) { return Depth(d); }
  static Depth unreachable() { return Depth(); }

  bool is_finite() const { return finite_; }
  int value() const;

  // Unreachable compares greater than every finite depth.
  std::strong_ordering operator<=>(const Depth& o) const;
  bool operator==(const Depth& o) const = default;

private:
  Depth() = default;
  explicit Depth(int d) : finite_(true), value_(d) {}
  bool finite_ = false;
  int value_ = 0;
};

std::string to_string(const Depth& d);

// Seminaive bottom-up evaluation. Round 0 is the input; round j holds the
// facts first derivable in the j-th synchronous step. Derived IDB facts are
// limited to relation level <= max_depth.
struct ClosureRounds {
  std::vector<FactSet> rounds;
  FactSet all() const;
};
ClosureRounds eval_closure_rounds(const KnowledgeBase& kb, const Architecture& arch, int max_depth);
FactSet eval_closure(const KnowledgeBase& kb, const Architecture& arch, int max_depth);

// Goal-directed depth by unfolding the unique trace.
Depth derivation_depth(const Fact& q, const FactSet& base, const Architecture& arch);
Depth derivation_depth(const Fact& q, const KnowledgeBase& kb, const Architecture& arch);
bool derivable(const Fact& q, const FactSet& base, const Architecture& arch);

struct DagVertex {
  Fact fact;
  int level;                      // depth relative to the full base; 0 for leaves
  std::vector<std::size_t> children;
};

struct DerivationDag {
  Fact root;
  std::vector<DagVertex> vertices;  // sorted in canonical fact order
  std::vector<Index> leaves;        // distinct EDB indices, ascending
  std::vector<std::size_t> widths;  // widths[l-1] = #vertices at level l, l = 1..d
  std::size_t kappa = 0;
  std::size_t arity = 0;
  bool non_colliding = true;

  std::size_t find(const Fact& f) const;  // vertices.size() if absent
  bool contains(const Fact& f) const { return find(f) != vertices.size(); }
  int depth() const { return root.depth; }
  std::size_t total_width() const;
  // Distinct EDB leaf indices below vertex v (v itself if a leaf).
  std::vector<Index> leaves_under(std::size_t v) const;
};

DerivationDag build_dag(const Fact& q, Index m, const Architecture& arch);

// Closure-preserving irredundant subset, scanning in canonical order and
// dropping s whenever s is derivable from the remaining set.
FactSet atom_core(const KnowledgeBase& kb, const Architecture& arch);

using Bits = std::vector<bool>;
std::string to_string(const Bits& bits);

class TraceDecodeError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Self-delimiting trace code: Elias-gamma(d) followed by the leaf pointers
// of the trace in head order, ceil(log2 m) bits each (pointer value i-1).
// Rule identifiers cost nothing: each IDB relation has one defining rule.
// Length = (k+d-1) ceil(log2 m) + 2 floor(log2 d) + 1 for Chain, which is
// within the pointer budget plus trace_overhead_constant() * d.
Bits encode_trace(const Fact& q, Index m, const Architecture& arch);
Fact decode_trace(const Bits& bits, Index m, const Architecture& arch);
inline constexpr int trace_overhead_constant() { return 2; }
int pointer_bits(Index m);

std::uint64_t kappa_of_depth(const Architecture& arch, int d);
double capacity_bits(const Architecture& arch, int d, Index m);

enum class BitAccounting { Ideal, Integer };
double bits_per_index(Index m, BitAccounting acct);

struct LayerPrefixCache {
  FactSet facts;
  double storage_bits = 0.0;
  int residual_depth = 0;
};

LayerPrefixCache layer_prefix_cache(const Fact& q, Index m, const Architecture& arch, int l0,
                                    BitAccounting acct = BitAccounting::Ideal);

// Break-even access frequency rho_s * len_bits / depth.
double critical_frequency(double rho_s, double len_bits, int depth);

}  // namespace pec
