#include "pec/datalog.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

namespace pec {

Architecture::Architecture(ArchKind kind_, int k_) : kind(kind_), k(k_) {
  if (k < 2) throw std::invalid_argument("architecture arity parameter k must be >= 2");
}

std::uint64_t Architecture::arity(int d) const {
  if (d < 1) throw std::invalid_argument("IDB relation level must be >= 1");
  const auto kk = static_cast<std::uint64_t>(k);
  if (kind == ArchKind::Chain) return kk + static_cast<std::uint64_t>(d) - 1;
  if (d - 1 >= 63 || kk > (std::numeric_limits<std::uint64_t>::max() >> (d - 1))) {
    throw std::out_of_range("merge arity k*2^(d-1) overflows 64 bits");
  }
  return kk << (d - 1);
}

std::string to_string(ArchKind kind) { return kind == ArchKind::Chain ? "chain" : "merge"; }

ArchKind parse_arch_kind(const std::string& s) {
  if (s == "chain") return ArchKind::Chain;
  if (s == "merge") return ArchKind::Merge;
  throw std::invalid_argument("unknown architecture '" + s + "' (expected chain or merge)");
}

std::string to_string(const Fact& f, const Architecture& arch) {
  std::string out;
  if (f.is_edb()) {
    out = "A(";
  } else if (arch.kind == ArchKind::Chain) {
    out = "T_" + std::to_string(f.tuple.size()) + "(";
  } else {
    out = "R_" + std::to_string(f.depth) + "(";
  }
  for (std::size_t i = 0; i < f.tuple.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(f.tuple[i]);
  }
  return out + ")";
}

void require_well_formed(const Fact& f, const Architecture& arch, Index m) {
  if (f.is_edb()) {
    if (f.depth != 0 || f.tuple.size() != 1) throw std::invalid_argument("EDB fact must be A(i)");
  } else {
    if (f.depth < 1) throw std::invalid_argument("IDB fact must have level >= 1");
    if (f.tuple.size() != arch.arity(f.depth)) {
      throw std::invalid_argument("IDB tuple length " + std::to_string(f.tuple.size()) +
                                  " does not match arity " + std::to_string(arch.arity(f.depth)) +
                                  " at level " + std::to_string(f.depth));
    }
  }
  for (Index i : f.tuple) {
    if (i < 1 || (m != 0 && i > m)) {
      throw std::invalid_argument("fact coordinate " + std::to_string(i) + " outside [1," +
                                  std::to_string(m) + "]");
    }
  }
}

bool is_well_formed(const Fact& f, const Architecture& arch, Index m) {
  try {
    require_well_formed(f, arch, m);
    return true;
  } catch (const std::exception&) {
    return false;
  }
}

std::vector<Fact> predecessors(const Fact& f, const Architecture& arch) {
  std::vector<Fact> out;
  if (f.is_edb()) return out;
  if (f.depth == 1) {
    for (Index i : f.tuple) {
      Fact a = Fact::edb(i);
      if (std::find(out.begin(), out.end(), a) == out.end()) out.push_back(std::move(a));
    }
    return out;
  }
  if (arch.kind == ArchKind::Chain) {
    out.push_back(Fact::idb(f.depth - 1, {f.tuple.begin(), f.tuple.end() - 1}));
    out.push_back(Fact::edb(f.tuple.back()));
    return out;
  }
  const auto half = static_cast<std::ptrdiff_t>(f.tuple.size() / 2);
  Fact left = Fact::idb(f.depth - 1, {f.tuple.begin(), f.tuple.begin() + half});
  Fact right = Fact::idb(f.depth - 1, {f.tuple.begin() + half, f.tuple.end()});
  const bool same = left == right;
  out.push_back(std::move(left));
  if (!same) out.push_back(std::move(right));
  return out;
}

KnowledgeBase::KnowledgeBase(Index m_, FactSet facts_) : m(m_), facts(std::move(facts_)) {
  if (m < 2) throw std::invalid_argument("knowledge base size m must be >= 2");
}

KnowledgeBase KnowledgeBase::full_base(Index m) {
  FactSet facts;
  for (Index i = 1; i <= m; ++i) facts.insert(Fact::edb(i));
  return KnowledgeBase(m, std::move(facts));
}

int Depth::value() const {
  if (!finite_) throw std::logic_error("value() on an unreachable depth");
  return value_;
}

std::strong_ordering Depth::operator<=>(const Depth& o) const {
  if (finite_ != o.finite_) return finite_ ? std::strong_ordering::less : std::strong_ordering::greater;
  if (!finite_) return std::strong_ordering::equal;
  return value_ <=> o.value_;
}

std::string to_string(const Depth& d) {
  return d.is_finite() ? std::to_string(d.value()) : std::string("unreachable");
}

FactSet ClosureRounds::all() const {
  FactSet out;
  for (const auto& r : rounds) out.insert(r.begin(), r.end());
  return out;
}

namespace {

void for_each_tuple(const std::vector<Index>& domain, int k,
                    const std::vector<bool>& in_delta, bool need_delta,
                    std::vector<Index>& cur, std::vector<bool>& cur_delta,
                    FactSet& out, const FactSet& known) {
  if (static_cast<int>(cur.size()) == k) {
    if (need_delta && std::none_of(cur_delta.begin(), cur_delta.end(), [](bool b) { return b; })) return;
    Fact f = Fact::idb(1, cur);
    if (!known.count(f)) out.insert(std::move(f));
    return;
  }
  for (std::size_t j = 0; j < domain.size(); ++j) {
    cur.push_back(domain[j]);
    cur_delta.push_back(in_delta[j]);
    for_each_tuple(domain, k, in_delta, need_delta, cur, cur_delta, out, known);
    cur.pop_back();
    cur_delta.pop_back();
  }
}

std::vector<Index> concat(const std::vector<Index>& a, const std::vector<Index>& b) {
  std::vector<Index> out(a);
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

}  // namespace

ClosureRounds eval_closure_rounds(const KnowledgeBase& kb, const Architecture& arch, int max_depth) {
  if (max_depth < 0) throw std::invalid_argument("max_depth must be >= 0");
  ClosureRounds result;
  result.rounds.push_back(kb.facts);
  FactSet known = kb.facts;
  FactSet delta = kb.facts;

  while (!delta.empty()) {
    FactSet fresh;
    std::vector<Index> edb_all;
    for (const Fact& f : known) {
      if (f.is_edb()) edb_all.push_back(f.index());
    }
    std::vector<bool> edb_in_delta(edb_all.size());
    bool delta_has_edb = false;
    for (std::size_t j = 0; j < edb_all.size(); ++j) {
      edb_in_delta[j] = delta.count(Fact::edb(edb_all[j])) != 0;
      delta_has_edb = delta_has_edb || edb_in_delta[j];
    }

    if (max_depth >= 1 && delta_has_edb) {
      std::vector<Index> cur;
      std::vector<bool> cur_delta;
      for_each_tuple(edb_all, arch.k, edb_in_delta, true, cur, cur_delta, fresh, known);
    }

    if (arch.kind == ArchKind::Chain) {
      for (const Fact& t : known) {
        if (t.is_edb() || t.depth + 1 > max_depth) continue;
        const bool t_new = delta.count(t) != 0;
        for (std::size_t j = 0; j < edb_all.size(); ++j) {
          if (!t_new && !edb_in_delta[j]) continue;
          std::vector<Index> tuple = t.tuple;
          tuple.push_back(edb_all[j]);
          Fact f = Fact::idb(t.depth + 1, std::move(tuple));
          if (!known.count(f)) fresh.insert(std::move(f));
        }
      }
    } else {
      for (const Fact& x : delta) {
        if (x.is_edb() || x.depth + 1 > max_depth) continue;
        for (const Fact& y : known) {
          if (y.is_edb() || y.depth != x.depth) continue;
          Fact xy = Fact::idb(x.depth + 1, concat(x.tuple, y.tuple));
          Fact yx = Fact::idb(x.depth + 1, concat(y.tuple, x.tuple));
          if (!known.count(xy)) fresh.insert(std::move(xy));
          if (!known.count(yx)) fresh.insert(std::move(yx));
        }
      }
    }

    if (fresh.empty()) break;
    known.insert(fresh.begin(), fresh.end());
    result.rounds.push_back(fresh);
    delta = std::move(fresh);
  }
  return result;
}

FactSet eval_closure(const KnowledgeBase& kb, const Architecture& arch, int max_depth) {
  return eval_closure_rounds(kb, arch, max_depth).all();
}

namespace {

Depth depth_memo(const Fact& q, const FactSet& base, const Architecture& arch,
                 std::map<Fact, Depth>& memo) {
  if (base.count(q)) return Depth::finite(0);
  if (q.is_edb()) return Depth::unreachable();
  auto it = memo.find(q);
  if (it != memo.end()) return it->second;
  int worst = 0;
  Depth out = Depth::unreachable();
  bool ok = true;
  for (const Fact& p : predecessors(q, arch)) {
    const Depth dp = depth_memo(p, base, arch, memo);
    if (!dp.is_finite()) {
      ok = false;
      break;
    }
    worst = std::max(worst, dp.value());
  }
  if (ok) out = Depth::finite(worst + 1);
  memo.emplace(q, out);
  return out;
}

}  // namespace

Depth derivation_depth(const Fact& q, const FactSet& base, const Architecture& arch) {
  require_well_formed(q, arch, 0);
  std::map<Fact, Depth> memo;
  return depth_memo(q, base, arch, memo);
}

Depth derivation_depth(const Fact& q, const KnowledgeBase& kb, const Architecture& arch) {
  return derivation_depth(q, kb.facts, arch);
}

bool derivable(const Fact& q, const FactSet& base, const Architecture& arch) {
  return derivation_depth(q, base, arch).is_finite();
}

std::size_t DerivationDag::find(const Fact& f) const {
  auto it = std::lower_bound(vertices.begin(), vertices.end(), f,
                             [](const DagVertex& v, const Fact& x) { return v.fact < x; });
  if (it != vertices.end() && it->fact == f) return static_cast<std::size_t>(it - vertices.begin());
  return vertices.size();
}

std::size_t DerivationDag::total_width() const {
  std::size_t w = 0;
  for (std::size_t x : widths) w += x;
  return w;
}

std::vector<Index> DerivationDag::leaves_under(std::size_t v) const {
  std::vector<bool> seen(vertices.size(), false);
  std::vector<std::size_t> stack{v};
  std::vector<Index> out;
  while (!stack.empty()) {
    const std::size_t u = stack.back();
    stack.pop_back();
    if (seen[u]) continue;
    seen[u] = true;
    if (vertices[u].fact.is_edb()) out.push_back(vertices[u].fact.index());
    for (std::size_t c : vertices[u].children) stack.push_back(c);
  }
  std::sort(out.begin(), out.end());
  return out;
}

DerivationDag build_dag(const Fact& q, Index m, const Architecture& arch) {
  if (q.is_edb()) throw std::invalid_argument("build_dag requires an IDB query");
  require_well_formed(q, arch, m);
  FactSet seen{q};
  std::vector<Fact> stack{q};
  bool non_colliding = true;
  while (!stack.empty()) {
    Fact f = std::move(stack.back());
    stack.pop_back();
    const auto preds = predecessors(f, arch);
    if (arch.kind == ArchKind::Merge && !f.is_edb() && f.depth > 1 && preds.size() < 2) {
      non_colliding = false;
    }
    for (const Fact& p : preds) {
      if (seen.insert(p).second) stack.push_back(p);
    }
  }

  DerivationDag dag;
  dag.root = q;
  dag.arity = q.tuple.size();
  dag.non_colliding = non_colliding;
  dag.vertices.reserve(seen.size());
  for (const Fact& f : seen) dag.vertices.push_back(DagVertex{f, f.depth, {}});
  for (auto& v : dag.vertices) {
    for (const Fact& p : predecessors(v.fact, arch)) v.children.push_back(dag.find(p));
  }
  dag.widths.assign(static_cast<std::size_t>(q.depth), 0);
  for (const auto& v : dag.vertices) {
    if (v.fact.is_edb()) {
      dag.leaves.push_back(v.fact.index());
    } else {
      ++dag.widths[static_cast<std::size_t>(v.level - 1)];
    }
  }
  dag.kappa = dag.leaves.size();
  return dag;
}

FactSet atom_core(const KnowledgeBase& kb, const Architecture& arch) {
  FactSet current = kb.facts;
  for (const Fact& s : kb.facts) {
    current.erase(s);
    if (!derivable(s, current, arch)) current.insert(s);
  }
  return current;
}

std::string to_string(const Bits& bits) {
  std::string s;
  s.reserve(bits.size());
  for (bool b : bits) s += b ? '1' : '0';
  return s;
}

int pointer_bits(Index m) {
  if (m < 2) throw std::invalid_argument("m must be >= 2");
  int b = 0;
  while ((std::uint64_t{1} << b) < m) ++b;
  return b;
}

namespace {

void put_bits(Bits& out, std::uint64_t value, int width) {
  for (int i = width - 1; i >= 0; --i) out.push_back(((value >> i) & 1U) != 0);
}

class BitReader {
public:
  explicit BitReader(const Bits& bits) : bits_(bits) {}
  bool next() {
    if (pos_ >= bits_.size()) throw TraceDecodeError("truncated trace code");
    return bits_[pos_++];
  }
  std::uint64_t read(int width) {
    std::uint64_t v = 0;
    for (int i = 0; i < width; ++i) v = (v << 1) | (next() ? 1U : 0U);
    return v;
  }
  std::size_t remaining() const { return bits_.size() - pos_; }

private:
  const Bits& bits_;
  std::size_t pos_ = 0;
};

}  // namespace

Bits encode_trace(const Fact& q, Index m, const Architecture& arch) {
  if (q.is_edb()) throw std::invalid_argument("encode_trace requires an IDB query");
  require_well_formed(q, arch, m);
  Bits out;
  const auto d = static_cast<std::uint64_t>(q.depth);
  int n = 0;
  while ((d >> (n + 1)) != 0) ++n;
  put_bits(out, 0, n);
  put_bits(out, d, n + 1);
  const int w = pointer_bits(m);
  for (Index i : q.tuple) put_bits(out, i - 1, w);
  return out;
}

Fact decode_trace(const Bits& bits, Index m, const Architecture& arch) {
  BitReader in(bits);
  int zeros = 0;
  while (!in.next()) {
    if (++zeros > 30) throw TraceDecodeError("depth prefix too long");
  }
  std::uint64_t d = 1;
  for (int i = 0; i < zeros; ++i) d = (d << 1) | (in.next() ? 1U : 0U);
  const int w = pointer_bits(m);
  std::uint64_t a = 0;
  try {
    a = arch.arity(static_cast<int>(d));
  } catch (const std::out_of_range&) {
    throw TraceDecodeError("decoded depth overflows the head arity");
  }
  if (a > in.remaining() || a * static_cast<std::uint64_t>(w) > in.remaining()) {
    throw TraceDecodeError("truncated trace code");
  }
  std::vector<Index> tuple;
  tuple.reserve(a);
  for (std::uint64_t j = 0; j < a; ++j) {
    const std::uint64_t p = in.read(w);
    if (p >= m) throw TraceDecodeError("leaf pointer outside [1,m]");
    tuple.push_back(static_cast<Index>(p + 1));
  }
  if (in.remaining() != 0) throw TraceDecodeError("trailing bits after trace code");
  return Fact::idb(static_cast<int>(d), std::move(tuple));
}

std::uint64_t kappa_of_depth(const Architecture& arch, int d) { return arch.arity(d); }

double capacity_bits(const Architecture& arch, int d, Index m) {
  if (m < 2) throw std::invalid_argument("m must be >= 2");
  return static_cast<double>(kappa_of_depth(arch, d)) * std::log2(static_cast<double>(m));
}

double bits_per_index(Index m, BitAccounting acct) {
  if (m < 2) throw std::invalid_argument("m must be >= 2");
  return acct == BitAccounting::Ideal ? std::log2(static_cast<double>(m))
                                      : static_cast<double>(pointer_bits(m));
}

LayerPrefixCache layer_prefix_cache(const Fact& q, Index m, const Architecture& arch, int l0,
                                    BitAccounting acct) {
  const DerivationDag dag = build_dag(q, m, arch);
  if (l0 < 0 || l0 > dag.depth()) {
    throw std::out_of_range("prefix level must lie in [0, query depth]");
  }
  LayerPrefixCache out;
  const double w = bits_per_index(m, acct);
  for (const auto& v : dag.vertices) {
    if (!v.fact.is_edb() && v.level <= l0) {
      out.facts.insert(v.fact);
      out.storage_bits += static_cast<double>(v.fact.tuple.size()) * w;
    }
  }
  FactSet augmented = KnowledgeBase::full_base(m).facts;
  augmented.insert(out.facts.begin(), out.facts.end());
  const Depth residual = derivation_depth(q, augmented, arch);
  if (!residual.is_finite() || residual.value() != dag.depth() - l0) {
    throw std::logic_error("layer-prefix residual depth disagrees with depth - prefix");
  }
  out.residual_depth = residual.value();
  return out;
}

double critical_frequency(double rho_s, double len_bits, int depth) {
  if (depth < 1) throw std::invalid_argument("critical frequency needs depth >= 1");
  if (!(rho_s > 0)) throw std::invalid_argument("rho_s must be positive");
  if (!(len_bits > 0)) throw std::invalid_argument("len_bits must be positive");
  return rho_s * len_bits / static_cast<double>(depth);
}

}  // namespace pec
