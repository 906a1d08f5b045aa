#include "anisogup/tensor.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <sstream>

namespace anisogup {

namespace {

constexpr int kPermutationCap = 5040;  // bound on joint dummy-relabeling search

bool is_dummy_name(const std::string& s) { return !s.empty() && s[0] == '$'; }

std::string dummy_name(int k) { return "$" + std::to_string(k); }

// Renames every dummy-style label ($...) with the given prefix so two
// monomials can be concatenated without accidental pairing.
void freshen_dummies(Monomial& m, const std::string& prefix) {
  for (auto& f : m.factors)
    for (auto& l : f.idx)
      if (is_dummy_name(l)) l = "$" + prefix + l.substr(1);
}

Monomial concat(const Monomial& a, const Monomial& b) {
  Monomial out = a;
  Monomial bb = b;
  freshen_dummies(out, "L");
  freshen_dummies(bb, "R");
  out.coeff *= bb.coeff;
  out.hbar += bb.hbar;
  out.ipow += bb.ipow;
  out.dim_pow += bb.dim_pow;
  out.factors.insert(out.factors.end(), bb.factors.begin(), bb.factors.end());
  for (const auto& [s, k] : bb.denom) out.denom[s] += k;
  return out;
}

}  // namespace

int q_count(const Monomial& m) {
  int n = 0;
  for (const auto& f : m.factors)
    if (f.kind == Factor::Kind::Q) ++n;
  return n;
}

int grading_of(const TablePtr& t, const Monomial& m) {
  int g = 0;
  for (const auto& f : m.factors) {
    if (f.kind != Factor::Kind::Tensor) continue;
    if (const auto* info = t->tensor(f.sym)) g += info->grading;
  }
  return g;
}

int max_grading(const TensorExpr& a) {
  int g = 0;
  for (const auto& m : a.monomials()) g = std::max(g, grading_of(a.table(), m));
  return g;
}

std::string Monomial::shape_key() const {
  std::ostringstream os;
  os << hbar << '|' << ipow << '|' << dim_pow << '|';
  for (const auto& f : factors) {
    os << static_cast<int>(f.kind) << ':' << f.sym << ':' << f.level << '[';
    for (const auto& l : f.idx) os << l << ',';
    os << ']';
  }
  os << '/';
  for (const auto& [s, k] : denom) os << s << '^' << k << ',';
  return os.str();
}

// ---------------------------------------------------------------------------
// Canonicalization

class Canonicalizer {
 public:
  explicit Canonicalizer(const TablePtr& t) : table_(t) {}

  // Brings one monomial to canonical form in place. Returns false if the
  // coefficient vanished.
  bool run(Monomial& m) const {
    validate(m);
    eliminate_deltas(m);
    relabel_and_sort(m);
    m.ipow %= 4;
    if (m.ipow < 0) m.ipow += 4;
    if (m.ipow >= 2) {
      m.coeff = -m.coeff;
      m.ipow -= 2;
    }
    return m.coeff != 0;
  }

  std::set<std::string> frees(const Monomial& m) const {
    std::map<std::string, int> cnt;
    count_labels(m, cnt);
    std::set<std::string> out;
    for (const auto& [l, c] : cnt)
      if (c == 1) out.insert(l);
    return out;
  }

 private:
  TablePtr table_;

  static void count_labels(const Monomial& m, std::map<std::string, int>& cnt) {
    for (const auto& f : m.factors)
      for (const auto& l : f.idx) ++cnt[l];
  }

  void validate(const Monomial& m) const {
    std::map<std::string, int> cnt;
    count_labels(m, cnt);
    for (const auto& [l, c] : cnt)
      if (c > 2) throw AlgebraError("index '" + l + "' occurs " + std::to_string(c) +
                                    " times in one monomial");
    for (const auto& f : m.factors) {
      switch (f.kind) {
        case Factor::Kind::Tensor: {
          const auto* info = table_->tensor(f.sym);
          if (!info) throw AlgebraError("undeclared tensor symbol: " + f.sym);
          if (static_cast<int>(f.idx.size()) != info->rank)
            throw AlgebraError("tensor " + f.sym + " used with wrong arity");
          break;
        }
        case Factor::Kind::Radial:
          if (!table_->is_radial(f.sym)) throw AlgebraError("undeclared radial atom: " + f.sym);
          if (!f.idx.empty()) throw AlgebraError("radial atom " + f.sym + " carries indices");
          break;
        case Factor::Kind::Q:
          if (f.idx.size() != 1) throw AlgebraError("q factor must carry one index");
          break;
      }
    }
    for (const auto& [s, k] : m.denom) {
      if (!table_->atom(s)) throw AlgebraError("undeclared denominator atom: " + s);
      if (k <= 0) throw AlgebraError("non-positive denominator power for " + s);
    }
  }

  // delta[a,a] -> dim; delta[a,b] with a (or b) paired elsewhere contracts.
  void eliminate_deltas(Monomial& m) const {
    bool changed = true;
    while (changed) {
      changed = false;
      std::map<std::string, int> cnt;
      count_labels(m, cnt);
      for (std::size_t i = 0; i < m.factors.size(); ++i) {
        auto& f = m.factors[i];
        if (f.kind != Factor::Kind::Tensor || f.sym != "delta") continue;
        const std::string a = f.idx[0], b = f.idx[1];
        if (a == b) {
          m.dim_pow += 1;
          m.factors.erase(m.factors.begin() + i);
          changed = true;
          break;
        }
        if (cnt[a] == 2) {
          // the partner occurrence of `a` takes label b
          m.factors.erase(m.factors.begin() + i);
          rename_one(m, a, b);
          changed = true;
          break;
        }
        if (cnt[b] == 2) {
          m.factors.erase(m.factors.begin() + i);
          rename_one(m, b, a);
          changed = true;
          break;
        }
      }
    }
  }

  static void rename_one(Monomial& m, const std::string& from, const std::string& to) {
    for (auto& f : m.factors)
      for (auto& l : f.idx)
        if (l == from) {
          l = to;
          return;
        }
  }

  struct Occurrence {
    std::size_t factor;
    std::size_t slot;
  };

  // Invariant color of a dummy, independent of current label names. Free
  // labels act as fixed colors; co-slot dummies are referenced through their
  // current color, refined to a fixed point.
  static std::vector<std::vector<std::string>> color_classes(
      const Monomial& m, const std::vector<std::string>& dummies,
      const std::map<std::string, std::vector<Occurrence>>& occ, const TablePtr& table) {
    std::map<std::string, int> color;
    for (const auto& d : dummies) color[d] = 0;
    auto occurrence_sig = [&](const Occurrence& o) {
      const Factor& f = m.factors[o.factor];
      bool sym = false;
      if (f.kind == Factor::Kind::Tensor) {
        const auto* info = table->tensor(f.sym);
        sym = info && info->symmetric;
      }
      std::ostringstream os;
      os << static_cast<int>(f.kind) << ':' << f.sym << ':' << f.level << ':'
         << (sym ? -1 : static_cast<int>(o.slot)) << '(';
      std::vector<std::string> co;
      for (std::size_t s = 0; s < f.idx.size(); ++s) {
        if (s == o.slot) continue;
        const std::string& l = f.idx[s];
        std::string tok = color.count(l) ? "d" + std::to_string(color[l]) : "f" + l;
        if (sym) co.push_back(tok);
        else os << s << '=' << tok << ';';
      }
      std::sort(co.begin(), co.end());
      for (const auto& c : co) os << c << ';';
      os << ')';
      return os.str();
    };
    for (std::size_t round = 0; round <= dummies.size(); ++round) {
      std::map<std::string, std::string> sig;
      for (const auto& d : dummies) {
        std::vector<std::string> parts;
        for (const auto& o : occ.at(d)) parts.push_back(occurrence_sig(o));
        std::sort(parts.begin(), parts.end());
        sig[d] = std::to_string(color[d]) + "#" + parts[0] + "#" + parts[1];
      }
      std::map<std::string, int> compress;
      std::vector<std::string> keys;
      for (const auto& [d, s] : sig) keys.push_back(s);
      std::sort(keys.begin(), keys.end());
      keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
      for (std::size_t i = 0; i < keys.size(); ++i) compress[keys[i]] = static_cast<int>(i);
      std::map<std::string, int> next;
      for (const auto& d : dummies) next[d] = compress[sig[d]];
      if (next == color) break;
      color = next;
    }
    std::map<int, std::vector<std::string>> by_color;
    for (const auto& d : dummies) by_color[color[d]].push_back(d);
    std::vector<std::vector<std::string>> classes;
    for (auto& [c, ds] : by_color) {
      std::sort(ds.begin(), ds.end());
      classes.push_back(ds);
    }
    return classes;
  }

  std::vector<Factor> shape_with(const Monomial& m,
                                 const std::map<std::string, std::string>& ren) const {
    std::vector<Factor> fs = m.factors;
    for (auto& f : fs) {
      for (auto& l : f.idx) {
        auto it = ren.find(l);
        if (it != ren.end()) l = it->second;
      }
      bool sym = false;
      if (f.kind == Factor::Kind::Tensor) {
        const auto* info = table_->tensor(f.sym);
        sym = info && info->symmetric;
      }
      if (sym) std::sort(f.idx.begin(), f.idx.end());
    }
    std::sort(fs.begin(), fs.end());
    return fs;
  }

  void relabel_and_sort(Monomial& m) const {
    std::map<std::string, int> cnt;
    count_labels(m, cnt);
    std::map<std::string, std::vector<Occurrence>> occ;
    for (std::size_t i = 0; i < m.factors.size(); ++i)
      for (std::size_t s = 0; s < m.factors[i].idx.size(); ++s) {
        const std::string& l = m.factors[i].idx[s];
        if (cnt[l] == 2) occ[l].push_back({i, s});
      }
    std::vector<std::string> dummies;
    for (const auto& [l, o] : occ) dummies.push_back(l);

    if (dummies.empty()) {
      m.factors = shape_with(m, {});
      return;
    }

    auto classes = color_classes(m, dummies, occ, table_);

    long search = 1;
    for (const auto& c : classes) {
      for (std::size_t j = 2; j <= c.size(); ++j) search *= static_cast<long>(j);
      if (search > kPermutationCap)
        throw AlgebraError("dummy-relabeling search space too large");
    }

    // name ranges per class block, exhaustive joint minimization within
    std::vector<int> offsets;
    int off = 0;
    for (const auto& c : classes) {
      offsets.push_back(off);
      off += static_cast<int>(c.size());
    }
    std::vector<std::vector<int>> perms(classes.size());
    for (auto& c : perms) c = {};

    std::vector<Factor> best;
    bool have_best = false;
    std::map<std::string, std::string> ren;

    std::vector<std::vector<int>> idx_perm(classes.size());
    for (std::size_t ci = 0; ci < classes.size(); ++ci) {
      idx_perm[ci].resize(classes[ci].size());
      std::iota(idx_perm[ci].begin(), idx_perm[ci].end(), 0);
    }

    // iterate over the product of per-class permutations
    std::function<void(std::size_t)> rec = [&](std::size_t ci) {
      if (ci == classes.size()) {
        ren.clear();
        for (std::size_t c = 0; c < classes.size(); ++c)
          for (std::size_t j = 0; j < classes[c].size(); ++j)
            ren[classes[c][j]] = dummy_name(offsets[c] + idx_perm[c][j]);
        auto cand = shape_with(m, ren);
        if (!have_best || cand < best) {
          best = cand;
          have_best = true;
        }
        return;
      }
      std::vector<int>& p = idx_perm[ci];
      std::sort(p.begin(), p.end());
      do {
        rec(ci + 1);
      } while (std::next_permutation(p.begin(), p.end()));
    };
    rec(0);
    m.factors = best;
  }
};

// ---------------------------------------------------------------------------
// Expression assembly

namespace {

TensorExpr assemble(TablePtr t, std::vector<Monomial> ms) {
  Canonicalizer canon(t);
  std::map<std::string, Monomial> merged;
  for (auto& m : ms) {
    if (!canon.run(m)) continue;
    std::string key = m.shape_key();
    auto it = merged.find(key);
    if (it == merged.end()) {
      merged.emplace(std::move(key), std::move(m));
    } else {
      it->second.coeff += m.coeff;
    }
  }
  std::vector<Monomial> out;
  for (auto& [k, m] : merged)
    if (m.coeff != 0) out.push_back(std::move(m));

  std::set<std::string> free;
  bool first = true;
  for (const auto& m : out) {
    auto f = canon.frees(m);
    if (first) {
      free = f;
      first = false;
    } else if (f != free) {
      throw AlgebraError("monomials with differing free-index sets in one expression");
    }
  }
  return TensorExpr::from_monomials(std::move(t), std::move(out));
}

void require_same_table(const TensorExpr& a, const TensorExpr& b) {
  if (a.table() != b.table()) throw AlgebraError("operands built against different symbol tables");
}

}  // namespace

TensorExpr TensorExpr::from_monomials(TablePtr t, std::vector<Monomial> ms) {
  TensorExpr e;
  e.table_ = std::move(t);
  e.monomials_ = std::move(ms);
  Canonicalizer canon(e.table_);
  if (!e.monomials_.empty()) e.free_ = canon.frees(e.monomials_.front());
  return e;
}

TensorExpr TensorExpr::zero(TablePtr t) { return assemble(std::move(t), {}); }

TensorExpr TensorExpr::constant(TablePtr t, const Rational& c) {
  Monomial m;
  m.coeff = c;
  return assemble(std::move(t), {std::move(m)});
}

TensorExpr TensorExpr::imaginary_unit(TablePtr t) {
  Monomial m;
  m.ipow = 1;
  return assemble(std::move(t), {std::move(m)});
}

TensorExpr TensorExpr::i_hbar(TablePtr t) {
  Monomial m;
  m.ipow = 1;
  m.hbar = 1;
  return assemble(std::move(t), {std::move(m)});
}

TensorExpr TensorExpr::dim_const(TablePtr t) {
  Monomial m;
  m.dim_pow = 1;
  return assemble(std::move(t), {std::move(m)});
}

TensorExpr TensorExpr::symbol(TablePtr t, const std::string& name,
                              const std::vector<std::string>& idx) {
  Monomial m;
  Factor f;
  if (t->tensor(name)) {
    f.kind = Factor::Kind::Tensor;
  } else if (t->is_radial(name)) {
    f.kind = Factor::Kind::Radial;
  } else {
    throw AlgebraError("undeclared symbol: " + name);
  }
  f.sym = name;
  f.idx = idx;
  m.factors.push_back(std::move(f));
  return assemble(std::move(t), {std::move(m)});
}

TensorExpr TensorExpr::radial(TablePtr t, const std::string& name, int level) {
  if (!t->is_radial(name)) throw AlgebraError("undeclared radial atom: " + name);
  Monomial m;
  Factor f;
  f.kind = Factor::Kind::Radial;
  f.sym = name;
  f.level = level;
  m.factors.push_back(std::move(f));
  return assemble(std::move(t), {std::move(m)});
}

// ---------------------------------------------------------------------------
// Arithmetic

TensorExpr add(const TensorExpr& a, const TensorExpr& b) {
  require_same_table(a, b);
  if (!a.monomials().empty() && !b.monomials().empty() && a.free_indices() != b.free_indices())
    throw AlgebraError("add: free-index mismatch");
  std::vector<Monomial> ms = a.monomials();
  ms.insert(ms.end(), b.monomials().begin(), b.monomials().end());
  return assemble(a.table() ? a.table() : b.table(), std::move(ms));
}

TensorExpr negate(const TensorExpr& a) { return scale(a, Rational(-1)); }

TensorExpr sub(const TensorExpr& a, const TensorExpr& b) { return add(a, negate(b)); }

TensorExpr scale(const TensorExpr& a, const Rational& c) {
  std::vector<Monomial> ms = a.monomials();
  for (auto& m : ms) m.coeff *= c;
  return assemble(a.table(), std::move(ms));
}

TensorExpr contract_mul(const TensorExpr& a, const TensorExpr& b) {
  require_same_table(a, b);
  std::vector<Monomial> ms;
  for (const auto& ma : a.monomials())
    for (const auto& mb : b.monomials()) ms.push_back(concat(ma, mb));
  return assemble(a.table(), std::move(ms));
}

TensorExpr mul(const TensorExpr& a, const TensorExpr& b) {
  require_same_table(a, b);
  for (const auto& l : a.free_indices())
    if (b.free_indices().count(l))
      throw AlgebraError("mul: free index '" + l + "' appears in both operands");
  return contract_mul(a, b);
}

// ---------------------------------------------------------------------------
// Differentiation

namespace {

std::vector<Monomial> derive_monomial(const TablePtr& table, const Monomial& m,
                                      const std::string& idx);

std::vector<Monomial> derive_monomials(const TablePtr& table, const std::vector<Monomial>& ms,
                                       const std::string& idx) {
  std::vector<Monomial> out;
  for (const auto& m : ms) {
    auto d = derive_monomial(table, m, idx);
    out.insert(out.end(), d.begin(), d.end());
  }
  return out;
}

std::vector<Monomial> derive_monomial(const TablePtr& table, const Monomial& m,
                                      const std::string& idx) {
  std::vector<Monomial> out;
  for (std::size_t i = 0; i < m.factors.size(); ++i) {
    const Factor& f = m.factors[i];
    if (f.kind == Factor::Kind::Q) continue;
    if (f.kind == Factor::Kind::Radial) {
      // d_i A^(k) = 2 p_i A^(k+1)
      Monomial d = m;
      d.factors[i].level += 1;
      Factor p;
      p.sym = "p";
      p.idx = {idx};
      d.factors.push_back(std::move(p));
      d.coeff *= 2;
      out.push_back(std::move(d));
      continue;
    }
    if (f.sym == "p") {
      Monomial d = m;
      d.factors[i].sym = "delta";
      d.factors[i].idx = {f.idx[0], idx};
      out.push_back(std::move(d));
      continue;
    }
    // delta and background tensors are constant
  }
  for (const auto& [s, k] : m.denom) {
    const TensorExpr* def = table->atom(s);
    if (!def) throw AlgebraError("undeclared denominator atom: " + s);
    auto ds = derive_monomials(table, def->monomials(), idx);
    for (auto& dm : ds) {
      freshen_dummies(dm, "D");
      Monomial base = m;
      base.denom[s] += 1;
      Monomial term = concat(base, dm);
      term.coeff *= Rational(-k);
      out.push_back(std::move(term));
    }
  }
  return out;
}

}  // namespace

TensorExpr derive_contract(const TensorExpr& a, const std::string& idx) {
  return assemble(a.table(), derive_monomials(a.table(), a.monomials(), idx));
}

TensorExpr derive(const TensorExpr& a, const std::string& idx) {
  if (a.free_indices().count(idx))
    throw AlgebraError("derive: index '" + idx + "' already free in operand");
  return derive_contract(a, idx);
}

// ---------------------------------------------------------------------------

TensorExpr canonicalize(const TensorExpr& a) { return assemble(a.table(), a.monomials()); }

namespace {

TensorExpr expand_to_lcm(const TensorExpr& a, const std::map<std::string, int>& lcm) {
  std::vector<Monomial> out;
  for (const auto& m : a.monomials()) {
    std::vector<Monomial> cur;
    Monomial base = m;
    base.denom.clear();
    cur.push_back(std::move(base));
    for (const auto& [s, k] : lcm) {
      int have = 0;
      if (auto it = m.denom.find(s); it != m.denom.end()) have = it->second;
      int need = k - have;
      const TensorExpr* def = a.table()->atom(s);
      for (int r = 0; r < need; ++r) {
        std::vector<Monomial> next;
        for (const auto& c : cur)
          for (const auto& dm : def->monomials()) next.push_back(concat(c, dm));
        cur = std::move(next);
      }
    }
    out.insert(out.end(), cur.begin(), cur.end());
  }
  return assemble(a.table(), std::move(out));
}

}  // namespace

TensorExpr clear_denominators(const TensorExpr& a) {
  std::map<std::string, int> lcm;
  for (const auto& m : a.monomials())
    for (const auto& [s, k] : m.denom) lcm[s] = std::max(lcm[s], k);
  if (lcm.empty()) return a;
  return expand_to_lcm(a, lcm);
}

std::vector<TensorExpr> clear_to_common(const std::vector<TensorExpr>& es) {
  std::map<std::string, int> lcm;
  for (const auto& e : es)
    for (const auto& m : e.monomials())
      for (const auto& [s, k] : m.denom) lcm[s] = std::max(lcm[s], k);
  std::vector<TensorExpr> out;
  for (const auto& e : es) out.push_back(lcm.empty() ? e : expand_to_lcm(e, lcm));
  return out;
}

bool is_zero(const TensorExpr& a) {
  if (a.monomials().empty()) return true;
  bool denoms = false;
  for (const auto& m : a.monomials())
    if (!m.denom.empty()) denoms = true;
  if (!denoms) return false;
  return clear_denominators(a).monomials().empty();
}

// ---------------------------------------------------------------------------
// Truncation

namespace {

// Series monomials of atom^(-power) up to grading `budget`.
std::vector<Monomial> expand_inverse_atom(const TablePtr& table, const std::string& atom,
                                          int power, int budget) {
  const TensorExpr* def = table->atom(atom);
  Rational c0(0);
  std::vector<Monomial> u;
  for (const auto& m : def->monomials()) {
    if (m.factors.empty() && m.dim_pow == 0 && m.hbar == 0 && m.ipow == 0) {
      c0 += m.coeff;
    } else {
      if (grading_of(table, m) < 1)
        throw AlgebraError("atom " + atom + " is not expandable as a graded series");
      u.push_back(m);
    }
  }
  if (c0 == 0) throw AlgebraError("atom " + atom + " has no rational constant term");

  std::vector<Monomial> result;
  std::vector<Monomial> upow;  // u^j
  {
    Monomial one;
    upow.push_back(one);
  }
  for (int j = 0; j <= budget; ++j) {
    Rational coef = binomial(Rational(-power), static_cast<unsigned>(j)) *
                    pow_rational(c0, -power - j);
    for (const auto& t : upow) {
      Monomial m = t;
      m.coeff *= coef;
      result.push_back(std::move(m));
    }
    if (j == budget) break;
    std::vector<Monomial> next;
    for (const auto& t : upow)
      for (const auto& um : u) {
        Monomial c = concat(t, um);
        if (grading_of(table, c) <= budget) next.push_back(std::move(c));
      }
    upow = std::move(next);
    if (upow.empty()) break;
  }
  return result;
}

}  // namespace

TensorExpr truncate(const TensorExpr& a, int order) {
  if (order < 0) throw AlgebraError("truncate: negative order");
  std::vector<Monomial> out;
  for (const auto& m : a.monomials()) {
    int g0 = grading_of(a.table(), m);
    if (g0 > order) continue;
    if (m.denom.empty()) {
      out.push_back(m);
      continue;
    }
    int budget = order - g0;
    std::vector<Monomial> cur;
    Monomial base = m;
    base.denom.clear();
    cur.push_back(std::move(base));
    for (const auto& [s, k] : m.denom) {
      auto series = expand_inverse_atom(a.table(), s, k, budget);
      std::vector<Monomial> next;
      for (const auto& c : cur)
        for (const auto& sm : series) {
          Monomial prod = concat(c, sm);
          if (grading_of(a.table(), prod) - g0 <= budget) next.push_back(std::move(prod));
        }
      cur = std::move(next);
    }
    for (auto& c : cur)
      if (grading_of(a.table(), c) <= order) out.push_back(std::move(c));
  }
  return assemble(a.table(), std::move(out));
}

// ---------------------------------------------------------------------------
// Substitution and relabeling

TensorExpr substitute(const TensorExpr& a, const std::string& sym, const TensorExpr& by,
                      const std::vector<std::string>& slot_order) {
  const auto* info = a.table()->tensor(sym);
  if (!info) throw AlgebraError("substitute: undeclared tensor " + sym);
  if (static_cast<int>(slot_order.size()) != info->rank)
    throw AlgebraError("substitute: slot order arity mismatch for " + sym);
  if (by.free_indices().size() != slot_order.size())
    throw AlgebraError("substitute: replacement arity mismatch for " + sym);
  for (const auto& s : slot_order)
    if (!by.free_indices().count(s))
      throw AlgebraError("substitute: '" + s + "' is not free in the replacement");
  require_same_table(a, by);

  std::vector<Monomial> out;
  for (const auto& m : a.monomials()) {
    std::vector<std::size_t> hits;
    for (std::size_t i = 0; i < m.factors.size(); ++i)
      if (m.factors[i].kind == Factor::Kind::Tensor && m.factors[i].sym == sym)
        hits.push_back(i);
    if (hits.empty()) {
      out.push_back(m);
      continue;
    }
    std::vector<Monomial> cur;
    {
      Monomial base = m;
      // erase from the back so earlier positions stay valid
      for (auto it = hits.rbegin(); it != hits.rend(); ++it)
        base.factors.erase(base.factors.begin() + *it);
      cur.push_back(std::move(base));
    }
    int copy = 0;
    for (std::size_t hi : hits) {
      const Factor& occ = m.factors[hi];
      std::vector<Monomial> next;
      for (const auto& c : cur)
        for (const auto& bm : by.monomials()) {
          Monomial rep = bm;
          freshen_dummies(rep, "S" + std::to_string(copy) + "_");
          // wire replacement frees to the occurrence slots via temp names
          std::map<std::string, std::string> ren;
          for (std::size_t r = 0; r < slot_order.size(); ++r)
            ren[slot_order[r]] = "$tmp" + std::to_string(r);
          for (auto& f : rep.factors)
            for (auto& l : f.idx)
              if (auto it = ren.find(l); it != ren.end()) l = it->second;
          for (auto& f : rep.factors)
            for (auto& l : f.idx)
              for (std::size_t r = 0; r < slot_order.size(); ++r)
                if (l == "$tmp" + std::to_string(r)) l = occ.idx[r];
          Monomial merged = c;
          merged.coeff *= rep.coeff;
          merged.hbar += rep.hbar;
          merged.ipow += rep.ipow;
          merged.dim_pow += rep.dim_pow;
          merged.factors.insert(merged.factors.end(), rep.factors.begin(), rep.factors.end());
          for (const auto& [s, k] : rep.denom) merged.denom[s] += k;
          next.push_back(std::move(merged));
        }
      cur = std::move(next);
      ++copy;
    }
    out.insert(out.end(), cur.begin(), cur.end());
  }
  return assemble(a.table(), std::move(out));
}

TensorExpr substitute_dim(const TensorExpr& a, const Rational& dim) {
  std::vector<Monomial> ms = a.monomials();
  for (auto& m : ms) {
    m.coeff *= pow_rational(dim, m.dim_pow);
    m.dim_pow = 0;
  }
  return assemble(a.table(), std::move(ms));
}

TensorExpr divide_by_atom(const TensorExpr& a, const std::string& atom, int power) {
  if (!a.table()->atom(atom)) throw AlgebraError("divide_by_atom: unregistered atom " + atom);
  if (power <= 0) throw AlgebraError("divide_by_atom: non-positive power");
  std::vector<Monomial> ms = a.monomials();
  for (auto& m : ms) m.denom[atom] += power;
  return assemble(a.table(), std::move(ms));
}

TensorExpr relabel_free(const TensorExpr& a, const std::string& from, const std::string& to) {
  if (from == to) return a;
  if (!a.monomials().empty() && !a.free_indices().count(from))
    throw AlgebraError("relabel_free: '" + from + "' is not free");
  std::vector<Monomial> ms = a.monomials();
  for (auto& m : ms)
    for (auto& f : m.factors)
      for (auto& l : f.idx)
        if (l == from) l = to;
  return assemble(a.table(), std::move(ms));
}

// ---------------------------------------------------------------------------
// Rendering

std::string to_string(const Monomial& m) {
  std::ostringstream os;
  std::vector<std::string> parts;
  if (m.ipow == 1) parts.push_back("im");
  if (m.hbar == 1) parts.push_back("hbar");
  if (m.hbar > 1) parts.push_back("hbar^" + std::to_string(m.hbar));
  if (m.dim_pow == 1) parts.push_back("dim");
  if (m.dim_pow > 1) parts.push_back("dim^" + std::to_string(m.dim_pow));
  for (const auto& f : m.factors) {
    std::string s = f.sym;
    if (f.kind == Factor::Kind::Radial && f.level > 0) s += std::to_string(f.level);
    if (f.kind == Factor::Kind::Q) s = "q";
    if (!f.idx.empty()) {
      s += "[";
      for (std::size_t i = 0; i < f.idx.size(); ++i) {
        if (i) s += ",";
        s += f.idx[i];
      }
      s += "]";
    }
    parts.push_back(s);
  }
  bool coeff_is_one = (m.coeff == 1) && !parts.empty();
  bool coeff_is_minus_one = (m.coeff == -1) && !parts.empty();
  if (coeff_is_minus_one) os << "-";
  if (!coeff_is_one && !coeff_is_minus_one) {
    os << to_string(m.coeff);
    if (!parts.empty()) os << "*";
  }
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) os << "*";
    os << parts[i];
  }
  if (!m.denom.empty()) {
    os << "/(";
    bool first = true;
    for (const auto& [s, k] : m.denom) {
      if (!first) os << "*";
      first = false;
      os << s;
      if (k > 1) os << "^" << k;
    }
    os << ")";
  }
  return os.str();
}

std::string to_string(const TensorExpr& a) {
  if (a.monomials().empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& m : a.monomials()) {
    std::string s = to_string(m);
    if (first) {
      os << s;
      first = false;
      continue;
    }
    if (!s.empty() && s[0] == '-') {
      os << " - " << s.substr(1);
    } else {
      os << " + " << s;
    }
  }
  return os.str();
}

}  // namespace anisogup
