#include "anisogup/operators.hpp"

#include <algorithm>

namespace anisogup {

namespace {

bool is_dummy_name(const std::string& s) { return !s.empty() && s[0] == '$'; }

void freshen_dummies_raw(Monomial& m, const std::string& prefix) {
  for (auto& f : m.factors)
    for (auto& l : f.idx)
      if (is_dummy_name(l)) l = "$" + prefix + l.substr(1);
}

// Concatenation that freshens only $-dummies; reserved labels (@...) and free
// names pair up across the two sides.
Monomial merge_raw(const Monomial& a, const Monomial& b) {
  Monomial out = a;
  Monomial bb = b;
  freshen_dummies_raw(out, "L");
  freshen_dummies_raw(bb, "R");
  out.coeff *= bb.coeff;
  out.hbar += bb.hbar;
  out.ipow += bb.ipow;
  out.dim_pow += bb.dim_pow;
  out.factors.insert(out.factors.end(), bb.factors.begin(), bb.factors.end());
  for (const auto& [s, k] : bb.denom) out.denom[s] += k;
  return out;
}

TensorExpr assemble(TablePtr t, std::vector<Monomial> ms) {
  return canonicalize(TensorExpr::from_monomials(std::move(t), std::move(ms)));
}

// q_l * e in normal order: e with q_l appended plus i hbar d_l e acting on
// the momentum coefficients only (q factors are inert under derive).
TensorExpr q_apply(const TensorExpr& e, const std::string& l) {
  std::vector<Monomial> ms;
  for (const auto& m : e.monomials()) {
    Monomial w = m;
    Factor q;
    q.kind = Factor::Kind::Q;
    q.sym = "q";
    q.idx = {l};
    w.factors.push_back(std::move(q));
    ms.push_back(std::move(w));
  }
  TensorExpr shifted = assemble(e.table(), std::move(ms));
  TensorExpr grad = derive_contract(e, l);
  return add(shifted, contract_mul(TensorExpr::i_hbar(e.table()), grad));
}

// Renames contracted q labels of one monomial to reserved @q names so they
// survive dummy freshening during operator products.
Monomial reserve_q_labels(const Monomial& m, std::vector<std::string>& qlabels) {
  Monomial out = m;
  int next = 0;
  for (std::size_t i = 0; i < out.factors.size(); ++i) {
    if (out.factors[i].kind != Factor::Kind::Q) continue;
    std::string l = out.factors[i].idx[0];
    if (is_dummy_name(l)) {
      std::string fresh = "@q" + std::to_string(next++);
      for (auto& f : out.factors)
        for (auto& lab : f.idx)
          if (lab == l) lab = fresh;
      l = fresh;
    }
    qlabels.push_back(l);
  }
  return out;
}

}  // namespace

OperatorExpr OperatorExpr::q(TablePtr t, const std::string& idx) {
  Monomial m;
  Factor f;
  f.kind = Factor::Kind::Q;
  f.sym = "q";
  f.idx = {idx};
  m.factors.push_back(std::move(f));
  return OperatorExpr(assemble(std::move(t), {std::move(m)}));
}

OperatorExpr op_add(const OperatorExpr& a, const OperatorExpr& b) {
  std::vector<Monomial> ms = a.body().monomials();
  ms.insert(ms.end(), b.body().monomials().begin(), b.body().monomials().end());
  TablePtr t = a.table() ? a.table() : b.table();
  return OperatorExpr(assemble(std::move(t), std::move(ms)));
}

OperatorExpr op_negate(const OperatorExpr& a) { return OperatorExpr(negate(a.body())); }

OperatorExpr op_sub(const OperatorExpr& a, const OperatorExpr& b) {
  return op_add(a, op_negate(b));
}

OperatorExpr op_mul_wired(const OperatorExpr& a, const OperatorExpr& b) {
  if (a.table() != b.table()) throw AlgebraError("operator product across symbol tables");
  std::vector<Monomial> out;
  for (const auto& raw : a.body().monomials()) {
    std::vector<std::string> qlabels;
    Monomial ma = reserve_q_labels(raw, qlabels);
    Monomial coeffA = ma;
    coeffA.factors.erase(
        std::remove_if(coeffA.factors.begin(), coeffA.factors.end(),
                       [](const Factor& f) { return f.kind == Factor::Kind::Q; }),
        coeffA.factors.end());
    TensorExpr cur = b.body();
    for (const auto& l : qlabels) cur = q_apply(cur, l);
    for (const auto& mc : cur.monomials()) out.push_back(merge_raw(coeffA, mc));
  }
  return OperatorExpr(assemble(a.table(), std::move(out)));
}

OperatorExpr op_mul(const OperatorExpr& a, const OperatorExpr& b) {
  for (const auto& l : a.body().free_indices())
    if (b.body().free_indices().count(l))
      throw AlgebraError("op_mul: free index '" + l + "' appears in both operands");
  return op_mul_wired(a, b);
}

OperatorExpr commutator(const OperatorExpr& a, const OperatorExpr& b) {
  return op_sub(op_mul(a, b), op_mul(b, a));
}

int q_degree(const OperatorExpr& a) {
  int d = 0;
  for (const auto& m : a.body().monomials()) d = std::max(d, q_count(m));
  return d;
}

TensorExpr coefficient_of(const OperatorExpr& a, const std::vector<std::string>& qlabels) {
  const std::size_t want = qlabels.size();
  if (want > 2) throw AlgebraError("coefficient_of: q multisets above size 2 unsupported");
  std::vector<Monomial> out;
  for (const auto& m : a.body().monomials()) {
    if (static_cast<std::size_t>(q_count(m)) != want) continue;
    std::vector<std::string> slots;
    Monomial base = m;
    base.factors.erase(std::remove_if(base.factors.begin(), base.factors.end(),
                                      [&](const Factor& f) {
                                        if (f.kind != Factor::Kind::Q) return false;
                                        slots.push_back(f.idx[0]);
                                        return true;
                                      }),
                       base.factors.end());
    auto with_delta = [](Monomial mm, const std::string& x, const std::string& y) {
      Factor d;
      d.sym = "delta";
      d.idx = {x, y};
      mm.factors.push_back(std::move(d));
      return mm;
    };
    if (want == 0) {
      out.push_back(base);
    } else if (want == 1) {
      out.push_back(with_delta(base, slots[0], qlabels[0]));
    } else {
      if (slots[0] == slots[1]) {
        out.push_back(with_delta(with_delta(base, slots[0], qlabels[0]), slots[1], qlabels[1]));
      } else {
        Monomial m1 = with_delta(with_delta(base, slots[0], qlabels[0]), slots[1], qlabels[1]);
        Monomial m2 = with_delta(with_delta(base, slots[0], qlabels[1]), slots[1], qlabels[0]);
        m1.coeff /= 2;
        m2.coeff /= 2;
        out.push_back(std::move(m1));
        out.push_back(std::move(m2));
      }
    }
  }
  return assemble(a.table(), std::move(out));
}

bool op_is_zero(const OperatorExpr& a) { return is_zero(a.body()); }

OperatorExpr op_truncate(const OperatorExpr& a, int order) {
  return OperatorExpr(truncate(a.body(), order));
}

OperatorExpr op_substitute_dim(const OperatorExpr& a, const Rational& dim) {
  return OperatorExpr(substitute_dim(a.body(), dim));
}

std::string to_string(const OperatorExpr& a) { return to_string(a.body()); }

// ---------------------------------------------------------------------------
// Transformations

bool is_integrable(const LogDerivative& L) {
  auto li = relabel_free(L.value, L.idx, "@ui");
  auto lj = relabel_free(L.value, L.idx, "@uj");
  auto curl = sub(derive(li, "@uj"), derive(lj, "@ui"));
  return is_zero(curl);
}

OperatorExpr apply_transform(const OperatorExpr& a, const LogDerivative& L) {
  if (!is_integrable(L))
    throw AlgebraError("apply_transform: L is not a gradient; no C(p) realizes it");
  TablePtr t = a.table();
  OperatorExpr acc = OperatorExpr::zero(t);
  for (const auto& raw : a.body().monomials()) {
    std::vector<std::string> qlabels;
    Monomial m = reserve_q_labels(raw, qlabels);
    // peel q factors one at a time: T(M q_l) = T(M) (q_l - i hbar L_l)
    Monomial base = m;
    base.factors.erase(
        std::remove_if(base.factors.begin(), base.factors.end(),
                       [](const Factor& f) { return f.kind == Factor::Kind::Q; }),
        base.factors.end());
    OperatorExpr cur(assemble(t, {base}));
    for (const auto& l : qlabels) {
      TensorExpr ll = relabel_free(L.value, L.idx, l);
      OperatorExpr factor = op_sub(OperatorExpr::q(t, l),
                                   OperatorExpr(contract_mul(TensorExpr::i_hbar(t), ll)));
      cur = op_mul_wired(cur, factor);
    }
    acc = op_add(acc, cur);
  }
  return acc;
}

// ---------------------------------------------------------------------------
// Position operators

TensorExpr assemble_F(const PositionInputs& in, const std::string& i, const std::string& j) {
  TablePtr t = in.f.table();
  TensorExpr F = contract_mul(in.f, TensorExpr::symbol(t, "delta", {i, j}));
  if (!in.g.empty())
    F = add(F, contract_mul(relabel_free(in.g, in.g_idx, i), TensorExpr::symbol(t, "p", {j})));
  if (!in.h.empty())
    F = add(F, contract_mul(TensorExpr::symbol(t, "p", {i}), relabel_free(in.h, in.h_idx, j)));
  return F;
}

namespace {

OperatorExpr append_q(const TensorExpr& e, const std::string& l) {
  std::vector<Monomial> ms;
  for (const auto& m : e.monomials()) {
    Monomial w = m;
    Factor q;
    q.kind = Factor::Kind::Q;
    q.sym = "q";
    q.idx = {l};
    w.factors.push_back(std::move(q));
    ms.push_back(std::move(w));
  }
  return OperatorExpr(assemble(e.table(), std::move(ms)));
}

}  // namespace

OperatorExpr build_position(const PositionInputs& in, const std::optional<LogDerivative>& L,
                            const std::string& i) {
  TablePtr t = in.f.table();
  const std::string j = "@j";
  TensorExpr F = assemble_F(in, i, j);
  OperatorExpr x = append_q(F, j);
  TensorExpr divF = derive_contract(F, j);
  x = op_add(x, OperatorExpr(scale(contract_mul(TensorExpr::i_hbar(t), divF), Rational(1, 2))));
  if (L) {
    TensorExpr lw = relabel_free(L->value, L->idx, j);
    x = op_sub(x, OperatorExpr(contract_mul(TensorExpr::i_hbar(t), contract_mul(F, lw))));
  }
  return x;
}

Placement Placement::full_swap() {
  Placement p;
  p.swap_all = true;
  return p;
}

Placement Placement::canonical() { return Placement{}; }

namespace {

// One F-entry monomial with the auxiliary operator inserted at `depth` within
// its ordered momentum factors, normal-ordered:
//   prefix q suffix = (monomial) q + i hbar sum_{s >= depth} delta[qidx,
//   label_s] * (monomial minus that p factor)
std::vector<Monomial> reorder_monomial(const Monomial& m,
                                       const std::vector<std::size_t>& p_positions,
                                       const std::string& qidx, int depth) {
  if (depth < 0 || depth > static_cast<int>(p_positions.size()))
    throw AlgebraError("reorder placement depth out of range");
  std::vector<Monomial> out;
  Monomial canon = m;
  Factor q;
  q.kind = Factor::Kind::Q;
  q.sym = "q";
  q.idx = {qidx};
  canon.factors.push_back(q);
  out.push_back(std::move(canon));
  for (std::size_t s = depth; s < p_positions.size(); ++s) {
    Monomial extra = m;
    const std::string moved = m.factors[p_positions[s]].idx[0];
    extra.factors.erase(extra.factors.begin() + p_positions[s]);
    Factor d;
    d.sym = "delta";
    d.idx = {qidx, moved};
    extra.factors.push_back(std::move(d));
    extra.hbar += 1;
    extra.ipow += 1;
    out.push_back(std::move(extra));
  }
  return out;
}

int pick_depth(const std::vector<int>& depths, bool swap_all, std::size_t ordinal,
               std::size_t max_depth) {
  if (swap_all) return 0;
  if (depths.empty()) return static_cast<int>(max_depth);
  if (ordinal >= depths.size()) throw AlgebraError("placement does not cover every monomial");
  return depths[ordinal];
}

std::vector<std::size_t> momentum_positions(const Monomial& m) {
  std::vector<std::size_t> pos;
  for (std::size_t fi = 0; fi < m.factors.size(); ++fi)
    if (m.factors[fi].kind == Factor::Kind::Tensor && m.factors[fi].sym == "p") pos.push_back(fi);
  return pos;
}

}  // namespace

OperatorExpr reorder_position(const PositionInputs& in, const Placement& placement,
                              const std::string& i) {
  TablePtr t = in.f.table();
  std::vector<Monomial> terms;

  // f-entry: monomial * q_i; momentum factors are the monomial's own
  const auto& f_mons = in.f.monomials();
  for (std::size_t k = 0; k < f_mons.size(); ++k) {
    auto pos = momentum_positions(f_mons[k]);
    int r = pick_depth(placement.f, placement.swap_all, k, pos.size());
    auto ts = reorder_monomial(f_mons[k], pos, i, r);
    terms.insert(terms.end(), ts.begin(), ts.end());
  }

  // g-entry: monomial * p_t q_t; the contracted momentum factor sits last
  if (!in.g.empty()) {
    auto g_i = relabel_free(in.g, in.g_idx, i);
    const auto& g_mons = g_i.monomials();
    for (std::size_t k = 0; k < g_mons.size(); ++k) {
      Monomial m = g_mons[k];
      auto pos = momentum_positions(m);
      Factor pt;
      pt.sym = "p";
      pt.idx = {"@t"};
      m.factors.push_back(std::move(pt));
      pos.push_back(m.factors.size() - 1);
      int r = pick_depth(placement.g, placement.swap_all, k, pos.size());
      auto ts = reorder_monomial(m, pos, "@t", r);
      terms.insert(terms.end(), ts.begin(), ts.end());
    }
  }

  // h-entry: p_i * monomial * q_t; the free-index momentum factor sits first
  if (!in.h.empty()) {
    auto h_t = relabel_free(in.h, in.h_idx, "@t");
    const auto& h_mons = h_t.monomials();
    for (std::size_t k = 0; k < h_mons.size(); ++k) {
      Monomial m = h_mons[k];
      Factor pi;
      pi.sym = "p";
      pi.idx = {i};
      m.factors.insert(m.factors.begin(), std::move(pi));
      std::vector<std::size_t> pos;
      pos.push_back(0);
      auto rest = momentum_positions(m);
      for (auto fi : rest)
        if (fi != 0) pos.push_back(fi);
      int r = pick_depth(placement.h, placement.swap_all, k, pos.size());
      auto ts = reorder_monomial(m, pos, "@t", r);
      terms.insert(terms.end(), ts.begin(), ts.end());
    }
  }

  OperatorExpr x(assemble(t, std::move(terms)));

  // the symmetrization term is kept exactly as in the canonical construction
  TensorExpr F = assemble_F(in, i, "@j");
  TensorExpr divF = derive_contract(F, "@j");
  return op_add(x, OperatorExpr(scale(contract_mul(TensorExpr::i_hbar(t), divF), Rational(1, 2))));
}

}  // namespace anisogup
