#include "doctest.h"

#include <random>

#include "anisogup/tensor.hpp"

using namespace anisogup;

namespace {

std::shared_ptr<SymbolTable> make_table() {
  auto t = SymbolTable::create();
  t->declare_tensor("alpha", 1, false, 1);
  t->declare_tensor("beta", 2, true, 1);
  t->declare_tensor("c", 1, false, 1);
  t->declare_tensor("nsym", 2, false, 1);
  t->declare_radial("fr");
  return t;
}

TensorExpr sym(const TablePtr& t, const std::string& n, std::vector<std::string> idx) {
  return TensorExpr::symbol(t, n, idx);
}

}  // namespace

TEST_CASE("additive inverse cancels") {
  auto t = make_table();
  auto pi = sym(t, "p", {"i"});
  CHECK(is_zero(add(pi, negate(pi))));
}

TEST_CASE("like terms merge") {
  auto t = make_table();
  auto pbp = contract_mul(contract_mul(sym(t, "p", {"a"}), sym(t, "beta", {"a", "b"})),
                          sym(t, "p", {"b"}));
  auto two = add(pbp, pbp);
  REQUIRE(two.monomials().size() == 1);
  CHECK(two.monomials()[0].coeff == Rational(2));
}

TEST_CASE("mixed-rank sum keeps two monomials with shared free index") {
  auto t = make_table();
  auto a = sym(t, "alpha", {"i"});
  auto b = contract_mul(sym(t, "beta", {"i", "j"}), sym(t, "p", {"j"}));
  auto s = add(a, b);
  CHECK(s.monomials().size() == 2);
  CHECK(s.free_indices() == std::set<std::string>{"i"});
}

TEST_CASE("add rejects free-index mismatch") {
  auto t = make_table();
  CHECK_THROWS_AS(add(sym(t, "p", {"i"}), sym(t, "p", {"j"})), AlgebraError);
}

TEST_CASE("mul unit and dummy relabeling") {
  auto t = make_table();
  auto one = TensorExpr::constant(t, 1);
  auto x = contract_mul(sym(t, "alpha", {"a"}), sym(t, "p", {"a"}));
  CHECK(to_string(mul(one, x)) == to_string(x));

  auto y = contract_mul(sym(t, "alpha", {"b"}), sym(t, "p", {"b"}));
  auto prod = mul(x, y);
  REQUIRE(prod.monomials().size() == 1);  // (alpha.p)^2 is one canonical class
  CHECK(prod.monomials()[0].factors.size() == 4);
}

TEST_CASE("mul rejects colliding free names") {
  auto t = make_table();
  CHECK_THROWS_AS(mul(sym(t, "p", {"i"}), sym(t, "alpha", {"i"})), AlgebraError);
}

TEST_CASE("triple index is rejected") {
  auto t = make_table();
  Monomial m;
  for (int k = 0; k < 3; ++k) {
    Factor f;
    f.sym = "p";
    f.idx = {"a"};
    m.factors.push_back(f);
  }
  CHECK_THROWS_AS(canonicalize(TensorExpr::from_monomials(t, {m})), AlgebraError);
}

TEST_CASE("declared symmetry canonicalizes slot order") {
  auto t = make_table();
  auto lhs = contract_mul(contract_mul(sym(t, "p", {"a"}), sym(t, "p", {"b"})),
                          sym(t, "beta", {"b", "a"}));
  auto rhs = contract_mul(contract_mul(sym(t, "p", {"a"}), sym(t, "p", {"b"})),
                          sym(t, "beta", {"a", "b"}));
  CHECK(to_string(lhs) == to_string(rhs));
  CHECK(is_zero(sub(lhs, rhs)));
}

TEST_CASE("delta contraction and trace") {
  auto t = make_table();
  auto contracted = contract_mul(sym(t, "delta", {"i", "j"}), sym(t, "p", {"j"}));
  CHECK(to_string(contracted) == "p[i]");

  auto trace = sym(t, "delta", {"i", "i"});
  REQUIRE(trace.monomials().size() == 1);
  CHECK(trace.monomials()[0].dim_pow == 1);
  CHECK(trace.monomials()[0].factors.empty());
  CHECK(to_string(substitute_dim(trace, Rational(3))) == "3");
}

TEST_CASE("is_zero on symmetric-antisymmetric contraction") {
  auto t = make_table();
  auto pp = contract_mul(sym(t, "p", {"i"}), sym(t, "p", {"j"}));
  auto b1 = contract_mul(pp, sym(t, "beta", {"i", "j"}));
  auto b2 = contract_mul(pp, sym(t, "beta", {"j", "i"}));
  CHECK(is_zero(sub(b1, b2)));
  CHECK_FALSE(is_zero(sym(t, "alpha", {"i"})));

  // non-symmetric tensor with free indices: the difference must not vanish...
  auto n1 = sym(t, "nsym", {"i", "j"});
  auto n2 = sym(t, "nsym", {"j", "i"});
  CHECK_FALSE(is_zero(sub(n1, n2)));
  // ...but full contraction against p x p symmetrizes it away
  auto c1 = contract_mul(pp, sym(t, "nsym", {"i", "j"}));
  auto c2 = contract_mul(pp, sym(t, "nsym", {"j", "i"}));
  CHECK(is_zero(sub(c1, c2)));
}

TEST_CASE("derive of p.beta.p") {
  auto t = make_table();
  auto pbp = contract_mul(contract_mul(sym(t, "p", {"a"}), sym(t, "beta", {"a", "b"})),
                          sym(t, "p", {"b"}));
  auto d = derive(pbp, "i");
  auto expect = scale(contract_mul(sym(t, "beta", {"i", "a"}), sym(t, "p", {"a"})), 2);
  CHECK(is_zero(sub(d, expect)));
}

TEST_CASE("derive of constants and index collision") {
  auto t = make_table();
  CHECK(is_zero(derive(TensorExpr::constant(t, 1), "i")));
  CHECK_THROWS_AS(derive(sym(t, "p", {"i"}), "i"), AlgebraError);
}

TEST_CASE("derive through a registered denominator") {
  auto t = SymbolTable::create();
  t->declare_tensor("betap", 2, true, 1);
  auto wg = contract_mul(contract_mul(TensorExpr::symbol(t, "p", {"a"}),
                                      TensorExpr::symbol(t, "betap", {"a", "b"})),
                         TensorExpr::symbol(t, "p", {"b"}));
  auto sdef = add(TensorExpr::constant(t, 1), wg);
  t->register_atom("sg", sdef);
  TablePtr ct = t;

  auto inv = divide_by_atom(TensorExpr::constant(ct, 1), "sg");
  auto d = derive(inv, "i");
  // -(d_i wg)/(1+wg)^2
  auto expect = negate(divide_by_atom(derive(wg, "i"), "sg", 2));
  CHECK(is_zero(sub(d, expect)));
}

TEST_CASE("radial differentiation chain") {
  auto t = make_table();
  auto f = TensorExpr::radial(t, "fr");
  auto d = derive(f, "i");
  auto expect = scale(contract_mul(TensorExpr::radial(t, "fr", 1), sym(t, "p", {"i"})), 2);
  CHECK(is_zero(sub(d, expect)));
}

TEST_CASE("commuting partial derivatives") {
  auto t = make_table();
  auto e = contract_mul(contract_mul(sym(t, "p", {"a"}), sym(t, "beta", {"a", "b"})),
                        contract_mul(sym(t, "p", {"b"}), TensorExpr::radial(t, "fr")));
  auto dij = derive(derive(e, "i"), "j");
  auto dji = derive(derive(e, "j"), "i");
  CHECK(is_zero(sub(dij, dji)));
}

TEST_CASE("Leibniz rule on random small expressions") {
  auto t = make_table();
  std::mt19937 rng(42);
  auto rand_expr = [&](const std::string& freename) {
    std::vector<TensorExpr> pool = {
        contract_mul(sym(t, "alpha", {"z"}), sym(t, "p", {"z"})),
        contract_mul(contract_mul(sym(t, "p", {"y"}), sym(t, "beta", {"y", "w"})),
                     sym(t, "p", {"w"})),
        TensorExpr::radial(t, "fr"),
        TensorExpr::constant(t, Rational(3, 2)),
    };
    TensorExpr e = pool[rng() % pool.size()];
    if (rng() % 2) e = add(e, pool[rng() % pool.size()]);
    (void)freename;
    return e;
  };
  for (int trial = 0; trial < 6; ++trial) {
    auto a = rand_expr("");
    auto b = rand_expr("");
    auto lhs = derive(mul(a, b), "i");
    auto rhs = add(mul(derive(a, "i"), b), mul(a, derive(b, "i")));
    CHECK(is_zero(sub(lhs, rhs)));
  }
}

TEST_CASE("canonical uniqueness under factor and dummy shuffling") {
  auto t = make_table();
  std::mt19937 rng(7);
  // p.beta.p * alpha.p * fr with scrambled dummy names and factor order
  std::vector<std::string> names = {"a", "b", "u", "v", "w", "x", "y", "z"};
  for (int trial = 0; trial < 30; ++trial) {
    std::shuffle(names.begin(), names.end(), rng);
    Monomial m;
    auto add_factor = [&](const std::string& s, std::vector<std::string> idx, bool radial) {
      Factor f;
      f.kind = radial ? Factor::Kind::Radial : Factor::Kind::Tensor;
      f.sym = s;
      f.idx = idx;
      m.factors.push_back(f);
    };
    add_factor("p", {names[0]}, false);
    add_factor("beta", (trial % 2) ? std::vector<std::string>{names[0], names[1]}
                                   : std::vector<std::string>{names[1], names[0]},
               false);
    add_factor("p", {names[1]}, false);
    add_factor("alpha", {names[2]}, false);
    add_factor("p", {names[2]}, false);
    add_factor("fr", {}, true);
    std::shuffle(m.factors.begin(), m.factors.end(), rng);
    auto e = canonicalize(TensorExpr::from_monomials(t, {m}));
    static std::string first;
    if (trial == 0) first = to_string(e);
    CHECK(to_string(e) == first);
  }
}

TEST_CASE("truncate geometric expansion") {
  auto t = SymbolTable::create();
  t->declare_tensor("betap", 2, true, 1);
  auto wg = contract_mul(contract_mul(TensorExpr::symbol(t, "p", {"a"}),
                                      TensorExpr::symbol(t, "betap", {"a", "b"})),
                         TensorExpr::symbol(t, "p", {"b"}));
  t->register_atom("sg", add(TensorExpr::constant(t, 1), wg));
  TablePtr ct = t;
  auto inv = divide_by_atom(TensorExpr::constant(ct, 1), "sg");
  auto tr = truncate(inv, 1);
  auto expect = sub(TensorExpr::constant(ct, 1), wg);
  CHECK(is_zero(sub(tr, expect)));
}

TEST_CASE("truncate drops higher gradings") {
  auto t = make_table();
  auto ap = contract_mul(sym(t, "alpha", {"a"}), sym(t, "p", {"a"}));
  auto cp = contract_mul(sym(t, "c", {"b"}), sym(t, "p", {"b"}));
  auto prod = mul(ap, cp);  // grading 2
  CHECK(is_zero(truncate(prod, 1)));
  CHECK(is_zero(sub(truncate(prod, 2), prod)));
  CHECK_THROWS_AS(truncate(prod, -1), AlgebraError);
}

TEST_CASE("truncation is idempotent and a morphism modulo order") {
  auto t = SymbolTable::create();
  t->declare_tensor("alpha", 1, false, 1);
  auto ap = contract_mul(TensorExpr::symbol(t, "p", {"a"}), TensorExpr::symbol(t, "alpha", {"a"}));
  t->register_atom("sa", add(TensorExpr::constant(t, 1), ap));
  TablePtr ct = t;
  auto e = add(TensorExpr::constant(ct, 2),
               divide_by_atom(add(ap, mul(ap, contract_mul(TensorExpr::symbol(ct, "p", {"b"}),
                                                           TensorExpr::symbol(ct, "alpha", {"b"})))),
                              "sa"));
  for (int K : {0, 1, 2, 3}) {
    auto tK = truncate(e, K);
    CHECK(is_zero(sub(tK, truncate(tK, K))));
  }
  auto a = e;
  auto b = divide_by_atom(TensorExpr::constant(ct, 1), "sa");
  for (int K : {1, 2}) {
    auto lhs = truncate(mul(a, b), K);
    auto rhs = truncate(mul(truncate(a, K), truncate(b, K)), K);
    CHECK(is_zero(sub(lhs, rhs)));
  }
}

TEST_CASE("substitute wires slots in order") {
  auto t = make_table();
  // g.p with g replaced by kappa * alpha: (g -> 2*alpha)
  auto gp = contract_mul(sym(t, "c", {"a"}), sym(t, "p", {"a"}));
  auto rep = scale(sym(t, "alpha", {"s"}), 2);
  auto out = substitute(gp, "c", rep, {"s"});
  auto expect = scale(contract_mul(sym(t, "alpha", {"a"}), sym(t, "p", {"a"})), 2);
  CHECK(is_zero(sub(out, expect)));

  // identity replacement leaves the expression unchanged
  auto idrep = sym(t, "c", {"s"});
  CHECK(is_zero(sub(substitute(gp, "c", idrep, {"s"}), gp)));

  CHECK_THROWS_AS(substitute(gp, "c", sym(t, "beta", {"s", "u"}), {"s", "u"}), AlgebraError);
}

TEST_CASE("relabel_free renames and contracts") {
  auto t = make_table();
  auto e = sym(t, "p", {"i"});
  CHECK(to_string(relabel_free(e, "i", "k")) == "p[k]");
  auto two = contract_mul(sym(t, "p", {"i"}), sym(t, "p", {"j"}));
  auto dotted = relabel_free(two, "i", "j");
  CHECK(dotted.free_indices().empty());
}

TEST_CASE("clear_denominators certifies rational identities") {
  auto t = SymbolTable::create();
  t->declare_tensor("alpha", 1, false, 1);
  auto ap = contract_mul(TensorExpr::symbol(t, "p", {"a"}), TensorExpr::symbol(t, "alpha", {"a"}));
  auto s = add(TensorExpr::constant(t, 1), ap);
  t->register_atom("sa", s);
  TablePtr ct = t;
  // x - x*(1+ap)/(1+ap) == 0
  auto x = TensorExpr::symbol(ct, "p", {"i"});
  auto y = divide_by_atom(contract_mul(x, s), "sa");
  CHECK(is_zero(sub(x, y)));
}
