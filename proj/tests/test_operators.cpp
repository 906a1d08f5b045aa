#include "doctest.h"

#include <random>

#include "anisogup/library.hpp"
#include "anisogup/operators.hpp"

using namespace anisogup;

namespace {

std::shared_ptr<SymbolTable> base_table() {
  auto t = SymbolTable::create();
  t->declare_tensor("alpha", 1, false, 1);
  t->declare_tensor("beta", 2, true, 1);
  return t;
}

TensorExpr pp(const TablePtr& t) {
  return contract_mul(TensorExpr::symbol(t, "p", {"z"}), TensorExpr::symbol(t, "p", {"z"}));
}

}  // namespace

TEST_CASE("q p commutator gives i hbar delta") {
  TablePtr t = base_table();
  auto qi = OperatorExpr::q(t, "i");
  auto pj = OperatorExpr::coeff(TensorExpr::symbol(t, "p", {"j"}));
  auto c = commutator(qi, pj);
  auto expect = contract_mul(TensorExpr::i_hbar(t), TensorExpr::symbol(t, "delta", {"i", "j"}));
  CHECK(is_zero(sub(c.body(), expect)));
}

TEST_CASE("q times identity and q on p.p") {
  TablePtr t = base_table();
  auto qi = OperatorExpr::q(t, "i");
  auto one = OperatorExpr::coeff(TensorExpr::constant(t, 1));
  CHECK(is_zero(sub(op_mul(qi, one).body(), qi.body())));

  auto w = OperatorExpr::coeff(pp(t));
  auto prod = op_mul(qi, w);
  // (p.p) q_i + 2 i hbar p_i
  auto expect = op_add(op_mul(w, OperatorExpr::q(t, "i")),
                       OperatorExpr::coeff(scale(
                           contract_mul(TensorExpr::i_hbar(t), TensorExpr::symbol(t, "p", {"i"})),
                           2)));
  CHECK(op_is_zero(op_sub(prod, expect)));
}

TEST_CASE("commutator of a scalar operator with itself vanishes") {
  TablePtr t = base_table();
  auto A = op_add(OperatorExpr::coeff(pp(t)),
                  op_mul_wired(OperatorExpr::coeff(TensorExpr::symbol(t, "p", {"u"})),
                               OperatorExpr::q(t, "u")));
  CHECK(op_is_zero(commutator(A, A)));
}

TEST_CASE("op_mul rejects colliding free indices") {
  TablePtr t = base_table();
  auto qi = OperatorExpr::q(t, "i");
  auto pi = OperatorExpr::coeff(TensorExpr::symbol(t, "p", {"i"}));
  CHECK_THROWS_AS(op_mul(qi, pi), AlgebraError);
}

TEST_CASE("q_degree and coefficient_of") {
  TablePtr t = base_table();
  auto f = add(TensorExpr::constant(t, 1), pp(t));
  PositionInputs in{f, TensorExpr::zero(t), "i", TensorExpr::zero(t), "i"};
  auto x = build_position(in, std::nullopt, "i");
  CHECK(q_degree(x) == 1);
  // coefficient of q_j in x_i is f delta_ij
  auto c = coefficient_of(x, {"j"});
  auto expect = contract_mul(f, TensorExpr::symbol(t, "delta", {"i", "j"}));
  CHECK(is_zero(sub(c, expect)));
  CHECK(q_degree(OperatorExpr::coeff(pp(t))) == 0);
}

namespace {

OperatorExpr random_scalar_op(const TablePtr& t, std::mt19937& rng) {
  auto rnd_coeff = [&]() {
    std::vector<TensorExpr> pool = {
        TensorExpr::constant(t, Rational(static_cast<int>(rng() % 5) - 2)),
        pp(t),
        contract_mul(TensorExpr::symbol(t, "alpha", {"z"}), TensorExpr::symbol(t, "p", {"z"})),
        contract_mul(contract_mul(TensorExpr::symbol(t, "p", {"y"}),
                                  TensorExpr::symbol(t, "beta", {"y", "w"})),
                     TensorExpr::symbol(t, "p", {"w"})),
    };
    return pool[rng() % pool.size()];
  };
  OperatorExpr acc = OperatorExpr::coeff(rnd_coeff());
  int deg = static_cast<int>(rng() % 3);
  for (int d = 0; d < deg; ++d) {
    auto qpart = op_mul_wired(OperatorExpr::coeff(TensorExpr::symbol(t, "p", {"u"})),
                              OperatorExpr::q(t, "u"));
    if (rng() % 2)
      qpart = op_mul_wired(OperatorExpr::coeff(TensorExpr::symbol(t, "alpha", {"v"})),
                           OperatorExpr::q(t, "v"));
    acc = op_add(acc, op_mul_wired(OperatorExpr::coeff(rnd_coeff()), qpart));
  }
  return acc;
}

}  // namespace

TEST_CASE("commutator antisymmetry on random operators") {
  TablePtr t = base_table();
  std::mt19937 rng(11);
  for (int trial = 0; trial < 10; ++trial) {
    auto A = random_scalar_op(t, rng);
    auto B = random_scalar_op(t, rng);
    CHECK(op_is_zero(op_add(commutator(A, B), commutator(B, A))));
  }
}

TEST_CASE("Jacobi identity on random operators") {
  TablePtr t = base_table();
  std::mt19937 rng(23);
  for (int trial = 0; trial < 5; ++trial) {
    auto A = random_scalar_op(t, rng);
    auto B = random_scalar_op(t, rng);
    auto C = random_scalar_op(t, rng);
    auto j = op_add(op_add(commutator(A, commutator(B, C)), commutator(B, commutator(C, A))),
                    commutator(C, commutator(A, B)));
    CHECK(op_is_zero(j));
  }
}

TEST_CASE("apply_transform basics") {
  TablePtr t = base_table();
  // L_j = alpha_j is integrable
  LogDerivative L{TensorExpr::symbol(t, "alpha", {"j"}), "j", true};
  CHECK(is_integrable(L));

  auto qi = OperatorExpr::q(t, "i");
  auto got = apply_transform(qi, L);
  auto expect = op_sub(qi, OperatorExpr::coeff(contract_mul(
                               TensorExpr::i_hbar(t), TensorExpr::symbol(t, "alpha", {"i"}))));
  CHECK(op_is_zero(op_sub(got, expect)));

  // the momentum operator is unaffected
  auto pi = OperatorExpr::coeff(TensorExpr::symbol(t, "p", {"i"}));
  CHECK(op_is_zero(op_sub(apply_transform(pi, L), pi)));

  // non-gradient L is rejected
  auto nonint = contract_mul(TensorExpr::symbol(t, "beta", {"j", "z"}),
                             contract_mul(TensorExpr::symbol(t, "p", {"z"}),
                                          contract_mul(TensorExpr::symbol(t, "alpha", {"y"}),
                                                       TensorExpr::symbol(t, "p", {"y"}))));
  // beta_jz p_z (alpha.p): curl does not vanish
  LogDerivative bad{nonint, "j", false};
  CHECK_FALSE(is_integrable(bad));
  CHECK_THROWS_AS(apply_transform(qi, bad), AlgebraError);
}

TEST_CASE("apply_transform is an algebra morphism") {
  TablePtr t = base_table();
  LogDerivative L{scale(contract_mul(TensorExpr::symbol(t, "beta", {"j", "z"}),
                                     TensorExpr::symbol(t, "p", {"z"})),
                        2),
                  "j", true};
  REQUIRE(is_integrable(L));
  std::mt19937 rng(5);
  for (int trial = 0; trial < 4; ++trial) {
    auto A = random_scalar_op(t, rng);
    auto B = random_scalar_op(t, rng);
    auto lhs = apply_transform(op_mul(A, B), L);
    auto rhs = op_mul(apply_transform(A, L), apply_transform(B, L));
    CHECK(op_is_zero(op_sub(lhs, rhs)));
  }
}

TEST_CASE("build_position reproduces the radial-f form") {
  auto rm = realize(*find_model("isotropic-radial"));
  TablePtr t = rm.table;
  // pure f model: strip g by hand
  PositionInputs in{TensorExpr::radial(t, "fr"), TensorExpr::zero(t), "i", TensorExpr::zero(t),
                    "i"};
  auto x = build_position(in, std::nullopt, "i");
  // f q_i + 1/2 i hbar d_i f
  auto expect = op_add(
      op_mul_wired(OperatorExpr::coeff(TensorExpr::radial(t, "fr")), OperatorExpr::q(t, "i")),
      OperatorExpr::coeff(scale(
          contract_mul(TensorExpr::i_hbar(t), derive(TensorExpr::radial(t, "fr"), "i")),
          Rational(1, 2))));
  CHECK(op_is_zero(op_sub(x, expect)));
}

TEST_CASE("build_position for F = delta is q") {
  auto rm = realize(*find_model("baseline"));
  auto x = build_position(rm.position_inputs(), std::nullopt, "i");
  CHECK(op_is_zero(op_sub(x, OperatorExpr::q(rm.table, "i"))));
}

TEST_CASE("g-model position operator matches the (d+2)/2 coefficient") {
  auto rm = realize(*find_model("g-single"));
  TablePtr t = rm.table;
  auto x = rm.pin_dim(build_position(rm.position_inputs(), std::nullopt, "i"));
  // q_i + wg_i (p.q + 2 i hbar) for d = 2 at dim 3
  auto wg_i = contract_mul(TensorExpr::symbol(t, "betap", {"i", "a"}),
                           TensorExpr::symbol(t, "p", {"a"}));
  auto pq = op_mul_wired(OperatorExpr::coeff(TensorExpr::symbol(t, "p", {"u"})),
                         OperatorExpr::q(t, "u"));
  auto expect = op_add(OperatorExpr::q(t, "i"),
                       op_mul_wired(OperatorExpr::coeff(wg_i),
                                    op_add(pq, OperatorExpr::coeff(scale(
                                                   TensorExpr::i_hbar(t), 2)))));
  CHECK(op_is_zero(op_sub(x, expect)));
}

TEST_CASE("apply_transform on built position equals building with L") {
  for (const char* name : {"f-single", "g-single", "kempf-aniso", "h-constant-c"}) {
    auto rm = realize(*find_model(name));
    LogDerivative L = realize_power_transform(rm, {rm.spec.atoms[0].first}, {Rational(1, 2)});
    auto via_transform = apply_transform(build_position(rm.position_inputs(), std::nullopt, "i"), L);
    auto direct = build_position(rm.position_inputs(), L, "i");
    CHECK(op_is_zero(op_sub(via_transform, direct)));
  }
}

TEST_CASE("full-depth reorder equals the canonical construction") {
  for (const char* name : {"f-general", "g-single", "h-rank2-d", "kempf-aniso"}) {
    auto rm = realize(*find_model(name));
    auto reordered = reorder_position(rm.position_inputs(), Placement::canonical(), "i");
    auto built = build_position(rm.position_inputs(), std::nullopt, "i");
    CHECK(op_is_zero(op_sub(reordered, built)));
  }
}

TEST_CASE("full swap adds i hbar d_j F_ij") {
  for (const char* name : {"f-general", "g-single", "h-constant-c", "kempf-aniso-c"}) {
    auto rm = realize(*find_model(name));
    auto swapped = reorder_position(rm.position_inputs(), Placement::full_swap(), "i");
    auto built = build_position(rm.position_inputs(), std::nullopt, "i");
    auto diff = op_sub(swapped, built);
    auto expect = contract_mul(TensorExpr::i_hbar(rm.table),
                               derive_contract(rm.F("i", "@j"), "@j"));
    CHECK(op_is_zero(op_sub(diff, OperatorExpr::coeff(expect))));
  }
}

TEST_CASE("isotropic split reorder difference") {
  // f containing (p.p)^2, q inserted between the two w factors:
  // difference = i hbar * w * d_i(w) = 2 i hbar (p.p) p_i
  auto t = SymbolTable::create();
  TablePtr ct = t;
  auto w = contract_mul(TensorExpr::symbol(ct, "p", {"a"}), TensorExpr::symbol(ct, "p", {"a"}));
  auto f = add(TensorExpr::constant(ct, 1), mul(w, w));
  PositionInputs in{f, TensorExpr::zero(ct), "i", TensorExpr::zero(ct), "i"};
  Placement pl;
  pl.f = {0, 2};  // constant monomial, then depth 2 of 4 inside w^2
  auto reordered = reorder_position(in, pl, "i");
  auto built = build_position(in, std::nullopt, "i");
  auto diff = op_sub(reordered, built);
  auto expect = scale(contract_mul(TensorExpr::i_hbar(ct),
                                   contract_mul(w, TensorExpr::symbol(ct, "p", {"i"}))),
                      2);
  CHECK(op_is_zero(op_sub(diff, OperatorExpr::coeff(expect))));
}

TEST_CASE("reorder placement depth out of range") {
  auto rm = realize(*find_model("f-single"));
  Placement pl;
  pl.f = {0, 5};
  CHECK_THROWS_AS(reorder_position(rm.position_inputs(), pl, "i"), AlgebraError);
}
