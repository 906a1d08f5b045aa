#pragma once

#include <optional>

#include "anisogup/tensor.hpp"

namespace anisogup {

// Normal-ordered element of the auxiliary algebra: every term is a momentum
// coefficient times a (commuting) product of q factors standing to the right.
// Internally the q factors live as inert Factor::Kind::Q entries of the
// underlying tensor monomials; [q_i, F(p)] = i hbar d_i F is the single
// rewrite rule used by multiplication.
class OperatorExpr {
 public:
  OperatorExpr() = default;
  explicit OperatorExpr(TensorExpr body) : body_(std::move(body)) {}

  static OperatorExpr zero(TablePtr t) { return OperatorExpr(TensorExpr::zero(std::move(t))); }
  static OperatorExpr coeff(TensorExpr c) { return OperatorExpr(std::move(c)); }
  static OperatorExpr q(TablePtr t, const std::string& idx);

  const TensorExpr& body() const { return body_; }
  TablePtr table() const { return body_.table(); }

 private:
  TensorExpr body_;
};

OperatorExpr op_add(const OperatorExpr& a, const OperatorExpr& b);
OperatorExpr op_sub(const OperatorExpr& a, const OperatorExpr& b);
OperatorExpr op_negate(const OperatorExpr& a);

// Product in normal order; free-index names must be disjoint.
OperatorExpr op_mul(const OperatorExpr& a, const OperatorExpr& b);
// Einstein variant: shared free names contract (internal wiring).
OperatorExpr op_mul_wired(const OperatorExpr& a, const OperatorExpr& b);

OperatorExpr commutator(const OperatorExpr& a, const OperatorExpr& b);

int q_degree(const OperatorExpr& a);

// Coefficient of the requested q multiset, exposed through the given fresh
// labels; supported for multisets of size 0, 1 and 2.
TensorExpr coefficient_of(const OperatorExpr& a, const std::vector<std::string>& qlabels);

bool op_is_zero(const OperatorExpr& a);
OperatorExpr op_truncate(const OperatorExpr& a, int order);
OperatorExpr op_substitute_dim(const OperatorExpr& a, const Rational& dim);
std::string to_string(const OperatorExpr& a);

// The transformation C(p) enters the algebra only through L_j = d_j ln C.
struct LogDerivative {
  TensorExpr value;      // one free index
  std::string idx;       // its name
  bool claims_integrable = true;
};

// d_i L_j - d_j L_i == 0; required before conjugation is meaningful.
bool is_integrable(const LogDerivative& L);

// C A C^-1 realized as the substitution q_j -> q_j - i hbar L_j with full
// operator re-multiplication.
OperatorExpr apply_transform(const OperatorExpr& a, const LogDerivative& L);

// F_ij assembled as f d_ij + g_i p_j + p_i h_j; inputs are index-free f and
// one-free-index g, h (any of them may be zero).
struct PositionInputs {
  TensorExpr f;
  TensorExpr g;
  std::string g_idx;
  TensorExpr h;
  std::string h_idx;
};

TensorExpr assemble_F(const PositionInputs& in, const std::string& i, const std::string& j);

// x'_i = F_ij q_j + 1/2 i hbar d_j F_ij - i hbar F_ij L_j.
OperatorExpr build_position(const PositionInputs& in, const std::optional<LogDerivative>& L,
                            const std::string& i);

// Insertion depths for the auxiliary operator inside each monomial of each
// F entry; 0 = fully left of the momentum factors, max = canonical.
struct Placement {
  // depth per canonical monomial ordinal, one vector per entry; an absent
  // entry means canonical depths
  std::vector<int> f, g, h;
  static Placement full_swap();  // all depths 0
  static Placement canonical();  // empty = all depths max
  bool swap_all = false;
};

// Position operator with q inserted at the requested depths, normal-ordered;
// the symmetrization term is kept exactly as in build_position.
OperatorExpr reorder_position(const PositionInputs& in, const Placement& placement,
                              const std::string& i);

}  // namespace anisogup
