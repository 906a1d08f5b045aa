#pragma once

#include <optional>
#include <string>
#include <vector>

#include "anisogup/model.hpp"
#include "anisogup/operators.hpp"
#include "anisogup/solver.hpp"

namespace anisogup {

enum class Status { Holds, Fails, Solved, NoSolution };

std::string status_name(Status s);
bool status_ok(Status s);  // holds/solved pass, fails/no-solution do not

struct Mode {
  bool exact = true;
  int order = 0;
  static Mode Exact() { return Mode{true, 0}; }
  static Mode Order(int k) { return Mode{false, k}; }
  std::string name() const { return exact ? "exact" : "order-" + std::to_string(order); }
};

struct CheckReport {
  std::string model;
  std::string check;
  std::string mode;
  Status status = Status::Fails;
  std::string residual;  // canonical rendering ("0" when empty)
  std::vector<std::pair<std::string, std::string>> solution;
  std::vector<std::string> free_unknowns;
  std::string note;
  double wall_ms = 0.0;
};

enum class CheckKind { XxInvariance, Reordering };

// Criterion (i): invariance of [x_i, x_j] under the transformation with
// log-derivative L. Decides on the antisymmetric part of
// T_kl = F_km (d_m F_ln) L_n and cross-validates against the operator-level
// [x'_i, x'_j] - [x_i, x_j]; a disagreement between the two paths throws.
CheckReport check_xx_invariance(const RealizedModel& m, const LogDerivative& L, Mode mode);

// Criterion (ii): residual of (reordered position) - (transformed position),
// a pure momentum function; for the full swap it reduces to
// i hbar (d_j F_ij + F_ij L_j).
CheckReport check_reordering(const RealizedModel& m, const Placement& placement,
                             const std::optional<LogDerivative>& L, Mode mode);

// Solves an ansatz family against one of the two criteria. The residual is
// affine in the unknowns (power family: exponents; graded polynomial:
// coefficients, after multiplying the condition through by C); each canonical
// monomial coefficient is equated to zero and the exact-rational system is
// eliminated. Solutions are verified by re-substitution.
//
// Status semantics: the reordering condition is inhomogeneous, so any
// consistent system counts as solved. The invariance condition is homogeneous
// (L = 0 always preserves the commutators), so "solved" requires a
// nontrivial family (at least one free unknown); a system forcing every
// unknown to zero reports no-solution.
CheckReport solve_transform(const RealizedModel& m, CheckKind kind, const AnsatzDecl& ansatz,
                            Mode mode, const Placement& placement = Placement::full_swap());

// Symmetricity integrand condition, with C given as a power family:
// d_j(F_ij C^-2) - 2 F_i C^-2 = 0 checked on the C^2-cleared form
// d_j F_ij - 2 F_ij L_j - 2 F_i with F_i = 1/2 d_j F_ij - F_ij L_j.
// With use_constructed_Fi = false the naive F_i = 0 is used instead and the
// defect is d_j F_ij, nonzero away from F = delta.
CheckReport check_symmetricity(const RealizedModel& m, const std::vector<std::string>& atoms,
                               const std::vector<Rational>& exponents, bool use_constructed_Fi);

// [x_i, x_j] residual of the model as built.
CheckReport check_commutativity(const RealizedModel& m, Mode mode);

// g_i = f d_i f / (f - p . grad f); registers the denominator atom under
// `atom_name` on the given table. Throws if f - p . grad f has vanishing
// constant term.
TensorExpr commutative_g_from_f(const std::shared_ptr<SymbolTable>& table, const TensorExpr& f,
                                const std::string& atom_name);

// Conventional-algebra checks for L_ij = q_i p_j - q_j p_i plus computed
// values of [H, L] (and, for g-models, of the x-form angular momentum); the
// computed values are emitted, not asserted.
CheckReport check_angular_momentum(const RealizedModel& m);

// kappa = d models: T_i = p_i/(1+wf) with [x_i, T_j] = i hbar delta_ij at
// order 1; the exact residual is emitted.
CheckReport check_translation_generator(const RealizedModel& m);

// Regression battery over the built-in library identities.
std::vector<CheckReport> check_summary_models();

}  // namespace anisogup
