#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "anisogup/operators.hpp"
#include "anisogup/tensor.hpp"

namespace anisogup {

struct TensorDecl {
  std::string name;
  int rank = 0;
  bool symmetric = false;
  int grading = 1;
};

// Source-level expression kept for round-tripping; semantic form built on a
// fresh table by ModelSpec::realize().
struct AnsatzDecl {
  enum class Kind { PowerFamily, GradedPoly, ExplicitL };
  Kind kind = Kind::PowerFamily;
  std::string name;
  std::vector<std::string> atoms;       // power family
  std::vector<std::string> basis_src;   // graded poly basis monomials (DSL text)
  int order = 0;                        // graded poly grading bound
  std::string explicit_idx;             // explicit L free index
  std::string explicit_src;             // explicit L (DSL text)
};

struct ModelSpec {
  std::string name;
  int dim = 3;  // 0 = keep the dimension symbolic
  std::vector<TensorDecl> tensors;
  std::vector<std::string> radials;
  std::vector<std::pair<std::string, std::string>> atoms;  // name, DSL text
  std::string f_src = "1";
  std::string g_idx, g_src;  // empty = absent
  std::string h_idx, h_src;
  std::vector<AnsatzDecl> ansatze;

  const AnsatzDecl* ansatz(const std::string& name) const;
};

// A model instantiated on its own symbol table. Built fresh per check so the
// table can be extended (e.g. ad-hoc atoms) without cross-talk.
struct RealizedModel {
  ModelSpec spec;
  TablePtr table;
  TensorExpr f;
  TensorExpr g;  // free index "i" when present, else zero
  TensorExpr h;  // free index "i" when present, else zero

  PositionInputs position_inputs() const;
  TensorExpr F(const std::string& i, const std::string& j) const;
  // substitutes the model's numeric dimension (no-op when symbolic)
  TensorExpr pin_dim(const TensorExpr& e) const;
  OperatorExpr pin_dim(const OperatorExpr& e) const;
};

RealizedModel realize(const ModelSpec& spec);
RealizedModel realize(const ModelSpec& spec, int dim_override);

// Concrete transform values for checks: a realized L_j = d_j ln C.
LogDerivative realize_power_transform(const RealizedModel& m, const std::vector<std::string>& atoms,
                                      const std::vector<Rational>& exponents);
LogDerivative realize_explicit_transform(const RealizedModel& m, const AnsatzDecl& decl);

// Renders a ModelSpec back to its DSL form (parse . render is the identity
// up to canonical expression layout).
std::string render_model(const ModelSpec& spec);

}  // namespace anisogup
