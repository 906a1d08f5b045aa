#include "anisogup/model.hpp"

#include <sstream>

#include "anisogup/parser.hpp"

namespace anisogup {

const AnsatzDecl* ModelSpec::ansatz(const std::string& n) const {
  for (const auto& a : ansatze)
    if (a.name == n) return &a;
  return nullptr;
}

RealizedModel realize(const ModelSpec& spec) { return realize(spec, spec.dim); }

RealizedModel realize(const ModelSpec& spec, int dim_override) {
  RealizedModel rm;
  rm.spec = spec;
  rm.spec.dim = dim_override;
  auto table = SymbolTable::create();
  for (const auto& d : spec.tensors) table->declare_tensor(d.name, d.rank, d.symmetric, d.grading);
  for (const auto& r : spec.radials) table->declare_radial(r);
  TablePtr t = table;
  for (const auto& [name, src] : spec.atoms) table->register_atom(name, parse_expr(t, src));
  rm.table = t;
  rm.f = parse_expr(t, spec.f_src);
  rm.g = spec.g_src.empty() ? TensorExpr::zero(t)
                            : relabel_free(parse_expr(t, spec.g_src), spec.g_idx, "i");
  rm.h = spec.h_src.empty() ? TensorExpr::zero(t)
                            : relabel_free(parse_expr(t, spec.h_src), spec.h_idx, "i");
  return rm;
}

PositionInputs RealizedModel::position_inputs() const { return PositionInputs{f, g, "i", h, "i"}; }

TensorExpr RealizedModel::F(const std::string& i, const std::string& j) const {
  return assemble_F(position_inputs(), i, j);
}

TensorExpr RealizedModel::pin_dim(const TensorExpr& e) const {
  if (spec.dim <= 0) return e;
  return substitute_dim(e, Rational(spec.dim));
}

OperatorExpr RealizedModel::pin_dim(const OperatorExpr& e) const {
  if (spec.dim <= 0) return e;
  return op_substitute_dim(e, Rational(spec.dim));
}

LogDerivative realize_power_transform(const RealizedModel& m, const std::vector<std::string>& atoms,
                                      const std::vector<Rational>& exponents) {
  if (atoms.size() != exponents.size())
    throw AlgebraError("power transform: one exponent per atom required");
  TensorExpr L = TensorExpr::zero(m.table);
  for (std::size_t k = 0; k < atoms.size(); ++k) {
    const TensorExpr* def = m.table->atom(atoms[k]);
    if (!def) throw AlgebraError("power transform: unregistered atom " + atoms[k]);
    auto term = divide_by_atom(derive(*def, "@l"), atoms[k]);
    L = add(L, scale(term, exponents[k]));
  }
  return LogDerivative{L, "@l", true};
}

LogDerivative realize_explicit_transform(const RealizedModel& m, const AnsatzDecl& decl) {
  if (decl.kind != AnsatzDecl::Kind::ExplicitL)
    throw AlgebraError("ansatz '" + decl.name + "' is not an explicit L");
  TensorExpr L = parse_expr(m.table, decl.explicit_src);
  return LogDerivative{relabel_free(L, decl.explicit_idx, "@l"), "@l", true};
}

std::string render_model(const ModelSpec& spec) {
  std::ostringstream os;
  os << "model \"" << spec.name << "\" {\n";
  if (spec.dim > 0) os << "  dim " << spec.dim << "\n";
  for (const auto& d : spec.tensors) {
    os << "  tensor " << d.name << " rank " << d.rank;
    if (d.symmetric) os << " symmetric";
    os << " order " << d.grading << "\n";
  }
  for (const auto& r : spec.radials) os << "  radial " << r << "\n";
  for (const auto& [n, src] : spec.atoms) os << "  scalaratom " << n << " = " << src << "\n";
  os << "  f = " << spec.f_src << "\n";
  if (!spec.g_src.empty()) os << "  g[" << spec.g_idx << "] = " << spec.g_src << "\n";
  if (!spec.h_src.empty()) os << "  h[" << spec.h_idx << "] = " << spec.h_src << "\n";
  for (const auto& a : spec.ansatze) {
    os << "  ansatz \"" << a.name << "\" ";
    switch (a.kind) {
      case AnsatzDecl::Kind::PowerFamily:
        os << "power";
        for (const auto& s : a.atoms) os << " " << s;
        break;
      case AnsatzDecl::Kind::GradedPoly:
        os << "poly " << a.order << " : ";
        for (std::size_t i = 0; i < a.basis_src.size(); ++i) {
          if (i) os << " , ";
          os << a.basis_src[i];
        }
        break;
      case AnsatzDecl::Kind::ExplicitL:
        os << "explicit [" << a.explicit_idx << "] : " << a.explicit_src;
        break;
    }
    os << "\n";
  }
  os << "}\n";
  return os.str();
}

}  // namespace anisogup
