#include "anisogup/symbols.hpp"

#include <algorithm>
#include <stdexcept>

#include "anisogup/tensor.hpp"

namespace anisogup {

std::shared_ptr<SymbolTable> SymbolTable::create() {
  auto t = std::shared_ptr<SymbolTable>(new SymbolTable());
  t->tensors_["p"] = TensorSymbolInfo{"p", 1, false, 0};
  t->tensors_["delta"] = TensorSymbolInfo{"delta", 2, true, 0};
  return t;
}

void SymbolTable::declare_tensor(const std::string& name, int rank, bool symmetric, int grading) {
  if (has_symbol(name)) throw AlgebraError("symbol already declared: " + name);
  if (rank < 0) throw AlgebraError("negative rank for tensor " + name);
  if (grading < 0) throw AlgebraError("negative grading for tensor " + name);
  tensors_[name] = TensorSymbolInfo{name, rank, symmetric, grading};
}

void SymbolTable::declare_radial(const std::string& name) {
  if (has_symbol(name)) throw AlgebraError("symbol already declared: " + name);
  radials_.insert(name);
}

void SymbolTable::register_atom(const std::string& name, const TensorExpr& definition) {
  if (has_symbol(name)) throw AlgebraError("symbol already declared: " + name);
  if (!definition.free_indices().empty())
    throw AlgebraError("scalar atom " + name + " must have no free indices");
  bool invertible = false;
  for (const auto& m : definition.monomials()) {
    if (!m.denom.empty())
      throw AlgebraError("scalar atom " + name + " must have no denominators");
    bool has_p = false, has_graded = false;
    for (const auto& f : m.factors) {
      if (f.kind == Factor::Kind::Q)
        throw AlgebraError("scalar atom " + name + " contains an operator factor");
      if (f.kind == Factor::Kind::Tensor) {
        if (f.sym == "p") has_p = true;
        else if (f.sym != "delta") has_graded = true;
      }
    }
    // constant term: no momentum and no background tensor. A purely radial
    // monomial counts: radial atoms are treated as invertible formal series.
    if (!has_p && !has_graded && m.coeff != 0) invertible = true;
  }
  if (!invertible)
    throw AlgebraError("scalar atom " + name + " has vanishing constant term");
  atoms_[name] = std::make_shared<const TensorExpr>(definition);
}

const TensorSymbolInfo* SymbolTable::tensor(const std::string& name) const {
  auto it = tensors_.find(name);
  return it == tensors_.end() ? nullptr : &it->second;
}

bool SymbolTable::is_radial(const std::string& name) const { return radials_.count(name) > 0; }

const TensorExpr* SymbolTable::atom(const std::string& name) const {
  auto it = atoms_.find(name);
  return it == atoms_.end() ? nullptr : it->second.get();
}

bool SymbolTable::has_symbol(const std::string& name) const {
  return tensors_.count(name) || radials_.count(name) || atoms_.count(name);
}

std::vector<std::string> SymbolTable::tensor_names() const {
  std::vector<std::string> out;
  for (const auto& [k, v] : tensors_)
    if (k != "p" && k != "delta") out.push_back(k);
  return out;
}

std::vector<std::string> SymbolTable::radial_names() const {
  return {radials_.begin(), radials_.end()};
}

std::vector<std::string> SymbolTable::atom_names() const {
  std::vector<std::string> out;
  for (const auto& [k, v] : atoms_) out.push_back(k);
  return out;
}

int SymbolTable::max_grading() const {
  int g = 1;
  for (const auto& [k, v] : tensors_) g = std::max(g, v.grading);
  return g;
}

}  // namespace anisogup
