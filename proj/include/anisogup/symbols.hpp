#pragma once

#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

namespace anisogup {

class TensorExpr;

// A declared tensor symbol. `grading` is the perturbative order weight used by
// truncation: anisotropies carry 1 (or their rank under the mixed convention),
// p and delta carry 0.
struct TensorSymbolInfo {
  std::string name;
  int rank = 0;
  bool symmetric = false;
  int grading = 0;
};

// Registry of tensor symbols, radial-atom families (abstract scalar functions
// of p.p) and scalar denominator atoms. Expressions carry a shared_ptr to
// their table; binary operations require both operands to use the same table.
//
// Builtins: p (rank 1) and delta (rank 2, symmetric), both grading 0.
class SymbolTable {
 public:
  static std::shared_ptr<SymbolTable> create();

  void declare_tensor(const std::string& name, int rank, bool symmetric, int grading);
  void declare_radial(const std::string& name);

  // Registers a denominator atom. The definition must be canonical, have no
  // free indices, no denominators, and a nonzero constant term (monomials
  // containing radial atoms count as abstractly nonzero constants).
  void register_atom(const std::string& name, const TensorExpr& definition);

  const TensorSymbolInfo* tensor(const std::string& name) const;
  bool is_radial(const std::string& name) const;
  const TensorExpr* atom(const std::string& name) const;
  bool has_symbol(const std::string& name) const;

  std::vector<std::string> tensor_names() const;
  std::vector<std::string> radial_names() const;
  std::vector<std::string> atom_names() const;

  int max_grading() const;

 private:
  SymbolTable() = default;
  std::map<std::string, TensorSymbolInfo> tensors_;
  std::set<std::string> radials_;
  std::map<std::string, std::shared_ptr<const TensorExpr>> atoms_;
};

using TablePtr = std::shared_ptr<const SymbolTable>;

}  // namespace anisogup
