#pragma once

#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "anisogup/rational.hpp"
#include "anisogup/symbols.hpp"

namespace anisogup {

struct AlgebraError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// One symbol instance inside a monomial. Q factors belong to the operator
// layer: they mark auxiliary-operator slots and are inert under momentum
// differentiation.
struct Factor {
  enum class Kind : int { Tensor = 0, Radial = 1, Q = 2 };
  Kind kind = Kind::Tensor;
  std::string sym;
  int level = 0;  // radial derivative level (d/d(p.p) applied `level` times)
  std::vector<std::string> idx;

  friend bool operator<(const Factor& a, const Factor& b) {
    return std::tie(a.kind, a.sym, a.level, a.idx) < std::tie(b.kind, b.sym, b.level, b.idx);
  }
  friend bool operator==(const Factor& a, const Factor& b) {
    return std::tie(a.kind, a.sym, a.level, a.idx) == std::tie(b.kind, b.sym, b.level, b.idx);
  }
};

// coeff * i^ipow * hbar^hbar * dim^dim_pow * factors / prod(denom atoms).
// Canonical form: ipow in {0,1} (i^2 folded into the sign), factors sorted,
// dummy labels minimally renamed to $0,$1,...
struct Monomial {
  Rational coeff{1};
  int hbar = 0;
  int ipow = 0;
  int dim_pow = 0;
  std::vector<Factor> factors;
  std::map<std::string, int> denom;

  std::string shape_key() const;  // everything but coeff
};

class TensorExpr {
 public:
  TensorExpr() = default;  // zero with no table; usable only as a placeholder

  static TensorExpr zero(TablePtr t);
  static TensorExpr constant(TablePtr t, const Rational& c);
  static TensorExpr imaginary_unit(TablePtr t);  // i
  static TensorExpr i_hbar(TablePtr t);          // i*hbar
  static TensorExpr dim_const(TablePtr t);       // the symbolic spatial dimension
  static TensorExpr symbol(TablePtr t, const std::string& name,
                           const std::vector<std::string>& idx);
  static TensorExpr radial(TablePtr t, const std::string& name, int level = 0);
  static TensorExpr from_monomials(TablePtr t, std::vector<Monomial> ms);

  const std::vector<Monomial>& monomials() const { return monomials_; }
  const std::set<std::string>& free_indices() const { return free_; }
  TablePtr table() const { return table_; }
  bool empty() const { return monomials_.empty(); }

 private:
  friend class Canonicalizer;
  TablePtr table_;
  std::vector<Monomial> monomials_;
  std::set<std::string> free_;
};

// --- spec operations -------------------------------------------------------

TensorExpr add(const TensorExpr& a, const TensorExpr& b);
TensorExpr sub(const TensorExpr& a, const TensorExpr& b);
TensorExpr negate(const TensorExpr& a);
TensorExpr scale(const TensorExpr& a, const Rational& c);

// Product with disjoint free-index sets; a shared free name is an error.
TensorExpr mul(const TensorExpr& a, const TensorExpr& b);

// Product in Einstein convention: a free name shared by both operands becomes
// a contracted pair. Used internally to wire constructions like F_ij L_j.
TensorExpr contract_mul(const TensorExpr& a, const TensorExpr& b);

// d/dp_idx. Public form rejects an idx that is already free in `a`.
TensorExpr derive(const TensorExpr& a, const std::string& idx);
// Einstein form: an idx already present contracts (used for divergences,
// e.g. derive_contract(F(i,j), j) = d_j F_ij including the delta trace).
TensorExpr derive_contract(const TensorExpr& a, const std::string& idx);

TensorExpr canonicalize(const TensorExpr& a);
bool is_zero(const TensorExpr& a);

// Formal series truncation at grading `order`; inverse atoms are expanded
// geometrically around their rational constant term.
TensorExpr truncate(const TensorExpr& a, int order);

// Replaces every occurrence of tensor symbol `sym`; slot r of each occurrence
// is wired to the free index slot_order[r] of `by`.
TensorExpr substitute(const TensorExpr& a, const std::string& sym, const TensorExpr& by,
                      const std::vector<std::string>& slot_order);

TensorExpr substitute_dim(const TensorExpr& a, const Rational& dim);

// Divides by a registered atom power (appends to every monomial denominator).
TensorExpr divide_by_atom(const TensorExpr& a, const std::string& atom, int power = 1);

// Renames free index `from` to `to`; if `to` is already present the pair
// contracts (Einstein).
TensorExpr relabel_free(const TensorExpr& a, const std::string& from, const std::string& to);

int q_count(const Monomial& m);
int grading_of(const TablePtr& t, const Monomial& m);  // denominators ignored
int max_grading(const TensorExpr& a);

// Multiplies through by the least common multiple of all denominator atoms,
// expanding atom definitions. Sound because registered atoms are formal
// series with nonzero constant term, hence not zero divisors.
TensorExpr clear_denominators(const TensorExpr& a);

// Clears several expressions against their joint denominator LCM so the
// resulting monomial shapes are directly comparable across expressions.
std::vector<TensorExpr> clear_to_common(const std::vector<TensorExpr>& es);

std::string to_string(const Monomial& m);
std::string to_string(const TensorExpr& a);

}  // namespace anisogup
