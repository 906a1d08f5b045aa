#pragma once

#include <functional>
#include <vector>

#include "anisogup/tensor.hpp"

namespace anisogup {

struct LinearSolution {
  bool consistent = false;
  std::vector<Rational> values;  // free unknowns pinned to 0
  std::vector<bool> is_free;
  int rank = 0;
};

// Exact Gaussian elimination. Columns follow unknown declaration order; free
// variables are set to 0 and flagged.
LinearSolution solve_linear(std::vector<std::vector<Rational>> A, std::vector<Rational> b);

// Equation system extracted from an affine residual map: one equation per
// canonical monomial shape. Probes the map at 0 and the unit vectors and
// refuses maps that fail an affinity cross-check.
struct AffineSystem {
  TensorExpr r0;
  std::vector<TensorExpr> columns;  // residual contribution per unknown
  bool homogeneous = false;

  LinearSolution solve() const;
  TensorExpr at(const std::vector<Rational>& values) const;
};

AffineSystem probe_affine(const std::function<TensorExpr(const std::vector<Rational>&)>& fn,
                          std::size_t unknowns);

}  // namespace anisogup
