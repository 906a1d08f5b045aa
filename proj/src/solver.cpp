#include "anisogup/solver.hpp"

#include <map>

namespace anisogup {

LinearSolution solve_linear(std::vector<std::vector<Rational>> A, std::vector<Rational> b) {
  const std::size_t rows = A.size();
  const std::size_t cols = rows ? A[0].size() : 0;
  std::vector<int> pivot_col_of_row;
  std::size_t r = 0;
  for (std::size_t c = 0; c < cols && r < rows; ++c) {
    std::size_t pr = r;
    while (pr < rows && A[pr][c] == 0) ++pr;
    if (pr == rows) continue;
    std::swap(A[pr], A[r]);
    std::swap(b[pr], b[r]);
    Rational inv = Rational(1) / A[r][c];
    for (std::size_t cc = c; cc < cols; ++cc) A[r][cc] *= inv;
    b[r] *= inv;
    for (std::size_t rr = 0; rr < rows; ++rr) {
      if (rr == r || A[rr][c] == 0) continue;
      Rational factor = A[rr][c];
      for (std::size_t cc = c; cc < cols; ++cc) A[rr][cc] -= factor * A[r][cc];
      b[rr] -= factor * b[r];
    }
    pivot_col_of_row.push_back(static_cast<int>(c));
    ++r;
  }
  LinearSolution sol;
  sol.rank = static_cast<int>(r);
  for (std::size_t rr = r; rr < rows; ++rr)
    if (b[rr] != 0) {
      sol.consistent = false;
      return sol;
    }
  sol.consistent = true;
  sol.values.assign(cols, Rational(0));
  sol.is_free.assign(cols, true);
  for (std::size_t rr = 0; rr < r; ++rr) {
    int pc = pivot_col_of_row[rr];
    sol.is_free[pc] = false;
    // free columns contribute 0, so the pivot value is just b
    sol.values[pc] = b[rr];
  }
  return sol;
}

TensorExpr AffineSystem::at(const std::vector<Rational>& values) const {
  TensorExpr acc = r0;
  for (std::size_t k = 0; k < columns.size(); ++k)
    acc = add(acc, scale(columns[k], values[k]));
  return acc;
}

LinearSolution AffineSystem::solve() const {
  // one equation per canonical monomial shape across all columns
  std::map<std::string, std::size_t> row_of;
  auto visit = [&](const TensorExpr& e) {
    for (const auto& m : e.monomials()) {
      std::string key = m.shape_key();
      if (!row_of.count(key)) row_of.emplace(std::move(key), row_of.size());
    }
  };
  visit(r0);
  for (const auto& c : columns) visit(c);

  std::vector<std::vector<Rational>> A(row_of.size(),
                                       std::vector<Rational>(columns.size(), Rational(0)));
  std::vector<Rational> b(row_of.size(), Rational(0));
  for (const auto& m : r0.monomials()) b[row_of[m.shape_key()]] = -m.coeff;
  for (std::size_t k = 0; k < columns.size(); ++k)
    for (const auto& m : columns[k].monomials()) A[row_of[m.shape_key()]][k] = m.coeff;
  return solve_linear(std::move(A), std::move(b));
}

AffineSystem probe_affine(const std::function<TensorExpr(const std::vector<Rational>&)>& fn,
                          std::size_t unknowns) {
  AffineSystem sys;
  std::vector<Rational> zero(unknowns, Rational(0));
  sys.r0 = fn(zero);
  for (std::size_t k = 0; k < unknowns; ++k) {
    auto e = zero;
    e[k] = 1;
    sys.columns.push_back(sub(fn(e), sys.r0));
  }
  // affinity cross-check at the all-ones point
  std::vector<Rational> ones(unknowns, Rational(1));
  TensorExpr predicted = sys.at(ones);
  if (!is_zero(sub(fn(ones), predicted)))
    throw AlgebraError("ansatz produces a nonlinear system; unsupported");
  sys.homogeneous = sys.r0.monomials().empty();
  return sys;
}

}  // namespace anisogup
