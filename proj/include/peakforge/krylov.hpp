#pragma once

#include <functional>
#include <vector>

#include "peakforge/grid.hpp"

namespace peakforge {

using LinearOp = std::function<Field(const Field&)>;

struct MinresResult {
  Field x;
  double rel_residual = 0.0;
  int iterations = 0;
  bool converged = false;
};

// Preconditioned MINRES for symmetric (possibly indefinite) operators.
// precond must be symmetric positive definite.
MinresResult minres(const LinearOp& apply, const LinearOp& precond, const Field& rhs,
                    double rel_tol, int max_iter);

struct LanczosResult {
  std::vector<double> eigenvalues;   // of the operator passed in
  std::vector<Field> eigenvectors;
  bool converged = false;
};

// Full-reorthogonalized Lanczos on a symmetric operator; returns the `count`
// largest-|.| eigenpairs of `apply` (callers pass an inverse to target the
// smallest of the underlying operator).
LanczosResult lanczos_extreme(const LinearOp& apply, const Field& start, int count, int max_iter,
                              double tol);

// Eigenvalues+vectors of a small dense symmetric matrix (Jacobi sweeps).
void dense_sym_eig(std::vector<double>& a, int n, std::vector<double>& eigvals,
                   std::vector<double>& eigvecs);

// Solve a small dense linear system in place; returns false if singular.
bool dense_solve(std::vector<double> a, int n, std::vector<double>& rhs);

}  // namespace peakforge
