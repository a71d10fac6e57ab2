#pragma once

#include <Eigen/Sparse>
#include <cstddef>
#include <utility>
#include <vector>

#include "vvot/graph.hpp"

namespace vvot {

using SparseMat = Eigen::SparseMatrix<double, Eigen::ColMajor>;

// min c^T x subject to A x = b, x >= 0.
struct LpProblem {
  SparseMat A;
  Vec b;
  Vec c;
};

enum class LpStatus { Optimal, Infeasible, Unbounded, IterationLimit };

struct LpOptions {
  int max_iter = 200000;
  // Reduced costs above -opt_tol * (1 + max|c|) count as nonnegative.
  double opt_tol = 1e-11;
  // Phase-one residual allowed, relative to 1 + max|b|.
  double feas_tol = 1e-9;
};

struct LpSolution {
  LpStatus status = LpStatus::IterationLimit;
  double objective = 0.0;
  // Nonzero entries of an optimal basic solution.
  std::vector<std::pair<std::size_t, double>> support;
  // Row multipliers y with c - A^T y >= 0 at the optimum.
  Vec duals;
  int iterations = 0;
};

// Two-phase revised simplex with a dense basis factorization. Dantzig pricing
// switches to Bland's rule after a run of degenerate pivots.
LpSolution solve_lp(const LpProblem& lp, const LpOptions& opt = {});

// Primal vector of length A.cols() from a solution's support.
Vec lp_primal(const LpSolution& sol, std::size_t cols);

}  // namespace vvot
