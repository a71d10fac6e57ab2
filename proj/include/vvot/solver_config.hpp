#pragma once

namespace vvot {

// Barrier is a log-barrier Newton method; PrimalDual is the first-order
// splitting with perspective proxes, which stalls when theta vanishes on the
// boundary.
enum class Method { Barrier, PrimalDual };

struct SolverConfig {
  Method method = Method::Barrier;
  int max_iter = 20000;
  double tol = 1e-7;
  // Primal and dual step sizes; non-positive values select 0.5/L with L the
  // operator norm of the interpolation map, estimated by power iteration.
  double tau_primal = 0.0;
  double tau_dual = 0.0;
  // Iterations between convergence checks.
  int check_every = 50;
  bool parallel = true;
};

struct SolveInfo {
  bool converged = false;
  int iterations = 0;
  double residual = 0.0;
  int prox_failures = 0;
};

}  // namespace vvot
