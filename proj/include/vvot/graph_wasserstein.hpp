#pragma once

#include <vector>

#include "vvot/graph.hpp"
#include "vvot/solver_config.hpp"

namespace vvot {

// Discrete curve of graph distributions: momenta[t] carries mass from
// states[t] to states[t+1], with momenta[t](i,j) = -momenta[t](j,i).
struct GraphPath {
  std::vector<double> times;
  std::vector<Vec> states;
  std::vector<EdgeField> momenta;
  SolveInfo info;
};

// max over steps of |p_{t+1} - p_t - dt * sum_j q_ij sigma_ij|
double path_continuity_residual(const GraphPath& path, const WeightedGraph& g);
// sum_t dt * sum_{i<j} q_ij alpha(sigma_ij, p_i, p_j) with p the mean of the step's end states.
double path_action(const GraphPath& path, const WeightedGraph& g, const Interpolation& f);

struct GraphTransport {
  double distance = 0.0;
  GraphPath path;
};

// Least action between two distributions on g over T uniform steps. The path
// carries the solver status; a path that did not reach cfg.tol is still returned.
GraphTransport wg_dynamic(const WeightedGraph& g, const Interpolation& f, const Vec& p0,
                          const Vec& p1, int T, const SolverConfig& cfg = {});

// (1/sqrt(q)) * integral of theta(a, 1-a)^(-1/2) between a0 and a1.
double wg_two_node(const Interpolation& f, double q, double a0, double a1);

// W between the distributions of two simplex points (coordinates of length n-1).
double simplex_distance(const WeightedGraph& g, const Interpolation& f, const Vec& r0,
                        const Vec& r1, int T = 64, const SolverConfig& cfg = {});

// Constant-speed geodesic (r, 1-r) on the two-node graph, sampled at `steps`+1 times.
GraphPath two_node_geodesic(const Interpolation& f, double q, double r_start, double r_end,
                            int steps);

// (1-a) path(t) + a ((1-t) s0 + t s1) with t uniform over the samples.
std::vector<Vec> regularized_geodesic(const std::vector<Vec>& path, double a, const Vec& s0,
                                      const Vec& s1);

// W between the Dirac distributions at each pair of nodes.
Mat d_w_matrix(const WeightedGraph& g, const Interpolation& f, int T = 64,
               const SolverConfig& cfg = {});

}  // namespace vvot
