#pragma once

#include <Eigen/SparseCore>
#include <vector>

#include "vvot/dynamic_solver.hpp"
#include "vvot/kernels.hpp"

namespace vvot::detail {

using SpMat = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;

// Unknowns in density units: interior cell densities for t = 1..T-1, face fluxes
// on interior faces, and one graph momentum density per (t, cell, edge).
struct Layout {
  int C, n, T, E;
  std::vector<Edge> edges;

  int n_mass() const { return (T - 1) * C * n; }
  int n_flux() const { return T * (C - 1) * n; }
  int n_graph() const { return T * C * E; }
  int primal() const { return n_mass() + n_flux() + n_graph(); }
  int mass(int t, int c, int i) const { return ((t - 1) * C + c) * n + i; }
  int flux(int t, int f, int i) const { return n_mass() + (t * (C - 1) + f) * n + i; }
  int graph(int t, int c, int e) const { return n_mass() + n_flux() + (t * C + c) * E + e; }
  int row(int t, int c, int i) const { return (t * C + c) * n + i; }
  int face_block(int t, int f, int i) const { return (t * (C - 1) + f) * n + i; }
  int edge_block(int t, int c, int e) const { return (t * C + c) * E + e; }
  int n_face_blocks() const { return T * (C - 1) * n; }
  int n_edge_blocks() const { return T * C * E; }
};

// min sum_faces m^2/y + sum_edges q s^2/theta(a,b) subject to A x = b, where
// (m, y) and (s, a, b) are rows of K x + k0. The true action is dt*dx times it.
struct Program {
  Layout L;
  double dt, dx;
  SpMat A;  // continuity rows, the redundant last row dropped
  Vec b;
  SpMat K;
  Vec k0;
  DualBlocks blocks;
  Mat dens0, dens1;
};

Program build_program(const WeightedGraph& g, const SpatialGrid& grid, const Mat& rho0,
                      const Mat& rho1, int T);

// Copies the densities in x into sol as cell masses (endpoints exact), clipping
// negatives and adding a tiny floor so that every cell stays positive.
void load_masses(const Program& P, const Vec& x, DynamicSolution& sol);

// Cheapest fluxes and graph momenta for the masses stored in sol; returns the action.
double recover_momenta(const WeightedGraph& g, const Interpolation& f, DynamicSolution& sol);

// Program unknowns matching the fields of sol.
Vec program_point(const Program& P, const DynamicSolution& sol);

void solve_primal_dual(const Program& P, const WeightedGraph& g, const Interpolation& f,
                       const SolverConfig& cfg, DynamicSolution& sol);
void solve_barrier(const Program& P, const WeightedGraph& g, const Interpolation& f,
                   const SolverConfig& cfg, DynamicSolution& sol);

}  // namespace vvot::detail
