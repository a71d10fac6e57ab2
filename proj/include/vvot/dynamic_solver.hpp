#pragma once

#include <cstddef>
#include <vector>

#include "vvot/graph.hpp"
#include "vvot/measure.hpp"
#include "vvot/solver_config.hpp"

namespace vvot {

struct SpatialGrid {
  double x_min = -1.0;
  double x_max = 1.0;
  int cells = 128;

  double dx() const { return (x_max - x_min) / cells; }
  double center(int c) const { return x_min + (c + 0.5) * dx(); }
};

// Space-time fields on a staggered grid. rho holds mass per cell; m is the
// mass flux through faces (outer faces are zero); sigma holds graph momenta
// with sigma(i,j) = -sigma(j,i).
struct DynamicSolution {
  SpatialGrid grid;
  int n = 0;
  int T = 0;
  std::vector<double> rho;
  std::vector<double> m;
  std::vector<double> sigma;
  SolveInfo info;

  DynamicSolution() = default;
  DynamicSolution(SpatialGrid grid, int n, int T);

  double dt() const { return 1.0 / T; }
  int cells() const { return grid.cells; }

  double& rho_at(int t, int c, int i) { return rho[(std::size_t(t) * cells() + c) * n + i]; }
  double rho_at(int t, int c, int i) const { return rho[(std::size_t(t) * cells() + c) * n + i]; }
  // Face f lies between cells f-1 and f; faces 0 and cells are walls.
  double& m_at(int t, int f, int i) { return m[(std::size_t(t) * (cells() + 1) + f) * n + i]; }
  double m_at(int t, int f, int i) const { return m[(std::size_t(t) * (cells() + 1) + f) * n + i]; }
  double& sigma_at(int t, int c, int i, int j) {
    return sigma[((std::size_t(t) * cells() + c) * n + i) * n + j];
  }
  double sigma_at(int t, int c, int i, int j) const {
    return sigma[((std::size_t(t) * cells() + c) * n + i) * n + j];
  }
  // cells x n masses at time index t
  Mat slice(int t) const;
};

// Cell masses of a measure on the grid: linear (cloud-in-cell) deposit, which
// keeps each species' mass and mean, then `smoothing` passes of the [1/4,1/2,1/4]
// hat with reflecting walls.
Mat rasterize(const DiscreteVectorMeasure& mu, const SpatialGrid& grid, int smoothing = 1);

// Least action between cell-mass fields rho0, rho1 (cells x n, equal total mass).
DynamicSolution solve_grid_transport(const WeightedGraph& g, const Interpolation& f,
                                     const SpatialGrid& grid, const Mat& rho0, const Mat& rho1,
                                     int T, const SolverConfig& cfg);

struct DynamicResult {
  double distance = 0.0;
  DynamicSolution solution;
};

DynamicResult w_dynamic(const WeightedGraph& g, const Interpolation& f,
                        const DiscreteVectorMeasure& mu, const DiscreteVectorMeasure& nu,
                        const SpatialGrid& grid, int T, const SolverConfig& cfg,
                        int smoothing = 1);

// max over (t, cell, species) of the discrete continuity defect, divided by dx.
double continuity_residual(const DynamicSolution& sol, const WeightedGraph& g);

// Discrete action. Face terms use the mean of the four neighbouring cell masses
// (two cells, two times); graph terms use theta of the time-averaged masses.
double action(const DynamicSolution& sol, const WeightedGraph& g, const Interpolation& f);

// Two-atom path of the two-node example: species 1 at -a and species 2 at +a
// meet at the origin at time t0, then the merged atom mutates from (1/2, 1/2)
// to (b, 1-b) along the two-node geodesic.
struct CandidatePath {
  std::vector<double> times;
  std::vector<double> x_left;   // position of the species-1 atom
  std::vector<double> x_right;  // position of the species-2 atom
  std::vector<double> r;        // species-1 fraction of the total mass
  std::vector<double> u_left;   // velocities on each interval
  std::vector<double> u_right;
  std::vector<double> v12;      // graph velocity on each interval
  int merge_step = 0;           // times[merge_step] == t0
  double q = 1.0;
  Interpolation f = Interpolation::geometric();
};

CandidatePath two_node_candidate_path(const Interpolation& f, double q, double a, double b,
                                      double t0, int T);
// Transport steps cost mass * speed^2 * dt; mutation steps follow the geodesic
// between samples and cost (segment length)^2 / dt.
double candidate_action(const CandidatePath& path);

// One time slice of a lifted measure together with its velocity field.
struct LiftedVelocityAtom {
  Vec x;      // spatial position
  Vec r;      // simplex coordinates (length n-1)
  double mass = 0.0;
  Vec w1;     // spatial velocity
  Vec w2;     // tangent velocity in simplex coordinates (length n-1)
};

struct ProjectedVelocity {
  std::vector<Vec> locations;
  std::vector<Vec> rho;          // per location, species masses
  std::vector<Mat> u;            // per location, n x d spatial velocities
  std::vector<EdgeField> v;      // per location, graph velocities
  double action_before = 0.0;
  double action_after = 0.0;
};

ProjectedVelocity project_lifted_dynamics(const std::vector<LiftedVelocityAtom>& atoms,
                                          const WeightedGraph& g, const Interpolation& f,
                                          double interior_tol = 1e-6);

}  // namespace vvot
