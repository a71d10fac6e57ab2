#pragma once

#include <string>
#include <vector>

#include "vvot/dynamic_solver.hpp"
#include "vvot/measure.hpp"

namespace vvot {

struct CouplingEntry {
  int source_atom;
  int source_species;
  int target_atom;
  int target_species;
  double mass;
};

struct VectorCoupling {
  std::vector<CouplingEntry> entries;
};

struct W2wResult {
  double distance = 0.0;
  VectorCoupling coupling;
};

// Kantorovich distance with ground cost |x - y|^2 + d_w(i,j)^2, solved exactly.
W2wResult w2w(const DiscreteVectorMeasure& mu, const DiscreteVectorMeasure& nu, const Mat& d_w);

// Barycentric lattice {k/subdivisions} on the simplex (coordinates of length
// n-1), merged with `extra` points; duplicates are removed.
std::vector<Vec> simplex_grid(int n, int subdivisions, const std::vector<Vec>& extra = {});

// Pairwise simplex_distance over grid points.
Mat simplex_distance_table(const WeightedGraph& g, const Interpolation& f,
                           const std::vector<Vec>& points, int T = 32,
                           const SolverConfig& cfg = {});
Mat simplex_distance_table_serial(const WeightedGraph& g, const Interpolation& f,
                                  const std::vector<Vec>& points, int T = 32,
                                  const SolverConfig& cfg = {});

struct LiftedCouplingEntry {
  int source_atom;
  int source_point;  // index into the simplex grid
  int target_atom;
  int target_point;
  double mass;
};

struct LiftedUpperResult {
  double upper_bound = 0.0;
  std::vector<LiftedCouplingEntry> coupling;
  LiftedMeasure lift_mu;
  LiftedMeasure lift_nu;
};

// Optimal coupling between lifts supported on atoms x grid whose projections are
// mu and nu. The grid must contain every corner.
LiftedUpperResult lifted_semimetric_upper(const DiscreteVectorMeasure& mu,
                                          const DiscreteVectorMeasure& nu,
                                          const std::vector<Vec>& grid, const Mat& d_simplex);

// Closed forms on the two-node graph for mu1 = [d_0/2, d_0/2],
// mu2 = [d_{-a}/2, d_a/2] and mu3 = [b d_0, (1-b) d_0].
struct TwoNodeExamples {
  double w12 = 0.0;
  double w13 = 0.0;
  double w23_upper = 0.0;
  double d12 = 0.0;
  double d13 = 0.0;
  double d23 = 0.0;
};

struct TwoNodeMeasures {
  DiscreteVectorMeasure mu1, mu2, mu3;
};

TwoNodeMeasures two_node_measures(double a, double b);
TwoNodeExamples two_node_examples(const Interpolation& f, double q, double a, double b);

struct TriangleSearch {
  int a_steps = 40;
  int b_steps = 40;
  double margin = 1e-6;
};

struct TriangleWitness {
  double a = 0.0;
  double b = 0.0;
  double lhs = 0.0;  // d23
  double rhs = 0.0;  // d12 + d13
};

// Scans a in (0, 0.2] and b in (1/2, 0.7] in increasing order.
TriangleWitness triangle_failure_witness(const Interpolation& f, double q,
                                         const TriangleSearch& search = {});

struct ChainConfig {
  double chain_tol = 3e-2;
  double lp_tol = 1e-8;
  double bound_tol = 1e-6;
  SpatialGrid grid{-1.0, 1.0, 48};
  int time_steps = 12;
  int smoothing = 1;
  SolverConfig solver;
  // 0 selects 32 for two species and 6 otherwise.
  int simplex_subdivisions = 0;
  int graph_steps = 32;
  // Throw ChainViolation instead of reporting.
  bool strict = false;
};

// Instance-independent data for one graph: d_w and the simplex distance table.
struct ChainTables {
  Mat d_w;
  std::vector<Vec> simplex_points;
  Mat d_simplex;
};

ChainTables chain_tables(const WeightedGraph& g, const Interpolation& f, const ChainConfig& cfg);

struct ChainReport {
  double d_bl = 0.0;
  double w_dyn = 0.0;
  double d_upper = 0.0;
  double w2w = 0.0;
  double lower_bound = 0.0;
  double upper_bound = 0.0;
  bool ok = true;
  std::vector<std::string> violations;
};

ChainReport check_chain(const WeightedGraph& g, const Interpolation& f,
                        const DiscreteVectorMeasure& mu, const DiscreteVectorMeasure& nu,
                        const ChainConfig& cfg = {}, const ChainTables* tables = nullptr);

}  // namespace vvot
