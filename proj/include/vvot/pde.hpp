#pragma once

#include <functional>
#include <vector>

#include "vvot/dynamic_solver.hpp"

namespace vvot {

// Energy sum_i a_i rho_i log rho_i + (1/m)(sum_i b_i rho_i)^m + sum_i V_i rho_i
// + 1/2 sum_ik (W_ik * rho_k) rho_i on a one-dimensional grid.
struct PdeConfig {
  SpatialGrid grid{-1.0, 1.0, 64};
  // Mutation rates; symmetric and nonnegative, zero allowed.
  Mat q = Mat::Zero(2, 2);
  Interpolation f = Interpolation::geometric();
  Vec entropy = Vec::Ones(2);
  // m >= 2 enables the porous term; 0 disables it.
  double porous_exponent = 0.0;
  Vec porous = Vec::Zero(2);
  // cells x n, empty for none
  Mat potential;
  // n x n stencils of length 2*cells-1, W_ik(z) sampled at z = (k - cells + 1) dx.
  // Empty for no interaction.
  std::vector<std::vector<Vec>> interaction;
  double dt = 1e-4;
  double t_end = 0.1;

  int n() const { return static_cast<int>(q.rows()); }
};

// Throws Domain, Asymmetric or LengthMismatch.
void validate(const PdeConfig& cfg);

struct PdeState {
  Mat rho;  // cells x n densities
  double time = 0.0;
};

// W(z) sampled on the stencil offsets of `grid`.
Vec interaction_stencil(const SpatialGrid& grid, const std::function<double(double)>& w);

double energy(const PdeState& s, const PdeConfig& cfg);
// Variational derivative of the energy per species and cell.
Mat driver(const PdeState& s, const PdeConfig& cfg);

struct RateSplit {
  Mat transport;
  Mat mutation;
};

// Upwind transport and mutation rates, reported separately.
RateSplit rhs_parts(const PdeState& s, const PdeConfig& cfg);
Mat rhs(const PdeState& s, const PdeConfig& cfg);
Mat rhs_serial(const PdeState& s, const PdeConfig& cfg);

// Largest stable step estimated from the current velocities, diffusivities and
// mutation rates.
double cfl_bound(const PdeState& s, const PdeConfig& cfg);

struct StepStats {
  double dt = 0.0;
  int halvings = 0;
  double clipped_mass = 0.0;
};

// Explicit Euler with step min(dt, cfl_bound). Negative cells are clipped; a
// step whose clipped mass exceeds 1e-12 dt is retried with half the step.
PdeState step(const PdeState& s, const PdeConfig& cfg, double dt, StepStats* stats = nullptr);

struct PdeDiagnostics {
  std::vector<double> times;
  std::vector<double> energy;
  std::vector<Vec> species_mass;
  std::vector<double> min_rho;
  int halvings = 0;
};

struct PdeRun {
  std::vector<PdeState> trajectory;  // at the requested output times
  PdeDiagnostics diagnostics;        // after every accepted step
};

using PdeObserver = std::function<void(const PdeState&)>;

PdeRun run(const PdeState& init, const PdeConfig& cfg, const std::vector<double>& output_times,
           const PdeObserver& observer = {});

}  // namespace vvot
