#pragma once

#include "vvot/graph.hpp"

namespace vvot {

struct PerspectivePoint {
  // x = shrink * x_bar
  double shrink;
  double y;
};

// argmin |x|^2/y + (|x - x_bar|^2 + (y - y_bar)^2) / (2 tau), given |x_bar|^2.
PerspectivePoint prox_perspective_sq(double x_bar_sq, double y_bar, double tau);

struct ScalarProx {
  double x;
  double y;
};
ScalarProx prox_perspective(double x_bar, double y_bar, double tau);

struct VectorProx {
  Vec x;
  double y;
};
VectorProx prox_perspective(const Vec& x_bar, double y_bar, double tau);

struct GraphTermProx {
  double sigma;
  double rho_i;
  double rho_j;
  bool newton_failed = false;
};

// argmin alpha(sigma, rho_i, rho_j) + |(sigma, rho_i, rho_j) - bar|^2 / (2 tau).
// The arithmetic case works in the rotated variable (rho_i + rho_j)/2 and leaves
// the difference untouched, as in the perspective of the arithmetic mean on R^2.
GraphTermProx prox_graph_term(double sigma_bar, double rho_i_bar, double rho_j_bar, double tau,
                              const Interpolation& f);

// Objective minimized by prox_graph_term; +inf outside the domain.
double graph_term_objective(double sigma, double rho_i, double rho_j, double sigma_bar,
                            double rho_i_bar, double rho_j_bar, double tau, const Interpolation& f);

}  // namespace vvot
