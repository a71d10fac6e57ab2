#pragma once

#include <vector>

#include "vvot/measure.hpp"

namespace vvot {

// Finitely supported signed measure on R^d.
struct SignedMeasure {
  std::vector<Vec> points;
  std::vector<double> weights;
};

// sup of sum_k weights_k eta_k over |eta_k| <= bound and
// |eta_k - eta_l| <= lipschitz * |x_k - x_l|.
double bl_inner(const SignedMeasure& m, double bound, double lipschitz);

// Bounded-Lipschitz norm with the constraint sqrt(|eta|_inf^2 + Lip(eta)^2) <= 1.
double bl_norm_component(const SignedMeasure& m);

// Root-sum-square over species of the bounded-Lipschitz norms of mu_i - nu_i.
double d_bl(const DiscreteVectorMeasure& mu, const DiscreteVectorMeasure& nu);

}  // namespace vvot
