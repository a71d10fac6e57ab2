#pragma once

#include <span>
#include <vector>

#include "vvot/interpolation.hpp"

namespace vvot {

// Dual variables of the space-time program, stored as 2-vectors (flux, face
// mass), then 3-vectors (graph momentum, mass_i, mass_j), then one scalar per
// interior cell mass carrying its sign constraint.
struct DualBlocks {
  std::vector<double> face_weight;
  std::vector<double> edge_weight;
  std::size_t sign_count = 0;

  std::size_t size() const {
    return 2 * face_weight.size() + 3 * edge_weight.size() + sign_count;
  }
  std::size_t count() const { return face_weight.size() + edge_weight.size() + sign_count; }
};

// y <- prox of step * F^* at y, where F(v) = sum_b weight_b alpha(v_b + offset_b).
// Returns the number of blocks whose Newton solve did not converge.
int dual_prox_serial(const DualBlocks& blocks, const Interpolation& f, double step,
                     std::span<const double> offset, std::span<double> y);
int dual_prox_parallel(const DualBlocks& blocks, const Interpolation& f, double step,
                       std::span<const double> offset, std::span<double> y);

}  // namespace vvot
