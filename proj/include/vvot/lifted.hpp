#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "vvot/measure.hpp"
#include "vvot/solver_config.hpp"

namespace vvot {

// One atom (x, e_j, mu_j(x)) per positive species mass.
LiftedMeasure canonical_lift(const DiscreteVectorMeasure& mu);
// mu_j(x) = sum over lifted atoms at x of mass * p_j(r).
DiscreteVectorMeasure project(const LiftedMeasure& lam);

// Uniform ball times uniform simplex, N atoms of mass 1/N.
struct ReferenceMeasure {
  int n = 0;
  int d = 0;
  std::uint64_t seed = 0;
  std::vector<LiftedAtom> atoms;

  std::size_t size() const { return atoms.size(); }
};

ReferenceMeasure sample_reference(int N, int n, int d, std::uint64_t seed);

// Distance on simplex coordinates: either Euclidean in R^{n-1} or the graph
// transport distance between the corresponding distributions.
class SimplexMetric {
 public:
  static SimplexMetric euclidean(int n);
  static SimplexMetric ground(const WeightedGraph& g, const Interpolation& f, int T = 32,
                              const SolverConfig& cfg = {});

  bool is_ground() const { return ground_ != nullptr; }
  int n() const { return n_; }
  double operator()(const Vec& r0, const Vec& r1) const;
  // Distances between corners (d_w for the ground metric).
  const Mat& corners() const { return corners_; }

 private:
  struct Ground;
  int n_ = 0;
  Mat corners_;
  std::shared_ptr<const Ground> ground_;
};

struct LotTarget {
  int atom;  // index into the canonical lift
  double share;  // fraction of the reference atom's mass sent there
};

struct LotEmbedding {
  std::uint64_t reference_seed = 0;
  std::size_t reference_size = 0;
  std::vector<Vec> x;  // barycentric spatial images, one per reference atom
  std::vector<Vec> r;  // barycentric simplex images
  std::vector<std::vector<LotTarget>> plan;
  LiftedMeasure target;  // canonical lift of the embedded measure
  // Reference atoms whose mass the optimal plan splits.
  int split_atoms = 0;
  bool non_injective() const { return split_atoms > 0; }
};

// Exact optimal plan from the reference to the canonical lift of mu with cost
// |x - x'|^2 + metric(r, r')^2, summarized by its barycentric projection.
LotEmbedding lot_embed(const ReferenceMeasure& ref, const DiscreteVectorMeasure& mu,
                       const SimplexMetric& metric);

// Euclidean L2 distance between embedding values under the reference.
double d_lot(const LotEmbedding& e1, const LotEmbedding& e2, const ReferenceMeasure& ref);

// Ground-metric variant: the two plans are glued through each reference atom
// (product of the conditionals) and the glued coupling of the canonical lifts
// is priced with |x - y|^2 + d_w(i,j)^2. For plans induced by maps this is the
// ground distance between the embedding values.
double d_lot_ground(const LotEmbedding& e1, const LotEmbedding& e2, const ReferenceMeasure& ref,
                    const Mat& d_w);

Mat pairwise_matrix(const ReferenceMeasure& ref, const std::vector<DiscreteVectorMeasure>& data,
                    const SimplexMetric& metric);
Mat pairwise_matrix_serial(const ReferenceMeasure& ref,
                           const std::vector<DiscreteVectorMeasure>& data,
                           const SimplexMetric& metric);

}  // namespace vvot
