#pragma once

#include <vector>

#include "vvot/graph.hpp"

namespace vvot {

struct Atom {
  Vec x;  // location in R^d
  Vec w;  // per-species masses
};

// Finitely supported measure on R^d x {1..n}; atoms at equal locations merge.
class DiscreteVectorMeasure {
 public:
  DiscreteVectorMeasure() = default;
  DiscreteVectorMeasure(int n, int d) : n_(n), d_(d) {}
  DiscreteVectorMeasure(int n, int d, const std::vector<Atom>& atoms);

  void add(const Vec& x, const Vec& w);

  int n() const noexcept { return n_; }
  int dim() const noexcept { return d_; }
  const std::vector<Atom>& atoms() const noexcept { return atoms_; }
  std::size_t size() const noexcept { return atoms_.size(); }

  double total_mass() const;
  Vec species_mass() const;
  // Throws MassMismatch unless the total mass is one.
  void check_probability(double tol = 1e-12) const;

 private:
  int n_ = 0;
  int d_ = 0;
  std::vector<Atom> atoms_;
};

// Convenience for one-dimensional examples: atoms (x, w).
DiscreteVectorMeasure measure_1d(int n, const std::vector<std::pair<double, std::vector<double>>>& atoms);

struct LiftedAtom {
  Vec x;
  Vec r;  // simplex coordinates, length n-1
  double mass = 0.0;
};

struct LiftedMeasure {
  int n = 0;
  int d = 0;
  std::vector<LiftedAtom> atoms;

  double total_mass() const;
};

}  // namespace vvot
