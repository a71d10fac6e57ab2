#include "vvot/measure.hpp"

#include <cmath>

#include "vvot/errors.hpp"

namespace vvot {

DiscreteVectorMeasure::DiscreteVectorMeasure(int n, int d, const std::vector<Atom>& atoms)
    : n_(n), d_(d) {
  for (const auto& a : atoms) add(a.x, a.w);
}

void DiscreteVectorMeasure::add(const Vec& x, const Vec& w) {
  require(x.size() == d_, Errc::LengthMismatch, "atom location has wrong dimension");
  require(w.size() == n_, Errc::LengthMismatch, "atom weight has wrong species count");
  require((w.array() >= 0.0).all(), Errc::Domain, "atom weights must be nonnegative");
  for (auto& a : atoms_) {
    if (a.x == x) {
      a.w += w;
      return;
    }
  }
  atoms_.push_back({x, w});
}

double DiscreteVectorMeasure::total_mass() const { return species_mass().sum(); }

Vec DiscreteVectorMeasure::species_mass() const {
  Vec total = Vec::Zero(n_);
  for (const auto& a : atoms_) total += a.w;
  return total;
}

void DiscreteVectorMeasure::check_probability(double tol) const {
  require(std::abs(total_mass() - 1.0) <= tol, Errc::MassMismatch,
          "measure total mass is not one");
}

DiscreteVectorMeasure measure_1d(int n,
                                 const std::vector<std::pair<double, std::vector<double>>>& atoms) {
  DiscreteVectorMeasure mu(n, 1);
  for (const auto& [x, w] : atoms) {
    require(static_cast<int>(w.size()) == n, Errc::LengthMismatch, "species count");
    mu.add(Vec::Constant(1, x), Eigen::Map<const Vec>(w.data(), n));
  }
  return mu;
}

double LiftedMeasure::total_mass() const {
  double total = 0.0;
  for (const auto& a : atoms) total += a.mass;
  return total;
}

}  // namespace vvot
