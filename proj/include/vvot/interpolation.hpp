#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace vvot {

enum class ThetaKind { Arithmetic, Geometric, Logarithmic, Custom };

// Mean used to weight graph momenta by the densities at both ends of an edge.
class Interpolation {
 public:
  using Fn = std::function<double(double, double)>;

  static Interpolation arithmetic();
  static Interpolation geometric();
  static Interpolation logarithmic();
  static Interpolation custom(Fn fn, std::string name = "custom");
  // Accepts "arithmetic", "geometric" or "logarithmic".
  static Interpolation parse(std::string_view name);

  ThetaKind kind() const noexcept { return kind_; }
  const std::string& name() const noexcept { return name_; }

  double operator()(double s, double t) const;
  // Partial derivatives at an interior point (s,t > 0).
  std::array<double, 2> gradient(double s, double t) const;
  // Second derivatives (ss, st, tt) at an interior point.
  std::array<double, 3> hessian(double s, double t) const;
  bool vanishes_at_boundary() const;

 private:
  Interpolation(ThetaKind kind, std::string name, Fn fn = {})
      : kind_(kind), name_(std::move(name)), fn_(std::move(fn)) {}

  ThetaKind kind_;
  std::string name_;
  Fn fn_;
};

// Throws Errc::Domain on negative arguments.
double theta_eval(const Interpolation& f, double s, double t);

struct PropertyViolation {
  std::string property;
  std::vector<double> witness;
  double gap = 0.0;
};

struct PropertyReport {
  int samples = 0;
  std::vector<PropertyViolation> violations;
  bool ok() const { return violations.empty(); }
  bool violates(std::string_view property) const;
};

// Sample-based check of symmetry, positivity, normalization, monotonicity,
// homogeneity, concavity and domination by the arithmetic mean on [0,10]^2.
PropertyReport validate_interpolation(const Interpolation& f, int n_samples, std::uint64_t seed,
                                      double tol = 1e-9);

}  // namespace vvot
