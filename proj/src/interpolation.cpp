#include "vvot/interpolation.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "vvot/errors.hpp"

namespace vvot {

namespace {

double log_mean(double s, double t) {
  if (s == t) return s;
  if (s == 0.0 || t == 0.0) return 0.0;
  if (s > t) std::swap(s, t);
  const double diff = t - s;
  return diff / std::log1p(diff / s);
}

// d/ds of the logarithmic mean, written in the ratio x = t/s.
double log_mean_ds(double s, double t) {
  const double eps = t / s - 1.0;
  if (std::abs(eps) < 1e-5) return 0.5 + eps / 6.0;
  const double d = std::log1p(eps);
  return (eps / d - 1.0) / d;
}

}  // namespace

Interpolation Interpolation::arithmetic() { return {ThetaKind::Arithmetic, "arithmetic"}; }
Interpolation Interpolation::geometric() { return {ThetaKind::Geometric, "geometric"}; }
Interpolation Interpolation::logarithmic() { return {ThetaKind::Logarithmic, "logarithmic"}; }

Interpolation Interpolation::custom(Fn fn, std::string name) {
  require(static_cast<bool>(fn), Errc::Domain, "custom interpolation needs a callable");
  return {ThetaKind::Custom, std::move(name), std::move(fn)};
}

Interpolation Interpolation::parse(std::string_view name) {
  if (name == "arithmetic") return arithmetic();
  if (name == "geometric") return geometric();
  if (name == "logarithmic") return logarithmic();
  fail(Errc::Parse, "unknown interpolation '" + std::string(name) +
                        "' (expected arithmetic|geometric|logarithmic)");
}

double Interpolation::operator()(double s, double t) const {
  switch (kind_) {
    case ThetaKind::Arithmetic: return 0.5 * (s + t);
    case ThetaKind::Geometric: return std::sqrt(s * t);
    case ThetaKind::Logarithmic: return log_mean(s, t);
    case ThetaKind::Custom: return fn_(s, t);
  }
  return 0.0;
}

std::array<double, 2> Interpolation::gradient(double s, double t) const {
  switch (kind_) {
    case ThetaKind::Arithmetic: return {0.5, 0.5};
    case ThetaKind::Geometric: {
      const double g = std::sqrt(s * t);
      return {0.5 * t / g, 0.5 * s / g};
    }
    case ThetaKind::Logarithmic: return {log_mean_ds(s, t), log_mean_ds(t, s)};
    case ThetaKind::Custom: break;
  }
  const double hs = 1e-6 * std::max(1.0, s), ht = 1e-6 * std::max(1.0, t);
  const double ds = s > hs ? ((*this)(s + hs, t) - (*this)(s - hs, t)) / (2 * hs)
                           : ((*this)(s + hs, t) - (*this)(s, t)) / hs;
  const double dt = t > ht ? ((*this)(s, t + ht) - (*this)(s, t - ht)) / (2 * ht)
                           : ((*this)(s, t + ht) - (*this)(s, t)) / ht;
  return {ds, dt};
}

std::array<double, 3> Interpolation::hessian(double s, double t) const {
  switch (kind_) {
    case ThetaKind::Arithmetic: return {0.0, 0.0, 0.0};
    case ThetaKind::Geometric: {
      const double g = std::sqrt(s * t);
      const double g3 = 4.0 * g * g * g;
      return {-t * t / g3, 0.25 / g, -s * s / g3};
    }
    default: break;
  }
  const double hs = 1e-6 * s, ht = 1e-6 * t;
  const auto sp = gradient(s + hs, t), sm = gradient(s - hs, t);
  const auto tp = gradient(s, t + ht), tm = gradient(s, t - ht);
  const double cross = 0.5 * ((sp[1] - sm[1]) / (2 * hs) + (tp[0] - tm[0]) / (2 * ht));
  return {(sp[0] - sm[0]) / (2 * hs), cross, (tp[1] - tm[1]) / (2 * ht)};
}

bool Interpolation::vanishes_at_boundary() const { return (*this)(1.0, 0.0) == 0.0; }

double theta_eval(const Interpolation& f, double s, double t) {
  require(s >= 0.0 && t >= 0.0, Errc::Domain, "interpolation arguments must be nonnegative");
  return f(s, t);
}

bool PropertyReport::violates(std::string_view property) const {
  return std::any_of(violations.begin(), violations.end(),
                     [&](const PropertyViolation& v) { return v.property == property; });
}

PropertyReport validate_interpolation(const Interpolation& f, int n_samples, std::uint64_t seed,
                                      double tol) {
  require(n_samples >= 1, Errc::Domain, "n_samples must be positive");
  PropertyReport report;
  report.samples = n_samples;
  auto flag = [&](const char* name, std::vector<double> witness, double gap) {
    if (report.violates(name)) return;
    report.violations.push_back({name, std::move(witness), gap});
  };
  auto slack = [tol](double v) { return tol * (1.0 + std::abs(v)); };

  const double one = f(1.0, 1.0);
  if (std::abs(one - 1.0) > tol) flag("normalization", {1.0, 1.0}, std::abs(one - 1.0));

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> box(0.0, 10.0), unit(0.0, 1.0);
  for (int k = 0; k < n_samples; ++k) {
    const double s = box(rng), t = box(rng), s2 = box(rng), t2 = box(rng);
    const double lambda = 10.0 * (1.0 - unit(rng));
    const double shrink = unit(rng);
    const double v = f(s, t);

    if (double gap = std::abs(v - f(t, s)); gap > slack(v)) flag("symmetry", {s, t}, gap);
    if (s > 0 && t > 0 && !(v > 0.0)) flag("positivity", {s, t}, -v);
    if (double lower = f(shrink * s, t); lower > v + slack(v))
      flag("monotonicity", {shrink * s, s, t}, lower - v);
    if (double gap = std::abs(f(lambda * s, lambda * t) - lambda * v); gap > slack(lambda * v))
      flag("homogeneity", {s, t, lambda}, gap);
    const double mid = f(0.5 * (s + s2), 0.5 * (t + t2));
    const double chord = 0.5 * (v + f(s2, t2));
    if (mid < chord - slack(chord)) flag("concavity", {s, t, s2, t2}, chord - mid);
    if (double bound = 0.5 * (s + t); v > bound + slack(bound))
      flag("arithmetic_bound", {s, t}, v - bound);
  }
  return report;
}

}  // namespace vvot
