#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>

#include "vvot/errors.hpp"
#include "vvot/graph_wasserstein.hpp"

namespace vvot {

namespace {

// Integral of theta(a, 1-a)^(-1/2) over [lo, hi] within one half of [0,1]. On
// the upper half the integration variable is 1-a so that both singular
// endpoints are resolved in absolute precision. tanh-sinh handles the piece
// next to the singular endpoint; the smooth piece uses Gauss-Kronrod, whose
// error estimate stays meaningful on very short intervals.
double half_integral(const Interpolation& f, double lo, double hi, bool upper) {
  if (hi <= lo) return 0.0;
  auto integrand = [&](double u) {
    const double th = upper ? f(1.0 - u, u) : f(u, 1.0 - u);
    return th > 0.0 ? 1.0 / std::sqrt(th) : kInf;
  };
  const double a = upper ? 1.0 - hi : lo;
  const double b = upper ? 1.0 - lo : hi;
  constexpr double smooth_from = 0.25;
  double value = 0.0, error = 0.0;
  try {
    if (a < smooth_from) {
      boost::math::quadrature::tanh_sinh<double> rule;
      double l1 = 0.0;
      value += rule.integrate(integrand, a, std::min(b, smooth_from), 1e-10, &error, &l1);
    }
    if (b > smooth_from) {
      double gk_error = 0.0;
      value += boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
          integrand, std::max(a, smooth_from), b, 15, 1e-12, &gk_error);
      error += gk_error;
    }
  } catch (const std::exception& e) {
    fail(Errc::DivergentIntegral, std::string("two-node integral: ") + e.what());
  }
  require(std::isfinite(value) && error <= 1e-8 * std::max(1.0, std::abs(value)),
          Errc::DivergentIntegral, "two-node integral does not converge");
  return value;
}

}  // namespace

double wg_two_node(const Interpolation& f, double q, double a0, double a1) {
  require(q > 0.0, Errc::Domain, "edge weight must be positive");
  require(a0 >= 0.0 && a0 <= 1.0 && a1 >= 0.0 && a1 <= 1.0, Errc::Domain,
          "two-node endpoints must lie in [0,1]");
  if (a0 == a1) return 0.0;
  const double lo = std::min(a0, a1), hi = std::max(a0, a1);
  const double total = half_integral(f, lo, std::min(hi, 0.5), false) +
                       half_integral(f, std::max(lo, 0.5), hi, true);
  return total / std::sqrt(q);
}

}  // namespace vvot
