#include <doctest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>

#include "vvot/errors.hpp"
#include "vvot/interpolation.hpp"

using namespace vvot;

TEST_CASE("theta values") {
  CHECK(theta_eval(Interpolation::arithmetic(), 1, 1) == 1.0);
  CHECK(theta_eval(Interpolation::geometric(), 4, 1) == doctest::Approx(2.0));

  // Logarithmic mean as the integral of s^(1-u) t^u over u in [0,1].
  const double e = std::exp(1.0);
  const double oracle = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
      [&](double u) { return std::pow(1.0, 1 - u) * std::pow(e, u); }, 0.0, 1.0);
  CHECK(theta_eval(Interpolation::logarithmic(), 1, e) == doctest::Approx(oracle).epsilon(1e-13));
  CHECK(theta_eval(Interpolation::logarithmic(), 1, e) == doctest::Approx(1.718281828459045));

  const auto lm = Interpolation::logarithmic();
  CHECK(lm(0.7, 0.7) == doctest::Approx(0.7));
  CHECK(lm(0.7, 0.7 * (1 + 1e-12)) == doctest::Approx(0.7).epsilon(1e-11));
  CHECK(lm(0.0, 3.0) == 0.0);
  CHECK(lm(0.0, 0.0) == 0.0);

  try {
    theta_eval(Interpolation::geometric(), -1, 1);
    FAIL("expected a domain error");
  } catch (const Error& err) {
    CHECK(err.code() == Errc::Domain);
  }
}

TEST_CASE("parse by name") {
  CHECK(Interpolation::parse("geometric").kind() == ThetaKind::Geometric);
  CHECK(Interpolation::parse("logarithmic").kind() == ThetaKind::Logarithmic);
  CHECK_THROWS_AS(Interpolation::parse("harmonic"), Error);
}

TEST_CASE("property checks") {
  for (const auto& f : {Interpolation::arithmetic(), Interpolation::geometric(),
                        Interpolation::logarithmic()}) {
    const auto report = validate_interpolation(f, 10000, 42);
    CHECK_MESSAGE(report.ok(), f.name());
    CHECK(report.samples == 10000);
  }

  const auto mx = Interpolation::custom([](double s, double t) { return std::max(s, t); }, "max");
  const auto report = validate_interpolation(mx, 1000, 42);
  REQUIRE(report.violates("concavity"));
  for (const auto& v : report.violations)
    if (v.property == "concavity") {
      REQUIRE(v.witness.size() == 4);
      const double s = v.witness[0], t = v.witness[1], s2 = v.witness[2], t2 = v.witness[3];
      CHECK(mx(0.5 * (s + s2), 0.5 * (t + t2)) < 0.5 * (mx(s, t) + mx(s2, t2)));
    }
  // max also exceeds the arithmetic mean off the diagonal.
  CHECK(report.violates("arithmetic_bound"));
}

TEST_CASE("derivatives against finite differences") {
  const double h = 1e-5;
  for (const auto& f : {Interpolation::arithmetic(), Interpolation::geometric(),
                        Interpolation::logarithmic()}) {
    for (auto [s, t] : {std::pair{0.3, 0.9}, std::pair{2.0, 0.5}, std::pair{1.0, 1.0 + 1e-3}}) {
      const auto g = f.gradient(s, t);
      CHECK(g[0] == doctest::Approx((f(s + h, t) - f(s - h, t)) / (2 * h)).epsilon(1e-7));
      CHECK(g[1] == doctest::Approx((f(s, t + h) - f(s, t - h)) / (2 * h)).epsilon(1e-7));
      const auto H = f.hessian(s, t);
      const double hh = 1e-4;
      const double fd_ss = (f(s + hh, t) - 2 * f(s, t) + f(s - hh, t)) / (hh * hh);
      CHECK(H[0] == doctest::Approx(fd_ss).epsilon(1e-4).scale(1.0));
      // Homogeneity: Euler identity.
      CHECK(g[0] * s + g[1] * t == doctest::Approx(f(s, t)).epsilon(1e-12));
    }
  }
  CHECK(Interpolation::geometric().vanishes_at_boundary());
  CHECK_FALSE(Interpolation::arithmetic().vanishes_at_boundary());
}
