#include "vvot/prox.hpp"

#include <cmath>

namespace vvot {

PerspectivePoint prox_perspective_sq(double x_bar_sq, double y_bar, double tau) {
  if (x_bar_sq == 0.0) return {0.0, std::max(y_bar, 0.0)};
  // Root of (y - y_bar)(y + 2 tau)^2 = tau |x_bar|^2 on y > max(0, y_bar).
  const double rhs = tau * x_bar_sq;
  const double y0 = std::max(y_bar, 0.0);
  auto cubic = [&](double y) {
    const double w = y + 2.0 * tau;
    return (y - y_bar) * w * w - rhs;
  };
  if (cubic(0.0) >= 0.0) return {0.0, 0.0};
  // p is increasing and convex right of y0, so Newton from y0 lands right of the
  // root after one step and then decreases monotonically.
  double y = y0;
  for (int it = 0; it < 200; ++it) {
    const double w = y + 2.0 * tau;
    const double p = (y - y_bar) * w * w - rhs;
    const double dp = w * w + 2.0 * (y - y_bar) * w;
    const double next = y - p / dp;
    const bool done = std::abs(next - y) <= 1e-15 * (1.0 + std::abs(y));
    y = next;
    if (done) break;
  }
  return {y / (y + 2.0 * tau), y};
}

ScalarProx prox_perspective(double x_bar, double y_bar, double tau) {
  const auto pt = prox_perspective_sq(x_bar * x_bar, y_bar, tau);
  return {pt.shrink * x_bar, pt.y};
}

VectorProx prox_perspective(const Vec& x_bar, double y_bar, double tau) {
  const auto pt = prox_perspective_sq(x_bar.squaredNorm(), y_bar, tau);
  return {pt.shrink * x_bar, pt.y};
}

double graph_term_objective(double sigma, double rho_i, double rho_j, double sigma_bar,
                            double rho_i_bar, double rho_j_bar, double tau,
                            const Interpolation& f) {
  double theta;
  if (f.kind() == ThetaKind::Arithmetic) {
    if (rho_i + rho_j < 0.0) return kInf;
    theta = 0.5 * (rho_i + rho_j);
  } else {
    if (rho_i < 0.0 || rho_j < 0.0) return kInf;
    theta = f(rho_i, rho_j);
  }
  const double dist = (sigma - sigma_bar) * (sigma - sigma_bar) +
                      (rho_i - rho_i_bar) * (rho_i - rho_i_bar) +
                      (rho_j - rho_j_bar) * (rho_j - rho_j_bar);
  return alpha_sq(sigma * sigma, theta) + dist / (2.0 * tau);
}

namespace {

// Whether sup over directions of a t + b s + c theta(t,s) is <= 0 for a, b <= 0.
bool origin_is_optimal(double a, double b, double c, const Interpolation& f) {
  if (f.kind() == ThetaKind::Geometric) return c * c <= 4.0 * a * b;
  auto h = [&](double t) { return a * t + b * (1.0 - t) + c * f(t, 1.0 - t); };
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double lo = 0.0, hi = 1.0;
  double x1 = hi - phi * (hi - lo), x2 = lo + phi * (hi - lo);
  double h1 = h(x1), h2 = h(x2);
  for (int it = 0; it < 80; ++it) {
    if (h1 < h2) {
      lo = x1;
      x1 = x2;
      h1 = h2;
      x2 = lo + phi * (hi - lo);
      h2 = h(x2);
    } else {
      hi = x2;
      x2 = x1;
      h2 = h1;
      x1 = hi - phi * (hi - lo);
      h1 = h(x1);
    }
  }
  return std::max({h1, h2, h(0.0), h(1.0)}) <= 0.0;
}

GraphTermProx newton_graph_prox(double sb, double ab, double bb, double tau,
                                const Interpolation& f) {
  const double s2 = sb * sb;
  if (s2 == 0.0) return {0.0, std::max(ab, 0.0), std::max(bb, 0.0)};
  if (ab <= 0.0 && bb <= 0.0 && origin_is_optimal(ab / tau, bb / tau, s2 / (4 * tau * tau), f))
    return {0.0, 0.0, 0.0};

  // Eliminating sigma = sb theta/(theta + 2 tau) leaves a smooth strictly convex
  // function of (a,b) on the open quadrant.
  auto value = [&](double a, double b) {
    const double th = f(a, b);
    return s2 / (th + 2 * tau) + ((a - ab) * (a - ab) + (b - bb) * (b - bb)) / (2 * tau);
  };
  const double scale = std::abs(ab) + std::abs(bb) + std::abs(sb) + tau;
  double a = std::max(ab, 0.0) + 1e-2 * scale;
  double b = std::max(bb, 0.0) + 1e-2 * scale;
  double g = value(a, b);
  bool converged = false;
  for (int it = 0; it < 50; ++it) {
    const double th = f(a, b);
    const auto grad = f.gradient(a, b);
    const double w = th + 2 * tau;
    const double c1 = -s2 / (w * w);
    const double ga = c1 * grad[0] + (a - ab) / tau;
    const double gb = c1 * grad[1] + (b - bb) / tau;
    if (tau * std::hypot(ga, gb) <= 1e-12 * (1.0 + a + b)) {
      converged = true;
      break;
    }
    const auto ht = f.hessian(a, b);
    const double c2 = 2 * s2 / (w * w * w);
    const double haa = c2 * grad[0] * grad[0] + c1 * ht[0] + 1.0 / tau;
    const double hab = c2 * grad[0] * grad[1] + c1 * ht[1];
    const double hbb = c2 * grad[1] * grad[1] + c1 * ht[2] + 1.0 / tau;
    const double det = haa * hbb - hab * hab;
    double da = -(hbb * ga - hab * gb) / det;
    double db = -(haa * gb - hab * ga) / det;
    if (!(std::isfinite(da) && std::isfinite(db))) break;
    double step = 1.0;
    if (a + da <= 0.0) step = std::min(step, 0.99 * a / -da);
    if (b + db <= 0.0) step = std::min(step, 0.99 * b / -db);
    const double slope = ga * da + gb * db;
    double na = a, nb = b, ng = g;
    for (int ls = 0; ls < 60; ++ls) {
      na = a + step * da;
      nb = b + step * db;
      ng = value(na, nb);
      if (ng <= g + 1e-4 * step * slope) break;
      step *= 0.5;
    }
    const double moved = std::abs(na - a) + std::abs(nb - b);
    a = na;
    b = nb;
    g = ng;
    if (moved <= 1e-15 * (1.0 + a + b)) {
      converged = true;
      break;
    }
    if (a + b <= 1e-300) break;
  }
  const double th = f(a, b);
  return {sb * th / (th + 2 * tau), a, b, !converged};
}

}  // namespace

GraphTermProx prox_graph_term(double sigma_bar, double rho_i_bar, double rho_j_bar, double tau,
                              const Interpolation& f) {
  if (f.kind() == ThetaKind::Arithmetic) {
    const double y_bar = 0.5 * (rho_i_bar + rho_j_bar);
    const double z = 0.5 * (rho_i_bar - rho_j_bar);
    const auto p = prox_perspective(sigma_bar / std::sqrt(2.0), y_bar, tau);
    return {p.x * std::sqrt(2.0), p.y + z, p.y - z};
  }
  return newton_graph_prox(sigma_bar, rho_i_bar, rho_j_bar, tau, f);
}

}  // namespace vvot
