#include "vvot/graph_wasserstein.hpp"

#include <boost/numeric/odeint.hpp>
#include <cmath>

#include "vvot/dynamic_solver.hpp"
#include "vvot/errors.hpp"

namespace vvot {

double path_continuity_residual(const GraphPath& path, const WeightedGraph& g) {
  double worst = 0.0;
  for (std::size_t t = 0; t + 1 < path.states.size(); ++t) {
    const double dt = path.times[t + 1] - path.times[t];
    for (int i = 0; i < g.n(); ++i) {
      double inflow = 0.0;
      for (int j = 0; j < g.n(); ++j) inflow += g.q(i, j) * path.momenta[t](i, j);
      worst = std::max(worst, std::abs(path.states[t + 1](i) - path.states[t](i) - dt * inflow));
    }
  }
  return worst;
}

double path_action(const GraphPath& path, const WeightedGraph& g, const Interpolation& f) {
  double total = 0.0;
  for (std::size_t t = 0; t + 1 < path.states.size(); ++t) {
    const double dt = path.times[t + 1] - path.times[t];
    const Vec mid = 0.5 * (path.states[t] + path.states[t + 1]);
    for (const auto& e : g.edges())
      total += dt * e.q * alpha(path.momenta[t](e.i, e.j), mid(e.i), mid(e.j), f);
  }
  return total;
}

GraphTransport wg_dynamic(const WeightedGraph& g, const Interpolation& f, const Vec& p0,
                          const Vec& p1, int T, const SolverConfig& cfg) {
  require(T >= 2, Errc::Domain, "need at least two time steps");
  require(p0.size() == g.n() && p1.size() == g.n(), Errc::LengthMismatch,
          "distributions must have one entry per node");
  check_distribution(p0);
  check_distribution(p1);

  const SpatialGrid point{0.0, 1.0, 1};
  const DynamicSolution sol =
      solve_grid_transport(g, f, point, p0.transpose(), p1.transpose(), T, cfg);

  GraphTransport out;
  GraphPath& path = out.path;
  path.info = sol.info;
  for (int t = 0; t <= T; ++t) {
    path.times.push_back(static_cast<double>(t) / T);
    path.states.push_back(sol.slice(t).row(0).transpose());
  }
  for (int t = 0; t < T; ++t) {
    EdgeField s = EdgeField::Zero(g.n(), g.n());
    for (int i = 0; i < g.n(); ++i)
      for (int j = 0; j < g.n(); ++j) s(i, j) = sol.sigma_at(t, 0, i, j);
    path.momenta.push_back(std::move(s));
  }
  out.distance = std::sqrt(path_action(path, g, f));
  return out;
}

double simplex_distance(const WeightedGraph& g, const Interpolation& f, const Vec& r0,
                        const Vec& r1, int T, const SolverConfig& cfg) {
  require(r0.size() == g.n() - 1 && r1.size() == g.n() - 1, Errc::LengthMismatch,
          "simplex points need n-1 coordinates");
  check_simplex_point(r0);
  check_simplex_point(r1);
  if (r0 == r1) return 0.0;
  if (g.n() == 2) return wg_two_node(f, g.q(0, 1), r0(0), r1(0));
  return wg_dynamic(g, f, simplex_to_distribution(r0), simplex_to_distribution(r1), T, cfg)
      .distance;
}

namespace {

GraphPath two_node_path(const std::vector<double>& r, double q) {
  const int steps = static_cast<int>(r.size()) - 1;
  GraphPath path;
  for (int k = 0; k <= steps; ++k) {
    path.times.push_back(static_cast<double>(k) / steps);
    path.states.push_back((Vec(2) << r[k], 1.0 - r[k]).finished());
  }
  for (int k = 0; k < steps; ++k) {
    const double s = (r[k + 1] - r[k]) * steps / q;
    path.momenta.push_back((EdgeField(2, 2) << 0.0, s, -s, 0.0).finished());
  }
  path.info.converged = true;
  return path;
}

// Inverts the arclength a -> d(r_start, a) by bisection.
double arclength_point(const Interpolation& f, double q, double r_start, double r_end,
                       double length) {
  double lo = std::min(r_start, r_end), hi = std::max(r_start, r_end);
  for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double reached = wg_two_node(f, q, r_start, mid);
    ((reached < length) == (r_end > r_start) ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

GraphPath two_node_geodesic(const Interpolation& f, double q, double r_start, double r_end,
                            int steps) {
  require(steps >= 1, Errc::Domain, "need at least one step");
  require(q > 0.0, Errc::Domain, "edge weight must be positive");
  require(r_start >= 0 && r_start <= 1 && r_end >= 0 && r_end <= 1, Errc::Domain,
          "endpoints must lie in [0,1]");
  std::vector<double> r(steps + 1, r_start);
  if (r_start == r_end) return two_node_path(r, q);

  const double d = wg_two_node(f, q, r_start, r_end);
  const double dir = r_end > r_start ? 1.0 : -1.0;
  const bool boundary = !(f(r_start, 1 - r_start) > 0.0) || !(f(r_end, 1 - r_end) > 0.0);
  if (!boundary) {
    namespace ode = boost::numeric::odeint;
    using State = std::array<double, 1>;
    auto rhs = [&](const State& x, State& dxdt, double) {
      const double a = std::clamp(x[0], 0.0, 1.0);
      dxdt[0] = dir * std::sqrt(q) * d * std::sqrt(std::max(f(a, 1 - a), 0.0));
    };
    State x{r_start};
    std::vector<double> times(steps + 1);
    for (int k = 0; k <= steps; ++k) times[k] = static_cast<double>(k) / steps;
    int k = 0;
    auto stepper = ode::make_controlled(1e-13, 1e-13, ode::runge_kutta_dopri5<State>());
    ode::integrate_times(stepper, rhs, x, times.begin(), times.end(), 1e-3,
                         [&](const State& s, double) { r[k++] = s[0]; });
    if (std::abs(r.back() - r_end) <= 1e-6) {
      r.back() = r_end;
      return two_node_path(r, q);
    }
  }
  // theta vanishes at an endpoint, where the ODE has a stationary point: place
  // the samples at equal arclength instead.
  for (int k = 1; k < steps; ++k)
    r[k] = arclength_point(f, q, r_start, r_end, d * static_cast<double>(k) / steps);
  r.back() = r_end;
  return two_node_path(r, q);
}

std::vector<Vec> regularized_geodesic(const std::vector<Vec>& path, double a, const Vec& s0,
                                      const Vec& s1) {
  require(a >= 0.0 && a <= 1.0, Errc::Domain, "mixing weight must lie in [0,1]");
  require(!path.empty(), Errc::Domain, "empty path");
  for (const Vec* s : {&s0, &s1}) {
    require(s->size() == path.front().size(), Errc::LengthMismatch, "anchor dimension");
    require(s->minCoeff() > 0.0 && s->sum() < 1.0, Errc::BoundaryAnchors,
            "anchors must lie in the interior of the simplex");
  }
  const std::size_t K = path.size();
  std::vector<Vec> out;
  out.reserve(K);
  for (std::size_t k = 0; k < K; ++k) {
    require(path[k].size() == s0.size(), Errc::LengthMismatch, "path point dimension");
    const double t = K == 1 ? 0.0 : static_cast<double>(k) / (K - 1);
    out.push_back((1 - a) * path[k] + a * ((1 - t) * s0 + t * s1));
  }
  return out;
}

Mat d_w_matrix(const WeightedGraph& g, const Interpolation& f, int T, const SolverConfig& cfg) {
  const int n = g.n();
  Mat d = Mat::Zero(n, n);
  std::vector<std::pair<int, int>> pairs;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) pairs.emplace_back(i, j);
  for (const auto& [i, j] : pairs) {
    const double v =
        simplex_distance(g, f, simplex_corner(n, i), simplex_corner(n, j), T, cfg);
    d(i, j) = d(j, i) = v;
  }
  return d;
}

}  // namespace vvot
