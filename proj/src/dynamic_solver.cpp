#include "vvot/dynamic_solver.hpp"

#include <cmath>
#include <map>

#include "vvot/errors.hpp"
#include "vvot/graph_wasserstein.hpp"

namespace vvot {

Mat rasterize(const DiscreteVectorMeasure& mu, const SpatialGrid& grid, int smoothing) {
  require(mu.dim() == 1, Errc::NotImplemented, "grid solver supports one spatial dimension");
  require(smoothing >= 0, Errc::Domain, "smoothing passes must be nonnegative");
  const int C = grid.cells, n = mu.n();
  Mat out = Mat::Zero(C, n);
  for (const auto& atom : mu.atoms()) {
    const double x = atom.x(0);
    require(x >= grid.x_min && x <= grid.x_max, Errc::Domain, "atom outside the spatial grid");
    const double u = (x - grid.x_min) / grid.dx() - 0.5;
    const int c = static_cast<int>(std::floor(u));
    const double frac = u - c;
    for (int i = 0; i < n; ++i) {
      out(std::clamp(c, 0, C - 1), i) += (1 - frac) * atom.w(i);
      out(std::clamp(c + 1, 0, C - 1), i) += frac * atom.w(i);
    }
  }
  for (int pass = 0; pass < smoothing && C > 1; ++pass) {
    Mat next = Mat::Zero(C, n);
    for (int c = 0; c < C; ++c) {
      next.row(c) += 0.5 * out.row(c);
      next.row(c > 0 ? c - 1 : c) += 0.25 * out.row(c);
      next.row(c + 1 < C ? c + 1 : c) += 0.25 * out.row(c);
    }
    out = std::move(next);
  }
  return out;
}

DynamicResult w_dynamic(const WeightedGraph& g, const Interpolation& f,
                        const DiscreteVectorMeasure& mu, const DiscreteVectorMeasure& nu,
                        const SpatialGrid& grid, int T, const SolverConfig& cfg, int smoothing) {
  require(T >= 8, Errc::Domain, "need at least eight time steps");
  require(mu.n() == g.n() && nu.n() == g.n(), Errc::LengthMismatch,
          "measures must have one weight per node");
  const Mat rho0 = rasterize(mu, grid, smoothing);
  const Mat rho1 = rasterize(nu, grid, smoothing);
  require(std::abs(rho0.sum() - rho1.sum()) <= 1e-12 * std::max(1.0, rho0.sum()),
          Errc::InfeasibleEndpoints, "measures have different total mass");
  DynamicResult out;
  out.solution = solve_grid_transport(g, f, grid, rho0, rho1, T, cfg);
  out.distance = std::sqrt(action(out.solution, g, f));
  return out;
}

double continuity_residual(const DynamicSolution& sol, const WeightedGraph& g) {
  const double dt = sol.dt(), dx = sol.grid.dx();
  double worst = 0.0;
  for (int t = 0; t < sol.T; ++t)
    for (int c = 0; c < sol.cells(); ++c)
      for (int i = 0; i < sol.n; ++i) {
        double rate = (sol.rho_at(t + 1, c, i) - sol.rho_at(t, c, i)) / dt +
                      sol.m_at(t, c + 1, i) - sol.m_at(t, c, i);
        for (int j = 0; j < sol.n; ++j) rate -= g.q(i, j) * sol.sigma_at(t, c, i, j);
        worst = std::max(worst, std::abs(rate) / dx);
      }
  return worst;
}

double action(const DynamicSolution& sol, const WeightedGraph& g, const Interpolation& f) {
  const double dt = sol.dt(), dx = sol.grid.dx();
  double total = 0.0;
  for (int t = 0; t < sol.T; ++t) {
    auto avg = [&](int c, int i) { return 0.5 * (sol.rho_at(t, c, i) + sol.rho_at(t + 1, c, i)); };
    for (int face = 1; face < sol.cells(); ++face)
      for (int i = 0; i < sol.n; ++i) {
        const double y = 0.5 * (avg(face - 1, i) + avg(face, i));
        total += dt * dx * dx * alpha_sq(sol.m_at(t, face, i) * sol.m_at(t, face, i), y);
      }
    for (int c = 0; c < sol.cells(); ++c)
      for (const auto& e : g.edges())
        total += dt * e.q * alpha(sol.sigma_at(t, c, e.i, e.j), avg(c, e.i), avg(c, e.j), f);
  }
  return total;
}

CandidatePath two_node_candidate_path(const Interpolation& f, double q, double a, double b,
                                      double t0, int T) {
  require(t0 > 0.0 && t0 < 1.0, Errc::Domain, "merge time must lie in (0,1)");
  require(a >= 0.0 && b >= 0.0 && b <= 1.0 && q > 0.0, Errc::Domain, "bad example parameters");
  require(T >= 2, Errc::Domain, "need at least two steps");
  const int T0 = std::clamp(static_cast<int>(std::lround(T * t0)), 1, T - 1);
  const int T1 = T - T0;

  CandidatePath path;
  path.q = q;
  path.f = f;
  path.merge_step = T0;
  for (int k = 0; k <= T0; ++k) {
    const double s = static_cast<double>(k) / T0;
    path.times.push_back(t0 * s);
    path.x_left.push_back(-a * (1 - s));
    path.x_right.push_back(a * (1 - s));
    path.r.push_back(0.5);
  }
  for (int k = 0; k < T0; ++k) {
    path.u_left.push_back(a / t0);
    path.u_right.push_back(-a / t0);
    path.v12.push_back(0.0);
  }
  const GraphPath mutation = two_node_geodesic(f, q, 0.5, b, T1);
  for (int k = 1; k <= T1; ++k) {
    path.times.push_back(t0 + (1 - t0) * mutation.times[k]);
    path.x_left.push_back(0.0);
    path.x_right.push_back(0.0);
    path.r.push_back(mutation.states[k](0));
  }
  for (int k = 0; k < T1; ++k) {
    const double r0 = mutation.states[k](0), r1 = mutation.states[k + 1](0);
    const double dt = (1 - t0) / T1;
    const double mid = 0.5 * (r0 + r1);
    path.u_left.push_back(0.0);
    path.u_right.push_back(0.0);
    path.v12.push_back((r1 - r0) / (dt * q * f(mid, 1 - mid)));
  }
  return path;
}

double candidate_action(const CandidatePath& path) {
  double total = 0.0;
  const std::size_t steps = path.times.size() - 1;
  for (std::size_t k = 0; k < steps; ++k) {
    const double dt = path.times[k + 1] - path.times[k];
    if (static_cast<int>(k) < path.merge_step) {
      total += dt * (path.r[k] * path.u_left[k] * path.u_left[k] +
                     (1 - path.r[k]) * path.u_right[k] * path.u_right[k]);
    } else {
      const double len = wg_two_node(path.f, path.q, path.r[k], path.r[k + 1]);
      total += len * len / dt;
    }
  }
  return total;
}

ProjectedVelocity project_lifted_dynamics(const std::vector<LiftedVelocityAtom>& atoms,
                                          const WeightedGraph& g, const Interpolation& f,
                                          double interior_tol) {
  const int n = g.n();
  require(!atoms.empty(), Errc::Domain, "no atoms");
  const int d = static_cast<int>(atoms.front().x.size());

  // Group atoms by spatial location (exact equality).
  auto less = [](const Vec& a, const Vec& b) {
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
  };
  std::map<Vec, std::vector<std::size_t>, decltype(less)> groups(less);
  for (std::size_t k = 0; k < atoms.size(); ++k) {
    const auto& at = atoms[k];
    require(at.x.size() == d && at.w1.size() == d, Errc::LengthMismatch, "spatial dimension");
    require(at.r.size() == n - 1 && at.w2.size() == n - 1, Errc::LengthMismatch,
            "simplex dimension");
    require(at.mass > 0.0, Errc::Domain, "atom masses must be positive");
    const Vec p = simplex_to_distribution(at.r);
    require(p.minCoeff() >= interior_tol, Errc::BoundaryAtom,
            "atom lies on the boundary of the simplex");
    groups[at.x].push_back(k);
  }

  ProjectedVelocity out;
  for (const auto& [x, members] : groups) {
    Vec rho = Vec::Zero(n);
    Mat flux = Mat::Zero(n, d);
    EdgeField momentum = EdgeField::Zero(n, n);
    for (std::size_t k : members) {
      const auto& at = atoms[k];
      const Vec p = simplex_to_distribution(at.r);
      // Continuity here reads dp_i/dt = sum_j q_ij theta_ij (phi_j - phi_i) = -(B phi)_i,
      // so the potential realizing the simplex velocity solves B phi = -Xi w2.
      Vec phi;
      try {
        phi = laplacian_pinv_apply(weighted_laplacian(g, f, p), -mean_zero_extension(at.w2));
      } catch (const Error& e) {
        fail(Errc::SingularLaplacian, e.what());
      }
      const EdgeField grad = graph_gradient(g, phi);
      out.action_before +=
          at.mass * (at.w1.squaredNorm() + tangent_inner_product(g, f, p, grad, grad));
      rho += at.mass * p;
      for (int j = 0; j < n; ++j) flux.row(j) += at.mass * p(j) * at.w1.transpose();
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) momentum(i, j) += at.mass * f(p(i), p(j)) * grad(i, j);
    }
    Mat u = Mat::Zero(n, d);
    EdgeField v = EdgeField::Zero(n, n);
    for (int j = 0; j < n; ++j) u.row(j) = flux.row(j) / rho(j);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (i != j) v(i, j) = momentum(i, j) / f(rho(i), rho(j));
    for (int j = 0; j < n; ++j) out.action_after += rho(j) * u.row(j).squaredNorm();
    for (const auto& e : g.edges())
      out.action_after += e.q * f(rho(e.i), rho(e.j)) * v(e.i, e.j) * v(e.i, e.j);
    out.locations.push_back(x);
    out.rho.push_back(std::move(rho));
    out.u.push_back(std::move(u));
    out.v.push_back(std::move(v));
  }
  return out;
}

}  // namespace vvot
