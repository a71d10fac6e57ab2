#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>
#include <random>

#include "transport_program.hpp"
#include "vvot/errors.hpp"
#include "vvot/prox.hpp"

namespace vvot {

namespace {

template <class OnFailure>
void apply_block(const DualBlocks& blocks, const Interpolation& f, double step, const double* k0,
                 double* y, std::size_t b, OnFailure&& on_failure) {
  const std::size_t faces = blocks.face_weight.size();
  if (b < faces) {
    double* v = y + 2 * b;
    const double* o = k0 + 2 * b;
    const double wm = v[0] / step + o[0], wy = v[1] / step + o[1];
    const auto p = prox_perspective(wm, wy, blocks.face_weight[b] / step);
    v[0] = step * (wm - p.x);
    v[1] = step * (wy - p.y);
    return;
  }
  const std::size_t edges = blocks.edge_weight.size();
  if (b >= faces + edges) {
    double& v = y[2 * faces + 3 * edges + (b - faces - edges)];
    v = std::min(v, 0.0);
    return;
  }
  const std::size_t e = b - faces;
  double* v = y + 2 * faces + 3 * e;
  const double* o = k0 + 2 * faces + 3 * e;
  const double ws = v[0] / step + o[0], wa = v[1] / step + o[1], wb = v[2] / step + o[2];
  const auto p = prox_graph_term(ws, wa, wb, blocks.edge_weight[e] / step, f);
  if (p.newton_failed) on_failure();
  v[0] = step * (ws - p.sigma);
  v[1] = step * (wa - p.rho_i);
  v[2] = step * (wb - p.rho_j);
}

}  // namespace

int dual_prox_serial(const DualBlocks& blocks, const Interpolation& f, double step,
                     std::span<const double> offset, std::span<double> y) {
  require(offset.size() == blocks.size() && y.size() == blocks.size(), Errc::LengthMismatch,
          "dual vector size");
  int failures = 0;
  for (std::size_t b = 0; b < blocks.count(); ++b)
    apply_block(blocks, f, step, offset.data(), y.data(), b, [&] { ++failures; });
  return failures;
}

int dual_prox_parallel(const DualBlocks& blocks, const Interpolation& f, double step,
                       std::span<const double> offset, std::span<double> y) {
  require(offset.size() == blocks.size() && y.size() == blocks.size(), Errc::LengthMismatch,
          "dual vector size");
  const auto count = static_cast<std::ptrdiff_t>(blocks.count());
  int failures = 0;
  const double* k0 = offset.data();
  double* yy = y.data();
#pragma omp parallel for schedule(static) reduction(+ : failures)
  for (std::ptrdiff_t b = 0; b < count; ++b)
    apply_block(blocks, f, step, k0, yy, static_cast<std::size_t>(b), [&] { ++failures; });
  return failures;
}

DynamicSolution::DynamicSolution(SpatialGrid grid_, int n_, int T_)
    : grid(grid_), n(n_), T(T_),
      rho(std::size_t(T_ + 1) * grid_.cells * n_, 0.0),
      m(std::size_t(T_) * (grid_.cells + 1) * n_, 0.0),
      sigma(std::size_t(T_) * grid_.cells * n_ * n_, 0.0) {}

Mat DynamicSolution::slice(int t) const {
  Mat out(cells(), n);
  for (int c = 0; c < cells(); ++c)
    for (int i = 0; i < n; ++i) out(c, i) = rho_at(t, c, i);
  return out;
}

namespace detail {

namespace {

// Linear form in the densities: interior entries become matrix coefficients,
// endpoint entries fold into a constant.
struct DensityRef {
  const Layout& L;
  const Mat& dens0;
  const Mat& dens1;

  template <class Emit>
  void add(int t, int c, int i, double coeff, Emit&& emit, double& constant) const {
    if (t == 0)
      constant += coeff * dens0(c, i);
    else if (t == L.T)
      constant += coeff * dens1(c, i);
    else
      emit(L.mass(t, c, i), coeff);
  }
};

double operator_norm(const SpMat& K) {
  if (K.nonZeros() == 0) return 1.0;
  std::mt19937_64 rng(12345);
  std::normal_distribution<double> gauss;
  Vec v(K.cols());
  for (auto& x : v) x = gauss(rng);
  v.normalize();
  double lambda = 0.0;
  for (int it = 0; it < 100; ++it) {
    Vec w = K.transpose() * (K * v);
    const double next = w.norm();
    if (next == 0.0) return 1.0;
    v = w / next;
    const bool done = std::abs(next - lambda) <= 1e-10 * next;
    lambda = next;
    if (done) break;
  }
  return std::sqrt(lambda) * 1.01;
}

}  // namespace

Program build_program(const WeightedGraph& g, const SpatialGrid& grid, const Mat& rho0,
                      const Mat& rho1, int T) {
  Program P{Layout{grid.cells, g.n(), T, static_cast<int>(g.edges().size()), g.edges()},
            1.0 / T, grid.dx(), {}, {}, {}, {}, {}, rho0 / grid.dx(), rho1 / grid.dx()};
  const Layout& L = P.L;
  const DensityRef ref{L, P.dens0, P.dens1};

  std::vector<Triplet> trips;
  const int rows = T * L.C * L.n - 1;
  P.b = Vec::Zero(rows);
  for (int t = 0; t < T; ++t) {
    for (int c = 0; c < L.C; ++c) {
      for (int i = 0; i < L.n; ++i) {
        const int r = L.row(t, c, i);
        if (r >= rows) continue;
        auto emit = [&](int col, double v) { trips.emplace_back(r, col, v); };
        double constant = 0.0;
        ref.add(t + 1, c, i, 1.0, emit, constant);
        ref.add(t, c, i, -1.0, emit, constant);
        P.b(r) = -constant;
        if (c + 1 < L.C) trips.emplace_back(r, L.flux(t, c, i), P.dt / P.dx);
        if (c > 0) trips.emplace_back(r, L.flux(t, c - 1, i), -P.dt / P.dx);
        for (int e = 0; e < L.E; ++e) {
          const auto& ed = L.edges[e];
          if (ed.i == i) trips.emplace_back(r, L.graph(t, c, e), -P.dt * ed.q);
          if (ed.j == i) trips.emplace_back(r, L.graph(t, c, e), P.dt * ed.q);
        }
      }
    }
  }
  P.A.resize(rows, L.primal());
  P.A.setFromTriplets(trips.begin(), trips.end());

  P.blocks.face_weight.assign(L.n_face_blocks(), 1.0);
  P.blocks.edge_weight.resize(L.n_edge_blocks());
  for (int t = 0; t < T; ++t)
    for (int c = 0; c < L.C; ++c)
      for (int e = 0; e < L.E; ++e) P.blocks.edge_weight[L.edge_block(t, c, e)] = L.edges[e].q;
  P.blocks.sign_count = L.n_mass();

  trips.clear();
  const int dual = static_cast<int>(P.blocks.size());
  P.k0 = Vec::Zero(dual);
  for (int t = 0; t < T; ++t) {
    for (int f = 0; f + 1 < L.C; ++f) {
      for (int i = 0; i < L.n; ++i) {
        const int row = 2 * L.face_block(t, f, i);
        trips.emplace_back(row, L.flux(t, f, i), 1.0);
        auto emit = [&](int col, double v) { trips.emplace_back(row + 1, col, v); };
        double constant = 0.0;
        for (int dtime = 0; dtime < 2; ++dtime)
          for (int dc = 0; dc < 2; ++dc) ref.add(t + dtime, f + dc, i, 0.25, emit, constant);
        P.k0(row + 1) = constant;
      }
    }
  }
  const int base = 2 * L.n_face_blocks();
  for (int t = 0; t < T; ++t) {
    for (int c = 0; c < L.C; ++c) {
      for (int e = 0; e < L.E; ++e) {
        const int row = base + 3 * L.edge_block(t, c, e);
        trips.emplace_back(row, L.graph(t, c, e), 1.0);
        const int ends[2] = {L.edges[e].i, L.edges[e].j};
        for (int k = 0; k < 2; ++k) {
          auto emit = [&](int col, double v) { trips.emplace_back(row + 1 + k, col, v); };
          double constant = 0.0;
          ref.add(t, c, ends[k], 0.5, emit, constant);
          ref.add(t + 1, c, ends[k], 0.5, emit, constant);
          P.k0(row + 1 + k) = constant;
        }
      }
    }
  }
  const int sign_base = base + 3 * L.n_edge_blocks();
  for (int k = 0; k < L.n_mass(); ++k) trips.emplace_back(sign_base + k, k, 1.0);
  P.K.resize(dual, L.primal());
  P.K.setFromTriplets(trips.begin(), trips.end());
  return P;
}

void load_masses(const Program& P, const Vec& x, DynamicSolution& sol) {
  const Layout& L = P.L;
  for (int c = 0; c < L.C; ++c)
    for (int i = 0; i < L.n; ++i) {
      sol.rho_at(0, c, i) = P.dens0(c, i) * P.dx;
      sol.rho_at(L.T, c, i) = P.dens1(c, i) * P.dx;
    }
  const double mass = P.dens0.sum() * P.dx;
  const double floor = 1e-12 * mass / (L.C * L.n);
  for (int t = 1; t < L.T; ++t) {
    double total = 0.0;
    for (int c = 0; c < L.C; ++c)
      for (int i = 0; i < L.n; ++i) {
        const double v = std::max(x(L.mass(t, c, i)) * P.dx, 0.0) + floor;
        sol.rho_at(t, c, i) = v;
        total += v;
      }
    for (int c = 0; c < L.C; ++c)
      for (int i = 0; i < L.n; ++i) sol.rho_at(t, c, i) *= mass / total;
  }
}

Vec program_point(const Program& P, const DynamicSolution& sol) {
  const Layout& L = P.L;
  Vec x(L.primal());
  for (int t = 1; t < L.T; ++t)
    for (int c = 0; c < L.C; ++c)
      for (int i = 0; i < L.n; ++i) x(L.mass(t, c, i)) = sol.rho_at(t, c, i) / P.dx;
  for (int t = 0; t < L.T; ++t) {
    for (int f = 0; f + 1 < L.C; ++f)
      for (int i = 0; i < L.n; ++i) x(L.flux(t, f, i)) = sol.m_at(t, f + 1, i);
    for (int c = 0; c < L.C; ++c)
      for (int e = 0; e < L.E; ++e)
        x(L.graph(t, c, e)) = sol.sigma_at(t, c, L.edges[e].i, L.edges[e].j) / P.dx;
  }
  return x;
}

// With every mass positive, the cheapest momenta meeting the continuity
// constraint solve a weighted Laplacian per step on the product of the spatial
// chain and the label graph.
double recover_momenta(const WeightedGraph& g, const Interpolation& f, DynamicSolution& sol) {
  const int C = sol.cells(), n = sol.n, T = sol.T;
  const double dt = sol.dt(), dx = sol.grid.dx();
  const int nodes = C * n;
  double total = 0.0;
  std::fill(sol.m.begin(), sol.m.end(), 0.0);
  std::fill(sol.sigma.begin(), sol.sigma.end(), 0.0);
  if (nodes == 1) return 0.0;
  struct Link {
    int u, v;
    double kappa;
  };
  std::vector<Link> links;
  std::vector<Triplet> trips;
  for (int t = 0; t < T; ++t) {
    auto avg = [&](int c, int i) { return 0.5 * (sol.rho_at(t, c, i) + sol.rho_at(t + 1, c, i)); };
    links.clear();
    for (int c = 0; c + 1 < C; ++c)
      for (int i = 0; i < n; ++i)
        links.push_back({c * n + i, (c + 1) * n + i, 0.5 * (avg(c, i) + avg(c + 1, i)) / (dx * dx)});
    for (int c = 0; c < C; ++c)
      for (const auto& e : g.edges())
        links.push_back({c * n + e.i, c * n + e.j, e.q * f(avg(c, e.i), avg(c, e.j))});

    trips.clear();
    auto put = [&](int r, int col, double v) {
      if (r > 0 && col > 0) trips.emplace_back(r - 1, col - 1, v);
    };
    for (const auto& l : links) {
      put(l.u, l.u, l.kappa);
      put(l.v, l.v, l.kappa);
      put(l.u, l.v, -l.kappa);
      put(l.v, l.u, -l.kappa);
    }
    SpMat lap(nodes - 1, nodes - 1);
    lap.setFromTriplets(trips.begin(), trips.end());
    Vec rhs(nodes - 1);
    for (int u = 1; u < nodes; ++u)
      rhs(u - 1) = -(sol.rho_at(t + 1, u / n, u % n) - sol.rho_at(t, u / n, u % n)) / dt;
    Eigen::SimplicialLDLT<SpMat> solver(lap);
    require(solver.info() == Eigen::Success, Errc::SingularLaplacian,
            "momentum recovery Laplacian is singular");
    Vec phi = Vec::Zero(nodes);
    phi.tail(nodes - 1) = solver.solve(rhs);

    std::size_t k = 0;
    for (int c = 0; c + 1 < C; ++c)
      for (int i = 0; i < n; ++i, ++k) {
        const double drop = phi(c * n + i) - phi((c + 1) * n + i);
        sol.m_at(t, c + 1, i) = links[k].kappa * drop;
        total += dt * links[k].kappa * drop * drop;
      }
    for (int c = 0; c < C; ++c)
      for (const auto& e : g.edges()) {
        const double drop = phi(c * n + e.j) - phi(c * n + e.i);
        const double s = f(avg(c, e.i), avg(c, e.j)) * drop;
        sol.sigma_at(t, c, e.i, e.j) = s;
        sol.sigma_at(t, c, e.j, e.i) = -s;
        total += dt * links[k++].kappa * drop * drop;
      }
  }
  return total;
}

void solve_primal_dual(const Program& P, const WeightedGraph& g, const Interpolation& f,
                       const SolverConfig& cfg, DynamicSolution& sol) {
  const Layout& L = P.L;
  SpMat AAt = P.A * P.A.transpose();
  Eigen::SimplicialLLT<SpMat> chol(AAt);
  require(chol.info() == Eigen::Success, Errc::InfeasibleEndpoints,
          "continuity constraints are rank deficient");
  auto project = [&](Vec& z) {
    Vec r = P.A * z - P.b;
    z -= P.A.transpose() * chol.solve(r);
  };

  Vec x = Vec::Zero(L.primal());
  for (int t = 1; t < L.T; ++t) {
    const double s = static_cast<double>(t) / L.T;
    for (int c = 0; c < L.C; ++c)
      for (int i = 0; i < L.n; ++i)
        x(L.mass(t, c, i)) = (1 - s) * P.dens0(c, i) + s * P.dens1(c, i);
  }
  project(x);

  const double norm = operator_norm(P.K);
  const double tau = cfg.tau_primal > 0 ? cfg.tau_primal : 0.5 / norm;
  const double sigma = cfg.tau_dual > 0 ? cfg.tau_dual : 0.5 / norm;
  auto prox = cfg.parallel ? dual_prox_parallel : dual_prox_serial;

  Vec y = Vec::Zero(P.K.rows());
  Vec xbar = x, x_prev = x, y_prev = y;
  const int every = std::max(1, cfg.check_every);
  double last_action = -1.0;
  int iter = 0;
  for (; iter < cfg.max_iter; ++iter) {
    y += sigma * (P.K * xbar);
    sol.info.prox_failures += prox(P.blocks, f, sigma, {P.k0.data(), std::size_t(P.k0.size())},
                                   {y.data(), std::size_t(y.size())});
    Vec x_next = x - tau * (P.K.transpose() * y);
    project(x_next);
    xbar = 2.0 * x_next - x;
    x = std::move(x_next);

    if ((iter + 1) % every != 0) continue;
    const Vec dxv = x_prev - x, dyv = y_prev - y;
    const Vec kty = P.K.transpose() * y;
    const double pr = (dxv / tau - P.K.transpose() * dyv).norm() / (1.0 + kty.norm());
    const double dr = (dyv / sigma - P.K * dxv).norm() / (1.0 + (P.K * x).norm());
    sol.info.residual = std::max(pr, dr);
    load_masses(P, x, sol);
    const double act = recover_momenta(g, f, sol);
    const bool stalled =
        last_action >= 0 && std::abs(act - last_action) <= cfg.tol * std::max(act, 1e-300);
    last_action = act;
    x_prev = x;
    y_prev = y;
    if (sol.info.residual <= cfg.tol || (stalled && sol.info.residual <= std::sqrt(cfg.tol))) {
      sol.info.converged = true;
      ++iter;
      break;
    }
  }
  sol.info.iterations = iter;
  load_masses(P, x, sol);
  recover_momenta(g, f, sol);
}

}  // namespace detail

DynamicSolution solve_grid_transport(const WeightedGraph& g, const Interpolation& f,
                                     const SpatialGrid& grid, const Mat& rho0, const Mat& rho1,
                                     int T, const SolverConfig& cfg) {
  require(T >= 1, Errc::Domain, "need at least one time step");
  require(grid.cells >= 1 && grid.x_max > grid.x_min, Errc::Domain, "bad spatial grid");
  require(rho0.rows() == grid.cells && rho1.rows() == grid.cells && rho0.cols() == g.n() &&
              rho1.cols() == g.n(),
          Errc::LengthMismatch, "mass fields must be cells x n");
  require((rho0.array() >= 0).all() && (rho1.array() >= 0).all(), Errc::Domain,
          "masses must be nonnegative");
  const double mass = rho0.sum();
  require(mass > 0 && std::abs(mass - rho1.sum()) <= 1e-12 * std::max(1.0, mass),
          Errc::InfeasibleEndpoints, "endpoint masses differ");

  DynamicSolution sol(grid, g.n(), T);
  const detail::Program P = detail::build_program(g, grid, rho0, rho1, T);
  if (rho0 == rho1) {
    for (int t = 0; t <= T; ++t)
      for (int c = 0; c < grid.cells; ++c)
        for (int i = 0; i < g.n(); ++i) sol.rho_at(t, c, i) = rho0(c, i);
    sol.info.converged = true;
    return sol;
  }
  if (T == 1) {
    detail::load_masses(P, Vec::Zero(P.L.primal()), sol);
    detail::recover_momenta(g, f, sol);
    sol.info.converged = true;
    return sol;
  }
  if (cfg.method == Method::PrimalDual)
    detail::solve_primal_dual(P, g, f, cfg, sol);
  else
    detail::solve_barrier(P, g, f, cfg, sol);
  return sol;
}

}  // namespace vvot
