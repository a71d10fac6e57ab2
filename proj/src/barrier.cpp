#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>

#include "transport_program.hpp"
#include "vvot/errors.hpp"

namespace vvot::detail {

namespace {

struct Model {
  double value = 0.0;
  Vec grad;  // in dual coordinates
  std::vector<Triplet> hess;
};

// Objective terms evaluated on z = K x + k0. Returns false outside the domain.
bool evaluate(const Program& P, const Interpolation& f, const Vec& z, Model* out, bool second) {
  const auto& B = P.blocks;
  const std::size_t faces = B.face_weight.size(), edges = B.edge_weight.size();
  double value = 0.0;
  if (out) {
    out->grad = Vec::Zero(z.size());
    out->hess.clear();
  }
  for (std::size_t k = 0; k < faces; ++k) {
    const int r = static_cast<int>(2 * k);
    const double m = z(r), y = z(r + 1), w = B.face_weight[k];
    if (!(y > 0.0)) return false;
    value += w * m * m / y;
    if (!out) continue;
    out->grad(r) = 2 * w * m / y;
    out->grad(r + 1) = -w * m * m / (y * y);
    if (!second) continue;
    const double hmm = 2 * w / y, hmy = -2 * w * m / (y * y), hyy = 2 * w * m * m / (y * y * y);
    out->hess.emplace_back(r, r, hmm);
    out->hess.emplace_back(r, r + 1, hmy);
    out->hess.emplace_back(r + 1, r, hmy);
    out->hess.emplace_back(r + 1, r + 1, hyy);
  }
  const int base = static_cast<int>(2 * faces);
  for (std::size_t k = 0; k < edges; ++k) {
    const int r = base + static_cast<int>(3 * k);
    const double s = z(r), a = z(r + 1), b = z(r + 2), q = B.edge_weight[k];
    if (!(a > 0.0 && b > 0.0)) return false;
    const double th = f(a, b);
    if (!(th > 0.0)) return false;
    value += q * s * s / th;
    if (!out) continue;
    const auto d = f.gradient(a, b);
    const double th2 = th * th, th3 = th2 * th;
    out->grad(r) = 2 * q * s / th;
    out->grad(r + 1) = -q * s * s * d[0] / th2;
    out->grad(r + 2) = -q * s * s * d[1] / th2;
    if (!second) continue;
    const auto h = f.hessian(a, b);
    const double ss = q * s * s;
    const double H[3][3] = {
        {2 * q / th, -2 * q * s * d[0] / th2, -2 * q * s * d[1] / th2},
        {-2 * q * s * d[0] / th2, ss * (2 * d[0] * d[0] / th3 - h[0] / th2),
         ss * (2 * d[0] * d[1] / th3 - h[1] / th2)},
        {-2 * q * s * d[1] / th2, ss * (2 * d[0] * d[1] / th3 - h[1] / th2),
         ss * (2 * d[1] * d[1] / th3 - h[2] / th2)}};
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) out->hess.emplace_back(r + i, r + j, H[i][j]);
  }
  if (out) out->value = value;
  return true;
}

double barrier_value(const Program& P, const Interpolation& f, const Vec& x, double mu) {
  const int nm = P.L.n_mass();
  double logs = 0.0;
  for (int k = 0; k < nm; ++k) {
    if (!(x(k) > 0.0)) return kInf;
    logs += std::log(x(k));
  }
  Model model;
  if (!evaluate(P, f, P.K * x + P.k0, &model, false)) return kInf;
  return model.value - mu * logs;
}

// Strictly positive interior masses that conserve mass, with the fluxes and
// graph momenta that move them most cheaply.
Vec feasible_start(const Program& P, const WeightedGraph& g, const Interpolation& f,
                   DynamicSolution& sol) {
  const Layout& L = P.L;
  const double eta = 0.05;
  const double mass = P.dens0.sum() * P.dx;
  const double uniform = mass / (L.C * L.n);
  for (int c = 0; c < L.C; ++c)
    for (int i = 0; i < L.n; ++i) {
      sol.rho_at(0, c, i) = P.dens0(c, i) * P.dx;
      sol.rho_at(L.T, c, i) = P.dens1(c, i) * P.dx;
    }
  for (int t = 1; t < L.T; ++t) {
    const double s = static_cast<double>(t) / L.T;
    for (int c = 0; c < L.C; ++c)
      for (int i = 0; i < L.n; ++i) {
        const double lin = ((1 - s) * P.dens0(c, i) + s * P.dens1(c, i)) * P.dx;
        sol.rho_at(t, c, i) = (1 - eta) * lin + eta * uniform;
      }
  }
  recover_momenta(g, f, sol);
  return program_point(P, sol);
}

}  // namespace

// Primal log-barrier method: Newton steps on F(x) - mu sum log(masses) under
// the continuity constraints, with mu driven to zero geometrically.
void solve_barrier(const Program& P, const WeightedGraph& g, const Interpolation& f,
                   const SolverConfig& cfg, DynamicSolution& sol) {
  const Layout& L = P.L;
  const int np = L.primal(), nc = static_cast<int>(P.A.rows()), nm = L.n_mass();
  const SpMat Kt = P.K.transpose();

  Vec x = feasible_start(P, g, f, sol);
  Model model;
  require(evaluate(P, f, P.K * x + P.k0, &model, false), Errc::Diverged,
          "barrier start is outside the domain");
  const double f0 = std::max(model.value, 1e-12);
  double mu = f0 / nm;
  const double shrink = 0.1;
  const double reg = 1e-10;

  Eigen::SimplicialLDLT<SpMat> ldlt;
  SpMat kkt;
  bool analyzed = false;
  // Factors the regularized Newton system at x and returns the barrier gradient.
  auto factor = [&]() {
    const Vec z = P.K * x + P.k0;
    require(evaluate(P, f, z, &model, true), Errc::Diverged, "barrier iterate left the domain");
    Vec grad = Kt * model.grad;
    SpMat hb(z.size(), z.size());
    hb.setFromTriplets(model.hess.begin(), model.hess.end());
    const SpMat H = Kt * hb * P.K;
    std::vector<Triplet> trips;
    trips.reserve(H.nonZeros() + 2 * P.A.nonZeros() + nm);
    for (int k = 0; k < nm; ++k) {
      grad(k) -= mu / x(k);
      trips.emplace_back(k, k, mu / (x(k) * x(k)));
    }
    for (int col = 0; col < H.outerSize(); ++col)
      for (SpMat::InnerIterator e(H, col); e; ++e) trips.emplace_back(e.row(), e.col(), e.value());
    for (int col = 0; col < P.A.outerSize(); ++col)
      for (SpMat::InnerIterator e(P.A, col); e; ++e) {
        trips.emplace_back(np + e.row(), e.col(), e.value());
        trips.emplace_back(e.col(), np + e.row(), e.value());
      }
    kkt.resize(np + nc, np + nc);
    kkt.setFromTriplets(trips.begin(), trips.end());
    for (int r = 0; r < nc; ++r) trips.emplace_back(np + r, np + r, -reg);
    SpMat kkt_reg(np + nc, np + nc);
    kkt_reg.setFromTriplets(trips.begin(), trips.end());
    if (!analyzed) {
      ldlt.analyzePattern(kkt_reg);
      analyzed = true;
    }
    ldlt.factorize(kkt_reg);
    require(ldlt.info() == Eigen::Success, Errc::Diverged, "barrier Newton system is singular");
    return grad;
  };
  auto solve = [&](const Vec& rhs) {
    Vec v = ldlt.solve(rhs);
    for (int refine = 0; refine < 3; ++refine) v += ldlt.solve(rhs - kkt * v);
    return Vec(v.head(np));
  };
  auto max_step = [&](const Vec& dir, double fraction) {
    double step = 1.0;
    for (int k = 0; k < nm; ++k)
      if (dir(k) < 0) step = std::min(step, fraction * x(k) / -dir(k));
    return step;
  };

  int newton_total = 0;
  bool all_converged = true;
  bool last_stage = false;
  int stages = 0;
  while (true) {
    const double inner_tol = last_stage ? 1e-9 * mu : 0.25 * mu;
    bool stage_converged = false;
    for (int it = 0; it < 80; ++it) {
      const Vec grad = factor();
      Vec rhs(np + nc);
      rhs.head(np) = -grad;
      rhs.tail(nc) = P.b - P.A * x;
      const Vec dir = solve(rhs);
      ++newton_total;

      const double decrement = -grad.dot(dir);
      double step = max_step(dir, 0.99);
      const double phi = barrier_value(P, f, x, mu);
      Vec trial = x;
      bool accepted = false;
      for (int ls = 0; ls < 60; ++ls) {
        trial = x + step * dir;
        const double next = barrier_value(P, f, trial, mu);
        if (next <= phi - 1e-4 * step * std::max(decrement, 0.0) ||
            (std::isfinite(next) && std::abs(next - phi) <= 1e-14 * std::abs(phi))) {
          accepted = true;
          break;
        }
        step *= 0.5;
      }
      if (!accepted) break;
      x = trial;
      if (0.5 * decrement <= inner_tol + 1e-15 * f0) {
        stage_converged = true;
        break;
      }
    }
    all_converged = all_converged && stage_converged;
    if (last_stage) break;

    // Follow the tangent of the central path to the next barrier weight.
    factor();
    Vec rhs = Vec::Zero(np + nc);
    for (int k = 0; k < nm; ++k) rhs(k) = 1.0 / x(k);
    const Vec tangent = solve(rhs);
    const double next_mu = mu * shrink;
    const Vec jump = (next_mu - mu) * tangent;
    x += max_step(jump, 0.9) * jump;
    mu = next_mu;
    evaluate(P, f, P.K * x + P.k0, &model, false);
    // The duality gap of the barrier subproblem is mu per barrier term.
    last_stage = mu * nm <= cfg.tol * model.value || ++stages >= 40;
  }

  load_masses(P, x, sol);
  recover_momenta(g, f, sol);
  sol.info.iterations = newton_total;
  sol.info.residual = (P.A * x - P.b).lpNorm<Eigen::Infinity>();
  sol.info.converged = all_converged;
}

}  // namespace vvot::detail
