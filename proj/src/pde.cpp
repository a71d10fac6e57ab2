#include "vvot/pde.hpp"

#include <cmath>

#include "vvot/errors.hpp"

namespace vvot {

namespace {

constexpr double kFloor = 1e-300;

bool porous_on(const PdeConfig& cfg) { return cfg.porous_exponent > 0.0; }

double mix(const PdeConfig& cfg, const Mat& rho, int c) {
  return cfg.porous.dot(rho.row(c).transpose());
}

// (W_ik * rho_k)(c) by direct stencil sum.
double convolve(const PdeConfig& cfg, const Mat& rho, int i, int c) {
  if (cfg.interaction.empty()) return 0.0;
  const int C = cfg.grid.cells;
  const double dx = cfg.grid.dx();
  double s = 0.0;
  for (int k = 0; k < cfg.n(); ++k) {
    const Vec& w = cfg.interaction[i][k];
    for (int c2 = 0; c2 < C; ++c2) s += w(c - c2 + C - 1) * rho(c2, k);
  }
  return dx * s;
}

double driver_at(const PdeConfig& cfg, const Mat& rho, int c, int i) {
  double v = cfg.entropy(i) * (std::log(std::max(rho(c, i), kFloor)) + 1.0);
  if (porous_on(cfg))
    v += cfg.porous(i) * std::pow(std::max(mix(cfg, rho, c), 0.0), cfg.porous_exponent - 1.0);
  if (cfg.potential.size()) v += cfg.potential(c, i);
  return v + convolve(cfg, rho, i, c);
}

void check_state(const PdeState& s, const PdeConfig& cfg) {
  require(s.rho.rows() == cfg.grid.cells && s.rho.cols() == cfg.n(), Errc::LengthMismatch,
          "state must be cells x n");
  require(s.rho.allFinite() && (s.rho.array() >= 0.0).all(), Errc::Domain,
          "densities must be finite and nonnegative");
}

template <bool Parallel>
Mat driver_impl(const PdeState& s, const PdeConfig& cfg) {
  const int C = cfg.grid.cells, n = cfg.n();
  Mat xi(C, n);
#pragma omp parallel for if (Parallel)
  for (int c = 0; c < C; ++c)
    for (int i = 0; i < n; ++i) xi(c, i) = driver_at(cfg, s.rho, c, i);
  require(xi.allFinite(), Errc::NonFiniteDriver, "energy derivative is not finite");
  return xi;
}

template <bool Parallel>
RateSplit rates_impl(const PdeState& s, const PdeConfig& cfg) {
  check_state(s, cfg);
  const int C = cfg.grid.cells, n = cfg.n();
  const double dx = cfg.grid.dx();
  const Mat xi = driver_impl<Parallel>(s, cfg);
  RateSplit out{Mat::Zero(C, n), Mat::Zero(C, n)};
#pragma omp parallel for if (Parallel)
  for (int c = 0; c < C; ++c) {
    for (int i = 0; i < n; ++i) {
      // Upwind fluxes through the faces c-1/2 and c+1/2; walls carry none.
      auto flux = [&](int left) {
        const double v = -(xi(left + 1, i) - xi(left, i)) / dx;
        return std::max(v, 0.0) * s.rho(left, i) + std::min(v, 0.0) * s.rho(left + 1, i);
      };
      const double in = c > 0 ? flux(c - 1) : 0.0;
      const double out_flux = c + 1 < C ? flux(c) : 0.0;
      out.transport(c, i) = (in - out_flux) / dx;
    }
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        if (cfg.q(i, j) == 0.0) continue;
        const double flow = (xi(c, i) - xi(c, j)) * cfg.f(s.rho(c, i), s.rho(c, j)) * cfg.q(i, j);
        out.mutation(c, i) -= flow;
        out.mutation(c, j) += flow;
      }
  }
  return out;
}

}  // namespace

void validate(const PdeConfig& cfg) {
  const int n = cfg.n();
  require(n >= 1 && cfg.q.cols() == n, Errc::LengthMismatch, "rate matrix must be square");
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      require(cfg.q(i, j) >= 0.0, Errc::NegativeWeight, "negative mutation rate");
      require(cfg.q(i, j) == cfg.q(j, i), Errc::Asymmetric, "mutation rates are not symmetric");
    }
  require(cfg.grid.cells >= 1 && cfg.grid.x_max > cfg.grid.x_min, Errc::Domain, "bad grid");
  require(cfg.entropy.size() == n && (cfg.entropy.array() >= 0.0).all(), Errc::LengthMismatch,
          "one nonnegative entropy coefficient per species");
  require(cfg.porous_exponent == 0.0 || cfg.porous_exponent >= 2.0, Errc::Domain,
          "porous exponent must be 0 or at least 2");
  if (porous_on(cfg))
    require(cfg.porous.size() == n, Errc::LengthMismatch, "one porous coefficient per species");
  if (cfg.potential.size())
    require(cfg.potential.rows() == cfg.grid.cells && cfg.potential.cols() == n,
            Errc::LengthMismatch, "potential must be cells x n");
  if (!cfg.interaction.empty()) {
    require(static_cast<int>(cfg.interaction.size()) == n, Errc::LengthMismatch,
            "interaction needs n x n stencils");
    const int L = 2 * cfg.grid.cells - 1;
    for (int i = 0; i < n; ++i) {
      require(static_cast<int>(cfg.interaction[i].size()) == n, Errc::LengthMismatch,
              "interaction needs n x n stencils");
      for (int k = 0; k < n; ++k) {
        const Vec& w = cfg.interaction[i][k];
        require(w.size() == L, Errc::LengthMismatch, "stencil length must be 2 cells - 1");
        require(w == cfg.interaction[k][i], Errc::Asymmetric, "W_ik must equal W_ki");
        require(w == w.reverse(), Errc::Asymmetric, "interaction stencils must be even");
      }
    }
  }
  require(cfg.dt > 0.0 && cfg.t_end >= 0.0, Errc::Domain, "bad time stepping");
}

Vec interaction_stencil(const SpatialGrid& grid, const std::function<double(double)>& w) {
  const int C = grid.cells;
  Vec s(2 * C - 1);
  for (int k = 0; k < 2 * C - 1; ++k) s(k) = w((k - C + 1) * grid.dx());
  // Sampling at symmetric offsets can differ in the last bit.
  return 0.5 * (s + Vec(s.reverse()));
}

double energy(const PdeState& s, const PdeConfig& cfg) {
  check_state(s, cfg);
  const int C = cfg.grid.cells, n = cfg.n();
  const double dx = cfg.grid.dx();
  double e = 0.0;
  for (int c = 0; c < C; ++c) {
    for (int i = 0; i < n; ++i) {
      const double r = s.rho(c, i);
      if (r > 0.0) e += dx * cfg.entropy(i) * r * std::log(r);
      if (cfg.potential.size()) e += dx * cfg.potential(c, i) * r;
      e += 0.5 * dx * r * convolve(cfg, s.rho, i, c);
    }
    if (porous_on(cfg))
      e += dx * std::pow(std::max(mix(cfg, s.rho, c), 0.0), cfg.porous_exponent) /
           cfg.porous_exponent;
  }
  return e;
}

Mat driver(const PdeState& s, const PdeConfig& cfg) {
  check_state(s, cfg);
  return driver_impl<false>(s, cfg);
}

RateSplit rhs_parts(const PdeState& s, const PdeConfig& cfg) { return rates_impl<true>(s, cfg); }

Mat rhs(const PdeState& s, const PdeConfig& cfg) {
  RateSplit r = rates_impl<true>(s, cfg);
  return r.transport + r.mutation;
}

Mat rhs_serial(const PdeState& s, const PdeConfig& cfg) {
  RateSplit r = rates_impl<false>(s, cfg);
  return r.transport + r.mutation;
}

double cfl_bound(const PdeState& s, const PdeConfig& cfg) {
  check_state(s, cfg);
  const int C = cfg.grid.cells, n = cfg.n();
  const double dx = cfg.grid.dx();
  const Mat xi = driver_impl<false>(s, cfg);
  double speed = 0.0, diffusivity = 0.0, mutation = 0.0;
  for (int c = 0; c < C; ++c)
    for (int i = 0; i < n; ++i) {
      if (c + 1 < C) speed = std::max(speed, std::abs(xi(c + 1, i) - xi(c, i)) / dx);
      double d = cfg.entropy(i);
      if (porous_on(cfg))
        d += cfg.porous(i) * cfg.porous(i) * (cfg.porous_exponent - 1.0) * s.rho(c, i) *
             std::pow(std::max(mix(cfg, s.rho, c), kFloor), cfg.porous_exponent - 2.0);
      diffusivity = std::max(diffusivity, d);
      const double ri = std::max(s.rho(c, i), kFloor);
      double rate = 0.0;
      for (int j = 0; j < n; ++j) {
        if (j == i || cfg.q(i, j) == 0.0) continue;
        const double rj = std::max(s.rho(c, j), kFloor);
        rate += cfg.q(i, j) * (cfg.f(ri, rj) * (cfg.entropy(i) / ri + cfg.entropy(j) / rj) +
                               std::abs(xi(c, i) - xi(c, j)));
      }
      mutation = std::max(mutation, rate);
    }
  double bound = kInf;
  if (speed > 0.0) bound = std::min(bound, 0.5 * dx / speed);
  if (diffusivity > 0.0) bound = std::min(bound, 0.25 * dx * dx / diffusivity);
  if (mutation > 0.0) bound = std::min(bound, 0.5 / mutation);
  return bound;
}

PdeState step(const PdeState& s, const PdeConfig& cfg, double dt, StepStats* stats) {
  require(dt > 0.0, Errc::Domain, "time step must be positive");
  const Mat rate = rhs(s, cfg);
  const double dx = cfg.grid.dx();
  for (int halvings = 0; halvings <= 20; ++halvings) {
    PdeState next{s.rho + dt * rate, s.time + dt};
    double clipped = 0.0;
    for (Eigen::Index k = 0; k < next.rho.size(); ++k)
      if (next.rho.data()[k] < 0.0) {
        clipped -= next.rho.data()[k] * dx;
        next.rho.data()[k] = 0.0;
      }
    if (clipped <= 1e-12 * dt && next.rho.allFinite()) {
      if (stats) *stats = {dt, halvings, clipped};
      return next;
    }
    dt *= 0.5;
  }
  fail(Errc::Diverged, "step rejected twenty times");
}

PdeRun run(const PdeState& init, const PdeConfig& cfg, const std::vector<double>& output_times,
           const PdeObserver& observer) {
  validate(cfg);
  check_state(init, cfg);
  PdeRun out;
  PdeState state = init;
  auto record = [&] {
    auto& d = out.diagnostics;
    d.times.push_back(state.time);
    d.energy.push_back(energy(state, cfg));
    d.species_mass.push_back(cfg.grid.dx() * state.rho.colwise().sum().transpose());
    d.min_rho.push_back(state.rho.minCoeff());
    if (observer) observer(state);
  };
  record();
  std::size_t next_out = 0;
  auto emit = [&] {
    while (next_out < output_times.size() && output_times[next_out] <= state.time + 1e-12) {
      out.trajectory.push_back(state);
      ++next_out;
    }
  };
  emit();
  while (state.time < cfg.t_end - 1e-15) {
    double dt = std::min({cfg.dt, cfl_bound(state, cfg), cfg.t_end - state.time});
    if (next_out < output_times.size() && output_times[next_out] > state.time)
      dt = std::min(dt, output_times[next_out] - state.time);
    StepStats stats;
    state = step(state, cfg, dt, &stats);
    out.diagnostics.halvings += stats.halvings;
    record();
    emit();
  }
  return out;
}

}  // namespace vvot
