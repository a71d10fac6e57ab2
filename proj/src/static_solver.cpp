#include "vvot/static_solver.hpp"

#include <cmath>
#include <exception>
#include <sstream>

#include "vvot/bl.hpp"
#include "vvot/errors.hpp"
#include "vvot/graph_wasserstein.hpp"
#include "vvot/lp.hpp"

namespace vvot {

namespace {

void check_pair(const DiscreteVectorMeasure& mu, const DiscreteVectorMeasure& nu) {
  require(mu.n() == nu.n() && mu.dim() == nu.dim(), Errc::LengthMismatch,
          "measures differ in species count or dimension");
  mu.check_probability();
  nu.check_probability();
}

struct Node {
  int atom;
  int label;
};

// Rows of one side of a transport program, one per (atom, species) pair.
int species_row(int atom, int species, int n) { return atom * n + species; }

}  // namespace

W2wResult w2w(const DiscreteVectorMeasure& mu, const DiscreteVectorMeasure& nu, const Mat& d_w) {
  check_pair(mu, nu);
  const int n = mu.n();
  require(d_w.rows() == n && d_w.cols() == n, Errc::LengthMismatch, "d_w must be n x n");

  std::vector<Node> src, dst;
  for (int a = 0; a < static_cast<int>(mu.size()); ++a)
    for (int i = 0; i < n; ++i)
      if (mu.atoms()[a].w(i) > 0.0) src.push_back({a, i});
  for (int b = 0; b < static_cast<int>(nu.size()); ++b)
    for (int j = 0; j < n; ++j)
      if (nu.atoms()[b].w(j) > 0.0) dst.push_back({b, j});

  const int S = static_cast<int>(src.size()), D = static_cast<int>(dst.size());
  LpProblem lp;
  lp.b.resize(S + D);
  lp.c.resize(std::size_t(S) * D);
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(2 * lp.c.size());
  for (int s = 0; s < S; ++s) lp.b(s) = mu.atoms()[src[s].atom].w(src[s].label);
  for (int t = 0; t < D; ++t) lp.b(S + t) = nu.atoms()[dst[t].atom].w(dst[t].label);
  for (int s = 0; s < S; ++s)
    for (int t = 0; t < D; ++t) {
      const int col = s * D + t;
      const Vec& x = mu.atoms()[src[s].atom].x;
      const Vec& y = nu.atoms()[dst[t].atom].x;
      const double dw = d_w(src[s].label, dst[t].label);
      lp.c(col) = (x - y).squaredNorm() + dw * dw;
      trip.emplace_back(s, col, 1.0);
      trip.emplace_back(S + t, col, 1.0);
    }
  lp.A.resize(S + D, S * D);
  lp.A.setFromTriplets(trip.begin(), trip.end());
  const LpSolution sol = solve_lp(lp);
  require(sol.status == LpStatus::Optimal, Errc::Infeasible, "transport LP failed");

  W2wResult out;
  out.distance = std::sqrt(std::max(sol.objective, 0.0));
  for (const auto& [col, mass] : sol.support) {
    const Node& s = src[col / D];
    const Node& t = dst[col % D];
    out.coupling.entries.push_back({s.atom, s.label, t.atom, t.label, mass});
  }
  return out;
}

std::vector<Vec> simplex_grid(int n, int subdivisions, const std::vector<Vec>& extra) {
  require(n >= 1 && subdivisions >= 1, Errc::Domain, "bad simplex grid parameters");
  std::vector<Vec> out;
  auto add = [&](const Vec& r) {
    for (const auto& p : out)
      if ((p - r).cwiseAbs().maxCoeff() <= 1e-14) return;
    out.push_back(r);
  };
  std::vector<int> k(n, 0);
  // Enumerate compositions of `subdivisions` into n parts.
  auto rec = [&](auto&& self, int pos, int left) -> void {
    if (pos == n - 1) {
      k[pos] = left;
      Vec r(n - 1);
      for (int i = 0; i + 1 < n; ++i) r(i) = static_cast<double>(k[i]) / subdivisions;
      add(r);
      return;
    }
    for (int v = left; v >= 0; --v) {
      k[pos] = v;
      self(self, pos + 1, left - v);
    }
  };
  rec(rec, 0, subdivisions);
  for (const auto& r : extra) {
    require(r.size() == n - 1, Errc::LengthMismatch, "extra grid point dimension");
    check_simplex_point(r);
    add(r);
  }
  return out;
}

Mat simplex_distance_table_serial(const WeightedGraph& g, const Interpolation& f,
                                  const std::vector<Vec>& points, int T,
                                  const SolverConfig& cfg) {
  const int P = static_cast<int>(points.size());
  Mat d = Mat::Zero(P, P);
  for (int i = 0; i < P; ++i)
    for (int j = i + 1; j < P; ++j)
      d(i, j) = d(j, i) = simplex_distance(g, f, points[i], points[j], T, cfg);
  return d;
}

Mat simplex_distance_table(const WeightedGraph& g, const Interpolation& f,
                           const std::vector<Vec>& points, int T, const SolverConfig& cfg) {
  const int P = static_cast<int>(points.size());
  std::vector<std::pair<int, int>> pairs;
  for (int i = 0; i < P; ++i)
    for (int j = i + 1; j < P; ++j) pairs.emplace_back(i, j);
  Mat d = Mat::Zero(P, P);
  SolverConfig inner = cfg;
  inner.parallel = false;
  std::exception_ptr error;
#pragma omp parallel for schedule(dynamic)
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    try {
      const auto [i, j] = pairs[k];
      d(i, j) = d(j, i) = simplex_distance(g, f, points[i], points[j], T, inner);
    } catch (...) {
#pragma omp critical
      error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
  return d;
}

LiftedUpperResult lifted_semimetric_upper(const DiscreteVectorMeasure& mu,
                                          const DiscreteVectorMeasure& nu,
                                          const std::vector<Vec>& grid, const Mat& d_simplex) {
  check_pair(mu, nu);
  const int n = mu.n();
  const int P = static_cast<int>(grid.size());
  require(d_simplex.rows() == P && d_simplex.cols() == P, Errc::LengthMismatch,
          "simplex table must match the grid");
  std::vector<Vec> dist;
  for (const auto& r : grid) {
    require(r.size() == n - 1, Errc::LengthMismatch, "grid point dimension");
    dist.push_back(simplex_to_distribution(r));
  }
  for (int j = 0; j < n; ++j) {
    const Vec corner = simplex_corner(n, j);
    bool found = false;
    for (const auto& r : grid) found = found || (r - corner).cwiseAbs().maxCoeff() <= 1e-14;
    require(found, Errc::Domain, "simplex grid must contain every corner");
  }

  std::vector<int> src_atoms, dst_atoms;
  for (int a = 0; a < static_cast<int>(mu.size()); ++a)
    if (mu.atoms()[a].w.sum() > 0.0) src_atoms.push_back(a);
  for (int b = 0; b < static_cast<int>(nu.size()); ++b)
    if (nu.atoms()[b].w.sum() > 0.0) dst_atoms.push_back(b);
  const int KA = static_cast<int>(src_atoms.size()), KB = static_cast<int>(dst_atoms.size());
  const int S = KA * P, D = KB * P;
  const int rows = (KA + KB) * n;

  LpProblem lp;
  lp.b.resize(rows);
  for (int a = 0; a < KA; ++a)
    for (int j = 0; j < n; ++j) lp.b(species_row(a, j, n)) = mu.atoms()[src_atoms[a]].w(j);
  for (int b = 0; b < KB; ++b)
    for (int j = 0; j < n; ++j)
      lp.b(KA * n + species_row(b, j, n)) = nu.atoms()[dst_atoms[b]].w(j);

  lp.c.resize(std::size_t(S) * D);
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(lp.c.size() * 2 * n);
  for (int s = 0; s < S; ++s) {
    const int a = s / P, r = s % P;
    const Vec& x = mu.atoms()[src_atoms[a]].x;
    for (int t = 0; t < D; ++t) {
      const int b = t / P, r2 = t % P;
      const int col = s * D + t;
      const double ds = d_simplex(r, r2);
      lp.c(col) = (x - nu.atoms()[dst_atoms[b]].x).squaredNorm() + ds * ds;
      for (int j = 0; j < n; ++j) {
        if (dist[r](j) != 0.0) trip.emplace_back(species_row(a, j, n), col, dist[r](j));
        if (dist[r2](j) != 0.0)
          trip.emplace_back(KA * n + species_row(b, j, n), col, dist[r2](j));
      }
    }
  }
  lp.A.resize(rows, S * D);
  lp.A.setFromTriplets(trip.begin(), trip.end());
  const LpSolution sol = solve_lp(lp);
  require(sol.status == LpStatus::Optimal, Errc::Infeasible, "lifted transport LP failed");

  LiftedUpperResult out;
  out.upper_bound = std::sqrt(std::max(sol.objective, 0.0));
  out.lift_mu = {n, mu.dim(), {}};
  out.lift_nu = {n, nu.dim(), {}};
  Vec src_mass = Vec::Zero(S), dst_mass = Vec::Zero(D);
  for (const auto& [col, mass] : sol.support) {
    const int s = static_cast<int>(col) / D, t = static_cast<int>(col) % D;
    out.coupling.push_back({src_atoms[s / P], s % P, dst_atoms[t / P], t % P, mass});
    src_mass(s) += mass;
    dst_mass(t) += mass;
  }
  for (int s = 0; s < S; ++s)
    if (src_mass(s) > 0.0)
      out.lift_mu.atoms.push_back({mu.atoms()[src_atoms[s / P]].x, grid[s % P], src_mass(s)});
  for (int t = 0; t < D; ++t)
    if (dst_mass(t) > 0.0)
      out.lift_nu.atoms.push_back({nu.atoms()[dst_atoms[t / P]].x, grid[t % P], dst_mass(t)});
  return out;
}

TwoNodeMeasures two_node_measures(double a, double b) {
  require(b >= 0.5 && b <= 1.0, Errc::Domain, "b must lie in [1/2, 1]");
  TwoNodeMeasures m;
  m.mu1 = measure_1d(2, {{0.0, {0.5, 0.5}}});
  m.mu2 = measure_1d(2, {{-a, {0.5, 0.0}}, {a, {0.0, 0.5}}});
  m.mu3 = measure_1d(2, {{0.0, {b, 1.0 - b}}});
  return m;
}

TwoNodeExamples two_node_examples(const Interpolation& f, double q, double a, double b) {
  require(f(1.0, 0.0) == 0.0, Errc::ThetaNotVanishing,
          "the examples need theta to vanish on the boundary");
  require(q > 0.0 && a >= 0.0, Errc::Domain, "need q > 0 and a >= 0");
  require(b >= 0.5 && b <= 1.0, Errc::Domain, "b must lie in [1/2, 1]");
  const double d = wg_two_node(f, q, 0.5, b);
  const double e = wg_two_node(f, q, 0.0, 2.0 * b - 1.0);
  TwoNodeExamples out;
  out.w12 = a;
  out.w13 = d;
  out.w23_upper = a + d;
  out.d12 = a;
  out.d13 = d;
  out.d23 = std::sqrt(a * a + 0.5 * e * e);
  return out;
}

TriangleWitness triangle_failure_witness(const Interpolation& f, double q,
                                         const TriangleSearch& search) {
  require(f(1.0, 0.0) == 0.0, Errc::ThetaNotVanishing,
          "the examples need theta to vanish on the boundary");
  require(search.a_steps >= 1 && search.b_steps >= 1, Errc::Domain, "empty search grid");
  for (int ia = 1; ia <= search.a_steps; ++ia) {
    const double a = 0.2 * ia / search.a_steps;
    for (int ib = 1; ib <= search.b_steps; ++ib) {
      const double b = 0.5 + 0.2 * ib / search.b_steps;
      const TwoNodeExamples ex = two_node_examples(f, q, a, b);
      const double rhs = ex.d12 + ex.d13;
      if (ex.d23 - rhs >= search.margin) return {a, b, ex.d23, rhs};
    }
  }
  fail(Errc::NotFound, "no triangle-inequality failure in the search box");
}

ChainTables chain_tables(const WeightedGraph& g, const Interpolation& f, const ChainConfig& cfg) {
  const int n = g.n();
  const int sub = cfg.simplex_subdivisions > 0 ? cfg.simplex_subdivisions : (n == 2 ? 32 : 6);
  ChainTables t;
  t.d_w = d_w_matrix(g, f, cfg.graph_steps, cfg.solver);
  t.simplex_points = simplex_grid(n, sub);
  t.d_simplex = simplex_distance_table(g, f, t.simplex_points, cfg.graph_steps, cfg.solver);
  return t;
}

ChainReport check_chain(const WeightedGraph& g, const Interpolation& f,
                        const DiscreteVectorMeasure& mu, const DiscreteVectorMeasure& nu,
                        const ChainConfig& cfg, const ChainTables* tables) {
  check_pair(mu, nu);
  require(mu.n() == g.n(), Errc::LengthMismatch, "measures must have one weight per node");
  ChainTables local;
  if (!tables) {
    local = chain_tables(g, f, cfg);
    tables = &local;
  }
  const int n = g.n();

  ChainReport rep;
  rep.d_bl = d_bl(mu, nu);
  rep.w_dyn = w_dynamic(g, f, mu, nu, cfg.grid, cfg.time_steps, cfg.solver, cfg.smoothing).distance;
  rep.d_upper =
      lifted_semimetric_upper(mu, nu, tables->simplex_points, tables->d_simplex).upper_bound;
  rep.w2w = w2w(mu, nu, tables->d_w).distance;

  const double Q = g.max_degree();
  rep.lower_bound = std::min(1.0, 1.0 / std::sqrt(Q)) * rep.d_bl;

  Vec lo = mu.atoms().front().x, hi = lo;
  for (const auto* m : {&mu, &nu})
    for (const auto& a : m->atoms()) {
      lo = lo.cwiseMin(a.x);
      hi = hi.cwiseMax(a.x);
    }
  const double C = std::sqrt((hi - lo).squaredNorm() + std::pow(tables->d_w.maxCoeff(), 2));
  rep.upper_bound = std::pow(n, 0.25) * C * std::pow(1.0 + C * C, 0.25) * std::sqrt(rep.d_bl);

  auto link = [&](const char* name, double left, double right, double tol) {
    if (left <= right + tol) return;
    std::ostringstream os;
    os << name << ": " << left << " > " << right << " + " << tol;
    rep.violations.push_back(os.str());
  };
  link("lower_bound <= w_dyn", rep.lower_bound, rep.w_dyn, cfg.chain_tol);
  link("w_dyn <= d_upper", rep.w_dyn, rep.d_upper, cfg.chain_tol);
  link("d_upper <= w2w", rep.d_upper, rep.w2w, cfg.lp_tol);
  link("w2w <= upper_bound", rep.w2w, rep.upper_bound, cfg.bound_tol);
  rep.ok = rep.violations.empty();
  if (cfg.strict && !rep.ok) fail(Errc::ChainViolation, rep.violations.front());
  return rep;
}

}  // namespace vvot
