// Acceptance checks. One PASS/FAIL line per criterion; exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

#include "oracles.hpp"
#include "vvot/bl.hpp"
#include "vvot/errors.hpp"
#include "vvot/graph_wasserstein.hpp"
#include "vvot/lifted.hpp"
#include "vvot/pde.hpp"
#include "vvot/prox.hpp"
#include "vvot/static_solver.hpp"
#include "vvot/verify.hpp"

using namespace vvot;

namespace {

namespace tol {
constexpr double kTwoNodeArith = 2e-2;
constexpr double kTwoNodeGeo = 5e-3;
constexpr double kTwoNodeSeconds = 10.0;
constexpr double kGeodesic = 1e-6;
constexpr double kDynamic = 2e-2;
constexpr double kGridLp = 1e-6;
constexpr double kTriangleMargin = 1e-6;
constexpr double kTriangleSeconds = 1.0;
constexpr double kChainSeconds = 300.0;
constexpr double kBruteForce = 1e-10;
constexpr double kProjection = 1e-9;
constexpr double kProjectionEqual = 1e-10;
constexpr double kProx = 1e-6;
constexpr double kFenchelMember = 1e-9;
constexpr double kMassDrift = 1e-10;
constexpr double kMutationSum = 1e-14;
constexpr double kEnergyRise = 1e-10;
constexpr double kSpeciesMass = 1e-12;
constexpr double kLotGround = 1e-8;
}  // namespace tol

// Geometric d(1/2, 3/4) from the two-node quadrature, frozen.
constexpr double kGeoHalfToThreeQuarters = 0.3617198377;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// Collects the first failing condition of a criterion.
class Criterion {
 public:
  void expect(bool ok, const std::string& what) {
    if (!ok && failure_.empty()) failure_ = what;
  }
  void detail(const std::string& text) { detail_ += (detail_.empty() ? "" : "; ") + text; }
  bool ok() const { return failure_.empty(); }
  const std::string& failure() const { return failure_; }
  const std::string& details() const { return detail_; }

 private:
  std::string failure_, detail_;
};

std::string num(double v) {
  std::ostringstream os;
  os.precision(10);
  os << v;
  return os.str();
}

int failures = 0;

void run(int id, const std::string& title, const std::function<void(Criterion&)>& body) {
  Criterion c;
  const auto start = Clock::now();
  try {
    body(c);
  } catch (const std::exception& e) {
    c.expect(false, std::string("exception: ") + e.what());
  }
  const double secs = seconds_since(start);
  if (!c.ok()) ++failures;
  std::printf("%s %2d %s [%.1fs]%s%s%s%s\n", c.ok() ? "PASS" : "FAIL", id, title.c_str(), secs,
              c.details().empty() ? "" : " ", c.details().c_str(), c.ok() ? "" : " :: ",
              c.failure().c_str());
  std::fflush(stdout);
}

DiscreteVectorMeasure small_measure(std::mt19937_64& rng, int n, int atoms) {
  std::uniform_real_distribution<double> x(-1.0, 1.0), w(0.0, 1.0);
  std::vector<std::pair<Vec, Vec>> list;
  double total = 0.0;
  for (int k = 0; k < atoms; ++k) {
    Vec v(n);
    for (auto& e : v) e = w(rng) < 0.3 ? 0.0 : w(rng);
    if (v.sum() == 0) v(k % n) = 0.5;
    total += v.sum();
    list.push_back({Vec::Constant(1, std::round(x(rng) * 1000) / 1000), v});
  }
  DiscreteVectorMeasure m(n, 1);
  for (auto& [loc, v] : list) m.add(loc, v / total);
  return m;
}

// w2w by enumeration of the extreme points of the transportation polytope.
double w2w_brute(const DiscreteVectorMeasure& mu, const DiscreteVectorMeasure& nu, const Mat& dw) {
  struct Node {
    Vec x;
    int species;
    double mass;
  };
  auto nodes = [](const DiscreteVectorMeasure& m) {
    std::vector<Node> out;
    for (const auto& a : m.atoms())
      for (int i = 0; i < m.n(); ++i)
        if (a.w(i) > 0) out.push_back({a.x, i, a.w(i)});
    return out;
  };
  const auto src = nodes(mu), dst = nodes(nu);
  Mat cost(src.size(), dst.size());
  Vec a(src.size()), b(dst.size());
  for (std::size_t s = 0; s < src.size(); ++s) {
    a(s) = src[s].mass;
    for (std::size_t t = 0; t < dst.size(); ++t) {
      const double d = dw(src[s].species, dst[t].species);
      cost(s, t) = (src[s].x - dst[t].x).squaredNorm() + d * d;
    }
  }
  for (std::size_t t = 0; t < dst.size(); ++t) b(t) = dst[t].mass;
  return std::sqrt(oracle::transport_brute_force(cost, a, b));
}

double arithmetic_perspective(double x, double y, double xb, double yb, double tau) {
  if (y < 0) return kInf;
  return alpha(x, y, y, Interpolation::arithmetic()) +
         ((x - xb) * (x - xb) + (y - yb) * (y - yb)) / (2 * tau);
}

void two_node_dynamic(Criterion& c) {
  const auto g = WeightedGraph::complete(2);
  const auto start = Clock::now();
  const auto arith = wg_dynamic(g, Interpolation::arithmetic(), Vec{{1.0, 0.0}}, Vec{{0.0, 1.0}}, 64);
  const double secs = seconds_since(start);
  c.detail("arithmetic " + num(arith.distance) + " in " + num(secs) + "s");
  c.expect(std::abs(arith.distance - std::numbers::sqrt2) <= tol::kTwoNodeArith, "arithmetic off sqrt 2");
  c.expect(secs < tol::kTwoNodeSeconds, "arithmetic solve too slow");

  const auto geo = Interpolation::geometric();
  const auto g2 = wg_dynamic(g, geo, Vec{{0.5, 0.5}}, Vec{{0.75, 0.25}}, 64);
  c.detail("geometric " + num(g2.distance));
  c.expect(std::abs(wg_two_node(geo, 1, 0.5, 0.75) - kGeoHalfToThreeQuarters) <= 1e-9,
           "quadrature moved from frozen value");
  c.expect(std::abs(g2.distance - kGeoHalfToThreeQuarters) <= tol::kTwoNodeGeo, "geometric off quadrature");
}

void geodesic(Criterion& c) {
  double end_err = 0.0, speed_err = 0.0;
  for (const auto& f : {Interpolation::geometric(), Interpolation::logarithmic()})
    for (auto [a0, a1] : {std::pair{0.5, 0.75}, std::pair{0.1, 0.95}, std::pair{0.8, 0.2}}) {
      const int steps = 50;
      const auto path = two_node_geodesic(f, 1, a0, a1, steps);
      const double d = wg_two_node(f, 1, a0, a1);
      end_err = std::max(end_err, std::abs(path.states.back()(0) - a1));
      for (int k = 0; k < steps; ++k) {
        const double piece = wg_two_node(f, 1, path.states[k](0), path.states[k + 1](0));
        speed_err = std::max(speed_err, std::abs(piece * steps - d));
      }
    }
  c.detail("endpoint " + num(end_err) + ", speed " + num(speed_err));
  c.expect(end_err <= tol::kGeodesic, "endpoint error");
  c.expect(speed_err <= tol::kGeodesic, "speed deviation");
}

void paper_examples(Criterion& c) {
  const auto g = WeightedGraph::complete(2);
  const auto geo = Interpolation::geometric();
  const double a = 0.3, b = 0.6;
  const auto m = two_node_measures(a, b);
  const auto ex = two_node_examples(geo, 1, a, b);
  const SpatialGrid grid{-1.0, 1.0, 64};
  const SolverConfig cfg;
  const double d_half_b = wg_two_node(geo, 1, 0.5, b), d_edge = wg_two_node(geo, 1, 0, 2 * b - 1);

  c.expect(ex.w12 == a, "closed-form W12");
  const double w12 = w_dynamic(g, geo, m.mu1, m.mu2, grid, 16, cfg).distance;
  const double w13 = w_dynamic(g, geo, m.mu1, m.mu3, grid, 16, cfg).distance;
  const double w23 = w_dynamic(g, geo, m.mu2, m.mu3, grid, 16, cfg).distance;
  c.expect(std::abs(w12 - a) <= tol::kDynamic, "dynamic W12");
  c.expect(std::abs(w13 - d_half_b) <= tol::kDynamic, "dynamic W13");
  c.expect(w23 <= a + d_half_b + tol::kDynamic, "dynamic W23 bound");

  const auto grid12 = simplex_grid(2, 2);
  const double d12 =
      lifted_semimetric_upper(m.mu1, m.mu2, grid12, simplex_distance_table(g, geo, grid12)).upper_bound;
  c.expect(std::abs(d12 - a) <= tol::kGridLp, "grid LP D12");

  const auto grid23 = simplex_grid(2, 2, {Vec::Constant(1, 2 * b - 1)});
  const double d23 =
      lifted_semimetric_upper(m.mu2, m.mu3, grid23, simplex_distance_table(g, geo, grid23)).upper_bound;
  const double closed = std::sqrt(a * a + 0.5 * d_edge * d_edge);
  c.expect(std::abs(d23 - closed) <= tol::kGridLp, "grid LP D23");
  c.detail("W12 " + num(w12) + ", W13 " + num(w13) + ", W23 " + num(w23) + ", D12 " + num(d12) +
           ", D23 " + num(d23) + " vs " + num(closed));
}

void triangle(Criterion& c) {
  const auto start = Clock::now();
  const auto geo = Interpolation::geometric();
  const auto w = triangle_failure_witness(geo, 1);
  const double secs = seconds_since(start);
  const double d_edge = wg_two_node(geo, 1, 0, 2 * w.b - 1), d_half = wg_two_node(geo, 1, 0.5, w.b);
  const double lhs = std::sqrt(w.a * w.a + 0.5 * d_edge * d_edge), rhs = w.a + d_half;
  c.detail("a " + num(w.a) + ", b " + num(w.b) + ", margin " + num(lhs - rhs));
  c.expect(lhs - rhs >= tol::kTriangleMargin, "margin");
  c.expect(std::abs(lhs - w.lhs) <= 1e-9 && std::abs(rhs - w.rhs) <= 1e-9, "witness values");
  c.expect(secs < tol::kTriangleSeconds, "too slow");
}

void chain(Criterion& c) {
  const auto start = Clock::now();
  const auto f = Interpolation::geometric();
  ChainConfig cfg;
  cfg.chain_tol = 3e-2;
  cfg.lp_tol = 1e-8;
  const WeightedGraph graphs[2] = {WeightedGraph::complete(2), WeightedGraph::complete(3)};
  const ChainTables tables[2] = {chain_tables(graphs[0], f, cfg), chain_tables(graphs[1], f, cfg)};
  std::mt19937_64 rng(7);
  int bad = 0;
  for (int k = 0; k < 20; ++k) {
    const int n = 2 + k % 2;
    const auto mu = random_measure(rng, n), nu = random_measure(rng, n);
    const auto r = check_chain(graphs[n - 2], f, mu, nu, cfg, &tables[n - 2]);
    if (!r.ok) {
      ++bad;
      c.detail("instance " + std::to_string(k) + ": " + r.violations.front());
    }
  }
  const double secs = seconds_since(start);
  c.detail(std::to_string(20 - bad) + "/20 instances");
  c.expect(bad == 0, "chain violations");
  c.expect(secs < tol::kChainSeconds, "too slow");
}

void brute_force(Criterion& c) {
  std::mt19937_64 rng(61);
  double worst = 0.0;
  for (const auto& f : {Interpolation::geometric(), Interpolation::logarithmic()}) {
    const double d = wg_two_node(f, 1, 0, 1);
    const Mat dw = (Mat(2, 2) << 0, d, d, 0).finished();
    for (int trial = 0; trial < 30; ++trial) {
      const auto mu = small_measure(rng, 2, 1 + trial % 3), nu = small_measure(rng, 2, 1 + (trial / 3) % 3);
      worst = std::max(worst, std::abs(w2w(mu, nu, dw).distance - w2w_brute(mu, nu, dw)));
    }
  }
  c.detail("max gap " + num(worst));
  c.expect(worst <= tol::kBruteForce, "LP differs from enumeration");
}

void projection(Criterion& c) {
  std::mt19937_64 rng(71);
  std::uniform_real_distribution<double> u(0.0, 1.0), v(-1.0, 1.0);
  const auto geo = Interpolation::geometric();
  double worst = -kInf, worst_single = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 2 + trial % 2;
    const auto g = WeightedGraph::complete(n);
    const int locations = 1 + trial % 3;
    const bool single = trial % 5 == 0;
    std::vector<LiftedVelocityAtom> atoms;
    for (int l = 0; l < locations; ++l) {
      const Vec x = Vec::Constant(1, 0.25 * l);
      const int here = single ? 1 : 1 + static_cast<int>(u(rng) * 3);
      for (int k = 0; k < here; ++k) {
        // Interior simplex point: normalized weights bounded away from zero.
        Vec p(n);
        for (auto& e : p) e = 0.1 + u(rng);
        p /= p.sum();
        Vec w2(n - 1), w1(1);
        for (auto& e : w2) e = v(rng);
        w1(0) = v(rng);
        atoms.push_back({x, distribution_to_simplex(p), 0.1 + u(rng), w1, w2});
      }
    }
    const auto out = project_lifted_dynamics(atoms, g, geo);
    worst = std::max(worst, out.action_after - out.action_before);
    if (single)
      worst_single = std::max(worst_single, std::abs(out.action_after - out.action_before) /
                                                std::max(1.0, out.action_before));
  }
  c.detail("max after-before " + num(worst) + ", single-atom gap " + num(worst_single));
  c.expect(worst <= tol::kProjection, "projection raised the action");
  c.expect(worst_single <= tol::kProjectionEqual, "single-atom equality");
}

void prox_and_fenchel(Criterion& c) {
  std::mt19937_64 rng(81);
  std::uniform_real_distribution<double> u(-2.0, 2.0), t(0.05, 2.0);
  double worst = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const double xb = u(rng), yb = u(rng), tau = t(rng);
    const auto p = prox_perspective(xb, yb, tau);
    const Vec nm = oracle::nelder_mead(
        [&](const Vec& z) { return arithmetic_perspective(z(0), z(1), xb, yb, tau); },
        Vec{{0.5 * xb, std::max(yb, 0.0) + 0.5}}, 0.5);
    worst = std::max(worst, (Vec{{p.x, p.y}} - nm).norm());
  }
  c.detail("prox max gap " + num(worst));
  c.expect(worst <= tol::kProx, "prox differs from Nelder-Mead");

  // Dual points on a 20^3 grid; the sup of a t + b s + c m - alpha runs over a
  // dyadic (t, s) grid, which reaches the thin off-K witnesses near the axes,
  // and m with eight mantissas per octave.
  const auto f = Interpolation::geometric();
  std::vector<double> ts{0.0}, ms{0.0};
  for (int k = 0; k <= 24; ++k) {
    ts.push_back(std::ldexp(1.0, -k));
    for (int j = 0; j < 8; ++j) {
      ms.push_back(std::ldexp(1.0 + j / 8.0, -k - 1));
      ms.push_back(-ms.back());
    }
  }
  auto sup = [&](double a, double b, double cc, double radius) {
    double best = -kInf;
    for (double t0 : ts)
      for (double s0 : ts)
        for (double m0 : ms) {
          const double al = alpha(radius * m0, radius * t0, radius * s0, f);
          if (al != kInf) best = std::max(best, radius * (a * t0 + b * s0 + cc * m0) - al);
        }
    return best;
  };
  int members = 0, checked = 0, mismatches = 0;
  for (int i = 0; i < 20; ++i)
    for (int j = 0; j < 20; ++j)
      for (int k = 0; k < 20; ++k) {
        const double a = -2.0 + 2.5 * i / 19, b = -2.0 + 2.5 * j / 19, cc = -1.5 + 3.0 * k / 19;
        const bool member = beta_membership(a, b, cc, f, 1e-12);
        const double unit = sup(a, b, cc, 1.0);
        ++checked;
        if (member) {
          ++members;
          mismatches += !(unit <= tol::kFenchelMember && unit >= -1e-12 &&
                          sup(a, b, cc, 1e3) <= tol::kFenchelMember);
        } else {
          mismatches += !(unit > 0.0 && std::abs(sup(a, b, cc, 1e3) - 1e3 * unit) <= 1e-9 * 1e3 * unit);
        }
      }
  c.detail("fenchel " + std::to_string(checked) + " points, " + std::to_string(members) +
           " in K, " + std::to_string(mismatches) + " mismatches");
  c.expect(mismatches == 0, "Fenchel mismatch");
}

void pde(Criterion& c) {
  auto pc = confinement_case(1.0);
  pc.cfg.t_end = 1000 * pc.cfg.dt;
  const auto out = vvot::run(pc.init, pc.cfg, {pc.cfg.t_end});
  const auto& d = out.diagnostics;
  double drift = 0.0, rise = -kInf;
  const double mass0 = d.species_mass.front().sum();
  for (std::size_t k = 0; k < d.times.size(); ++k) {
    drift = std::max(drift, std::abs(d.species_mass[k].sum() - mass0));
    if (k) rise = std::max(rise, d.energy[k] - d.energy[k - 1]);
  }
  c.expect(d.times.size() >= 1001, "fewer than 1000 steps");
  c.expect(drift <= tol::kMassDrift, "mass drift");
  c.expect(rise <= tol::kEnergyRise, "energy rise");

  double mut = 0.0;
  for (const auto& s : {pc.init, out.trajectory.back()}) {
    const Mat m = rhs_parts(s, pc.cfg).mutation;
    for (Eigen::Index cell = 0; cell < m.rows(); ++cell) mut = std::max(mut, std::abs(m.row(cell).sum()));
  }
  c.expect(mut <= tol::kMutationSum, "mutation sum");

  auto frozen = confinement_case(0.0);
  frozen.cfg.t_end = 200 * frozen.cfg.dt;
  const auto run0 = vvot::run(frozen.init, frozen.cfg, {});
  double species = 0.0;
  for (const auto& m : run0.diagnostics.species_mass)
    species = std::max(species, (m - run0.diagnostics.species_mass.front()).cwiseAbs().maxCoeff());
  c.expect(species <= tol::kSpeciesMass, "species mass with q = 0");
  c.detail("drift " + num(drift) + ", max energy step " + num(rise) + ", mutation sum " + num(mut) +
           ", q=0 species drift " + num(species));
}

void lot(Criterion& c) {
  const auto g = WeightedGraph::complete(2);
  const auto ground = SimplexMetric::ground(g, Interpolation::geometric());
  const auto ref = sample_reference(24, 2, 1, 5);
  std::mt19937_64 rng(91);
  double worst = kInf;
  for (int trial = 0; trial < 20; ++trial) {
    const auto a = small_measure(rng, 2, 1 + trial % 4), b = small_measure(rng, 2, 1 + (trial + 1) % 4);
    const double tilde = d_lot_ground(lot_embed(ref, a, ground), lot_embed(ref, b, ground), ref,
                                      ground.corners());
    worst = std::min(worst, tilde - w2w(a, b, ground.corners()).distance);
  }
  c.detail("min d~ - w2w " + num(worst));
  c.expect(worst >= -tol::kLotGround, "ground bound");

  const auto euclid = SimplexMetric::euclidean(2);
  const auto ref2 = sample_reference(40, 2, 1, 12);
  std::vector<DiscreteVectorMeasure> data;
  for (int k = 0; k < 5; ++k) data.push_back(small_measure(rng, 2, 3));
  const Mat d = pairwise_matrix(ref2, data, euclid);
  int broken = 0;
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j)
      for (int k = 0; k < 5; ++k) broken += d(i, k) > d(i, j) + d(j, k) + 1e-12;
  c.detail(std::to_string(broken) + " triangle violations");
  c.expect(broken == 0, "d_lot triangle");
}

void ledger(Criterion& c) {
  const auto rep = verify_suite(Suite::Examples);
  c.expect(rep.pass(), "examples suite has failing checks");
  bool quadrature = false, bl = false;
  for (const auto& n : rep.notes) {
    const bool printed = std::isfinite(n.paper_value) && std::isfinite(n.computed) &&
                         format_report(rep).find(n.name) != std::string::npos;
    if (n.name.find("D(mu1,mu3)") != std::string::npos && printed &&
        std::abs(n.paper_value - std::numbers::pi / 6) <= 1e-9 &&
        std::abs(n.computed - kGeoHalfToThreeQuarters) <= 1e-9)
      quadrature = true;
    if (n.name.find("d_BL") != std::string::npos && printed &&
        std::abs(n.paper_value - 0.1 / std::numbers::sqrt2) <= 1e-9 &&
        std::abs(n.computed - 0.0706224552) <= 1e-9)
      bl = true;
  }
  c.detail(std::to_string(rep.checks.size()) + " checks, " + std::to_string(rep.notes.size()) + " notes");
  c.expect(quadrature, "quadrature note missing");
  c.expect(bl, "bounded-Lipschitz note missing");
}

}  // namespace

int main() {
  run(1, "two-node dynamic vs closed form", two_node_dynamic);
  run(2, "two-node geodesic ODE", geodesic);
  run(3, "two-node example identities", paper_examples);
  run(4, "semimetric triangle failure", triangle);
  run(5, "inequality chain, 20 instances", chain);
  run(6, "w2w vs brute-force couplings", brute_force);
  run(7, "lifted velocity projection", projection);
  run(8, "perspective prox and conjugate", prox_and_fenchel);
  run(9, "PDE structure", pde);
  run(10, "LOT bounds and triangle inequality", lot);
  run(11, "verify report notes", ledger);
  std::printf("%d of 11 criteria failed\n", failures);
  return failures ? 1 : 0;
}
