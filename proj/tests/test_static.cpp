#include <doctest.h>

#include <numbers>
#include <random>

#include "oracles.hpp"
#include "vvot/errors.hpp"
#include "vvot/graph_wasserstein.hpp"
#include "vvot/static_solver.hpp"

using namespace vvot;

namespace {

Mat two_node_dw(const Interpolation& f) {
  const double d = wg_two_node(f, 1, 0, 1);
  return (Mat(2, 2) << 0, d, d, 0).finished();
}

// w2w by brute force over the transportation polytope between (atom, species) nodes.
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
      const double dd = dw(src[s].species, dst[t].species);
      cost(s, t) = (src[s].x - dst[t].x).squaredNorm() + dd * dd;
    }
  }
  for (std::size_t t = 0; t < dst.size(); ++t) b(t) = dst[t].mass;
  return std::sqrt(oracle::transport_brute_force(cost, a, b));
}

DiscreteVectorMeasure random_measure(std::mt19937_64& rng, int n, int atoms) {
  std::uniform_real_distribution<double> x(-1.0, 1.0), w(0.0, 1.0);
  DiscreteVectorMeasure m(n, 1);
  std::vector<Vec> ws;
  double total = 0.0;
  for (int k = 0; k < atoms; ++k) {
    Vec v(n);
    for (auto& e : v) e = w(rng) < 0.3 ? 0.0 : w(rng);
    if (v.sum() == 0) v(0) = 0.5;
    total += v.sum();
    ws.push_back(v);
  }
  for (auto& v : ws) m.add(Vec::Constant(1, std::round(x(rng) * 1000) / 1000), v / total);
  return m;
}

}  // namespace

TEST_CASE("d_w matrix") {
  const auto g2 = WeightedGraph::complete(2);
  const Mat d = d_w_matrix(g2, Interpolation::arithmetic(), 64);
  CHECK(d(0, 0) == 0.0);
  CHECK(std::abs(d(0, 1) - std::numbers::sqrt2) <= 2e-2);
  CHECK(d(0, 1) == d(1, 0));
}

TEST_CASE("w2w examples") {
  const auto geo = Interpolation::geometric();
  const Mat dw = two_node_dw(geo);
  const auto m = two_node_measures(0.3, 0.75);

  const auto same = w2w(m.mu2, m.mu2, dw);
  CHECK(same.distance == doctest::Approx(0.0).scale(1));
  for (const auto& e : same.coupling.entries) {
    CHECK(e.source_atom == e.target_atom);
    CHECK(e.source_species == e.target_species);
  }

  // Squared cost: a quarter of the mass moves species at cost d_W^2.
  const auto r13 = w2w(m.mu1, m.mu3, dw);
  CHECK(r13.distance == doctest::Approx(std::sqrt(0.25) * dw(0, 1)).epsilon(1e-12));

  const auto shift = w2w(measure_1d(1, {{0.0, {1.0}}}), measure_1d(1, {{1.0, {1.0}}}), Mat::Zero(1, 1));
  CHECK(shift.distance == doctest::Approx(1.0));

  try {
    w2w(m.mu1, measure_1d(2, {{0.0, {0.5, 0.4}}}), dw);
    FAIL("expected MassMismatch");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::MassMismatch);
  }
}

TEST_CASE("w2w against brute force and metric axioms") {
  std::mt19937_64 rng(27);
  const Mat dw = two_node_dw(Interpolation::logarithmic());
  for (int trial = 0; trial < 20; ++trial) {
    const auto a = random_measure(rng, 2, 2), b = random_measure(rng, 2, 2),
               c = random_measure(rng, 2, 2);
    const auto ab = w2w(a, b, dw);
    CHECK(std::abs(ab.distance - w2w_brute(a, b, dw)) <= 1e-10);
    CHECK(ab.distance == doctest::Approx(w2w(b, a, dw).distance).epsilon(1e-10));
    CHECK(w2w(a, c, dw).distance <= ab.distance + w2w(b, c, dw).distance + 1e-8);

    // Coupling marginals.
    Mat out = Mat::Zero(a.size(), 2), in = Mat::Zero(b.size(), 2);
    for (const auto& e : ab.coupling.entries) {
      CHECK(e.mass >= 0.0);
      out(e.source_atom, e.source_species) += e.mass;
      in(e.target_atom, e.target_species) += e.mass;
    }
    for (std::size_t k = 0; k < a.size(); ++k)
      CHECK((out.row(k).transpose() - a.atoms()[k].w).cwiseAbs().maxCoeff() <= 1e-12);
    for (std::size_t k = 0; k < b.size(); ++k)
      CHECK((in.row(k).transpose() - b.atoms()[k].w).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("simplex grid") {
  const auto g2 = simplex_grid(2, 4, {Vec::Constant(1, 0.25), Vec::Constant(1, 0.3)});
  CHECK(g2.size() == 6);
  const auto g3 = simplex_grid(3, 3);
  CHECK(g3.size() == 10);
  for (const auto& r : g3) {
    CHECK(r.minCoeff() >= 0.0);
    CHECK(r.sum() <= 1.0 + 1e-15);
  }
}

TEST_CASE("lifted upper bound") {
  const auto geo = Interpolation::geometric();
  const auto g = WeightedGraph::complete(2);
  const Mat dw = two_node_dw(geo);
  const double a = 0.3, b = 0.6;
  const auto m = two_node_measures(a, b);

  const auto corners = simplex_grid(2, 1);
  const Mat dc = simplex_distance_table(g, geo, corners);
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 5; ++trial) {
    const auto x = random_measure(rng, 2, 2), y = random_measure(rng, 2, 3);
    CHECK(lifted_semimetric_upper(x, y, corners, dc).upper_bound ==
          doctest::Approx(w2w(x, y, dw).distance).epsilon(1e-10));
  }
  CHECK(lifted_semimetric_upper(m.mu2, m.mu2, corners, dc).upper_bound ==
        doctest::Approx(0.0).scale(1));

  const auto with_half = simplex_grid(2, 2);
  const auto d12 = lifted_semimetric_upper(m.mu1, m.mu2, with_half,
                                           simplex_distance_table(g, geo, with_half));
  CHECK(std::abs(d12.upper_bound - a) <= 1e-6);

  const auto ex = two_node_examples(geo, 1, a, b);
  const auto special = simplex_grid(2, 2, {Vec::Constant(1, 2 * b - 1)});
  const auto d23 = lifted_semimetric_upper(m.mu2, m.mu3, special,
                                           simplex_distance_table(g, geo, special));
  CHECK(d23.upper_bound <= ex.d23 + 1e-8);

  // Projections of the returned lifts reproduce the measures.
  for (const auto& [lift, target] : {std::pair{&d23.lift_mu, &m.mu2}, std::pair{&d23.lift_nu, &m.mu3}}) {
    Vec species = Vec::Zero(2);
    for (const auto& at : lift->atoms) species += at.mass * simplex_to_distribution(at.r);
    CHECK((species - target->species_mass()).cwiseAbs().maxCoeff() <= 1e-10);
  }

  // Refining the grid never raises the bound.
  double previous = kInf;
  for (int sub : {1, 2, 4, 8, 16}) {
    const auto grid = simplex_grid(2, sub, {Vec::Constant(1, 2 * b - 1)});
    const double bound =
        lifted_semimetric_upper(m.mu2, m.mu3, grid, simplex_distance_table(g, geo, grid))
            .upper_bound;
    CHECK(bound <= previous + 1e-10);
    previous = bound;
  }

  try {
    lifted_semimetric_upper(m.mu1, m.mu2, {Vec::Constant(1, 0.5)}, Mat::Zero(1, 1));
    FAIL("expected Domain");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::Domain);
  }
}

TEST_CASE("two-node closed forms") {
  const auto geo = Interpolation::geometric();
  const auto zero = two_node_examples(geo, 1, 0.0, 0.5);
  for (double v : {zero.w12, zero.w13, zero.w23_upper, zero.d12, zero.d13, zero.d23})
    CHECK(v == doctest::Approx(0.0).scale(1));

  const auto ex = two_node_examples(geo, 1, 0.3, 0.6);
  CHECK(ex.w12 == 0.3);
  CHECK(ex.d12 == 0.3);
  CHECK(ex.d13 == doctest::Approx(0.141899987289).epsilon(1e-9));
  CHECK(ex.w13 == ex.d13);
  CHECK(ex.w23_upper == doctest::Approx(0.3 + ex.d13));
  CHECK(ex.d23 == doctest::Approx(std::sqrt(0.09 + 0.5 * std::pow(0.408070173555, 2))).epsilon(1e-9));

  try {
    two_node_examples(Interpolation::arithmetic(), 1, 0.3, 0.6);
    FAIL("expected ThetaNotVanishing");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::ThetaNotVanishing);
  }
}

TEST_CASE("triangle inequality failure") {
  const auto geo = Interpolation::geometric();
  const auto w = triangle_failure_witness(geo, 1);
  const auto ex = two_node_examples(geo, 1, w.a, w.b);
  CHECK(ex.d23 == doctest::Approx(w.lhs));
  CHECK(ex.d12 + ex.d13 == doctest::Approx(w.rhs));
  CHECK(w.lhs - w.rhs >= 1e-6);
  CHECK(w.a > 0.0);
  CHECK(w.b > 0.5);

  // Independent recomputation from the quadrature oracle.
  const double d_half = wg_two_node(geo, 1, 0.5, w.b), d_edge = wg_two_node(geo, 1, 0, 2 * w.b - 1);
  CHECK(std::sqrt(w.a * w.a + 0.5 * d_edge * d_edge) > w.a + d_half);

  CHECK_THROWS_AS(triangle_failure_witness(Interpolation::arithmetic(), 1), Error);
  try {
    triangle_failure_witness(geo, 1, {2, 2, 10.0});
    FAIL("expected NotFound");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::NotFound);
  }
}

TEST_CASE("inequality chain") {
  const auto g = WeightedGraph::complete(2);
  const auto geo = Interpolation::geometric();
  ChainConfig cfg;
  const auto tables = chain_tables(g, geo, cfg);
  const auto m = two_node_measures(0.3, 0.6);

  const auto same = check_chain(g, geo, m.mu1, m.mu1, cfg, &tables);
  CHECK(same.ok);
  CHECK(same.d_bl == 0.0);
  CHECK(same.w_dyn <= 1e-6);
  CHECK(same.d_upper <= 1e-6);
  CHECK(same.w2w <= 1e-6);

  const auto r = check_chain(g, geo, m.mu1, m.mu2, cfg, &tables);
  CHECK(r.ok);
  CHECK(r.violations.empty());
  CHECK(std::abs(r.w_dyn - 0.3) <= 3e-2);
  CHECK(std::abs(r.d_upper - 0.3) <= 1e-6);
  CHECK(r.w2w >= 0.3 - 1e-9);
  CHECK(r.lower_bound <= r.w_dyn + cfg.chain_tol);
  CHECK(r.d_upper <= r.w2w + cfg.lp_tol);
  CHECK(r.w2w <= r.upper_bound + cfg.bound_tol);
}
