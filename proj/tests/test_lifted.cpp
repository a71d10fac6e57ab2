#include <doctest.h>

#include <random>

#include "vvot/errors.hpp"
#include "vvot/lifted.hpp"
#include "vvot/static_solver.hpp"

using namespace vvot;

namespace {

DiscreteVectorMeasure random_measure(std::mt19937_64& rng, int n, int atoms, int d = 1) {
  std::uniform_real_distribution<double> x(-1.0, 1.0), w(0.0, 1.0);
  std::vector<Atom> list;
  double total = 0.0;
  for (int k = 0; k < atoms; ++k) {
    Vec loc(d), v(n);
    for (auto& e : loc) e = x(rng);
    for (auto& e : v) e = w(rng) < 0.3 ? 0.0 : w(rng);
    if (v.sum() == 0) v(n - 1) = 0.4;
    total += v.sum();
    list.push_back({loc, v});
  }
  for (auto& a : list) a.w /= total;
  return DiscreteVectorMeasure(n, d, list);
}

bool same_measure(const DiscreteVectorMeasure& a, const DiscreteVectorMeasure& b, double tol) {
  for (const auto& at : a.atoms()) {
    Vec found = Vec::Zero(a.n());
    for (const auto& bt : b.atoms())
      if (bt.x == at.x) found += bt.w;
    if ((found - at.w).cwiseAbs().maxCoeff() > tol) return false;
  }
  return std::abs(a.total_mass() - b.total_mass()) <= tol;
}

ReferenceMeasure reference_from(const LiftedMeasure& lam, std::uint64_t seed) {
  ReferenceMeasure ref;
  ref.n = lam.n;
  ref.d = lam.d;
  ref.seed = seed;
  ref.atoms = lam.atoms;
  return ref;
}

}  // namespace

TEST_CASE("canonical lift and projection") {
  const auto dirac = measure_1d(2, {{0.0, {1.0, 0.0}}});
  const auto lift = canonical_lift(dirac);
  REQUIRE(lift.atoms.size() == 1);
  CHECK(lift.atoms[0].r(0) == 1.0);
  CHECK(lift.atoms[0].mass == 1.0);

  const auto split = canonical_lift(measure_1d(2, {{0.0, {0.5, 0.5}}}));
  REQUIRE(split.atoms.size() == 2);
  CHECK(split.atoms[0].mass == 0.5);
  CHECK((split.atoms[0].r - split.atoms[1].r).norm() == 1.0);

  LiftedMeasure mid{2, 1, {{Vec::Zero(1), Vec::Constant(1, 0.5), 1.0}}};
  CHECK(same_measure(project(mid), measure_1d(2, {{0.0, {0.5, 0.5}}}), 0.0));

  // A line of mass at r = 1/2 projects to equal species mass at each x.
  LiftedMeasure line{2, 1, {}};
  for (int k = 0; k < 5; ++k) line.atoms.push_back({Vec::Constant(1, 0.1 * k), Vec::Constant(1, 0.5), 0.2});
  const auto flat = project(line);
  CHECK(flat.size() == 5);
  for (const auto& at : flat.atoms()) CHECK(at.w(0) == at.w(1));

  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 50; ++trial) {
    const auto mu = random_measure(rng, 2 + trial % 2, 1 + trial % 4);
    CHECK(same_measure(project(canonical_lift(mu)), mu, 0.0));
    CHECK(canonical_lift(mu).total_mass() == doctest::Approx(1.0).epsilon(1e-15));
  }
}

TEST_CASE("projection is linear and keeps the spatial second moment") {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> u(0.0, 1.0), x(-1.0, 1.0);
  auto random_lift = [&] {
    LiftedMeasure lam{3, 1, {}};
    double total = 0.0;
    for (int k = 0; k < 4; ++k) {
      const double a = u(rng), b = u(rng) * (1 - a);
      lam.atoms.push_back({Vec::Constant(1, std::round(x(rng) * 4) / 4), Vec{{a, b}}, u(rng)});
      total += lam.atoms.back().mass;
    }
    for (auto& at : lam.atoms) at.mass /= total;
    return lam;
  };
  for (int trial = 0; trial < 20; ++trial) {
    const auto l1 = random_lift(), l2 = random_lift();
    LiftedMeasure mix{3, 1, {}};
    for (const auto& at : l1.atoms) mix.atoms.push_back({at.x, at.r, 0.3 * at.mass});
    for (const auto& at : l2.atoms) mix.atoms.push_back({at.x, at.r, 0.7 * at.mass});
    const auto p1 = project(l1), p2 = project(l2), pm = project(mix);
    std::vector<Atom> combo;
    for (const auto& at : p1.atoms()) combo.push_back({at.x, 0.3 * at.w});
    for (const auto& at : p2.atoms()) combo.push_back({at.x, 0.7 * at.w});
    CHECK(same_measure(pm, DiscreteVectorMeasure(3, 1, combo), 1e-15));

    double lifted_m2 = 0.0, projected_m2 = 0.0;
    for (const auto& at : mix.atoms) lifted_m2 += at.mass * at.x.squaredNorm();
    for (const auto& at : pm.atoms()) projected_m2 += at.w.sum() * at.x.squaredNorm();
    CHECK(lifted_m2 == doctest::Approx(projected_m2).epsilon(1e-14));
  }
}

TEST_CASE("reference sampling") {
  const auto one = sample_reference(1, 3, 2, 5);
  REQUIRE(one.size() == 1);
  CHECK(one.atoms[0].mass == 1.0);

  const int N = 4000;
  const auto ref = sample_reference(N, 3, 2, 9);
  Vec mean = Vec::Zero(2);
  double total = 0.0;
  for (const auto& at : ref.atoms) {
    CHECK(at.x.norm() <= 1.0);
    CHECK(at.r.minCoeff() >= 0.0);
    CHECK(at.r.sum() <= 1.0 + 1e-15);
    mean += at.mass * at.r;
    total += at.mass;
  }
  CHECK(total == doctest::Approx(1.0));
  CHECK((mean - Vec::Constant(2, 1.0 / 3)).cwiseAbs().maxCoeff() <= 3.0 / std::sqrt(N));

  const auto again = sample_reference(N, 3, 2, 9);
  for (std::size_t k = 0; k < ref.size(); ++k) {
    CHECK(ref.atoms[k].x == again.atoms[k].x);
    CHECK(ref.atoms[k].r == again.atoms[k].r);
  }
}

TEST_CASE("LOT embedding") {
  const auto euclid = SimplexMetric::euclidean(2);
  const auto mu = measure_1d(2, {{-0.5, {0.25, 0.0}}, {0.4, {0.25, 0.5}}});

  // Reference equal to the target lift: identity embedding.
  const auto lift = canonical_lift(mu);
  const auto self_ref = reference_from(lift, 77);
  const auto ident = lot_embed(self_ref, mu, euclid);
  CHECK_FALSE(ident.non_injective());
  for (std::size_t k = 0; k < self_ref.size(); ++k) {
    CHECK((ident.x[k] - self_ref.atoms[k].x).norm() <= 1e-12);
    CHECK((ident.r[k] - self_ref.atoms[k].r).norm() <= 1e-12);
  }

  // One reference atom: the embedding is the barycenter of the lift.
  const auto single = sample_reference(1, 2, 1, 3);
  const auto bary = lot_embed(single, mu, euclid);
  Vec bx = Vec::Zero(1), br = Vec::Zero(1);
  for (const auto& at : lift.atoms) {
    bx += at.mass * at.x;
    br += at.mass * at.r;
  }
  CHECK((bary.x[0] - bx).norm() <= 1e-12);
  CHECK((bary.r[0] - br).norm() <= 1e-12);
  CHECK(bary.non_injective());

  // Two-atom reference and target: the cheaper of the two permutations.
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-1.0, 1.0), s(0.0, 1.0);
  for (int trial = 0; trial < 30; ++trial) {
    ReferenceMeasure ref{2, 1, 1, {}};
    for (int k = 0; k < 2; ++k)
      ref.atoms.push_back({Vec::Constant(1, u(rng)), Vec::Constant(1, s(rng)), 0.5});
    const auto target = measure_1d(2, {{u(rng), {0.5, 0.0}}, {u(rng), {0.0, 0.5}}});
    const auto tl = canonical_lift(target);
    auto cost = [&](int a, int b) {
      return (ref.atoms[a].x - tl.atoms[b].x).squaredNorm() +
             (ref.atoms[a].r - tl.atoms[b].r).squaredNorm();
    };
    const double keep = cost(0, 0) + cost(1, 1), swap = cost(0, 1) + cost(1, 0);
    if (std::abs(keep - swap) < 1e-9) continue;
    const int partner0 = keep < swap ? 0 : 1;
    const auto e = lot_embed(ref, target, euclid);
    CHECK((e.x[0] - tl.atoms[partner0].x).norm() <= 1e-12);
    CHECK((e.x[1] - tl.atoms[1 - partner0].x).norm() <= 1e-12);
    CHECK_FALSE(e.non_injective());
  }
}

TEST_CASE("d_lot") {
  const auto ref = sample_reference(40, 2, 1, 12);
  const auto euclid = SimplexMetric::euclidean(2);
  std::mt19937_64 rng(13);
  std::vector<DiscreteVectorMeasure> data;
  for (int k = 0; k < 5; ++k) data.push_back(random_measure(rng, 2, 3));
  std::vector<LotEmbedding> emb;
  for (const auto& m : data) emb.push_back(lot_embed(ref, m, euclid));
  CHECK(d_lot(emb[0], emb[0], ref) == 0.0);
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j)
      for (int k = 0; k < 5; ++k)
        CHECK(d_lot(emb[i], emb[k], ref) <= d_lot(emb[i], emb[j], ref) + d_lot(emb[j], emb[k], ref) + 1e-12);

  const Mat m = pairwise_matrix(ref, data, euclid);
  CHECK((m - m.transpose()).norm() == 0.0);
  CHECK(m.diagonal().norm() == 0.0);
  CHECK(m.minCoeff() >= 0.0);
  CHECK(m(1, 3) == doctest::Approx(d_lot(emb[1], emb[3], ref)).epsilon(1e-14));

  const Mat same = pairwise_matrix(ref, {data[0], data[0], data[0]}, euclid);
  CHECK(same.norm() == 0.0);

  const auto other = sample_reference(40, 2, 1, 99);
  try {
    d_lot(emb[0], lot_embed(other, data[1], euclid), ref);
    FAIL("expected ReferenceMismatch");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::ReferenceMismatch);
  }
}

TEST_CASE("ground LOT distance bounds w2w") {
  const auto g = WeightedGraph::complete(2);
  const auto f = Interpolation::geometric();
  const auto ground = SimplexMetric::ground(g, f);
  const auto ref = sample_reference(24, 2, 1, 5);
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 10; ++trial) {
    const auto a = random_measure(rng, 2, 3), b = random_measure(rng, 2, 2);
    const auto ea = lot_embed(ref, a, ground), eb = lot_embed(ref, b, ground);
    const double tilde = d_lot_ground(ea, eb, ref, ground.corners());
    CHECK(tilde >= w2w(a, b, ground.corners()).distance - 1e-8);
  }
  CHECK(ground(Vec::Constant(1, 0.5), Vec::Constant(1, 0.5)) == 0.0);
  CHECK(ground.corners()(0, 1) == doctest::Approx(1.694426169588).epsilon(1e-8));
}
