#include "vvot/lifted.hpp"

#include <cmath>
#include <exception>
#include <map>
#include <mutex>
#include <random>

#include "vvot/errors.hpp"
#include "vvot/graph_wasserstein.hpp"
#include "vvot/lp.hpp"

namespace vvot {

LiftedMeasure canonical_lift(const DiscreteVectorMeasure& mu) {
  LiftedMeasure lam{mu.n(), mu.dim(), {}};
  for (const auto& a : mu.atoms())
    for (int j = 0; j < mu.n(); ++j)
      if (a.w(j) > 0.0) lam.atoms.push_back({a.x, simplex_corner(mu.n(), j), a.w(j)});
  return lam;
}

DiscreteVectorMeasure project(const LiftedMeasure& lam) {
  DiscreteVectorMeasure mu(lam.n, lam.d);
  for (const auto& a : lam.atoms) {
    require(a.mass >= 0.0, Errc::Domain, "lifted masses must be nonnegative");
    mu.add(a.x, a.mass * simplex_to_distribution(a.r));
  }
  return mu;
}

ReferenceMeasure sample_reference(int N, int n, int d, std::uint64_t seed) {
  require(N >= 1 && n >= 1 && d >= 1, Errc::Domain, "reference needs N, n, d >= 1");
  ReferenceMeasure ref;
  ref.n = n;
  ref.d = d;
  ref.seed = seed;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> unit;
  std::exponential_distribution<double> expo(1.0);
  for (int k = 0; k < N; ++k) {
    Vec x(d);
    for (int c = 0; c < d; ++c) x(c) = normal(rng);
    const double norm = x.norm();
    x *= (norm > 0.0 ? std::pow(unit(rng), 1.0 / d) / norm : 0.0);
    Vec p(n);
    for (int j = 0; j < n; ++j) p(j) = expo(rng);
    p /= p.sum();
    ref.atoms.push_back({std::move(x), distribution_to_simplex(p), 1.0 / N});
  }
  return ref;
}

struct SimplexMetric::Ground {
  Ground(const WeightedGraph& g, const Interpolation& f, int T, const SolverConfig& cfg)
      : g(g), f(f), T(T), cfg(cfg) {
    this->cfg.parallel = false;
  }

  WeightedGraph g;
  Interpolation f;
  int T;
  SolverConfig cfg;
  mutable std::mutex lock;
  mutable std::map<std::pair<std::vector<double>, std::vector<double>>, double> cache;
};

SimplexMetric SimplexMetric::euclidean(int n) {
  require(n >= 1, Errc::Domain, "need at least one species");
  SimplexMetric m;
  m.n_ = n;
  m.corners_ = Mat::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m.corners_(i, j) = (simplex_corner(n, i) - simplex_corner(n, j)).norm();
  return m;
}

SimplexMetric SimplexMetric::ground(const WeightedGraph& g, const Interpolation& f, int T,
                                    const SolverConfig& cfg) {
  SimplexMetric m;
  m.n_ = g.n();
  m.corners_ = d_w_matrix(g, f, T, cfg);
  m.ground_ = std::make_shared<const Ground>(g, f, T, cfg);
  return m;
}

double SimplexMetric::operator()(const Vec& r0, const Vec& r1) const {
  require(r0.size() == n_ - 1 && r1.size() == n_ - 1, Errc::LengthMismatch,
          "simplex points need n-1 coordinates");
  if (!ground_) return (r0 - r1).norm();
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j)
      if (r0 == simplex_corner(n_, i) && r1 == simplex_corner(n_, j)) return corners_(i, j);
  auto key = std::make_pair(std::vector<double>(r0.begin(), r0.end()),
                            std::vector<double>(r1.begin(), r1.end()));
  {
    std::lock_guard guard(ground_->lock);
    if (auto it = ground_->cache.find(key); it != ground_->cache.end()) return it->second;
  }
  const double v = simplex_distance(ground_->g, ground_->f, r0, r1, ground_->T, ground_->cfg);
  std::lock_guard guard(ground_->lock);
  ground_->cache.emplace(std::move(key), v);
  return v;
}

LotEmbedding lot_embed(const ReferenceMeasure& ref, const DiscreteVectorMeasure& mu,
                       const SimplexMetric& metric) {
  require(mu.n() == ref.n && mu.dim() == ref.d, Errc::ReferenceMismatch,
          "measure and reference differ in species count or dimension");
  require(metric.n() == ref.n, Errc::LengthMismatch, "metric species count");
  mu.check_probability();

  LotEmbedding e;
  e.reference_seed = ref.seed;
  e.reference_size = ref.size();
  e.target = canonical_lift(mu);
  const int N = static_cast<int>(ref.size());
  const int K = static_cast<int>(e.target.atoms.size());

  LpProblem lp;
  lp.b.resize(N + K);
  lp.c.resize(std::size_t(N) * K);
  std::vector<Eigen::Triplet<double>> trip;
  for (int k = 0; k < N; ++k) lp.b(k) = ref.atoms[k].mass;
  for (int a = 0; a < K; ++a) lp.b(N + a) = e.target.atoms[a].mass;
  for (int k = 0; k < N; ++k)
    for (int a = 0; a < K; ++a) {
      const int col = k * K + a;
      const auto& s = ref.atoms[k];
      const auto& t = e.target.atoms[a];
      const double dr = metric(s.r, t.r);
      lp.c(col) = (s.x - t.x).squaredNorm() + dr * dr;
      trip.emplace_back(k, col, 1.0);
      trip.emplace_back(N + a, col, 1.0);
    }
  lp.A.resize(N + K, N * K);
  lp.A.setFromTriplets(trip.begin(), trip.end());
  const LpSolution sol = solve_lp(lp);
  require(sol.status == LpStatus::Optimal, Errc::Infeasible, "embedding LP failed");

  e.plan.assign(N, {});
  for (const auto& [col, mass] : sol.support) {
    const int k = static_cast<int>(col) / K, a = static_cast<int>(col) % K;
    e.plan[k].push_back({a, mass / ref.atoms[k].mass});
  }
  for (int k = 0; k < N; ++k) {
    auto& targets = e.plan[k];
    double total = 0.0;
    for (const auto& t : targets) total += t.share;
    require(total > 0.0, Errc::Infeasible, "reference atom left unassigned");
    Vec x = Vec::Zero(ref.d), r = Vec::Zero(ref.n - 1);
    for (auto& t : targets) {
      t.share /= total;
      x += t.share * e.target.atoms[t.atom].x;
      r += t.share * e.target.atoms[t.atom].r;
    }
    // Averaging can leave the simplex only by rounding.
    r = r.cwiseMax(0.0);
    if (r.sum() > 1.0) r /= r.sum();
    e.x.push_back(std::move(x));
    e.r.push_back(std::move(r));
    int used = 0;
    for (const auto& t : targets) used += t.share > 1e-9;
    if (used > 1) ++e.split_atoms;
  }
  return e;
}

namespace {

void check_reference(const LotEmbedding& e, const ReferenceMeasure& ref) {
  require(e.reference_seed == ref.seed && e.reference_size == ref.size() &&
              e.x.size() == ref.size(),
          Errc::ReferenceMismatch, "embedding was computed against another reference");
}

}  // namespace

double d_lot(const LotEmbedding& e1, const LotEmbedding& e2, const ReferenceMeasure& ref) {
  check_reference(e1, ref);
  check_reference(e2, ref);
  double total = 0.0;
  for (std::size_t k = 0; k < ref.size(); ++k)
    total += ref.atoms[k].mass * ((e1.x[k] - e2.x[k]).squaredNorm() + (e1.r[k] - e2.r[k]).squaredNorm());
  return std::sqrt(total);
}

double d_lot_ground(const LotEmbedding& e1, const LotEmbedding& e2, const ReferenceMeasure& ref,
                    const Mat& d_w) {
  check_reference(e1, ref);
  check_reference(e2, ref);
  require(d_w.rows() == ref.n && d_w.cols() == ref.n, Errc::LengthMismatch, "d_w must be n x n");
  auto species = [&](const LiftedAtom& a) {
    const Vec p = simplex_to_distribution(a.r);
    int j = 0;
    p.maxCoeff(&j);
    return j;
  };
  double total = 0.0;
  for (std::size_t k = 0; k < ref.size(); ++k)
    for (const auto& s : e1.plan[k])
      for (const auto& t : e2.plan[k]) {
        const auto& a = e1.target.atoms[s.atom];
        const auto& b = e2.target.atoms[t.atom];
        const double dw = d_w(species(a), species(b));
        total += ref.atoms[k].mass * s.share * t.share * ((a.x - b.x).squaredNorm() + dw * dw);
      }
  return std::sqrt(total);
}

namespace {

Mat fill_matrix(const std::vector<LotEmbedding>& emb, const ReferenceMeasure& ref) {
  const int N = static_cast<int>(emb.size());
  Mat d = Mat::Zero(N, N);
  for (int i = 0; i < N; ++i)
    for (int j = i + 1; j < N; ++j) d(i, j) = d(j, i) = d_lot(emb[i], emb[j], ref);
  return d;
}

}  // namespace

Mat pairwise_matrix_serial(const ReferenceMeasure& ref,
                           const std::vector<DiscreteVectorMeasure>& data,
                           const SimplexMetric& metric) {
  std::vector<LotEmbedding> emb;
  for (const auto& mu : data) emb.push_back(lot_embed(ref, mu, metric));
  return fill_matrix(emb, ref);
}

Mat pairwise_matrix(const ReferenceMeasure& ref, const std::vector<DiscreteVectorMeasure>& data,
                    const SimplexMetric& metric) {
  std::vector<LotEmbedding> emb(data.size());
  std::exception_ptr error;
#pragma omp parallel for schedule(dynamic)
  for (std::size_t k = 0; k < data.size(); ++k) {
    try {
      emb[k] = lot_embed(ref, data[k], metric);
    } catch (...) {
#pragma omp critical
      error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
  return fill_matrix(emb, ref);
}

}  // namespace vvot
