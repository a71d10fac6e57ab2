#include "vvot/bl.hpp"

#include <cmath>
#include <numbers>

#include "vvot/errors.hpp"
#include "vvot/lp.hpp"

namespace vvot {

namespace {

// Merges coincident points and drops zero weights.
SignedMeasure compress(const SignedMeasure& m) {
  SignedMeasure out;
  for (std::size_t k = 0; k < m.points.size(); ++k) {
    std::size_t slot = 0;
    while (slot < out.points.size() && out.points[slot] != m.points[k]) ++slot;
    if (slot == out.points.size()) {
      out.points.push_back(m.points[k]);
      out.weights.push_back(0.0);
    }
    out.weights[slot] += m.weights[k];
  }
  SignedMeasure kept;
  for (std::size_t k = 0; k < out.points.size(); ++k)
    if (out.weights[k] != 0.0) {
      kept.points.push_back(out.points[k]);
      kept.weights.push_back(out.weights[k]);
    }
  return kept;
}

}  // namespace

double bl_inner(const SignedMeasure& m, double bound, double lipschitz) {
  require(m.points.size() == m.weights.size(), Errc::LengthMismatch, "points and weights");
  require(bound >= 0.0 && lipschitz >= 0.0, Errc::Domain, "bounds must be nonnegative");
  const int K = static_cast<int>(m.points.size());
  if (K == 0) return 0.0;
  double total = 0.0;
  for (double w : m.weights) total += w;
  if (K == 1 || lipschitz == 0.0) return bound * std::abs(total);

  // eta_k = z_k - bound with 0 <= z_k <= 2 bound; slacks make every row an equality.
  const int pairs = K * (K - 1);
  const int rows = K + pairs;
  const int cols = 2 * K + pairs;
  std::vector<Eigen::Triplet<double>> trip;
  Vec b(rows), c = Vec::Zero(cols);
  for (int k = 0; k < K; ++k) {
    trip.emplace_back(k, k, 1.0);
    trip.emplace_back(k, K + k, 1.0);
    b(k) = 2.0 * bound;
    c(k) = -m.weights[k];
  }
  int row = K;
  for (int k = 0; k < K; ++k)
    for (int l = 0; l < K; ++l) {
      if (k == l) continue;
      trip.emplace_back(row, k, 1.0);
      trip.emplace_back(row, l, -1.0);
      trip.emplace_back(row, K + row, 1.0);
      b(row) = lipschitz * (m.points[k] - m.points[l]).norm();
      ++row;
    }
  LpProblem lp;
  lp.A.resize(rows, cols);
  lp.A.setFromTriplets(trip.begin(), trip.end());
  lp.b = std::move(b);
  lp.c = std::move(c);
  const LpSolution sol = solve_lp(lp);
  require(sol.status == LpStatus::Optimal, Errc::Infeasible, "bounded-Lipschitz LP failed");
  return -sol.objective - bound * total;
}

double bl_norm_component(const SignedMeasure& m) {
  require(m.points.size() == m.weights.size(), Errc::LengthMismatch, "points and weights");
  const SignedMeasure s = compress(m);
  if (s.points.empty()) return 0.0;
  auto value = [&](double phi) { return bl_inner(s, std::cos(phi), std::sin(phi)); };

  // The value is a minimum of sinusoids in phi, hence unimodal on [0, pi/2].
  const double ratio = (std::sqrt(5.0) - 1.0) / 2.0;
  double lo = 0.0, hi = std::numbers::pi / 2;
  double x1 = hi - ratio * (hi - lo), x2 = lo + ratio * (hi - lo);
  double f1 = value(x1), f2 = value(x2);
  double best = std::max({value(lo), f1, f2});
  for (int it = 0; it < 60; ++it) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + ratio * (hi - lo);
      f2 = value(x2);
      best = std::max(best, f2);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - ratio * (hi - lo);
      f1 = value(x1);
      best = std::max(best, f1);
    }
  }
  return best;
}

double d_bl(const DiscreteVectorMeasure& mu, const DiscreteVectorMeasure& nu) {
  require(mu.n() == nu.n() && mu.dim() == nu.dim(), Errc::LengthMismatch,
          "measures differ in species count or dimension");
  double total = 0.0;
  for (int i = 0; i < mu.n(); ++i) {
    SignedMeasure diff;
    for (const auto& a : mu.atoms()) {
      diff.points.push_back(a.x);
      diff.weights.push_back(a.w(i));
    }
    for (const auto& a : nu.atoms()) {
      diff.points.push_back(a.x);
      diff.weights.push_back(-a.w(i));
    }
    const double v = bl_norm_component(diff);
    total += v * v;
  }
  return std::sqrt(total);
}

}  // namespace vvot
