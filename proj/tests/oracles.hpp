#pragma once

// Reference computations shared by the unit tests and the acceptance binary.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

namespace oracle {

using Vec = Eigen::VectorXd;

// Nelder-Mead with restarts from the best vertex.
inline Vec nelder_mead(const std::function<double(const Vec&)>& fn, Vec x0, double scale,
                       int restarts = 6, int max_iter = 4000, double ftol = 1e-15) {
  const auto n = x0.size();
  for (int round = 0; round < restarts; ++round) {
    std::vector<Vec> pts{x0};
    for (Eigen::Index k = 0; k < n; ++k) {
      Vec p = x0;
      p(k) += scale;
      pts.push_back(p);
    }
    std::vector<double> val;
    for (const auto& p : pts) val.push_back(fn(p));
    for (int it = 0; it < max_iter; ++it) {
      std::vector<std::size_t> idx(pts.size());
      for (std::size_t k = 0; k < idx.size(); ++k) idx[k] = k;
      std::sort(idx.begin(), idx.end(), [&](auto a, auto b) { return val[a] < val[b]; });
      const std::size_t best = idx.front(), worst = idx.back(), second = idx[idx.size() - 2];
      if (std::abs(val[worst] - val[best]) <= ftol * (1 + std::abs(val[best]))) break;
      Vec centroid = Vec::Zero(n);
      for (std::size_t k = 0; k + 1 < idx.size(); ++k) centroid += pts[idx[k]];
      centroid /= static_cast<double>(n);
      const Vec refl = centroid + (centroid - pts[worst]);
      const double fr = fn(refl);
      if (fr < val[best]) {
        const Vec exp = centroid + 2.0 * (centroid - pts[worst]);
        const double fe = fn(exp);
        if (fe < fr) {
          pts[worst] = exp, val[worst] = fe;
        } else {
          pts[worst] = refl, val[worst] = fr;
        }
      } else if (fr < val[second]) {
        pts[worst] = refl, val[worst] = fr;
      } else {
        const Vec con = centroid + 0.5 * (pts[worst] - centroid);
        const double fc = fn(con);
        if (fc < val[worst]) {
          pts[worst] = con, val[worst] = fc;
        } else {
          for (std::size_t k = 0; k < pts.size(); ++k) {
            if (k == best) continue;
            pts[k] = pts[best] + 0.5 * (pts[k] - pts[best]);
            val[k] = fn(pts[k]);
          }
        }
      }
    }
    x0 = pts[std::min_element(val.begin(), val.end()) - val.begin()];
    scale *= 0.1;
  }
  return x0;
}

// Root of a monotone function on [lo, hi] by bisection.
inline double bisect(const std::function<double(double)>& fn, double lo, double hi) {
  const bool rising = fn(hi) > fn(lo);
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    ((fn(mid) < 0) == rising ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

// Transportation problem min <cost, P> with row sums a and column sums b, by
// enumerating every basis of the (rank m+k-1) constraint system.
inline double transport_brute_force(const Eigen::MatrixXd& cost, const Vec& a, const Vec& b) {
  const int m = static_cast<int>(cost.rows()), k = static_cast<int>(cost.cols());
  const int vars = m * k, rank = m + k - 1;
  Eigen::MatrixXd rows = Eigen::MatrixXd::Zero(rank, vars);
  Vec rhs(rank);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < k; ++j) rows(i, i * k + j) = 1;
    rhs(i) = a(i);
  }
  for (int j = 0; j + 1 < k; ++j) {
    for (int i = 0; i < m; ++i) rows(m + j, i * k + j) = 1;
    rhs(m + j) = b(j);
  }
  double best = std::numeric_limits<double>::infinity();
  std::vector<int> pick(rank);
  std::function<void(int, int)> rec = [&](int start, int depth) {
    if (depth == rank) {
      Eigen::MatrixXd basis(rank, rank);
      for (int c = 0; c < rank; ++c) basis.col(c) = rows.col(pick[c]);
      Eigen::FullPivLU<Eigen::MatrixXd> lu(basis);
      if (lu.rank() < rank) return;
      const Vec x = lu.solve(rhs);
      if (x.minCoeff() < -1e-12) return;
      double obj = 0.0;
      for (int c = 0; c < rank; ++c) obj += cost(pick[c] / k, pick[c] % k) * x(c);
      best = std::min(best, obj);
      return;
    }
    for (int v = start; v <= vars - (rank - depth); ++v) {
      pick[depth] = v;
      rec(v + 1, depth + 1);
    }
  };
  rec(0, 0);
  return best;
}

}  // namespace oracle
