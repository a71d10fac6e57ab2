#include "vvot/lp.hpp"

#include <Eigen/LU>
#include <cmath>

#include "vvot/errors.hpp"

namespace vvot {

namespace {

using Index = Eigen::Index;

// Standard-form tableau kept as a basis head plus a dense LU of the basis
// matrix. Columns N.. N+m-1 are the phase-one artificials.
class RevisedSimplex {
 public:
  RevisedSimplex(const SparseMat& a, const Vec& b, const Vec& c)
      : a_(a), b_(b), c_(c), m_(a.rows()), n_(a.cols()) {
    head_.resize(m_);
    in_basis_.assign(n_ + m_, 0);
    basis_ = Mat::Identity(m_, m_);
    for (Index r = 0; r < m_; ++r) {
      head_[r] = n_ + r;
      in_basis_[n_ + r] = 1;
    }
    refactor();
  }

  LpStatus run(int phase, const LpOptions& opt, int& iterations) {
    const double scale = phase == 1 ? 1.0 : 1.0 + (n_ ? c_.cwiseAbs().maxCoeff() : 0.0);
    const double tol = opt.opt_tol * scale;
    int degenerate = 0;
    Vec cb(m_), aq(m_);
    while (iterations < opt.max_iter) {
      for (Index r = 0; r < m_; ++r) cb(r) = cost(phase, head_[r]);
      const Vec y = lu_.transpose().solve(cb);
      const bool bland = degenerate > 50;
      Index q = -1;
      double best = -tol;
      for (Index j = 0; j < n_; ++j) {
        if (in_basis_[j]) continue;
        const double d = cost(phase, j) - dot(y, j);
        if (d < best) {
          best = d;
          q = j;
          if (bland) break;
        }
      }
      if (q < 0) return LpStatus::Optimal;

      column(q, aq);
      const Vec w = lu_.solve(aq);
      const double piv = 1e-9 * std::max(1.0, w.cwiseAbs().maxCoeff());
      Index p = -1;
      double ratio = kInf;
      for (Index r = 0; r < m_; ++r) {
        double t;
        if (phase == 2 && head_[r] >= n_) {
          // A redundant row's artificial stays at zero.
          if (std::abs(w(r)) <= piv) continue;
          t = 0.0;
        } else if (w(r) > piv) {
          t = std::max(xb_(r), 0.0) / w(r);
        } else {
          continue;
        }
        const bool tie = p >= 0 && std::abs(t - ratio) <= 1e-13 * (1.0 + ratio);
        if (p < 0 || (!tie && t < ratio) ||
            (tie && (bland ? head_[r] < head_[p] : std::abs(w(r)) > std::abs(w(p))))) {
          p = r;
          ratio = tie ? std::min(t, ratio) : t;
        }
      }
      if (p < 0) return LpStatus::Unbounded;
      degenerate = ratio <= 1e-14 ? degenerate + 1 : 0;
      pivot(p, q, aq);
      ++iterations;
    }
    return LpStatus::IterationLimit;
  }

  double infeasibility() const {
    double s = 0.0;
    for (Index r = 0; r < m_; ++r)
      if (head_[r] >= n_) s += std::abs(xb_(r));
    return s;
  }

  // Swaps zero-level artificials for original columns where the row allows it.
  void drive_out_artificials() {
    Vec aq(m_);
    for (Index p = 0; p < m_; ++p) {
      if (head_[p] < n_) continue;
      const Vec row = lu_.transpose().solve(Vec::Unit(m_, p));
      Index q = -1;
      double best = 1e-9;
      for (Index j = 0; j < n_; ++j) {
        if (in_basis_[j]) continue;
        const double v = std::abs(dot(row, j));
        if (v > best) {
          best = v;
          q = j;
        }
      }
      if (q >= 0) {
        column(q, aq);
        pivot(p, q, aq);
      }
    }
  }

  void fill(LpSolution& out) const {
    Vec cb(m_);
    for (Index r = 0; r < m_; ++r) cb(r) = cost(2, head_[r]);
    out.duals = lu_.transpose().solve(cb);
    out.objective = 0.0;
    out.support.clear();
    for (Index r = 0; r < m_; ++r) {
      if (head_[r] >= n_ || xb_(r) <= 0.0) continue;
      out.support.emplace_back(static_cast<std::size_t>(head_[r]), xb_(r));
      out.objective += c_(head_[r]) * xb_(r);
    }
  }

 private:
  double cost(int phase, Index j) const {
    if (j >= n_) return phase == 1 ? 1.0 : 0.0;
    return phase == 1 ? 0.0 : c_(j);
  }

  double dot(const Vec& y, Index j) const {
    double s = 0.0;
    for (SparseMat::InnerIterator it(a_, j); it; ++it) s += y(it.row()) * it.value();
    return s;
  }

  void column(Index j, Vec& out) const {
    out.setZero();
    if (j >= n_) {
      out(j - n_) = 1.0;
      return;
    }
    for (SparseMat::InnerIterator it(a_, j); it; ++it) out(it.row()) = it.value();
  }

  void pivot(Index p, Index q, const Vec& aq) {
    in_basis_[head_[p]] = 0;
    head_[p] = q;
    in_basis_[q] = 1;
    basis_.col(p) = aq;
    refactor();
  }

  void refactor() {
    lu_.compute(basis_);
    xb_ = lu_.solve(b_);
  }

  const SparseMat& a_;
  const Vec& b_;
  const Vec& c_;
  Index m_, n_;
  std::vector<Index> head_;
  std::vector<char> in_basis_;
  Mat basis_;
  Eigen::PartialPivLU<Mat> lu_;
  Vec xb_;
};

}  // namespace

LpSolution solve_lp(const LpProblem& lp, const LpOptions& opt) {
  require(lp.A.rows() == lp.b.size() && lp.A.cols() == lp.c.size(), Errc::LengthMismatch,
          "LP data shapes disagree");
  LpSolution out;
  const Index m = lp.A.rows();
  if (m == 0) {
    out.status = (lp.c.array() >= 0.0).all() ? LpStatus::Optimal : LpStatus::Unbounded;
    out.duals = Vec(0);
    return out;
  }
  Vec sign = Vec::Ones(m);
  for (Index r = 0; r < m; ++r)
    if (lp.b(r) < 0.0) sign(r) = -1.0;
  const SparseMat a = sign.asDiagonal() * lp.A;
  const Vec b = sign.cwiseProduct(lp.b);

  RevisedSimplex simplex(a, b, lp.c);
  out.status = simplex.run(1, opt, out.iterations);
  if (out.status != LpStatus::Optimal) return out;
  if (simplex.infeasibility() > opt.feas_tol * (1.0 + b.cwiseAbs().maxCoeff())) {
    out.status = LpStatus::Infeasible;
    return out;
  }
  simplex.drive_out_artificials();
  out.status = simplex.run(2, opt, out.iterations);
  simplex.fill(out);
  out.duals = sign.cwiseProduct(out.duals);
  return out;
}

Vec lp_primal(const LpSolution& sol, std::size_t cols) {
  Vec x = Vec::Zero(static_cast<Index>(cols));
  for (const auto& [j, v] : sol.support) x(static_cast<Index>(j)) = v;
  return x;
}

}  // namespace vvot
