#pragma once

#include <Eigen/Dense>
#include <limits>
#include <vector>

#include "vvot/interpolation.hpp"

namespace vvot {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
// Momentum or velocity on directed edges, indexed (i,j).
using EdgeField = Eigen::MatrixXd;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct Edge {
  int i;
  int j;
  double q;
};

// Label graph with symmetric nonnegative weights; diagonal entries are ignored.
class WeightedGraph {
 public:
  explicit WeightedGraph(Mat q);
  static WeightedGraph complete(int n, double weight = 1.0);
  static WeightedGraph path(int n, double weight = 1.0);

  int n() const noexcept { return static_cast<int>(q_.rows()); }
  double q(int i, int j) const { return i == j ? 0.0 : q_(i, j); }
  const Mat& weights() const noexcept { return q_; }
  // Edges with i < j and positive weight.
  const std::vector<Edge>& edges() const noexcept { return edges_; }
  // max_i sum_j q_ij
  double max_degree() const;

 private:
  Mat q_;
  std::vector<Edge> edges_;
};

// Throws Asymmetric, NegativeWeight or Disconnected.
void graph_validate(const Mat& q);

EdgeField graph_gradient(const WeightedGraph& g, const Vec& phi);
Vec graph_divergence(const WeightedGraph& g, const EdgeField& v);
Mat weighted_laplacian(const WeightedGraph& g, const Interpolation& f, const Vec& p);
// Solves B psi = rhs with sum(psi) = 0; B must have a one-dimensional kernel.
Vec laplacian_pinv_apply(const Mat& b, const Vec& rhs);
double tangent_inner_product(const WeightedGraph& g, const Interpolation& f, const Vec& p,
                             const EdgeField& u, const EdgeField& v);

// |m|^2 / theta(s,t) with the closure conventions at theta = 0.
double alpha(double m, double s, double t, const Interpolation& f);
double alpha(const Vec& m, double s, double t, const Interpolation& f);
double alpha_sq(double m_sq, double theta);

// sup over directions (t,s) of a t + b s + |c|^2 theta(t,s) / 4, on a uniform grid.
double beta_support(double a, double b, double c_sq, const Interpolation& f, int directions = 2001);
bool beta_membership(double a, double b, double c, const Interpolation& f, double tol = 1e-12);
bool beta_membership(double a, double b, const Vec& c, const Interpolation& f, double tol = 1e-12);

void check_distribution(const Vec& p, double tol = 1e-12);

// Simplex coordinates r (length n-1) <-> graph distributions (length n).
Vec simplex_to_distribution(const Vec& r);
Vec distribution_to_simplex(const Vec& p);
void check_simplex_point(const Vec& r, double tol = 1e-12);
Vec simplex_corner(int n, int j);
// [f_1, ..., f_{n-1}, -sum f]
Vec mean_zero_extension(const Vec& f);

}  // namespace vvot
