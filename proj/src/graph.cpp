#include "vvot/graph.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <queue>

#include "vvot/errors.hpp"

namespace vvot {

std::string_view errc_name(Errc code) noexcept {
  switch (code) {
    case Errc::Domain: return "Domain";
    case Errc::LengthMismatch: return "LengthMismatch";
    case Errc::Asymmetric: return "Asymmetric";
    case Errc::NegativeWeight: return "NegativeWeight";
    case Errc::Disconnected: return "Disconnected";
    case Errc::RankDeficient: return "RankDeficient";
    case Errc::NotInRange: return "NotInRange";
    case Errc::DivergentIntegral: return "DivergentIntegral";
    case Errc::StiffAtBoundary: return "StiffAtBoundary";
    case Errc::BoundaryAnchors: return "BoundaryAnchors";
    case Errc::InfeasibleEndpoints: return "InfeasibleEndpoints";
    case Errc::NotImplemented: return "NotImplemented";
    case Errc::MassMismatch: return "MassMismatch";
    case Errc::Infeasible: return "Infeasible";
    case Errc::ThetaNotVanishing: return "ThetaNotVanishing";
    case Errc::NotFound: return "NotFound";
    case Errc::ChainViolation: return "ChainViolation";
    case Errc::BoundaryAtom: return "BoundaryAtom";
    case Errc::SingularLaplacian: return "SingularLaplacian";
    case Errc::ReferenceMismatch: return "ReferenceMismatch";
    case Errc::NonFiniteDriver: return "NonFiniteDriver";
    case Errc::Diverged: return "Diverged";
    case Errc::Parse: return "Parse";
  }
  return "Unknown";
}

void graph_validate(const Mat& q) {
  const auto n = q.rows();
  require(n >= 1 && q.cols() == n, Errc::LengthMismatch, "weight matrix must be square");
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i == j) continue;
      require(q(i, j) >= 0.0, Errc::NegativeWeight, "negative edge weight");
      require(q(i, j) == q(j, i), Errc::Asymmetric, "weight matrix is not symmetric");
    }
  }
  std::vector<bool> seen(n, false);
  std::queue<Eigen::Index> frontier;
  frontier.push(0);
  seen[0] = true;
  Eigen::Index reached = 1;
  while (!frontier.empty()) {
    const auto i = frontier.front();
    frontier.pop();
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j != i && !seen[j] && q(i, j) > 0.0) {
        seen[j] = true;
        ++reached;
        frontier.push(j);
      }
    }
  }
  require(reached == n, Errc::Disconnected, "graph is not connected");
}

WeightedGraph::WeightedGraph(Mat q) : q_(std::move(q)) {
  graph_validate(q_);
  for (int i = 0; i < n(); ++i)
    for (int j = i + 1; j < n(); ++j)
      if (q_(i, j) > 0.0) edges_.push_back({i, j, q_(i, j)});
}

WeightedGraph WeightedGraph::complete(int n, double weight) {
  Mat q = Mat::Constant(n, n, weight);
  q.diagonal().setZero();
  return WeightedGraph(std::move(q));
}

WeightedGraph WeightedGraph::path(int n, double weight) {
  Mat q = Mat::Zero(n, n);
  for (int i = 0; i + 1 < n; ++i) q(i, i + 1) = q(i + 1, i) = weight;
  return WeightedGraph(std::move(q));
}

double WeightedGraph::max_degree() const {
  double best = 0.0;
  for (int i = 0; i < n(); ++i) {
    double row = 0.0;
    for (int j = 0; j < n(); ++j) row += q(i, j);
    best = std::max(best, row);
  }
  return best;
}

EdgeField graph_gradient(const WeightedGraph& g, const Vec& phi) {
  require(phi.size() == g.n(), Errc::LengthMismatch, "potential length differs from node count");
  EdgeField out(g.n(), g.n());
  for (int i = 0; i < g.n(); ++i)
    for (int j = 0; j < g.n(); ++j) out(i, j) = phi(j) - phi(i);
  return out;
}

Vec graph_divergence(const WeightedGraph& g, const EdgeField& v) {
  require(v.rows() == g.n() && v.cols() == g.n(), Errc::LengthMismatch, "edge field shape");
  Vec out = Vec::Zero(g.n());
  for (int i = 0; i < g.n(); ++i)
    for (int j = 0; j < g.n(); ++j) out(i) -= 0.5 * (v(i, j) - v(j, i)) * g.q(i, j);
  return out;
}

Mat weighted_laplacian(const WeightedGraph& g, const Interpolation& f, const Vec& p) {
  check_distribution(p);
  require(p.size() == g.n(), Errc::LengthMismatch, "distribution length differs from node count");
  Mat b = Mat::Zero(g.n(), g.n());
  for (const auto& e : g.edges()) {
    const double w = f(p(e.i), p(e.j)) * e.q;
    b(e.i, e.j) -= w;
    b(e.j, e.i) -= w;
    b(e.i, e.i) += w;
    b(e.j, e.j) += w;
  }
  return b;
}

Vec laplacian_pinv_apply(const Mat& b, const Vec& rhs) {
  require(b.rows() == b.cols() && b.rows() == rhs.size(), Errc::LengthMismatch, "shape");
  require(std::abs(rhs.sum()) <= 1e-10, Errc::NotInRange, "right-hand side is not mean zero");
  if (rhs.size() == 1) return Vec::Zero(1);
  Eigen::SelfAdjointEigenSolver<Mat> eig(b);
  const Vec& lam = eig.eigenvalues();
  require(lam(1) >= 1e-12, Errc::RankDeficient, "kernel is larger than the constants");
  const Mat& u = eig.eigenvectors();
  Vec coeff = u.transpose() * rhs;
  coeff(0) = 0.0;
  for (Eigen::Index k = 1; k < coeff.size(); ++k) coeff(k) /= lam(k);
  Vec psi = u * coeff;
  psi.array() -= psi.mean();
  return psi;
}

double tangent_inner_product(const WeightedGraph& g, const Interpolation& f, const Vec& p,
                             const EdgeField& u, const EdgeField& v) {
  check_distribution(p);
  double acc = 0.0;
  for (int i = 0; i < g.n(); ++i)
    for (int j = 0; j < g.n(); ++j)
      if (g.q(i, j) > 0.0) acc += u(i, j) * v(i, j) * f(p(i), p(j)) * g.q(i, j);
  return 0.5 * acc;
}

double alpha_sq(double m_sq, double theta) {
  if (theta > 0.0) return m_sq / theta;
  return m_sq == 0.0 && theta == 0.0 ? 0.0 : kInf;
}

double alpha(double m, double s, double t, const Interpolation& f) {
  if (s < 0.0 || t < 0.0) return kInf;
  return alpha_sq(m * m, f(s, t));
}

double alpha(const Vec& m, double s, double t, const Interpolation& f) {
  if (s < 0.0 || t < 0.0) return kInf;
  return alpha_sq(m.squaredNorm(), f(s, t));
}

double beta_support(double a, double b, double c_sq, const Interpolation& f, int directions) {
  double best = -kInf;
  for (int k = 0; k < directions; ++k) {
    const double t = static_cast<double>(k) / (directions - 1);
    const double s = 1.0 - t;
    best = std::max(best, a * t + b * s + 0.25 * c_sq * f(t, s));
  }
  return best;
}

bool beta_membership(double a, double b, double c, const Interpolation& f, double tol) {
  return beta_support(a, b, c * c, f) <= tol;
}

bool beta_membership(double a, double b, const Vec& c, const Interpolation& f, double tol) {
  return beta_support(a, b, c.squaredNorm(), f) <= tol;
}

void check_distribution(const Vec& p, double tol) {
  require(p.size() >= 1, Errc::LengthMismatch, "empty distribution");
  require((p.array() >= 0.0).all(), Errc::Domain, "distribution has negative entries");
  require(std::abs(p.sum() - 1.0) <= tol, Errc::Domain, "distribution does not sum to one");
}

Vec simplex_to_distribution(const Vec& r) {
  Vec p(r.size() + 1);
  p.head(r.size()) = r;
  p(r.size()) = 1.0 - r.sum();
  if (p(r.size()) < 0.0 && p(r.size()) > -1e-14) p(r.size()) = 0.0;
  return p;
}

Vec distribution_to_simplex(const Vec& p) { return p.head(p.size() - 1); }

void check_simplex_point(const Vec& r, double tol) {
  require((r.array() >= -tol).all(), Errc::Domain, "simplex point has negative coordinates");
  require(r.sum() <= 1.0 + tol, Errc::Domain, "simplex point coordinates exceed one");
}

Vec simplex_corner(int n, int j) {
  Vec r = Vec::Zero(n - 1);
  if (j < n - 1) r(j) = 1.0;
  return r;
}

Vec mean_zero_extension(const Vec& f) {
  Vec out(f.size() + 1);
  out.head(f.size()) = f;
  out(f.size()) = -f.sum();
  return out;
}

}  // namespace vvot
