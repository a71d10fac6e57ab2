#include "vvot/io.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

#include "vvot/errors.hpp"

namespace vvot {

namespace {

Vec vec_from_json(const Json& j, const char* what) {
  if (!j.is_array()) fail(Errc::Parse, std::string(what) + " must be an array of numbers");
  Vec v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t k = 0; k < j.size(); ++k) {
    if (!j[k].is_number()) fail(Errc::Parse, std::string(what) + " must hold numbers");
    v(static_cast<Eigen::Index>(k)) = j[k].get<double>();
  }
  return v;
}

Json vec_to_json(const Vec& v) { return Json(std::vector<double>(v.begin(), v.end())); }

const Json& field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) fail(Errc::Parse, std::string("missing field '") + key + "'");
  return j.at(key);
}

std::ostream& precise(std::ostream& os) { return os << std::setprecision(17); }

}  // namespace

Json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(Errc::Parse, "cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    fail(Errc::Parse, path + ": " + e.what());
  }
}

WeightedGraph graph_from_json(const Json& j) {
  const Json& rows = field(j, "q");
  if (!rows.is_array()) fail(Errc::Parse, "'q' must be a matrix");
  const auto n = static_cast<Eigen::Index>(rows.size());
  if (j.contains("n") && j.at("n") != n) fail(Errc::Parse, "'n' disagrees with 'q'");
  Mat q(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Vec row = vec_from_json(rows[i], "graph row");
    if (row.size() != n) fail(Errc::Parse, "'q' must be square");
    q.row(i) = row.transpose();
  }
  return WeightedGraph(std::move(q));
}

Json to_json(const WeightedGraph& g) {
  Json rows = Json::array();
  for (int i = 0; i < g.n(); ++i) rows.push_back(vec_to_json(g.weights().row(i).transpose()));
  return {{"n", g.n()}, {"q", rows}};
}

DiscreteVectorMeasure measure_from_json(const Json& j) {
  const Json& atoms = field(j, "atoms");
  if (!atoms.is_array() || atoms.empty()) fail(Errc::Parse, "'atoms' must be a nonempty array");
  const Vec x0 = vec_from_json(field(atoms[0], "x"), "x");
  const Vec w0 = vec_from_json(field(atoms[0], "w"), "w");
  DiscreteVectorMeasure mu(static_cast<int>(w0.size()), static_cast<int>(x0.size()));
  for (const auto& a : atoms) mu.add(vec_from_json(field(a, "x"), "x"), vec_from_json(field(a, "w"), "w"));
  return mu;
}

Json to_json(const DiscreteVectorMeasure& mu) {
  Json atoms = Json::array();
  for (const auto& a : mu.atoms()) atoms.push_back({{"x", vec_to_json(a.x)}, {"w", vec_to_json(a.w)}});
  return {{"atoms", atoms}};
}

SpatialGrid grid_from_json(const Json& j) {
  SpatialGrid g;
  g.x_min = field(j, "x_min").get<double>();
  g.x_max = field(j, "x_max").get<double>();
  g.cells = field(j, "cells").get<int>();
  require(g.cells >= 1 && g.x_max > g.x_min, Errc::Domain, "bad grid");
  return g;
}

Json to_json(const ChainReport& r) {
  return {{"d_bl", r.d_bl},       {"w_dyn", r.w_dyn},
          {"d_upper", r.d_upper}, {"w2w", r.w2w},
          {"lower_bound", r.lower_bound}, {"upper_bound", r.upper_bound},
          {"ok", r.ok},           {"violations", r.violations}};
}

Vec parse_vector(const std::string& text) {
  std::vector<double> values;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      values.push_back(std::stod(item, &used));
      if (item.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      fail(Errc::Parse, "not a number: '" + item + "'");
    }
  }
  if (values.empty()) fail(Errc::Parse, "empty vector");
  return Eigen::Map<Vec>(values.data(), static_cast<Eigen::Index>(values.size()));
}

void write_solution_csv(std::ostream& os, const DynamicSolution& sol) {
  precise(os) << "t,cell,species,rho,m";
  for (int j = 0; j < sol.n; ++j) os << ",sigma_" << j;
  os << '\n';
  for (int t = 0; t <= sol.T; ++t)
    for (int c = 0; c < sol.cells(); ++c)
      for (int i = 0; i < sol.n; ++i) {
        os << t << ',' << c << ',' << i << ',' << sol.rho_at(t, c, i) << ','
           << (t < sol.T ? sol.m_at(t, c, i) : 0.0);
        for (int j = 0; j < sol.n; ++j) os << ',' << (t < sol.T ? sol.sigma_at(t, c, i, j) : 0.0);
        os << '\n';
      }
}

void write_embedding_csv(std::ostream& os, const ReferenceMeasure& ref, const LotEmbedding& e) {
  precise(os) << "atom_index";
  for (int k = 0; k < ref.d; ++k) os << ",x" << k;
  for (int k = 0; k + 1 < ref.n; ++k) os << ",r" << k;
  for (int k = 0; k < ref.d; ++k) os << ",Tx" << k;
  for (int k = 0; k + 1 < ref.n; ++k) os << ",Tr" << k;
  os << '\n';
  for (std::size_t a = 0; a < ref.size(); ++a) {
    os << a;
    for (const Vec* v : {&ref.atoms[a].x, &ref.atoms[a].r, &e.x[a], &e.r[a]})
      for (double z : *v) os << ',' << z;
    os << '\n';
  }
}

void write_matrix_csv(std::ostream& os, const Mat& m) {
  precise(os);
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) os << (j ? "," : "") << m(i, j);
    os << '\n';
  }
}

void write_trajectory_csv(std::ostream& os, const std::vector<PdeState>& traj) {
  precise(os) << "t,cell,species,rho\n";
  for (const auto& s : traj)
    for (Eigen::Index c = 0; c < s.rho.rows(); ++c)
      for (Eigen::Index i = 0; i < s.rho.cols(); ++i)
        os << s.time << ',' << c << ',' << i << ',' << s.rho(c, i) << '\n';
}

void write_diagnostics_csv(std::ostream& os, const PdeDiagnostics& d) {
  precise(os) << "t,E";
  const Eigen::Index n = d.species_mass.empty() ? 0 : d.species_mass.front().size();
  for (Eigen::Index i = 0; i < n; ++i) os << ",mass_" << i + 1;
  os << ",min_rho\n";
  for (std::size_t k = 0; k < d.times.size(); ++k) {
    os << d.times[k] << ',' << d.energy[k];
    for (double m : d.species_mass[k]) os << ',' << m;
    os << ',' << d.min_rho[k] << '\n';
  }
}

}  // namespace vvot
