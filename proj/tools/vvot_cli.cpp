#include <CLI11.hpp>
#include <fstream>
#include <iomanip>
#include <iostream>

#include "vvot/bl.hpp"
#include "vvot/errors.hpp"
#include "vvot/graph_wasserstein.hpp"
#include "vvot/io.hpp"
#include "vvot/verify.hpp"

using namespace vvot;

namespace {

constexpr const char* kSchemas =
    "graph JSON:   {\"n\": 2, \"q\": [[0,1],[1,0]]}\n"
    "measure JSON: {\"atoms\": [{\"x\": [0.0], \"w\": [0.5, 0.5]}]}\n"
    "grid JSON:    {\"x_min\": -1, \"x_max\": 1, \"cells\": 64}\n"
    "dataset JSON: {\"measures\": [<measure>, ...]}\n"
    "theta:        arithmetic | geometric | logarithmic\n";

struct Shared {
  std::uint64_t seed = 7;
  double tol = 1e-7;
  int max_iter = 20000;
  int grid_cells = 64;
  int time_steps = 32;
  double x_min = -1.0;
  double x_max = 1.0;
  std::string graph;
  std::string theta = "geometric";
  std::string out;

  SolverConfig solver() const {
    SolverConfig cfg;
    cfg.tol = tol;
    cfg.max_iter = max_iter;
    return cfg;
  }
  SpatialGrid grid() const { return {x_min, x_max, grid_cells}; }
  Interpolation interpolation() const { return Interpolation::parse(theta); }
  WeightedGraph load_graph(int n_default) const {
    return graph.empty() ? WeightedGraph::complete(n_default) : graph_from_json(load_json(graph));
  }
};

void add_shared(CLI::App* cmd, Shared& s, bool solver_flags) {
  cmd->add_option("--graph", s.graph, "graph JSON (default: complete graph with unit weights)");
  cmd->add_option("--theta", s.theta, "interpolation")->capture_default_str();
  cmd->add_option("--out", s.out, "output file (CSV or JSON)");
  cmd->add_option("--seed", s.seed, "random seed")->capture_default_str();
  if (!solver_flags) return;
  cmd->add_option("--tol", s.tol, "solver tolerance")->capture_default_str();
  cmd->add_option("--max-iter", s.max_iter, "solver iteration cap")->capture_default_str();
  cmd->add_option("--grid-cells", s.grid_cells, "spatial cells")->capture_default_str();
  cmd->add_option("--time-steps", s.time_steps, "time steps")->capture_default_str();
  cmd->add_option("--x-min", s.x_min, "left end of the spatial grid")->capture_default_str();
  cmd->add_option("--x-max", s.x_max, "right end of the spatial grid")->capture_default_str();
}

void print(double v) { std::cout << std::setprecision(12) << v << '\n'; }

void write_json(const std::string& path, const Json& j) {
  if (path.empty()) return;
  std::ofstream out(path);
  if (!out) fail(Errc::Parse, "cannot write " + path);
  out << j.dump(2) << '\n';
}

template <class Fn>
void write_text(const std::string& path, Fn&& fn) {
  if (path.empty()) return;
  std::ofstream out(path);
  if (!out) fail(Errc::Parse, "cannot write " + path);
  fn(out);
}

std::vector<DiscreteVectorMeasure> load_dataset(const std::string& path) {
  const Json j = load_json(path);
  const Json& list = j.is_array() ? j : j.at("measures");
  std::vector<DiscreteVectorMeasure> out;
  for (const auto& m : list) out.push_back(measure_from_json(m));
  return out;
}

PdeCase load_pde(const std::string& path) {
  if (path.empty()) return confinement_case(1.0);
  const Json j = load_json(path);
  PdeCase c;
  auto& cfg = c.cfg;
  cfg.grid = grid_from_json(j.at("grid"));
  auto matrix = [](const Json& rows) {
    Mat m(rows.size(), rows.empty() ? 0 : rows[0].size());
    for (std::size_t i = 0; i < rows.size(); ++i)
      for (std::size_t k = 0; k < rows[i].size(); ++k) m(i, k) = rows[i][k].get<double>();
    return m;
  };
  auto vector = [](const Json& v) {
    const auto xs = v.get<std::vector<double>>();
    return Vec(Eigen::Map<const Vec>(xs.data(), xs.size()));
  };
  cfg.q = matrix(j.at("q"));
  cfg.f = Interpolation::parse(j.value("theta", "geometric"));
  cfg.entropy = vector(j.at("entropy"));
  cfg.porous_exponent = j.value("porous_exponent", 0.0);
  if (j.contains("porous")) cfg.porous = vector(j.at("porous"));
  if (j.contains("potential")) cfg.potential = matrix(j.at("potential"));
  cfg.dt = j.at("dt").get<double>();
  cfg.t_end = j.at("t_end").get<double>();
  c.init.rho = matrix(j.at("init"));
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Vector-valued optimal transport tools"};
  app.footer(kSchemas);
  app.require_subcommand(1);
  Shared s;

  std::string p0, p1, mu_path, nu_path, grid_path, suite = "examples", data_path, config_path;
  std::string metric = "ground";
  int subdivisions = 32, ref_size = 32, smoothing = 1;
  std::vector<double> extra;

  auto* wg = app.add_subcommand("wg", "graph transport distance between two distributions");
  add_shared(wg, s, true);
  wg->add_option("--p0", p0, "start distribution, e.g. 1,0")->required();
  wg->add_option("--p1", p1, "end distribution")->required();

  auto* sd = app.add_subcommand("simplex-dist", "distance between simplex points (n-1 coordinates)");
  add_shared(sd, s, true);
  sd->add_option("--r0", p0, "first point")->required();
  sd->add_option("--r1", p1, "second point")->required();

  auto* ww = app.add_subcommand("w2w", "Kantorovich distance with ground cost |x-y|^2 + d_W^2");
  add_shared(ww, s, true);

  auto* dyn = app.add_subcommand("dyn", "dynamic distance on a one-dimensional grid");
  add_shared(dyn, s, true);
  dyn->add_option("--grid-json", grid_path, "grid JSON (overrides --grid-cells/--x-min/--x-max)");
  dyn->add_option("--smoothing", smoothing, "hat-filter passes")->capture_default_str();

  auto* du = app.add_subcommand("d-upper", "grid upper bound on the lifted semimetric");
  add_shared(du, s, true);
  du->add_option("--subdivisions", subdivisions, "simplex grid subdivisions")->capture_default_str();
  du->add_option("--extra", extra, "extra grid points (two species only)");

  auto* bl = app.add_subcommand("bl", "bounded-Lipschitz distance");
  add_shared(bl, s, false);

  auto* ch = app.add_subcommand("chain", "check the inequality chain on one instance");
  add_shared(ch, s, true);

  for (auto* cmd : {ww, dyn, du, bl, ch}) {
    cmd->add_option("--mu", mu_path, "first measure JSON")->required();
    cmd->add_option("--nu", nu_path, "second measure JSON")->required();
  }

  auto* le = app.add_subcommand("lot-embed", "linearized embedding of one measure");
  add_shared(le, s, true);
  le->add_option("--mu", mu_path, "measure JSON")->required();
  auto* lm = app.add_subcommand("lot-matrix", "pairwise linearized distances of a dataset");
  add_shared(lm, s, true);
  lm->add_option("--data", data_path, "dataset JSON")->required();
  for (auto* cmd : {le, lm}) {
    cmd->add_option("--ref-size", ref_size, "reference atoms")->capture_default_str();
    cmd->add_option("--metric", metric, "simplex metric: ground | euclidean")->capture_default_str();
  }

  auto* pr = app.add_subcommand("pde-run", "integrate the multispecies gradient flow");
  add_shared(pr, s, false);
  pr->add_option("--config", config_path, "PDE JSON (default: entropy plus confinement)");

  auto* ve = app.add_subcommand("verify", "run a verification suite");
  add_shared(ve, s, true);
  ve->add_option("--suite", suite, "examples | chain | pde | lot | interpolation")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*wg) {
      const Vec a = parse_vector(p0), b = parse_vector(p1);
      const auto g = s.load_graph(static_cast<int>(a.size()));
      const auto r = wg_dynamic(g, s.interpolation(), a, b, s.time_steps, s.solver());
      print(r.distance);
      return 0;
    }
    if (*sd) {
      const Vec a = parse_vector(p0), b = parse_vector(p1);
      const auto g = s.load_graph(static_cast<int>(a.size()) + 1);
      print(simplex_distance(g, s.interpolation(), a, b, s.time_steps, s.solver()));
      return 0;
    }
    if (*le || *lm) {
      const auto data = *le ? std::vector{measure_from_json(load_json(mu_path))} : load_dataset(data_path);
      require(!data.empty(), Errc::Parse, "empty dataset");
      const int n = data.front().n(), d = data.front().dim();
      const auto g = s.load_graph(n);
      if (metric != "ground" && metric != "euclidean") fail(Errc::Parse, "unknown metric " + metric);
      const SimplexMetric m = metric == "ground"
                                  ? SimplexMetric::ground(g, s.interpolation(), s.time_steps, s.solver())
                                  : SimplexMetric::euclidean(n);
      const auto ref = sample_reference(ref_size, n, d, s.seed);
      if (*le) {
        const auto e = lot_embed(ref, data.front(), m);
        write_embedding_csv(std::cout, ref, e);
        write_text(s.out, [&](std::ostream& os) { write_embedding_csv(os, ref, e); });
      } else {
        const Mat dm = pairwise_matrix(ref, data, m);
        write_matrix_csv(std::cout, dm);
        write_text(s.out, [&](std::ostream& os) { write_matrix_csv(os, dm); });
      }
      return 0;
    }
    if (*pr) {
      const PdeCase c = load_pde(config_path);
      const PdeRun r = run(c.init, c.cfg, {c.cfg.t_end});
      write_diagnostics_csv(std::cout, r.diagnostics);
      if (!s.out.empty()) {
        write_text(s.out + ".trajectory.csv", [&](std::ostream& os) { write_trajectory_csv(os, r.trajectory); });
        write_text(s.out + ".diagnostics.csv", [&](std::ostream& os) { write_diagnostics_csv(os, r.diagnostics); });
      }
      return 0;
    }
    if (*ve) {
      VerifyOptions opt;
      opt.seed = s.seed;
      opt.solver = s.solver();
      const auto rep = verify_suite(parse_suite(suite), opt);
      std::cout << format_report(rep);
      write_json(s.out, to_json(rep));
      return rep.pass() ? 0 : 1;
    }

    const auto mu = measure_from_json(load_json(mu_path));
    const auto nu = measure_from_json(load_json(nu_path));
    if (*bl) {
      print(d_bl(mu, nu));
      return 0;
    }
    const auto g = s.load_graph(mu.n());
    const auto f = s.interpolation();
    if (*ww) {
      const auto r = w2w(mu, nu, d_w_matrix(g, f, s.time_steps, s.solver()));
      print(r.distance);
      Json coupling = Json::array();
      for (const auto& e : r.coupling.entries)
        coupling.push_back({e.source_atom, e.source_species, e.target_atom, e.target_species, e.mass});
      write_json(s.out, {{"distance", r.distance}, {"coupling", coupling}});
      return 0;
    }
    if (*dyn) {
      const SpatialGrid grid = grid_path.empty() ? s.grid() : grid_from_json(load_json(grid_path));
      const auto r = w_dynamic(g, f, mu, nu, grid, s.time_steps, s.solver(), smoothing);
      print(r.distance);
      write_text(s.out, [&](std::ostream& os) { write_solution_csv(os, r.solution); });
      return r.solution.info.converged ? 0 : 1;
    }
    if (*du) {
      std::vector<Vec> points;
      for (double v : extra) points.push_back(Vec::Constant(1, v));
      const auto grid = simplex_grid(mu.n(), subdivisions, points);
      const auto table = simplex_distance_table(g, f, grid, s.time_steps, s.solver());
      print(lifted_semimetric_upper(mu, nu, grid, table).upper_bound);
      return 0;
    }
    if (*ch) {
      ChainConfig cfg;
      cfg.solver = s.solver();
      cfg.grid = s.grid();
      const auto r = check_chain(g, f, mu, nu, cfg);
      std::cout << to_json(r).dump(2) << '\n';
      write_json(s.out, to_json(r));
      return r.ok ? 0 : 1;
    }
  } catch (const Error& e) {
    std::cerr << e.what() << '\n';
    if (e.code() == Errc::Parse) {
      std::cerr << kSchemas;
      return 2;
    }
    return 1;
  } catch (const std::exception& e) {
    std::cerr << e.what() << '\n' << kSchemas;
    return 2;
  }
  return 2;
}
