#include "vvot/verify.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "vvot/bl.hpp"
#include "vvot/errors.hpp"
#include "vvot/graph_wasserstein.hpp"

namespace vvot {

namespace {

std::string_view provenance_name(Provenance p) {
  switch (p) {
    case Provenance::Paper: return "PAPER";
    case Provenance::Trivial: return "TRIVIAL";
    case Provenance::Derived: return "DERIVED";
  }
  return "?";
}

std::string_view relation_name(Relation r) {
  switch (r) {
    case Relation::Equal: return "==";
    case Relation::AtMost: return "<=";
    case Relation::AtLeast: return ">=";
  }
  return "?";
}

void examples_suite(VerificationReport& rep, const VerifyOptions& opt) {
  const auto f = Interpolation::geometric();
  const auto g = WeightedGraph::complete(2);
  const double a = 0.3, b = 0.6;
  const TwoNodeExamples ex = two_node_examples(f, 1.0, a, b);
  const TwoNodeMeasures m = two_node_measures(a, b);

  rep.add("W(mu1,mu2) closed form", a, ex.w12, 0.0, Relation::Equal, Provenance::Paper);
  rep.add("d(1/2,0.6) quadrature", 0.141899987289, ex.w13, 1e-9, Relation::Equal,
          Provenance::Derived);
  const double dyn12 = w_dynamic(g, f, m.mu1, m.mu2, opt.grid, opt.time_steps, opt.solver).distance;
  const double dyn13 = w_dynamic(g, f, m.mu1, m.mu3, opt.grid, opt.time_steps, opt.solver).distance;
  const double dyn23 = w_dynamic(g, f, m.mu2, m.mu3, opt.grid, opt.time_steps, opt.solver).distance;
  rep.add("W(mu1,mu2) dynamic", a, dyn12, 2e-2, Relation::Equal, Provenance::Paper);
  rep.add("W(mu1,mu3) dynamic", ex.w13, dyn13, 2e-2, Relation::Equal, Provenance::Paper);
  rep.add("W(mu2,mu3) dynamic <= a + d(1/2,b)", ex.w23_upper, dyn23, 2e-2, Relation::AtMost,
          Provenance::Paper);

  const auto corners_half = simplex_grid(2, 2);
  const Mat table_half = simplex_distance_table(g, f, corners_half);
  rep.add("D(mu1,mu2) grid LP", a,
          lifted_semimetric_upper(m.mu1, m.mu2, corners_half, table_half).upper_bound, 1e-6,
          Relation::Equal, Provenance::Paper);
  const auto grid23 = simplex_grid(2, 2, {Vec::Constant(1, 2 * b - 1)});
  const double d23 =
      lifted_semimetric_upper(m.mu2, m.mu3, grid23, simplex_distance_table(g, f, grid23))
          .upper_bound;
  rep.add("D(mu2,mu3) grid LP", ex.d23, d23, 1e-6, Relation::Equal, Provenance::Paper);

  const Mat dw = d_w_matrix(g, f);
  const TwoNodeMeasures m34 = two_node_measures(0.0, 0.75);
  const double w2w13 = w2w(m34.mu1, m34.mu3, dw).distance;
  rep.add("W2W(mu1,mu3), b=3/4", std::sqrt(0.25) * dw(0, 1), w2w13, 1e-10, Relation::Equal,
          Provenance::Derived);
  const double d13 = wg_two_node(f, 1.0, 0.5, 0.75);
  rep.add("D(mu1,mu3) < W2W(mu1,mu3), b=3/4", w2w13, d13, 0.0, Relation::AtMost,
          Provenance::Paper);
  rep.notes.push_back({"D(mu1,mu3) for geometric theta, b=3/4", std::numbers::pi / 6, d13,
                       "published value pi/6 corresponds to the integrand (a(1-a))^(-1/2); "
                       "the two-node formula with theta = sqrt(st) integrates (a(1-a))^(-1/4)"});
  rep.notes.push_back({"W2W(mu1,mu3) for geometric theta, b=3/4", std::numbers::pi / 4, w2w13,
                       "published value is (b-1/2) d(0,1) with the (a(1-a))^(-1/2) integrand; "
                       "the squared Kantorovich cost gives sqrt(b-1/2) d(0,1); the strict "
                       "inequality D < W2W holds either way"});

  rep.add("two-node arithmetic d(0,1)", std::sqrt(2.0),
          wg_two_node(Interpolation::arithmetic(), 1.0, 0.0, 1.0), 1e-8, Relation::Equal,
          Provenance::Derived);
  rep.add("d_BL([d0,0],[0,d0])", std::sqrt(2.0),
          d_bl(measure_1d(2, {{0.0, {1, 0}}}), measure_1d(2, {{0.0, {0, 1}}})), 1e-9,
          Relation::Equal, Provenance::Paper);
  const double abl = 0.1;
  const TwoNodeMeasures mbl = two_node_measures(abl, 0.5);
  const double bl = d_bl(mbl.mu1, mbl.mu2);
  rep.add("d_BL(mu1,mu2), a=0.1", std::sqrt(2.0) * abl / std::sqrt(4 + abl * abl), bl, 1e-9,
          Relation::Equal, Provenance::Derived);
  rep.notes.push_back({"d_BL(mu1,mu2), a=0.1", abl / std::sqrt(2.0), bl,
                       "published a/sqrt(2) is the small-a limit of sqrt(2) a / sqrt(4 + a^2)"});

  const TriangleWitness w = triangle_failure_witness(f, 1.0);
  rep.add("D triangle failure margin", 1e-6, w.lhs - w.rhs, 0.0, Relation::AtLeast,
          Provenance::Paper);
}

void chain_suite(VerificationReport& rep, const VerifyOptions& opt) {
  const auto f = Interpolation::geometric();
  ChainConfig cfg;
  cfg.solver = opt.solver;
  const WeightedGraph graphs[2] = {WeightedGraph::complete(2), WeightedGraph::complete(3)};
  const ChainTables tables[2] = {chain_tables(graphs[0], f, cfg), chain_tables(graphs[1], f, cfg)};
  std::mt19937_64 rng(opt.seed);
  for (int k = 0; k < 20; ++k) {
    const int n = 2 + k % 2;
    const auto mu = random_measure(rng, n);
    const auto nu = random_measure(rng, n);
    const ChainReport r = check_chain(graphs[n - 2], f, mu, nu, cfg, &tables[n - 2]);
    rep.add("chain instance " + std::to_string(k) + " violations", 0.0,
            static_cast<double>(r.violations.size()), 0.0, Relation::Equal, Provenance::Derived);
  }
}

void pde_suite(VerificationReport& rep) {
  PdeCase c = confinement_case(1.0);
  c.cfg.t_end = 1000 * c.cfg.dt;
  const PdeRun run_full = run(c.init, c.cfg, {});
  const auto& d = run_full.diagnostics;
  const double mass0 = d.species_mass.front().sum();
  double drift = 0.0, rise = 0.0;
  for (std::size_t k = 0; k < d.times.size(); ++k) {
    drift = std::max(drift, std::abs(d.species_mass[k].sum() - mass0));
    if (k) rise = std::max(rise, d.energy[k] - d.energy[k - 1]);
  }
  rep.add("steps taken", 1000.0, static_cast<double>(d.times.size() - 1), 0.0, Relation::AtLeast,
          Provenance::Derived);
  rep.add("total mass drift", 0.0, drift, 1e-10, Relation::Equal, Provenance::Derived);
  rep.add("energy increase per step", 0.0, rise, 1e-10, Relation::AtMost, Provenance::Derived);

  const RateSplit parts = rhs_parts(c.init, c.cfg);
  rep.add("per-cell mutation sum", 0.0, parts.mutation.rowwise().sum().cwiseAbs().maxCoeff(),
          1e-14, Relation::Equal, Provenance::Trivial);

  PdeCase frozen = confinement_case(0.0);
  frozen.cfg.t_end = 200 * frozen.cfg.dt;
  const auto& fd = run(frozen.init, frozen.cfg, {}).diagnostics;
  rep.add("species mass drift at q=0", 0.0,
          (fd.species_mass.back() - fd.species_mass.front()).cwiseAbs().maxCoeff(), 1e-12,
          Relation::Equal, Provenance::Trivial);

  PdeConfig cell;
  cell.grid = {0.0, 1.0, 1};
  cell.q = Mat::Ones(2, 2) - Mat::Identity(2, 2);
  cell.entropy = Vec::Zero(2);
  cell.potential = Mat(1, 2);
  cell.potential << 1.0, 0.0;
  PdeState s{Mat::Constant(1, 2, 0.5), 0.0};
  rep.add("single-cell mutation rate", -0.5, rhs(s, cell)(0, 0), 1e-15, Relation::Equal,
          Provenance::Derived);
}

void lot_suite(VerificationReport& rep, const VerifyOptions& opt) {
  const auto f = Interpolation::geometric();
  const auto g = WeightedGraph::complete(2);
  const SimplexMetric metric = SimplexMetric::ground(g, f);
  const ReferenceMeasure ref = sample_reference(24, 2, 1, opt.seed);
  std::mt19937_64 rng(opt.seed);
  std::vector<DiscreteVectorMeasure> data;
  for (int k = 0; k < 5; ++k) data.push_back(random_measure(rng, 2));

  std::vector<LotEmbedding> emb;
  for (const auto& mu : data) emb.push_back(lot_embed(ref, mu, metric));
  double worst = 0.0, bound_gap = kInf;
  for (std::size_t i = 0; i < emb.size(); ++i)
    for (std::size_t j = 0; j < emb.size(); ++j) {
      if (i != j) {
        const double tilde = d_lot_ground(emb[i], emb[j], ref, metric.corners());
        bound_gap = std::min(bound_gap, tilde - w2w(data[i], data[j], metric.corners()).distance);
      }
      for (std::size_t k = 0; k < emb.size(); ++k)
        worst = std::max(worst, d_lot(emb[i], emb[k], ref) -
                                    d_lot(emb[i], emb[j], ref) - d_lot(emb[j], emb[k], ref));
    }
  rep.add("d_lot triangle excess", 0.0, worst, 1e-12, Relation::AtMost, Provenance::Trivial);
  rep.add("ground variant minus W2W", -1e-8, bound_gap, 0.0, Relation::AtLeast,
          Provenance::Derived);
  const Mat dm = pairwise_matrix(ref, data, SimplexMetric::euclidean(2));
  rep.add("pairwise matrix asymmetry", 0.0, (dm - dm.transpose()).cwiseAbs().maxCoeff(), 0.0,
          Relation::Equal, Provenance::Trivial);
}

void interpolation_suite(VerificationReport& rep, const VerifyOptions& opt) {
  for (const auto& f : {Interpolation::arithmetic(), Interpolation::geometric(),
                        Interpolation::logarithmic()}) {
    const PropertyReport r = validate_interpolation(f, 2000, opt.seed);
    rep.add(f.name() + " property violations", 0.0, static_cast<double>(r.violations.size()),
            0.0, Relation::Equal, Provenance::Trivial);
  }
}

}  // namespace

bool VerificationReport::pass() const {
  for (const auto& c : checks)
    if (!c.pass) return false;
  return true;
}

void VerificationReport::add(std::string name, double expected, double computed, double tolerance,
                             Relation relation, Provenance provenance) {
  bool ok = false;
  switch (relation) {
    case Relation::Equal: ok = std::abs(computed - expected) <= tolerance; break;
    case Relation::AtMost: ok = computed <= expected + tolerance; break;
    case Relation::AtLeast: ok = computed >= expected - tolerance; break;
  }
  checks.push_back({std::move(name), expected, computed, tolerance, relation, provenance, ok});
}

Suite parse_suite(std::string_view name) {
  if (name == "examples") return Suite::Examples;
  if (name == "chain") return Suite::Chain;
  if (name == "pde") return Suite::Pde;
  if (name == "lot") return Suite::Lot;
  if (name == "interpolation") return Suite::Interpolation;
  fail(Errc::Parse, "unknown suite '" + std::string(name) + "'");
}

VerificationReport verify_suite(Suite suite, const VerifyOptions& opt) {
  VerificationReport rep;
  switch (suite) {
    case Suite::Examples:
      rep.suite = "examples";
      examples_suite(rep, opt);
      break;
    case Suite::Chain:
      rep.suite = "chain";
      chain_suite(rep, opt);
      break;
    case Suite::Pde:
      rep.suite = "pde";
      pde_suite(rep);
      break;
    case Suite::Lot:
      rep.suite = "lot";
      lot_suite(rep, opt);
      break;
    case Suite::Interpolation:
      rep.suite = "interpolation";
      interpolation_suite(rep, opt);
      break;
  }
  return rep;
}

Json to_json(const VerificationReport& r) {
  Json checks = Json::array(), notes = Json::array();
  for (const auto& c : r.checks)
    checks.push_back({{"name", c.name},
                      {"expected", c.expected},
                      {"computed", c.computed},
                      {"tolerance", c.tolerance},
                      {"relation", relation_name(c.relation)},
                      {"provenance", provenance_name(c.provenance)},
                      {"pass", c.pass}});
  for (const auto& n : r.notes)
    notes.push_back({{"name", n.name},
                     {"paper_value", n.paper_value},
                     {"computed", n.computed},
                     {"text", n.text}});
  return {{"suite", r.suite}, {"pass", r.pass()}, {"checks", checks}, {"notes", notes}};
}

std::string format_report(const VerificationReport& r) {
  std::ostringstream os;
  os.precision(10);
  for (const auto& c : r.checks)
    os << (c.pass ? "PASS " : "FAIL ") << '[' << provenance_name(c.provenance) << "] " << c.name
       << ": computed " << c.computed << ' ' << relation_name(c.relation) << ' ' << c.expected
       << " (tol " << c.tolerance << ")\n";
  for (const auto& n : r.notes)
    os << "NOTE " << n.name << ": paper " << n.paper_value << ", computed " << n.computed << " ("
       << n.text << ")\n";
  os << r.suite << ": " << (r.pass() ? "all checks passed" : "some checks failed") << '\n';
  return os.str();
}

DiscreteVectorMeasure random_measure(std::mt19937_64& rng, int n, int max_atoms) {
  require(n >= 1 && max_atoms >= 1, Errc::Domain, "bad instance parameters");
  std::uniform_int_distribution<int> count(1, max_atoms);
  std::uniform_real_distribution<double> loc(-1.0, 1.0), unit(0.0, 1.0);
  const int K = count(rng);
  std::vector<Atom> atoms;
  double total = 0.0;
  for (int a = 0; a < K; ++a) {
    Vec w(n);
    for (int i = 0; i < n; ++i) w(i) = unit(rng) < 0.3 ? 0.0 : unit(rng);
    if (w.sum() == 0.0) w(0) = 1.0;
    total += w.sum();
    atoms.push_back({Vec::Constant(1, std::round(loc(rng) * 1000) / 1000), w});
  }
  for (auto& a : atoms) a.w /= total;
  return DiscreteVectorMeasure(n, 1, atoms);
}

PdeCase confinement_case(double q, int cells) {
  PdeCase c;
  auto& cfg = c.cfg;
  cfg.grid = {-2.0, 2.0, cells};
  cfg.q = q * (Mat::Ones(2, 2) - Mat::Identity(2, 2));
  cfg.f = Interpolation::geometric();
  cfg.entropy = Vec::Constant(2, 0.5);
  cfg.potential.resize(cells, 2);
  c.init.rho.resize(cells, 2);
  for (int k = 0; k < cells; ++k) {
    const double x = cfg.grid.center(k);
    cfg.potential(k, 0) = 0.5 * x * x;
    cfg.potential(k, 1) = 0.5 * (x - 0.5) * (x - 0.5);
    c.init.rho(k, 0) = 0.05 + std::exp(-8 * (x + 0.8) * (x + 0.8));
    c.init.rho(k, 1) = 0.05 + 0.5 * std::exp(-8 * (x - 0.8) * (x - 0.8));
  }
  c.init.rho /= c.init.rho.sum() * cfg.grid.dx();
  cfg.dt = 2e-4;
  cfg.t_end = 0.2;
  return c;
}

}  // namespace vvot
