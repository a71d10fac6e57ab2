#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "vvot/io.hpp"

namespace vvot {

enum class Provenance { Paper, Trivial, Derived };
enum class Relation { Equal, AtMost, AtLeast };

struct Check {
  std::string name;
  double expected = 0.0;
  double computed = 0.0;
  double tolerance = 0.0;
  Relation relation = Relation::Equal;
  Provenance provenance = Provenance::Derived;
  bool pass = false;
};

// A published value that differs from the computed one without being a failure.
struct Note {
  std::string name;
  double paper_value = 0.0;
  double computed = 0.0;
  std::string text;
};

struct VerificationReport {
  std::string suite;
  std::vector<Check> checks;
  std::vector<Note> notes;

  bool pass() const;
  void add(std::string name, double expected, double computed, double tolerance,
           Relation relation, Provenance provenance);
};

enum class Suite { Examples, Chain, Pde, Lot, Interpolation };

// Accepts "examples", "chain", "pde", "lot" or "interpolation".
Suite parse_suite(std::string_view name);

struct VerifyOptions {
  std::uint64_t seed = 7;
  SpatialGrid grid{-1.0, 1.0, 64};
  int time_steps = 16;
  SolverConfig solver;
};

VerificationReport verify_suite(Suite suite, const VerifyOptions& opt = {});

Json to_json(const VerificationReport& r);
// One line per check and note.
std::string format_report(const VerificationReport& r);

// Random instance for the chain suite: 1 to max_atoms atoms at locations in
// [-1,1] rounded to 1e-3, about 30% of species weights zero, total mass one.
DiscreteVectorMeasure random_measure(std::mt19937_64& rng, int n, int max_atoms = 4);

// Entropy plus confinement x^2/2 on two species, used by the PDE suite.
struct PdeCase {
  PdeConfig cfg;
  PdeState init;
};
PdeCase confinement_case(double q, int cells = 64);

}  // namespace vvot
