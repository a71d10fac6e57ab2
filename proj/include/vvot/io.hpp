#pragma once

#include <iosfwd>
#include <json.hpp>
#include <string>

#include "vvot/dynamic_solver.hpp"
#include "vvot/lifted.hpp"
#include "vvot/pde.hpp"
#include "vvot/static_solver.hpp"

namespace vvot {

using Json = nlohmann::json;

// Throws Parse on unreadable files or malformed JSON.
Json load_json(const std::string& path);

// {"n": int, "q": [[...]]}
WeightedGraph graph_from_json(const Json& j);
Json to_json(const WeightedGraph& g);

// {"atoms": [{"x": [...], "w": [...]}, ...]}
DiscreteVectorMeasure measure_from_json(const Json& j);
Json to_json(const DiscreteVectorMeasure& mu);

// {"x_min": ..., "x_max": ..., "cells": ...}
SpatialGrid grid_from_json(const Json& j);

Json to_json(const ChainReport& r);

// Comma-separated numbers, e.g. "1,0".
Vec parse_vector(const std::string& text);

// One row per (t, cell, species): rho, m at the left face, then sigma(i, .).
void write_solution_csv(std::ostream& os, const DynamicSolution& sol);
// atom_index, x..., r..., Tx..., Tr...
void write_embedding_csv(std::ostream& os, const ReferenceMeasure& ref, const LotEmbedding& e);
void write_matrix_csv(std::ostream& os, const Mat& m);
// t, cell, species, rho
void write_trajectory_csv(std::ostream& os, const std::vector<PdeState>& traj);
// t, E, mass_1..mass_n, min_rho
void write_diagnostics_csv(std::ostream& os, const PdeDiagnostics& d);

}  // namespace vvot
