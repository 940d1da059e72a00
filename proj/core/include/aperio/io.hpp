#pragma once

#include "aperio/boundary.hpp"
#include "aperio/delone.hpp"
#include "aperio/invariants.hpp"
#include "aperio/kasparov.hpp"
#include "aperio/pattern_tree.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <string>

namespace aperio {

nlohmann::json to_json(const Box& b);
Box box_from_json(const nlohmann::json& j);
nlohmann::json to_json(const Vec& v);
Vec vec_from_json(const nlohmann::json& j);

/// {"dimension", "r", "R", "window", "points", "provenance", "exact"}
nlohmann::json to_json(const DeloneSet& set);
DeloneSet delone_from_json(const nlohmann::json& j);
std::string points_csv(const DeloneSet& set);

nlohmann::json to_json(const PatternTree& tree);
std::string tree_dot(const PatternTree& tree);

/// Operator entries as sparse (row, col, re, im) triples plus geometry.
nlohmann::json to_json(const OperatorSample& A, double drop_tol = 0);

/// runtime_s is left out so reports are reproducible byte for byte.
nlohmann::json to_json(const InvariantReport& rep);
nlohmann::json to_json(const FredholmResult& res);
nlohmann::json to_json(const Z2Result& res);
nlohmann::json to_json(const ResidueResult& res);
nlohmann::json to_json(const BulkBoundaryReport& rep);
nlohmann::json to_json(const ZeroModeCount& z);
nlohmann::json to_json(const AnticommutatorReport& rep);
nlohmann::json to_json(const ScanReport& rep);
nlohmann::json to_json(const ProductSpectrum& ps);

std::string spectrum_csv(const RVec& eigenvalues);
/// position along the cut, localization, energy
std::string edge_spectrum_csv(const std::vector<EdgeState>& states, int along);
std::string scan_csv(const ScanReport& rep);

void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

}  // namespace aperio
