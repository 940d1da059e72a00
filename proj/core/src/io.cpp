#include "aperio/io.hpp"

#include "aperio/error.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

namespace aperio {

using nlohmann::json;

namespace {

json complex_json(cd z) { return json::array({z.real(), z.imag()}); }

std::string fmt(double x) {
  std::ostringstream os;
  os << std::setprecision(17) << x;
  return os.str();
}

}  // namespace

json to_json(const Box& b) {
  json w = json::array();
  for (int k = 0; k < b.dimension(); ++k) w.push_back({b.lo(k), b.hi(k)});
  return w;
}

Box box_from_json(const json& j) {
  if (!j.is_array() || j.empty() || j.size() > 3) throw InvalidArgument("window: expected 1 to 3 [lo, hi] pairs");
  Box b{Vec(static_cast<Eigen::Index>(j.size())), Vec(static_cast<Eigen::Index>(j.size()))};
  for (std::size_t k = 0; k < j.size(); ++k) {
    if (!j[k].is_array() || j[k].size() != 2) throw InvalidArgument("window: expected [lo, hi] pairs");
    b.lo(static_cast<Eigen::Index>(k)) = j[k][0].get<double>();
    b.hi(static_cast<Eigen::Index>(k)) = j[k][1].get<double>();
  }
  return b;
}

json to_json(const Vec& v) {
  json a = json::array();
  for (Eigen::Index k = 0; k < v.size(); ++k) a.push_back(v(k));
  return a;
}

Vec vec_from_json(const json& j) {
  if (!j.is_array() || j.empty() || j.size() > 3) throw InvalidArgument("point: expected 1 to 3 coordinates");
  Vec v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t k = 0; k < j.size(); ++k) v(static_cast<Eigen::Index>(k)) = j[k].get<double>();
  return v;
}

json to_json(const DeloneSet& set) {
  json pts = json::array();
  for (const auto& p : set.points()) pts.push_back(to_json(p));
  return {{"dimension", set.dimension()},
          {"r", set.r()},
          {"R", set.R()},
          {"window", to_json(set.window())},
          {"exact", set.exact_coordinates()},
          {"points", std::move(pts)},
          {"provenance",
           {{"generator", set.provenance().generator},
            {"seed", set.provenance().seed},
            {"parameters", set.provenance().parameters}}}};
}

DeloneSet delone_from_json(const json& j) {
  const int d = j.at("dimension").get<int>();
  std::vector<Vec> pts;
  for (const auto& p : j.at("points")) {
    Vec v = vec_from_json(p);
    if (v.size() != d) throw InvalidArgument("lattice: point dimension mismatch");
    pts.push_back(v);
  }
  Provenance prov;
  if (j.contains("provenance")) {
    const auto& pj = j["provenance"];
    prov.generator = pj.value("generator", "");
    prov.seed = pj.value("seed", std::uint64_t{0});
    prov.parameters = pj.value("parameters", json::object());
  }
  return DeloneSet(d, std::move(pts), j.at("r").get<double>(), j.at("R").get<double>(), box_from_json(j.at("window")),
                   prov, j.value("exact", false));
}

std::string points_csv(const DeloneSet& set) {
  std::ostringstream os;
  for (int k = 0; k < set.dimension(); ++k) os << (k ? "," : "") << "x" << k + 1;
  os << "\n";
  for (const auto& p : set.points()) {
    for (int k = 0; k < set.dimension(); ++k) os << (k ? "," : "") << fmt(p(k));
    os << "\n";
  }
  return os.str();
}

json to_json(const PatternTree& tree) {
  json verts = json::array();
  for (std::size_t v = 0; v < tree.vertices.size(); ++v) {
    const auto& tv = tree.vertices[v];
    json pts = json::array();
    for (const auto& p : tv.patch.relative_points) pts.push_back(to_json(p));
    verts.push_back({{"id", v},
                     {"level", tv.level},
                     {"parent", tv.parent ? json(*tv.parent) : json(nullptr)},
                     {"multiplicity", tv.witnesses.size()},
                     {"first_witness", tv.witnesses.empty() ? json(nullptr) : to_json(tree.sites[tv.witnesses.front()])},
                     {"patch", std::move(pts)}});
  }
  json sizes = json::array();
  for (const auto& l : tree.levels) sizes.push_back(l.size());
  return {{"R", tree.R}, {"depth", tree.depth}, {"level_sizes", sizes}, {"vertices", std::move(verts)}};
}

std::string tree_dot(const PatternTree& tree) {
  std::ostringstream os;
  os << "digraph pattern_tree {\n";
  for (std::size_t v = 0; v < tree.vertices.size(); ++v)
    os << "  v" << v << " [label=\"" << tree.vertices[v].level << ":" << tree.vertices[v].witnesses.size() << "\"];\n";
  for (auto [a, b] : tree.edges) os << "  v" << a << " -> v" << b << ";\n";
  os << "}\n";
  return os.str();
}

json to_json(const OperatorSample& A, double drop_tol) {
  json entries = json::array();
  for (Eigen::Index j = 0; j < A.matrix.cols(); ++j)
    for (Eigen::Index i = 0; i < A.matrix.rows(); ++i) {
      cd z = A.matrix(i, j);
      if (std::abs(z) > drop_tol && z != 0.0) entries.push_back({i, j, z.real(), z.imag()});
    }
  json sites = json::array();
  for (const auto& s : A.sites) sites.push_back(to_json(s));
  json out = {{"dimension", A.dimension}, {"q", A.q},        {"window", to_json(A.window)},
              {"bulk_margin", A.bulk_margin}, {"range", A.range}, {"sites", std::move(sites)},
              {"entries", std::move(entries)}, {"warnings", A.warnings}};
  if (A.period) out["period"] = to_json(*A.period);
  return out;
}

json to_json(const InvariantReport& rep) {
  json j = {{"name", rep.name},
            {"method", rep.method},
            {"raw", complex_json(rep.raw)},
            {"rounded", rep.rounded},
            {"deviation", rep.deviation},
            {"within_tolerance", rep.within_tolerance},
            {"round_tol", rep.round_tol},
            {"window", to_json(rep.window)},
            {"bulk_margin", rep.bulk_margin},
            {"details", rep.details}};
  j["oracle"] = rep.oracle ? json(*rep.oracle) : json(nullptr);
  j["ratio"] = rep.ratio ? json(*rep.ratio) : json(nullptr);
  if (rep.oracle) j["oracle_agrees"] = *rep.oracle == rep.rounded;
  return j;
}

json to_json(const FredholmResult& res) {
  return {{"index", res.index},
          {"localized", res.localized},
          {"small_singular_values", res.small_singular_values},
          {"next_singular_value", res.next_singular_value},
          {"kernel_count", res.kernel_count},
          {"cokernel_count", res.cokernel_count}};
}

json to_json(const Z2Result& res) {
  return {{"value", res.value},
          {"kernel_dim", res.kernel_dim},
          {"localized", res.localized},
          {"small_singular_values", res.small_singular_values},
          {"symmetry_defect", res.symmetry_defect}};
}

json to_json(const ResidueResult& res) {
  return {{"d", res.d},           {"s_values", res.s_values},
          {"values", res.values}, {"extrapolated", res.extrapolated},
          {"target", res.target}, {"relative_error", res.relative_error},
          {"radius", res.radius}, {"points", res.points}};
}

json to_json(const ZeroModeCount& z) {
  json modes = json::array();
  for (const auto& m : z.modes)
    modes.push_back({{"energy", m.energy}, {"localization", m.localization}, {"cut_weight", m.cut_weight}});
  return {{"per_boundary", z.per_boundary},
          {"cut_weight", z.cut_weight},
          {"modes_in_window", z.modes_in_window},
          {"localized_modes", z.localized_modes},
          {"modes", std::move(modes)}};
}

json to_json(const BulkBoundaryReport& rep) {
  json j = {{"dimension", rep.dimension},
            {"bulk", to_json(rep.bulk)},
            {"sign", rep.sign},
            {"boundary_value", rep.boundary_value},
            {"difference", rep.difference},
            {"agree", rep.agree},
            {"details", rep.details}};
  if (rep.boundary) j["boundary"] = to_json(*rep.boundary);
  if (rep.zero_modes) j["zero_modes"] = to_json(*rep.zero_modes);
  if (!rep.edge_states.empty()) {
    json es = json::array();
    for (const auto& s : rep.edge_states)
      es.push_back({{"energy", s.energy}, {"localization", s.localization}, {"position", to_json(s.position)}});
    j["edge_states"] = std::move(es);
  }
  return j;
}

json to_json(const AnticommutatorReport& rep) {
  return {{"max_ratio", rep.max_ratio},
          {"mean_ratio", rep.mean_ratio},
          {"trials", rep.trials},
          {"skipped", rep.skipped},
          {"max_displacement", rep.max_displacement}};
}

json to_json(const ScanReport& rep) {
  json rows = json::array();
  for (const auto& r : rep.rows) rows.push_back({{"depth", r.depth}, {"dimension", r.dimension}, {"norm", r.norm}});
  return {{"zeta", rep.zeta == Zeta::log ? "log" : "exp"},
          {"delta", rep.delta},
          {"rows", std::move(rows)},
          {"bounded", rep.bounded},
          {"growth", rep.growth}};
}

json to_json(const ProductSpectrum& ps) {
  json counting = json::array();
  for (auto [lam, c] : ps.counting) counting.push_back({lam, c});
  return {{"dimension", ps.eigenvalues.size()},
          {"min_abs", ps.min_abs},
          {"symmetry_defect", ps.symmetry_defect},
          {"hermitian_defect", ps.hermitian_defect},
          {"counting", std::move(counting)}};
}

std::string spectrum_csv(const RVec& eigenvalues) {
  std::ostringstream os;
  os << "index,eigenvalue\n";
  for (Eigen::Index i = 0; i < eigenvalues.size(); ++i) os << i << "," << fmt(eigenvalues(i)) << "\n";
  return os.str();
}

std::string edge_spectrum_csv(const std::vector<EdgeState>& states, int along) {
  std::ostringstream os;
  os << "position,localization,energy\n";
  for (const auto& s : states)
    os << fmt(along < s.position.size() ? s.position(along) : 0.0) << "," << fmt(s.localization) << ","
       << fmt(s.energy) << "\n";
  return os.str();
}

std::string scan_csv(const ScanReport& rep) {
  std::ostringstream os;
  os << "depth,dimension,norm\n";
  for (const auto& r : rep.rows) os << r.depth << "," << r.dimension << "," << fmt(r.norm) << "\n";
  return os.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace aperio
