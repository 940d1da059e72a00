#include "config.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>

namespace aperio::tools {

using nlohmann::json;

namespace {

// Reads an object member by member and rejects keys nobody asked for.
class Reader {
 public:
  Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_.empty() ? "/" : path_, "expected an object");
  }
  std::string key(const std::string& k) const { return path_ + "/" + k; }
  bool has(const std::string& k) {
    seen_.insert(k);
    return j_.contains(k);
  }
  const json& raw(const std::string& k) {
    seen_.insert(k);
    return j_.at(k);
  }

  double number(const std::string& k, double def) {
    if (!has(k)) return def;
    const json& v = j_.at(k);
    if (!v.is_number()) throw ConfigError(key(k), "expected a number");
    double x = v.get<double>();
    if (!std::isfinite(x)) throw ConfigError(key(k), "expected a finite number");
    return x;
  }
  double positive(const std::string& k, double def) {
    double x = number(k, def);
    if (!(x > 0)) throw ConfigError(key(k), "must be positive");
    return x;
  }
  std::optional<double> optional_number(const std::string& k) {
    if (!has(k) || j_.at(k).is_null()) return std::nullopt;
    return number(k, 0);
  }
  long integer(const std::string& k, long def) {
    if (!has(k)) return def;
    const json& v = j_.at(k);
    if (!v.is_number_integer()) throw ConfigError(key(k), "expected an integer");
    return v.get<long>();
  }
  std::uint64_t seed(const std::string& k, std::uint64_t def) {
    if (!has(k)) return def;
    const json& v = j_.at(k);
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0))
      throw ConfigError(key(k), "expected a non-negative integer");
    return v.get<std::uint64_t>();
  }
  std::string string(const std::string& k, const std::string& def) {
    if (!has(k)) return def;
    const json& v = j_.at(k);
    if (!v.is_string()) throw ConfigError(key(k), "expected a string");
    return v.get<std::string>();
  }
  std::vector<double> numbers(const std::string& k, std::vector<double> def) {
    if (!has(k)) return def;
    const json& v = j_.at(k);
    if (!v.is_array()) throw ConfigError(key(k), "expected an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_number()) throw ConfigError(key(k) + "/" + std::to_string(i), "expected a number");
      out.push_back(v[i].get<double>());
    }
    return out;
  }
  std::vector<int> integers(const std::string& k, std::vector<int> def) {
    if (!has(k)) return def;
    const json& v = j_.at(k);
    if (!v.is_array()) throw ConfigError(key(k), "expected an array of integers");
    std::vector<int> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_number_integer()) throw ConfigError(key(k) + "/" + std::to_string(i), "expected an integer");
      out.push_back(v[i].get<int>());
    }
    return out;
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!seen_.count(it.key())) throw ConfigError(key(it.key()), "unknown key");
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

const std::set<std::string>& generators() {
  static const std::set<std::string> g{"periodic", "fibonacci", "ammann_beenker", "amorphous"};
  return g;
}

// Allowed parameters per kernel, all numeric.
const std::map<std::string, std::set<std::string>>& kernel_params() {
  static const std::map<std::string, std::set<std::string>> k{
      {"nn_hofstadter", {"t", "nn_radius"}},
      {"exp_hopping", {"beta", "cutoff"}},
      {"qwz", {"m"}},
      {"ssh", {"v", "w"}},
      {"kitaev", {"mu", "t", "delta"}},
      {"shift", {"power"}},
      {"identity", {}}};
  return k;
}

LatticeSpec parse_lattice(const json& j) {
  Reader rd(j, "/lattice");
  LatticeSpec l;
  l.generator = rd.string("generator", l.generator);
  if (!generators().count(l.generator)) throw ConfigError(rd.key("generator"), "unknown generator '" + l.generator + "'");
  long d = rd.integer("dimension", l.generator == "fibonacci" ? 1 : 2);
  if (d < 1 || d > 3) throw ConfigError(rd.key("dimension"), "must be 1, 2 or 3");
  if (l.generator == "fibonacci" && d != 1) throw ConfigError(rd.key("dimension"), "fibonacci is one-dimensional");
  if (l.generator == "ammann_beenker" && d != 2) throw ConfigError(rd.key("dimension"), "ammann_beenker is two-dimensional");
  l.dimension = static_cast<int>(d);
  l.spacing = rd.positive("spacing", l.spacing);
  l.r = rd.positive("r", l.r);
  l.R = rd.positive("R", l.R);
  if (l.generator == "amorphous" && !(l.R > l.r)) throw ConfigError(rd.key("R"), "must exceed r");
  l.perturb = rd.number("perturb", 0);
  if (l.perturb < 0) throw ConfigError(rd.key("perturb"), "must be non-negative");
  l.seed = rd.seed("seed", 0);
  if (!rd.has("window")) throw ConfigError(rd.key("window"), "required");
  const json& w = rd.raw("window");
  if (!w.is_array() || w.size() != static_cast<std::size_t>(l.dimension))
    throw ConfigError(rd.key("window"), "expected " + std::to_string(l.dimension) + " [lo, hi] pairs");
  for (std::size_t k = 0; k < w.size(); ++k) {
    const std::string wk = rd.key("window") + "/" + std::to_string(k);
    if (!w[k].is_array() || w[k].size() != 2 || !w[k][0].is_number() || !w[k][1].is_number())
      throw ConfigError(wk, "expected [lo, hi]");
    std::array<double, 2> p{w[k][0].get<double>(), w[k][1].get<double>()};
    if (!(p[1] > p[0])) throw ConfigError(wk, "hi must exceed lo");
    l.window.push_back(p);
  }
  rd.finish();
  return l;
}

ModelSpec parse_model(const json& j, int dimension) {
  Reader rd(j, "/model");
  ModelSpec m;
  m.kernel = rd.string("kernel", m.kernel);
  auto it = kernel_params().find(m.kernel);
  if (it == kernel_params().end()) throw ConfigError(rd.key("kernel"), "unknown kernel '" + m.kernel + "'");
  if (rd.has("params")) {
    const json& p = rd.raw("params");
    if (!p.is_object()) throw ConfigError(rd.key("params"), "expected an object");
    for (auto pi = p.begin(); pi != p.end(); ++pi) {
      const std::string pk = rd.key("params") + "/" + pi.key();
      if (!it->second.count(pi.key())) throw ConfigError(pk, "not a parameter of " + m.kernel);
      if (!pi.value().is_number()) throw ConfigError(pk, "expected a number");
    }
    m.params = p;
  }
  m.flux = rd.number("flux", 0);
  if (m.flux != 0 && dimension != 2) throw ConfigError(rd.key("flux"), "flux requires a two-dimensional lattice");
  m.period = rd.numbers("period", {});
  if (!m.period.empty() && m.period.size() != static_cast<std::size_t>(dimension))
    throw ConfigError(rd.key("period"), "expected one period per dimension (0 for open axes)");
  for (double p : m.period)
    if (p < 0) throw ConfigError(rd.key("period"), "periods must be non-negative");
  if (!m.period.empty() && m.flux != 0) throw ConfigError(rd.key("period"), "periodic samples require zero flux");
  rd.finish();
  return m;
}

Numerics parse_numerics(const json& j) {
  Reader rd(j, "/numerics");
  Numerics n;
  n.bulk_margin = rd.optional_number("bulk_margin");
  if (n.bulk_margin && *n.bulk_margin < 0) throw ConfigError(rd.key("bulk_margin"), "must be non-negative");
  n.round_tol = rd.positive("round_tol", n.round_tol);
  n.gap_floor = rd.positive("gap_floor", n.gap_floor);
  n.energy = rd.number("energy", n.energy);
  n.fredholm_threshold = rd.positive("fredholm_threshold", n.fredholm_threshold);
  if (n.fredholm_threshold >= 1) throw ConfigError(rd.key("fredholm_threshold"), "must be below 1");
  n.kernel_tol = rd.positive("kernel_tol", n.kernel_tol);
  n.cut = rd.optional_number("cut");
  n.cut_dir = static_cast<int>(rd.integer("cut_dir", n.cut_dir));
  if (n.cut_dir < 0 || n.cut_dir > 2) throw ConfigError(rd.key("cut_dir"), "must be 0, 1 or 2");
  n.weak_dirs = rd.integers("weak_dirs", n.weak_dirs);
  if (n.weak_dirs.empty()) throw ConfigError(rd.key("weak_dirs"), "must not be empty");
  n.slab_width = rd.optional_number("slab_width");
  if (n.slab_width && !(*n.slab_width > 0)) throw ConfigError(rd.key("slab_width"), "must be positive");
  n.bulk_boundary_tol = rd.positive("bulk_boundary_tol", n.bulk_boundary_tol);
  n.tree_depth = static_cast<int>(rd.integer("tree_depth", n.tree_depth));
  if (n.tree_depth < 0 || n.tree_depth > 32) throw ConfigError(rd.key("tree_depth"), "must lie in [0, 32]");
  n.zeta = rd.string("zeta", n.zeta);
  if (n.zeta != "log" && n.zeta != "exp") throw ConfigError(rd.key("zeta"), "must be 'log' or 'exp'");
  n.eps = rd.numbers("eps", n.eps);
  if (n.eps.empty()) throw ConfigError(rd.key("eps"), "must not be empty");
  for (double e : n.eps)
    if (!(e > 0)) throw ConfigError(rd.key("eps"), "values must be positive");
  n.trials = static_cast<int>(rd.integer("trials", n.trials));
  if (n.trials < 1) throw ConfigError(rd.key("trials"), "must be positive");
  n.seeds = static_cast<int>(rd.integer("seeds", n.seeds));
  if (n.seeds < 1) throw ConfigError(rd.key("seeds"), "must be positive");
  n.scan_depths = rd.integers("scan_depths", n.scan_depths);
  if (!n.scan_depths.empty() && n.scan_depths.size() < 3)
    throw ConfigError(rd.key("scan_depths"), "a scan needs at least three depths");
  n.delta = rd.positive("delta", n.delta);
  n.residue_s = rd.numbers("residue_s", n.residue_s);
  if (n.residue_s.size() < 2) throw ConfigError(rd.key("residue_s"), "at least two values required");
  n.sobolev_order = static_cast<int>(rd.integer("sobolev_order", n.sobolev_order));
  if (n.sobolev_order < 0) throw ConfigError(rd.key("sobolev_order"), "must be non-negative");
  n.sobolev_power = static_cast<int>(rd.integer("sobolev_power", n.sobolev_power));
  if (n.sobolev_power < 1) throw ConfigError(rd.key("sobolev_power"), "must be at least 1");
  rd.finish();
  return n;
}

json window_json(const std::vector<std::array<double, 2>>& w) {
  json a = json::array();
  for (const auto& p : w) a.push_back({p[0], p[1]});
  return a;
}

}  // namespace

const std::vector<std::string>& known_tasks() {
  static const std::vector<std::string> t{"verify", "spectrum",      "chern", "winding",       "weak",    "z2",
                                          "bulk-boundary", "tree", "pairing", "product-check", "residue", "sobolev"};
  return t;
}

ExperimentConfig parse_config(const json& j) {
  Reader rd(j, "");
  ExperimentConfig c;
  c.name = rd.string("name", c.name);
  c.seed = rd.seed("seed", 0);
  if (!rd.has("lattice")) throw ConfigError("/lattice", "required");
  c.lattice = parse_lattice(rd.raw("lattice"));
  if (!rd.has("model")) throw ConfigError("/model", "required");
  c.model = parse_model(rd.raw("model"), c.lattice.dimension);
  if (!rd.has("tasks")) throw ConfigError("/tasks", "required");
  const json& t = rd.raw("tasks");
  if (!t.is_array() || t.empty()) throw ConfigError("/tasks", "expected a non-empty array of task names");
  for (std::size_t i = 0; i < t.size(); ++i) {
    const std::string tk = "/tasks/" + std::to_string(i);
    if (!t[i].is_string()) throw ConfigError(tk, "expected a task name");
    const auto name = t[i].get<std::string>();
    if (std::find(known_tasks().begin(), known_tasks().end(), name) == known_tasks().end())
      throw ConfigError(tk, "unknown task '" + name + "'");
    c.tasks.push_back(name);
  }
  c.numerics = rd.has("numerics") ? parse_numerics(rd.raw("numerics")) : Numerics{};
  c.output = rd.string("output", c.output);
  if (c.output.empty()) throw ConfigError("/output", "must not be empty");
  rd.finish();
  return c;
}

json to_json(const ExperimentConfig& c) {
  const auto& l = c.lattice;
  const auto& m = c.model;
  const auto& n = c.numerics;
  json num = {{"round_tol", n.round_tol},
              {"gap_floor", n.gap_floor},
              {"energy", n.energy},
              {"fredholm_threshold", n.fredholm_threshold},
              {"kernel_tol", n.kernel_tol},
              {"cut_dir", n.cut_dir},
              {"weak_dirs", n.weak_dirs},
              {"bulk_boundary_tol", n.bulk_boundary_tol},
              {"tree_depth", n.tree_depth},
              {"zeta", n.zeta},
              {"eps", n.eps},
              {"trials", n.trials},
              {"seeds", n.seeds},
              {"scan_depths", n.scan_depths},
              {"delta", n.delta},
              {"residue_s", n.residue_s},
              {"sobolev_order", n.sobolev_order},
              {"sobolev_power", n.sobolev_power}};
  if (n.bulk_margin) num["bulk_margin"] = *n.bulk_margin;
  if (n.cut) num["cut"] = *n.cut;
  if (n.slab_width) num["slab_width"] = *n.slab_width;
  json model = {{"kernel", m.kernel}, {"params", m.params}, {"flux", m.flux}};
  if (!m.period.empty()) model["period"] = m.period;
  return {{"name", c.name},
          {"seed", c.seed},
          {"lattice",
           {{"generator", l.generator},
            {"dimension", l.dimension},
            {"spacing", l.spacing},
            {"r", l.r},
            {"R", l.R},
            {"window", window_json(l.window)},
            {"perturb", l.perturb},
            {"seed", l.seed}}},
          {"model", std::move(model)},
          {"tasks", c.tasks},
          {"numerics", std::move(num)},
          {"output", c.output}};
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("/", "cannot read config file " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("/", std::string("invalid JSON: ") + e.what());
  }
  return parse_config(j);
}

double numeric_at(const json& j, const std::string& pointer) {
  json::json_pointer p;
  try {
    p = json::json_pointer(pointer);
  } catch (const json::exception&) {
    throw ConfigError(pointer, "not a valid JSON pointer");
  }
  if (!j.contains(p)) throw ConfigError(pointer, "no such key");
  const json& v = j.at(p);
  if (!v.is_number()) throw ConfigError(pointer, "sweep axis must address a numeric key");
  return v.get<double>();
}

json with_value(const json& j, const std::string& pointer, double value) {
  numeric_at(j, pointer);
  json out = j;
  const json& old = j.at(json::json_pointer(pointer));
  if (old.is_number_integer() && std::floor(value) == value)
    out[json::json_pointer(pointer)] = static_cast<long>(value);
  else
    out[json::json_pointer(pointer)] = value;
  return out;
}

std::string sha256_hex(const std::string& bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
  EVP_DigestUpdate(ctx, bytes.data(), bytes.size());
  EVP_DigestFinal_ex(ctx, md, &len);
  EVP_MD_CTX_free(ctx);
  std::ostringstream os;
  for (unsigned int i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[i]);
  return os.str();
}

}  // namespace aperio::tools
