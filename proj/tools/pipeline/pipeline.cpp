#include "pipeline.hpp"

#include "aperio/aperio.hpp"

#include <openssl/opensslv.h>

#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <sstream>
#include <thread>

namespace aperio::tools {

namespace fs = std::filesystem;
using nlohmann::json;
using aperio::to_json;

namespace {

constexpr const char* aperio_version = "0.1.0";

// Shortest representation that round-trips.
std::string fmt(double x) {
  char buf[32];
  auto r = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, r.ptr);
}

double param(const ExperimentConfig& c, const std::string& k, double def) {
  return c.model.params.contains(k) ? c.model.params.at(k).get<double>() : def;
}

Box window_box(const LatticeSpec& l) {
  Box b{Vec(l.dimension), Vec(l.dimension)};
  for (int k = 0; k < l.dimension; ++k) {
    b.lo(k) = l.window[static_cast<std::size_t>(k)][0];
    b.hi(k) = l.window[static_cast<std::size_t>(k)][1];
  }
  return b;
}

std::optional<Vec> period_of(const ExperimentConfig& c) {
  if (c.model.period.empty()) return std::nullopt;
  Vec p(static_cast<Eigen::Index>(c.model.period.size()));
  bool any = false;
  for (std::size_t k = 0; k < c.model.period.size(); ++k) {
    p(static_cast<Eigen::Index>(k)) = c.model.period[k];
    any = any || c.model.period[k] > 0;
  }
  return any ? std::optional<Vec>(p) : std::nullopt;
}

MagneticCocycle field(const ExperimentConfig& c) {
  if (c.lattice.dimension == 2 && c.model.flux != 0) return MagneticCocycle::from_flux(c.model.flux);
  return MagneticCocycle(c.lattice.dimension);
}

// Task preconditions that depend on the config are reported against a key.
void require(bool cond, const std::string& key, const std::string& msg) {
  if (!cond) throw ConfigError(key, msg);
}

GapOptions gap_options(const ExperimentConfig& c) {
  GapOptions g;
  g.gap_floor = c.numerics.gap_floor;
  return g;
}

// Off-lattice point near the window centre.
Vec defect_origin(const OperatorSample& H) {
  Vec o = H.window.center();
  Vec step = Vec::Zero(o.size());
  step(0) = 0.31;
  if (o.size() > 1) step(1) = 0.17;
  for (int tries = 0; tries < 16; ++tries) {
    Vec x = o + step * (1 + 0.1 * tries);
    bool clear = true;
    for (const auto& s : H.sites)
      if ((s - x).norm() < 1e-3) clear = false;
    if (clear) return x;
  }
  throw NumericalError("no off-lattice origin found near the window centre");
}

json spectrum_json(const RVec& ev, const std::vector<Gap>& gaps, double width) {
  json g = json::array();
  for (const auto& x : gaps) g.push_back({x.lo, x.hi});
  std::vector<double> v(ev.data(), ev.data() + ev.size());
  return {{"eigenvalues", v}, {"gaps", g}, {"bulk_width", width}};
}

struct Context {
  const ExperimentConfig& c;
  ArtifactWriter& out;
  std::string prefix;
  std::optional<DeloneSet> set;
  std::optional<OperatorSample> H;

  const DeloneSet& lattice() {
    if (!set) set = make_lattice(c);
    return *set;
  }
  const OperatorSample& model() {
    if (!H) H = make_model(c, lattice());
    return *H;
  }
  std::string path(const std::string& name) const { return prefix + name; }
};

TaskOutcome task_verify(Context& cx) {
  auto rep = verify_delone(cx.lattice());
  const auto& s = cx.lattice();
  TaskOutcome t;
  t.report = {{"points", s.size()},          {"r", s.r()},
              {"R", s.R()},                  {"discrete_ok", rep.discrete_ok},
              {"dense_ok", rep.dense_ok},    {"inside_ok", rep.inside_ok},
              {"min_pairwise", rep.min_pairwise}, {"worst_gap", rep.worst_gap},
              {"worst_gap_center", to_json(rep.worst_gap_center)}};
  t.ok = rep.ok();
  t.value = rep.ok() ? 1.0 : 0.0;
  return t;
}

TaskOutcome task_spectrum(Context& cx) {
  const auto& H = cx.model();
  auto e = eigh(H.matrix);
  double width = 0;
  auto gaps = find_gaps(e.values, e.vectors, H, gap_options(cx.c), &width);
  TaskOutcome t;
  t.report = spectrum_json(e.values, gaps, width);
  t.value = static_cast<double>(gaps.size());
  cx.out.write(cx.path("spectrum.csv"), spectrum_csv(e.values));
  return t;
}

TaskOutcome task_chern(Context& cx) {
  require(cx.c.lattice.dimension == 2, "/lattice/dimension", "chern needs a two-dimensional lattice");
  const auto& H = cx.model();
  auto sd = spectral_gap(H, cx.c.numerics.energy, gap_options(cx.c));
  if (sd.gapless || !sd.gap) throw GaplessError("chern: no bulk gap found");
  auto P = fermi_projection(sd, H);
  auto rep = chern_even(P, {0, 1}, {cx.c.numerics.round_tol});
  CMat V = occupied_basis(sd);
  FredholmOptions fo;
  fo.rel_threshold = cx.c.numerics.fredholm_threshold;
  fo.range_basis = &V;
  const Vec origin = defect_origin(H);
  auto fr = fredholm_even(P, origin, fo);
  rep.oracle = fr.index;
  if (fr.index != 0) rep.ratio = rep.raw.real() / static_cast<double>(fr.index);
  TaskOutcome t;
  t.report = to_json(rep);
  t.report["gap"] = {sd.gap->lo, sd.gap->hi};
  t.report["fredholm"] = to_json(fr);
  t.report["fredholm"]["origin"] = to_json(origin);
  t.ok = rep.within_tolerance && fr.index == rep.rounded;
  t.value = rep.raw.real();
  t.deviation = rep.deviation;
  return t;
}

bool is_unitary_kernel(const std::string& k) { return k == "shift" || k == "identity"; }

OperatorSample unitary_for(Context& cx, const std::string& key) {
  const auto& H = cx.model();
  if (is_unitary_kernel(cx.c.model.kernel)) return H;
  require(cx.c.model.kernel == "ssh", key, "needs a unitary kernel (shift, identity) or the chiral ssh model");
  return fermi_unitary(H, ssh_chirality());
}

TaskOutcome task_winding(Context& cx) {
  require(cx.c.lattice.dimension == 1, "/lattice/dimension", "winding is implemented for d = 1");
  auto U = unitary_for(cx, "/model/kernel");
  OddOptions o;
  o.round_tol = cx.c.numerics.round_tol;
  o.cut = cx.c.numerics.cut;
  auto rep = winding_odd(U, {0}, o);
  TaskOutcome t;
  t.report = to_json(rep);
  t.ok = rep.within_tolerance;
  t.value = rep.raw.real();
  t.deviation = rep.deviation;
  return t;
}

TaskOutcome task_weak(Context& cx) {
  const auto& J = cx.c.numerics.weak_dirs;
  for (int j : J)
    require(j >= 0 && j < cx.c.lattice.dimension, "/numerics/weak_dirs", "direction outside the lattice dimension");
  InvariantReport rep;
  OddOptions o;
  o.round_tol = cx.c.numerics.round_tol;
  o.cut = cx.c.numerics.cut;
  if (J.size() % 2 == 0) {
    const auto& H = cx.model();
    auto sd = spectral_gap(H, cx.c.numerics.energy, gap_options(cx.c));
    if (sd.gapless || !sd.gap) throw GaplessError("weak: no bulk gap found");
    rep = weak_invariant(fermi_projection(sd, H), J, o);
  } else {
    rep = weak_invariant(unitary_for(cx, "/numerics/weak_dirs"), J, o);
  }
  TaskOutcome t;
  t.report = to_json(rep);
  t.ok = rep.within_tolerance;
  t.value = rep.raw.real();
  t.deviation = rep.deviation;
  return t;
}

TaskOutcome task_z2(Context& cx) {
  require(cx.c.model.kernel == "kitaev", "/model/kernel", "z2 needs the particle-hole symmetric kitaev model");
  const auto& H = cx.model();
  Z2Options o;
  o.kernel_tol_rel = cx.c.numerics.kernel_tol;
  Box left = H.window;
  left.hi(0) = H.window.center()(0);
  o.region = left;
  auto res = z2_index(H, kitaev_particle_hole(), o);
  TaskOutcome t;
  t.report = to_json(res);
  t.report["region"] = to_json(left);
  t.value = res.value;
  return t;
}

TaskOutcome task_bulk_boundary(Context& cx) {
  const auto& c = cx.c;
  TaskOutcome t;
  if (c.lattice.dimension == 2) {
    BulkBoundaryOptions o;
    o.dir = c.numerics.cut_dir;
    require(o.dir == 0 || o.dir == 1, "/numerics/cut_dir", "must be 0 or 1 for d = 2");
    o.cut = c.numerics.cut;
    o.bulk_margin = c.numerics.bulk_margin;
    if (c.numerics.slab_width) o.boundary.slab_width = *c.numerics.slab_width;
    o.boundary.round_tol = c.numerics.round_tol;
    o.tol = c.numerics.bulk_boundary_tol;
    o.gaps = gap_options(c);
    auto rep = bulk_boundary_even(cx.model(), c.numerics.energy, o);
    t.report = to_json(rep);
    t.ok = rep.agree;
    t.value = rep.boundary_value;
    t.deviation = rep.difference;
    cx.out.write(cx.path("edge_states.csv"), edge_spectrum_csv(rep.edge_states, 1 - o.dir));
    return t;
  }
  require(c.lattice.dimension == 1, "/lattice/dimension", "bulk-boundary needs d = 1 or 2");
  require(c.model.kernel == "ssh", "/model/kernel", "odd bulk-boundary needs the chiral ssh model");
  const auto& set = cx.lattice();
  ExperimentConfig ring = c;
  if (!period_of(c)) ring.model.period = {set.window().hi(0) - set.window().lo(0) + c.lattice.spacing};
  auto H_ring = make_model(ring, set);
  auto H_open = make_model(c, set, true);
  const double cut = c.numerics.cut ? *c.numerics.cut : set.window().lo(0) - 0.5 * c.lattice.spacing;
  auto rep = bulk_boundary_odd(H_ring, H_open, ssh_chirality(), cut);
  t.report = to_json(rep);
  t.ok = rep.agree;
  t.value = rep.bulk.oracle ? static_cast<double>(*rep.bulk.oracle) : 0.0;
  t.deviation = rep.difference;
  return t;
}

std::shared_ptr<const PatternTree> tree_of(Context& cx) {
  return std::make_shared<const PatternTree>(build_tree(cx.lattice(), cx.c.numerics.tree_depth));
}

TaskOutcome task_tree(Context& cx) {
  auto tree = tree_of(cx);
  const Zeta z = parse_zeta(cx.c.numerics.zeta);
  auto D = pb_operator(*tree, z);
  auto e = eigh(D.matrix, false);
  cx.out.write_json(cx.path("tree.json"), to_json(*tree));
  cx.out.write(cx.path("tree.dot"), tree_dot(*tree));
  cx.out.write(cx.path("pb_spectrum.csv"), spectrum_csv(e.values));
  json sizes = json::array();
  for (int n = 0; n <= tree->depth; ++n) sizes.push_back(tree->level_size(n));
  TaskOutcome t;
  t.report = {{"R", tree->R},
              {"depth", tree->depth},
              {"level_sizes", sizes},
              {"zeta", cx.c.numerics.zeta},
              {"lipschitz_constant", lipschitz_constant(*tree, z)},
              {"pb_eigenvalues", std::vector<double>(e.values.data(), e.values.data() + e.values.size())}};
  t.value = static_cast<double>(tree->vertices.size());
  return t;
}

TaskOutcome task_pairing(Context& cx) {
  auto tree = tree_of(cx);
  auto pair = choice_pair(*tree, task_seed(cx.c, 3));
  json rows = json::array();
  long total = 0;
  for (int n = 0; n <= tree->depth; ++n)
    for (std::size_t v : tree->levels[static_cast<std::size_t>(n)]) {
      long p = quasi_hom_pairing(*tree, pair, tree->vertices[v].patch, n);
      total += std::labs(p);
      rows.push_back({{"level", n}, {"vertex", v}, {"pairing", p}});
    }
  TaskOutcome t;
  t.report = {{"choice_seed", pair.seed}, {"pairings", std::move(rows)}};
  t.value = static_cast<double>(total);
  return t;
}

TaskOutcome task_product_check(Context& cx) {
  const auto& set = cx.lattice();
  const auto& nm = cx.c.numerics;
  const Zeta z = parse_zeta(nm.zeta);
  auto tree = tree_of(cx);
  TaskOutcome t;
  json per_eps = json::array();
  double worst = 0;
  for (double eps : nm.eps) {
    require(eps < set.r() / 2, "/numerics/eps", "eps must be below r/2 = " + fmt(set.r() / 2));
    Frame fr = s_cover_frame(set, eps, default_pitch(set.dimension(), eps));
    const double rad = tree->depth * tree->R + 2 * fr.support();
    auto pair = choice_pair(*tree, task_seed(cx.c, 3), {rad});
    auto fsp = build_fiber_space(set, tree, pair, {rad});
    auto X = operator_X(fsp);
    auto T = operator_T(fsp, fr, z);
    AnticommutatorReport agg;
    double sum = 0;
    for (int s = 0; s < nm.seeds; ++s) {
      auto rep = anticommutator_estimate(fsp, X, T, static_cast<std::size_t>(nm.trials),
                                         task_seed(cx.c, 100 + static_cast<std::uint64_t>(s)));
      agg.max_ratio = std::max(agg.max_ratio, rep.max_ratio);
      agg.max_displacement = std::max(agg.max_displacement, rep.max_displacement);
      agg.trials += rep.trials;
      agg.skipped += rep.skipped;
      sum += rep.mean_ratio * static_cast<double>(rep.trials);
    }
    agg.mean_ratio = agg.trials ? sum / static_cast<double>(agg.trials) : 0;
    auto ps = product_spectrum(fsp, X, T);
    per_eps.push_back({{"eps", eps},
                       {"dimension", fsp.dim},
                       {"anticommutator", to_json(agg)},
                       {"bound", 2 * eps},
                       {"within_bound", agg.max_ratio <= 2 * eps},
                       {"local_unit_defect", local_unit_defect(fsp, T, fr, 1, std::min(1, tree->depth))},
                       {"spectrum", to_json(ps)}});
    t.ok = t.ok && agg.max_ratio <= 2 * eps;
    worst = std::max(worst, agg.max_ratio / (2 * eps));
  }
  t.report = {{"depth", tree->depth}, {"zeta", nm.zeta}, {"estimates", std::move(per_eps)}};
  if (!nm.scan_depths.empty()) {
    const int level = tree->depth;
    SiteFunction f = cylinder_indicator(*tree, tree->levels[static_cast<std::size_t>(level)].front());
    ScanOptions so;
    so.eps = nm.eps.front();
    so.seed = task_seed(cx.c, 3);
    auto scan = log_commutator_scan(set, nm.scan_depths, f, level * tree->R, nm.delta, z, so);
    t.report["scan"] = to_json(scan);
    t.report["scan"]["cylinder_level"] = level;
    cx.out.write(cx.path("scan.csv"), scan_csv(scan));
    if (z == Zeta::log) t.ok = t.ok && scan.bounded;
  }
  t.value = worst;
  return t;
}

TaskOutcome task_residue(Context& cx) {
  auto res = residue_check(cx.lattice(), cx.c.numerics.residue_s);
  TaskOutcome t;
  t.report = to_json(res);
  t.ok = res.relative_error < 0.05;
  t.value = res.extrapolated;
  t.deviation = res.relative_error;
  return t;
}

TaskOutcome task_sobolev(Context& cx) {
  const double v = sobolev_norm(cx.model(), cx.c.numerics.sobolev_order, cx.c.numerics.sobolev_power);
  TaskOutcome t;
  t.report = {{"order", cx.c.numerics.sobolev_order}, {"power", cx.c.numerics.sobolev_power}, {"value", v}};
  t.value = v;
  return t;
}

TaskOutcome dispatch(const std::string& task, Context& cx) {
  if (task == "verify") return task_verify(cx);
  if (task == "spectrum") return task_spectrum(cx);
  if (task == "chern") return task_chern(cx);
  if (task == "winding") return task_winding(cx);
  if (task == "weak") return task_weak(cx);
  if (task == "z2") return task_z2(cx);
  if (task == "bulk-boundary") return task_bulk_boundary(cx);
  if (task == "tree") return task_tree(cx);
  if (task == "pairing") return task_pairing(cx);
  if (task == "product-check") return task_product_check(cx);
  if (task == "residue") return task_residue(cx);
  if (task == "sobolev") return task_sobolev(cx);
  throw ConfigError("/tasks", "unknown task '" + task + "'");
}

std::string timestamp() {
  std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

json versions() {
  return {{"aperio", aperio_version},
          {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                        std::to_string(EIGEN_MINOR_VERSION)},
          {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                std::to_string(NLOHMANN_JSON_VERSION_PATCH)},
          {"openssl", OPENSSL_VERSION_TEXT}};
}

void write_manifest(ArtifactWriter& out, const ExperimentConfig& c, int exit_code, const json& extra = json::object()) {
  const std::string cfg = to_json(c).dump(2);
  json m = {{"name", c.name},
            {"config_sha256", sha256_hex(cfg)},
            {"seed", c.seed},
            {"lattice_seed", lattice_seed(c)},
            {"seed_scheme", "child_seed(seed, stream): 1 lattice, 2 perturbation, 3 choice functions, 100+k trial vectors"},
            {"versions", versions()},
            {"created", timestamp()},
            {"exit_code", exit_code},
            {"files", out.file_list()}};
  for (auto it = extra.begin(); it != extra.end(); ++it) m[it.key()] = it.value();
  out.write("manifest.json", m.dump(2) + "\n");
}

}  // namespace

ArtifactWriter::ArtifactWriter(fs::path root) : root_(std::move(root)) { fs::create_directories(root_); }

std::string ArtifactWriter::write(const std::string& relative, const std::string& contents) {
  std::lock_guard<std::mutex> lock(mu_);
  write_text(root_ / relative, contents);
  std::string h = sha256_hex(contents);
  if (relative != "manifest.json") {
    bool replaced = false;
    for (auto& f : files_)
      if (f.first == relative) {
        f.second = {h, contents.size()};
        replaced = true;
      }
    if (!replaced) files_.push_back({relative, {h, contents.size()}});
  }
  return h;
}

void ArtifactWriter::write_json(const std::string& relative, const json& j) { write(relative, j.dump(2) + "\n"); }

json ArtifactWriter::file_list() const {
  std::lock_guard<std::mutex> lock(mu_);
  auto sorted = files_;
  std::sort(sorted.begin(), sorted.end());
  json a = json::array();
  for (const auto& [path, meta] : sorted) a.push_back({{"path", path}, {"sha256", meta.first}, {"bytes", meta.second}});
  return a;
}

json error_record(const std::string& message, const std::string& key, int code) {
  return {{"error", message}, {"key", key.empty() ? json(nullptr) : json(key)}, {"exit_code", code}};
}

std::uint64_t lattice_seed(const ExperimentConfig& c) {
  return c.lattice.seed != 0 ? c.lattice.seed : child_seed(c.seed, 1);
}

std::uint64_t task_seed(const ExperimentConfig& c, std::uint64_t stream) { return child_seed(c.seed, stream); }

DeloneSet make_lattice(const ExperimentConfig& c) {
  const auto& l = c.lattice;
  const Box w = window_box(l);
  std::optional<DeloneSet> set;
  if (l.generator == "periodic") set = generate_periodic(l.dimension, l.spacing, w);
  else if (l.generator == "fibonacci") set = generate_cut_and_project(CutProjectScheme::fibonacci, w);
  else if (l.generator == "ammann_beenker") set = generate_cut_and_project(CutProjectScheme::ammann_beenker, w);
  else if (l.generator == "amorphous") set = generate_amorphous(l.dimension, l.r, l.R, w, lattice_seed(c));
  else throw ConfigError("/lattice/generator", "unknown generator '" + l.generator + "'");
  if (l.perturb > 0) {
    if (!(l.perturb < set->r() / 2))
      throw ConfigError("/lattice/perturb", "amplitude must be below r/2 = " + fmt(set->r() / 2));
    set = perturb(*set, l.perturb, child_seed(lattice_seed(c), 2));
  }
  return *set;
}

OperatorSample make_model(const ExperimentConfig& c, const DeloneSet& set, bool open) {
  const auto& k = c.model.kernel;
  ModelOptions mo;
  mo.bulk_margin = c.numerics.bulk_margin;
  if (!open) mo.period = period_of(c);
  const auto B = field(c);
  const int d = set.dimension();
  if (k == "nn_hofstadter") {
    const double def = c.lattice.generator == "periodic" ? 1.01 * c.lattice.spacing : 2 * set.R() * (1 + 1e-9);
    return nn_hofstadter(set, param(c, "t", 1.0), B, param(c, "nn_radius", def), mo);
  }
  if (k == "exp_hopping") {
    std::optional<double> cutoff;
    if (c.model.params.contains("cutoff")) cutoff = param(c, "cutoff", 0);
    return exp_hopping(set, param(c, "beta", 2.0), B, cutoff, mo);
  }
  if (k == "qwz") {
    require(d == 2, "/model/kernel", "qwz needs a two-dimensional lattice");
    return qwz_model(set, param(c, "m", 1.0), B, mo);
  }
  if (k == "ssh") {
    require(d == 1, "/model/kernel", "ssh needs a one-dimensional lattice");
    return ssh_model(set, param(c, "v", 0.4), param(c, "w", 1.0), mo);
  }
  if (k == "kitaev") {
    require(d == 1, "/model/kernel", "kitaev needs a one-dimensional lattice");
    return kitaev_model(set, param(c, "mu", 0.5), param(c, "t", 1.0), param(c, "delta", 1.0), mo);
  }
  RepresentOptions ro;
  ro.bulk_margin = mo.bulk_margin;
  ro.period = mo.period;
  if (k == "shift") {
    require(d == 1, "/model/kernel", "shift needs a one-dimensional lattice");
    const double p = param(c, "power", 1);
    require(std::floor(p) == p, "/model/params/power", "must be an integer");
    return represent(set, shift_kernel(static_cast<int>(p), c.lattice.spacing), B, ro);
  }
  if (k == "identity") return represent(set, identity_kernel(), B, ro);
  throw ConfigError("/model/kernel", "unknown kernel '" + k + "'");
}

RunResult run_tasks(const ExperimentConfig& c, ArtifactWriter& out, const std::string& prefix) {
  RunResult res;
  Context cx{c, out, prefix, std::nullopt, std::nullopt};
  for (std::size_t i = 0; i < c.tasks.size(); ++i) {
    const auto& name = c.tasks[i];
    const std::string key = "/tasks/" + std::to_string(i);
    auto t0 = std::chrono::steady_clock::now();
    try {
      TaskOutcome t = dispatch(name, cx);
      t.task = name;
      t.runtime_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      t.report["task"] = name;
      t.report["ok"] = t.ok;
      out.write_json(cx.path(name + ".json"), t.report);
      if (!t.ok) res.exit_code = std::max<int>(res.exit_code, exit_numerical);
      res.tasks.push_back(std::move(t));
    } catch (const ConfigError& e) {
      res.exit_code = exit_config;
      res.error = error_record(e.what(), e.key(), exit_config);
      res.error["task"] = name;
      return res;
    } catch (const InvalidArgument& e) {
      res.exit_code = exit_config;
      res.error = error_record(e.what(), key, exit_config);
      res.error["task"] = name;
      return res;
    } catch (const UnresolvedError& e) {
      res.exit_code = exit_numerical;
      res.error = error_record(e.what(), key, exit_numerical);
      res.error["task"] = name;
      res.error["kind"] = "unresolved";
      return res;
    } catch (const Error& e) {
      res.exit_code = exit_numerical;
      res.error = error_record(e.what(), key, exit_numerical);
      res.error["task"] = name;
      return res;
    }
  }
  return res;
}

RunResult run(const ExperimentConfig& c, const fs::path& out_dir) {
  ArtifactWriter out(out_dir);
  out.write_json("config.json", to_json(c));
  RunResult res = run_tasks(c, out);
  if (!res.error.is_null()) out.write_json("error.json", res.error);
  json summary = json::array();
  for (const auto& t : res.tasks) summary.push_back({{"task", t.task}, {"ok", t.ok}, {"runtime_s", t.runtime_s}});
  write_manifest(out, c, res.exit_code, {{"tasks", summary}});
  return res;
}

int generate(const ExperimentConfig& c, const fs::path& out_dir) {
  ArtifactWriter out(out_dir);
  auto set = make_lattice(c);
  out.write_json("lattice.json", to_json(set));
  out.write("points.csv", points_csv(set));
  write_manifest(out, c, exit_ok);
  return exit_ok;
}

std::vector<SweepRow> sweep(const json& config, const std::string& axis, const std::vector<double>& values,
                            const fs::path& out_dir, int threads, int* exit_code) {
  if (values.empty()) throw ConfigError("--values", "sweep needs at least one value");
  numeric_at(config, axis);
  std::vector<ExperimentConfig> cfgs;
  for (double v : values) cfgs.push_back(parse_config(with_value(config, axis, v)));
  ArtifactWriter out(out_dir);
  std::vector<RunResult> results(values.size());
  const int workers = std::max(1, std::min<int>(threads, static_cast<int>(values.size())));
  if (workers > 1) set_blas_threads(1);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < values.size(); i = next++) {
      const std::string prefix = "point_" + std::to_string(i) + "/";
      out.write_json(prefix + "config.json", to_json(cfgs[i]));
      results[i] = run_tasks(cfgs[i], out, prefix);
      if (!results[i].error.is_null()) out.write_json(prefix + "error.json", results[i].error);
    }
  };
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) pool.emplace_back(work);
  for (auto& th : pool) th.join();

  std::vector<SweepRow> rows;
  int code = exit_ok;
  std::ostringstream csv;
  csv << "value,task,invariant,deviation,runtime_s,exit_code\n";
  for (std::size_t i = 0; i < values.size(); ++i) {
    code = std::max(code, results[i].exit_code);
    auto emit = [&](SweepRow r) {
      csv << fmt(r.value) << "," << r.task << "," << (r.invariant ? fmt(*r.invariant) : "") << ","
          << (r.deviation ? fmt(*r.deviation) : "") << "," << fmt(r.runtime_s) << "," << r.exit_code << "\n";
      rows.push_back(std::move(r));
    };
    for (const auto& t : results[i].tasks)
      emit({values[i], t.task, t.value, t.deviation, t.runtime_s, t.ok ? 0 : static_cast<int>(exit_numerical)});
    if (!results[i].error.is_null())
      emit({values[i], results[i].error.value("task", ""), std::nullopt, std::nullopt, 0, results[i].exit_code});
  }
  out.write("sweep.csv", csv.str());
  ExperimentConfig base = parse_config(config);
  write_manifest(out, base, code, {{"sweep", {{"axis", axis}, {"values", values}, {"threads", workers}}}});
  if (exit_code) *exit_code = code;
  return rows;
}

std::vector<std::string> export_plotdata(const fs::path& reports, const fs::path& out_dir) {
  std::vector<fs::path> found;
  if (fs::exists(reports))
    for (const auto& e : fs::recursive_directory_iterator(reports))
      if (e.is_regular_file() && e.path().extension() == ".json") found.push_back(e.path());
  std::sort(found.begin(), found.end());
  ArtifactWriter out(out_dir);
  std::vector<std::string> written;
  for (const auto& p : found) {
    json j;
    try {
      j = json::parse(read_text(p));
    } catch (const json::exception&) {
      continue;
    }
    if (!j.is_object() || !j.contains("task")) continue;
    std::string stem = fs::relative(p, reports).replace_extension("").generic_string();
    for (auto& ch : stem)
      if (ch == '/') ch = '_';
    const std::string task = j["task"].get<std::string>();
    std::ostringstream os;
    if ((task == "spectrum" || task == "tree") && (j.contains("eigenvalues") || j.contains("pb_eigenvalues"))) {
      const auto& ev = j.contains("eigenvalues") ? j["eigenvalues"] : j["pb_eigenvalues"];
      os << "index,eigenvalue\n";
      for (std::size_t i = 0; i < ev.size(); ++i) os << i << "," << fmt(ev[i].get<double>()) << "\n";
    } else if (task == "bulk-boundary" && j.contains("edge_states")) {
      const int along = 1 - j["details"].value("dir", 1);
      os << "position,localization,energy\n";
      for (const auto& s : j["edge_states"]) {
        const auto& pos = s["position"];
        const double x = pos.size() > 1 ? pos[static_cast<std::size_t>(along)].get<double>() : pos[0].get<double>();
        os << fmt(x) << "," << fmt(s["localization"].get<double>()) << "," << fmt(s["energy"].get<double>()) << "\n";
      }
    } else if (task == "product-check" && j.contains("scan")) {
      os << "depth,norm\n";
      for (const auto& r : j["scan"]["rows"]) os << r["depth"].get<int>() << "," << fmt(r["norm"].get<double>()) << "\n";
    } else {
      continue;
    }
    const std::string name = stem + ".csv";
    out.write(name, os.str());
    written.push_back(name);
  }
  json idx = {{"source", reports.generic_string()}, {"files", out.file_list()}};
  out.write("index.json", idx.dump(2) + "\n");
  return written;
}

}  // namespace aperio::tools
