#include "pipeline/pipeline.hpp"

#include "aperio/error.hpp"
#include "aperio/linalg.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

namespace {

using aperio::tools::ConfigError;
using aperio::tools::error_record;
using nlohmann::json;

int report_error(const std::string& message, const std::string& key, int code) {
  std::cerr << error_record(message, key, code).dump() << "\n";
  return code;
}

json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("/", "cannot read config file " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("/", std::string("invalid JSON: ") + e.what());
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"aperio: index pairings and spectral triples on aperiodic lattices"};
  app.require_subcommand(1);

  std::string config, out, axis, reports;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> tasks;
  std::vector<std::string> value_args;
  int threads = 1;

  auto add_common = [&](CLI::App* sub, bool needs_config) {
    auto* c = sub->add_option("--config", config, "experiment config (JSON)");
    if (needs_config) c->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out, "output directory (overrides the config)");
    sub->add_option("--seed", seed, "top-level seed (overrides the config)");
    sub->add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
  };

  auto* gen = app.add_subcommand("gen", "generate the configured lattice");
  add_common(gen, true);
  auto* verify = app.add_subcommand("verify", "certify the Delone constants of the configured lattice");
  add_common(verify, true);
  auto* run = app.add_subcommand("run", "run the configured tasks");
  add_common(run, true);
  run->add_option("--task", tasks, "run only these tasks, in this order");
  auto* sw = app.add_subcommand("sweep", "run the pipeline over values of one numeric config key");
  add_common(sw, true);
  sw->add_option("--axis", axis, "JSON pointer to a numeric key, e.g. /model/flux")->required();
  sw->add_option("--values", value_args, "comma-separated values for the axis")->delimiter(',');
  auto* ex = app.add_subcommand("export", "convert reports to plot-ready CSV");
  ex->add_option("reports", reports, "directory holding reports")->required()->check(CLI::ExistingDirectory);
  ex->add_option("--out", out, "output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : static_cast<int>(aperio::tools::exit_config);
  }

  try {
    if (*ex) {
      auto files = aperio::tools::export_plotdata(reports, out);
      std::cout << json({{"written", files}}).dump(2) << "\n";
      return aperio::tools::exit_ok;
    }
    json raw = read_json(config);
    if (seed) raw["seed"] = *seed;
    if (*sw) {
      if (!out.empty()) raw["output"] = out;
      auto cfg = aperio::tools::parse_config(raw);
      std::vector<double> values;
      for (const auto& v : value_args) {
        std::size_t used = 0;
        double x = 0;
        try {
          x = std::stod(v, &used);
        } catch (const std::exception&) {
          used = 0;
        }
        if (v.empty() || used != v.size()) throw ConfigError("--values", "not a number: '" + v + "'");
        values.push_back(x);
      }
      int code = 0;
      auto rows = aperio::tools::sweep(raw, axis, values, cfg.output, threads, &code);
      std::cout << json({{"points", values.size()}, {"rows", rows.size()}, {"output", cfg.output},
                         {"exit_code", code}})
                       .dump(2)
                << "\n";
      return code;
    }
    auto cfg = aperio::tools::parse_config(raw);
    if (!out.empty()) cfg.output = out;
    aperio::set_blas_threads(threads);
    if (*gen) return aperio::tools::generate(cfg, cfg.output);
    if (*verify) cfg.tasks = {"verify"};
    if (*run && !tasks.empty()) {
      for (std::size_t i = 0; i < tasks.size(); ++i) {
        const auto& k = aperio::tools::known_tasks();
        if (std::find(k.begin(), k.end(), tasks[i]) == k.end())
          throw ConfigError("--task", "unknown task '" + tasks[i] + "'");
      }
      cfg.tasks = tasks;
    }
    auto res = aperio::tools::run(cfg, cfg.output);
    json summary = json::array();
    for (const auto& t : res.tasks) summary.push_back({{"task", t.task}, {"ok", t.ok}});
    std::cout << json({{"output", cfg.output}, {"tasks", summary}, {"exit_code", res.exit_code}}).dump(2) << "\n";
    if (!res.error.is_null()) std::cerr << res.error.dump() << "\n";
    return res.exit_code;
  } catch (const ConfigError& e) {
    return report_error(e.what(), e.key(), aperio::tools::exit_config);
  } catch (const aperio::InvalidArgument& e) {
    return report_error(e.what(), "", aperio::tools::exit_config);
  } catch (const aperio::Error& e) {
    return report_error(e.what(), "", aperio::tools::exit_numerical);
  }
}
