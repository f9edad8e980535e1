// Command-line front end: one subcommand per experiment plus `plot`.
//
//   wrcm sweep --config sweep.json --threads 4 --model.beta 2 --grid.beta "[1,2,4]"
//   wrcm sweep --config out/manifest.json --out rerun      (replays a finished run)
//   wrcm plot --csv out/delta_eff.csv --kind delta-eff --out delta_eff.svg
//
// Exit codes: 0 success, 2 configuration or I/O error, 3 numeric failure.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "wrcm/csv.hpp"
#include "wrcm/errors.hpp"
#include "wrcm/experiment.hpp"
#include "wrcm/plot.hpp"

namespace {

struct CommonOptions {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<unsigned> threads;
};

// Remaining arguments are `--a.b value` or `--a.b=value` pairs.
void apply_extras(nlohmann::json& doc, const std::vector<std::string>& extras) {
  for (std::size_t i = 0; i < extras.size(); ++i) {
    const std::string& arg = extras[i];
    if (arg.rfind("--", 0) != 0 || arg.size() < 3)
      throw wrcm::FormatError("unexpected argument '" + arg + "'");
    const auto eq = arg.find('=');
    if (eq != std::string::npos) {
      wrcm::apply_override(doc, arg.substr(2, eq - 2), arg.substr(eq + 1));
    } else {
      if (i + 1 >= extras.size()) throw wrcm::FormatError("override " + arg + " needs a value");
      wrcm::apply_override(doc, arg.substr(2), extras[++i]);
    }
  }
}

int run(const std::string& name, const CommonOptions& opts, const std::vector<std::string>& extras) {
  nlohmann::json doc = nlohmann::json::object();
  if (!opts.config.empty()) {
    const auto parsed = nlohmann::json::parse(wrcm::read_text(opts.config), nullptr, false);
    if (parsed.is_discarded()) throw wrcm::FormatError("config " + opts.config + " is not valid JSON");
    doc = parsed.contains("config") && parsed.contains("version") ? parsed.at("config") : parsed;
  }
  doc["experiment"] = name;
  if (opts.seed) doc["seed"] = *opts.seed;
  if (opts.out) doc["out"] = *opts.out;
  if (opts.threads) doc["threads"] = *opts.threads;
  apply_extras(doc, extras);

  const wrcm::ExperimentConfig cfg = wrcm::config_from_json(doc);
  const wrcm::RunResult result = wrcm::run_experiment(cfg);
  for (const auto& f : result.files) std::cout << f.string() << '\n';
  if (result.failures > 0)
    std::cerr << result.failures << " replica(s) failed; see failures.csv\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simulation and numerics for one-dimensional weight-dependent random connection models"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(wrcm::kToolVersion));

  CommonOptions opts;
  const char* experiments[][2] = {
      {"sample", "sample one graph and report clusters and degrees"},
      {"sweep", "largest-cluster observables over a beta grid"},
      {"delta-eff", "quadrature estimate of the effective decay exponent"},
      {"classify", "closed-form decay exponent and beta_c regime"},
      {"diagnose", "origin crossings, block goodness and conditions A1/A2"},
      {"finite-graph", "largest-component fraction of finite graphs against n"},
  };
  std::vector<CLI::App*> subs;
  for (const auto& [name, help] : experiments) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", opts.config, "JSON config or a run manifest");
    sub->add_option("--seed", opts.seed, "master seed");
    sub->add_option("--out", opts.out, "output directory");
    sub->add_option("--threads", opts.threads, "worker threads")->check(CLI::Range(1u, 1024u));
    sub->allow_extras();
    subs.push_back(sub);
  }

  std::string csv_path, kind, svg_path;
  CLI::App* plot = app.add_subcommand("plot", "render a CSV produced by an experiment as SVG");
  plot->add_option("--csv", csv_path, "input CSV")->required();
  plot->add_option("--kind", kind, "delta-eff, degree, sweep, crossing or finite-graph")->required();
  plot->add_option("--out", svg_path, "output SVG path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (plot->parsed()) {
      wrcm::emit_plot(csv_path, wrcm::parse_plot_kind(kind), svg_path);
      std::cout << svg_path << '\n';
      return 0;
    }
    for (CLI::App* sub : subs)
      if (sub->parsed()) return run(sub->get_name(), opts, sub->remaining());
  } catch (const wrcm::NumericError& e) {
    std::cerr << "numeric error: " << e.what() << " (achieved " << e.achieved() << ")\n";
    return 3;
  } catch (const wrcm::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  }
  return 2;
}
