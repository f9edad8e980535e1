#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "wrcm/graph_sampler.hpp"
#include "wrcm/kernels.hpp"
#include "wrcm/point_process.hpp"

namespace wrcm {

inline constexpr std::string_view kToolName = "wrcm";
inline constexpr std::string_view kToolVersion = "0.1.0";

enum class ExperimentKind { sample, sweep, delta_eff, classify, diagnose, finite_graph };

std::string_view to_string(ExperimentKind kind);
ExperimentKind parse_experiment_kind(std::string_view name);

struct DiagnoseOptions {
  int k_max = 12;  ///< crossing stages 1..k_max
  std::int64_t block_N = 64;
  double theta = 0.75;
  std::int64_t blocks = 8;  ///< blocks i = -blocks/2 .. blocks/2 - 1 of one sample
  std::int64_t K = 10;  ///< base scale for the A1 sequence
  double mu = 0.1;
  int a1_n_max = 6;
  int a2_n_max = 40;
};

/// One run: every output is a function of this document alone.
/// Empty grids fall back to the scalar value in `model` / `window`.
struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::sample;
  ModelParams model;
  PointProcessSpec process;
  SamplerKind sampler = SamplerKind::layered;
  std::uint64_t seed = 1;
  std::int64_t replicas = 1;
  unsigned threads = 1;
  std::filesystem::path out = "out";
  double window = 1000.0;  ///< L for poisson processes, per-side count for lattices

  std::vector<KernelVariant> kernel_grid;
  std::vector<double> gamma_grid;
  std::vector<double> delta_grid;
  std::vector<double> beta_grid;
  std::vector<double> window_grid;
  std::vector<std::int64_t> n_grid;  ///< finite-graph sizes
  std::vector<double> delta_eff_n_grid;  ///< empty: default_n_grid()

  DiagnoseOptions diagnose;
  bool timings = false;  ///< fill the runtime_ms column (breaks byte-identical reruns)
  bool plot = false;  ///< also emit SVG plots next to the CSVs

  void validate() const;
};

void to_json(nlohmann::json& j, const ExperimentConfig& cfg);
/// Accepts a bare config or a run manifest (whose "config" member is used).
/// Throws FormatError on unknown keys or empty grids.
ExperimentConfig config_from_json(const nlohmann::json& j);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Sets the member named by a dotted path (`model.beta`, `grid.beta`) to
/// `value`, parsed as JSON when possible and taken as a string otherwise.
void apply_override(nlohmann::json& doc, std::string_view dotted, std::string_view value);

struct RunResult {
  std::vector<std::filesystem::path> files;  ///< in write order; the manifest is last
  nlohmann::json manifest;
  std::int64_t failures = 0;  ///< replicas that raised and were skipped
};

/// Runs the experiment named by cfg.kind. The output directory is checked for
/// writability before any sampling; manifest.json is written last.
RunResult run_experiment(const ExperimentConfig& cfg);

RunResult run_sample(const ExperimentConfig& cfg);
RunResult run_sweep(const ExperimentConfig& cfg);
RunResult run_finite_graph(const ExperimentConfig& cfg);
RunResult run_delta_eff(const ExperimentConfig& cfg);
RunResult run_classify(const ExperimentConfig& cfg);
RunResult run_diagnose(const ExperimentConfig& cfg);

/// Linear interpolation of the first beta at which the mean largest fraction
/// exceeds 1/2; NaN when it never does. Betas must increase.
double pseudo_critical_beta(const std::vector<double>& betas, const std::vector<double>& fractions);

}  // namespace wrcm
