#include "wrcm/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <set>

#include "wrcm/cluster.hpp"
#include "wrcm/csv.hpp"
#include "wrcm/errors.hpp"
#include "wrcm/multiscale.hpp"
#include "wrcm/parallel.hpp"
#include "wrcm/plot.hpp"
#include "wrcm/stats.hpp"
#include "wrcm/theory.hpp"

namespace wrcm {

using nlohmann::json;

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

std::string fmt(double v) { return format_double(v); }
std::string fmt(std::int64_t v) { return std::to_string(v); }

// Cells must not contain the separator.
std::string cell_text(std::string s) {
  std::replace(s.begin(), s.end(), ',', ';');
  std::replace(s.begin(), s.end(), '\n', ' ');
  return s;
}

void check_keys(const json& j, std::string_view where, std::initializer_list<std::string_view> allowed) {
  if (!j.is_object()) throw FormatError(std::string(where) + " must be a JSON object");
  for (const auto& [key, value] : j.items())
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
      throw FormatError("unknown key '" + key + "' in " + std::string(where));
}

template <class T>
std::vector<T> read_grid(const json& grid, const char* key) {
  if (!grid.contains(key)) return {};
  auto values = grid.at(key).get<std::vector<T>>();
  if (values.empty()) throw FormatError(std::string("grid.") + key + " must not be empty");
  return values;
}

// Output bookkeeping: every file is digested as it is written.
class Recorder {
 public:
  explicit Recorder(std::filesystem::path dir) : dir_(std::move(dir)) {}

  void text(const std::string& name, const std::string& contents) {
    write_text(dir_ / name, contents);
    digests_[name] = fnv1a_hex(contents);
    result_.files.push_back(dir_ / name);
  }
  void csv(const std::string& name, const CsvTable& table) { text(name, to_csv(table)); }
  void document(const std::string& name, const json& j) { text(name, j.dump(2) + "\n"); }
  void plot(const std::string& name, const CsvTable& table, PlotKind kind) {
    text(name, render_plot(table, kind));
  }
  void seed(std::uint64_t grid, std::uint64_t replica, std::uint64_t value) {
    seeds_.push_back({{"grid", grid}, {"replica", replica}, {"seed", value}});
  }
  void timing(const std::string& name, double ms) { timings_[name] = ms; }

  RunResult finish(const ExperimentConfig& cfg, std::int64_t failures, Clock::time_point t0) {
    json config;
    to_json(config, cfg);
    timings_["total_ms"] = ms_since(t0);
    result_.failures = failures;
    result_.manifest = {{"tool", kToolName}, {"version", kToolVersion}, {"config", config},
                        {"seeds", seeds_},   {"timings", timings_},     {"outputs", digests_},
                        {"failures", failures}};
    // Written last: a run without a manifest is incomplete.
    write_text(dir_ / "manifest.json", result_.manifest.dump(2) + "\n");
    result_.files.push_back(dir_ / "manifest.json");
    return std::move(result_);
  }

 private:
  std::filesystem::path dir_;
  RunResult result_;
  json digests_ = json::object();
  json seeds_ = json::array();
  json timings_ = json::object();
};

void prepare_output(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());
  const auto probe = dir / ".write-probe";
  {
    std::ofstream out(probe);
    if (!out) throw IoError("output directory " + dir.string() + " is not writable");
  }
  std::filesystem::remove(probe, ec);
}

std::vector<ModelParams> model_grid(const ExperimentConfig& cfg) {
  const auto kernels = cfg.kernel_grid.empty() ? std::vector{cfg.model.kernel.variant} : cfg.kernel_grid;
  const auto gammas = cfg.gamma_grid.empty() ? std::vector{cfg.model.kernel.gamma} : cfg.gamma_grid;
  const auto deltas = cfg.delta_grid.empty() ? std::vector{cfg.model.profile.delta} : cfg.delta_grid;
  std::vector<ModelParams> grid;
  for (auto k : kernels)
    for (double g : gammas)
      for (double d : deltas) {
        ModelParams m = cfg.model;
        m.kernel = {k, g};
        m.profile.delta = d;
        grid.push_back(m);
      }
  return grid;
}

std::vector<double> windows(const ExperimentConfig& cfg) {
  return cfg.window_grid.empty() ? std::vector{cfg.window} : cfg.window_grid;
}

MarkedConfiguration sample_window(const ExperimentConfig& cfg, double window, std::uint64_t seed) {
  return sample_configuration(cfg.process, window, seed);
}

SamplerKind full_graph_sampler(const ExperimentConfig& cfg) {
  return cfg.sampler == SamplerKind::crossing ? SamplerKind::layered : cfg.sampler;
}

struct TaskFailure {
  std::size_t grid;
  std::int64_t replica;
  std::uint64_t seed;
  std::string message;
};

CsvTable failure_table(const std::vector<TaskFailure>& failures) {
  CsvTable t{{"grid_index", "replica", "seed", "error"}, {}};
  for (const auto& f : failures)
    t.rows.push_back({std::to_string(f.grid), std::to_string(f.replica), std::to_string(f.seed),
                      cell_text(f.message)});
  return t;
}

json proportion_json(const Proportion& p) {
  return {{"successes", p.successes}, {"trials", p.trials}, {"estimate", p.estimate},
          {"lower", p.lower},         {"upper", p.upper}};
}

}  // namespace

std::string_view to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::sample: return "sample";
    case ExperimentKind::sweep: return "sweep";
    case ExperimentKind::delta_eff: return "delta-eff";
    case ExperimentKind::classify: return "classify";
    case ExperimentKind::diagnose: return "diagnose";
    case ExperimentKind::finite_graph: return "finite-graph";
  }
  return "?";
}

ExperimentKind parse_experiment_kind(std::string_view name) {
  for (auto k : {ExperimentKind::sample, ExperimentKind::sweep, ExperimentKind::delta_eff,
                 ExperimentKind::classify, ExperimentKind::diagnose, ExperimentKind::finite_graph})
    if (name == to_string(k)) return k;
  throw ParameterError("unknown experiment '" + std::string(name) + "'");
}

void ExperimentConfig::validate() const {
  model.validate();
  process.validate();
  if (replicas < 1) throw ParameterError("replicas must be at least 1");
  if (threads < 1 || threads > 1024) throw ParameterError("threads must lie in [1, 1024]");
  if (!(window > 0.0)) throw ParameterError("window must be positive");
  if (sampler == SamplerKind::crossing && kind != ExperimentKind::diagnose)
    throw ParameterError("the crossing sampler only serves the diagnose experiment");
  for (const auto& m : model_grid(*this)) {
    m.validate();
    if ((kind == ExperimentKind::delta_eff || kind == ExperimentKind::classify) && !(m.kernel.gamma < 1.0))
      throw ParameterError("theory routines need gamma < 1");
  }
  for (double b : beta_grid)
    if (!(b > 0.0)) throw ParameterError("grid.beta values must be positive");
  for (double w : window_grid)
    if (!(w > 0.0)) throw ParameterError("grid.window values must be positive");
  for (auto n : n_grid)
    if (n < 1) throw ParameterError("grid.n values must be at least 1");
  const auto& d = diagnose;
  if (d.k_max < 1 || d.k_max > kMaxCrossingStage) throw ParameterError("diagnose.k_max must lie in [1, 22]");
  if (d.block_N < 1) throw ParameterError("diagnose.N must be positive");
  if (!(d.theta > 0.0 && d.theta < 1.0)) throw ParameterError("diagnose.theta must lie in (0,1)");
  if (d.blocks < 2) throw ParameterError("diagnose.blocks must be at least 2");
  if (d.K < 2) throw ParameterError("diagnose.K must be at least 2");
  if (!(d.mu > 0.0 && d.mu < 0.5)) throw ParameterError("diagnose.mu must lie in (0, 1/2)");
  if (d.a1_n_max < 2 || d.a1_n_max > 6) throw ParameterError("diagnose.a1_n_max must lie in [2, 6]");
  if (d.a2_n_max < 2 || d.a2_n_max > 60) throw ParameterError("diagnose.a2_n_max must lie in [2, 60]");
}

void to_json(json& j, const ExperimentConfig& cfg) {
  j = json::object();
  j["experiment"] = to_string(cfg.kind);
  j["model"] = cfg.model;
  j["process"] = cfg.process;
  j["sampler"] = to_string(cfg.sampler);
  j["seed"] = cfg.seed;
  j["replicas"] = cfg.replicas;
  j["threads"] = cfg.threads;
  j["out"] = cfg.out.string();
  j["window"] = cfg.window;
  json grid = json::object();
  if (!cfg.kernel_grid.empty()) {
    grid["kernel"] = json::array();
    for (auto k : cfg.kernel_grid) grid["kernel"].push_back(to_string(k));
  }
  if (!cfg.gamma_grid.empty()) grid["gamma"] = cfg.gamma_grid;
  if (!cfg.delta_grid.empty()) grid["delta"] = cfg.delta_grid;
  if (!cfg.beta_grid.empty()) grid["beta"] = cfg.beta_grid;
  if (!cfg.window_grid.empty()) grid["window"] = cfg.window_grid;
  if (!cfg.n_grid.empty()) grid["n"] = cfg.n_grid;
  if (!cfg.delta_eff_n_grid.empty()) grid["delta_eff_n"] = cfg.delta_eff_n_grid;
  j["grid"] = grid;
  const auto& d = cfg.diagnose;
  j["diagnose"] = {{"k_max", d.k_max}, {"N", d.block_N},   {"theta", d.theta},
                   {"blocks", d.blocks}, {"K", d.K},       {"mu", d.mu},
                   {"a1_n_max", d.a1_n_max}, {"a2_n_max", d.a2_n_max}};
  j["timings"] = cfg.timings;
  j["plot"] = cfg.plot;
}

ExperimentConfig config_from_json(const json& input) {
  const json& given = input.contains("config") && input.contains("version") ? input.at("config") : input;
  check_keys(given, "config",
             {"experiment", "model", "process", "sampler", "seed", "replicas", "threads", "out",
              "window", "grid", "diagnose", "timings", "plot"});
  // Partial documents (a lone model.beta, say) are completed from the defaults.
  json j;
  to_json(j, ExperimentConfig{});
  j.merge_patch(given);
  ExperimentConfig cfg;
  if (j.contains("experiment")) cfg.kind = parse_experiment_kind(j.at("experiment").get<std::string>());
  if (j.contains("model")) {
    check_keys(j.at("model"), "model", {"kernel", "profile", "beta"});
    cfg.model = j.at("model").get<ModelParams>();
  }
  if (j.contains("process")) {
    check_keys(j.at("process"), "process", {"kind", "intensity", "retention"});
    cfg.process = j.at("process").get<PointProcessSpec>();
  }
  if (j.contains("sampler")) cfg.sampler = parse_sampler_kind(j.at("sampler").get<std::string>());
  cfg.seed = j.value("seed", cfg.seed);
  cfg.replicas = j.value("replicas", cfg.replicas);
  cfg.threads = j.value("threads", cfg.threads);
  if (j.contains("out")) cfg.out = j.at("out").get<std::string>();
  cfg.window = j.value("window", cfg.window);
  if (j.contains("grid")) {
    const json& g = j.at("grid");
    check_keys(g, "grid", {"kernel", "gamma", "delta", "beta", "window", "n", "delta_eff_n"});
    for (const auto& name : read_grid<std::string>(g, "kernel"))
      cfg.kernel_grid.push_back(parse_kernel_variant(name));
    cfg.gamma_grid = read_grid<double>(g, "gamma");
    cfg.delta_grid = read_grid<double>(g, "delta");
    cfg.beta_grid = read_grid<double>(g, "beta");
    cfg.window_grid = read_grid<double>(g, "window");
    cfg.n_grid = read_grid<std::int64_t>(g, "n");
    cfg.delta_eff_n_grid = read_grid<double>(g, "delta_eff_n");
  }
  if (j.contains("diagnose")) {
    const json& d = j.at("diagnose");
    check_keys(d, "diagnose", {"k_max", "N", "theta", "blocks", "K", "mu", "a1_n_max", "a2_n_max"});
    auto& o = cfg.diagnose;
    o.k_max = d.value("k_max", o.k_max);
    o.block_N = d.value("N", o.block_N);
    o.theta = d.value("theta", o.theta);
    o.blocks = d.value("blocks", o.blocks);
    o.K = d.value("K", o.K);
    o.mu = d.value("mu", o.mu);
    o.a1_n_max = d.value("a1_n_max", o.a1_n_max);
    o.a2_n_max = d.value("a2_n_max", o.a2_n_max);
  }
  cfg.timings = j.value("timings", cfg.timings);
  cfg.plot = j.value("plot", cfg.plot);
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  const std::string text = read_text(path);
  const json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) throw FormatError("config " + path.string() + " is not valid JSON");
  return config_from_json(j);
}

void apply_override(json& doc, std::string_view dotted, std::string_view value) {
  if (dotted.empty()) throw FormatError("empty override key");
  json* node = &doc;
  std::size_t start = 0;
  while (true) {
    const auto dot = dotted.find('.', start);
    const std::string key(dotted.substr(start, dot - start));
    if (key.empty()) throw FormatError("malformed override key '" + std::string(dotted) + "'");
    if (!node->is_object()) *node = json::object();
    node = &(*node)[key];
    if (dot == std::string_view::npos) break;
    start = dot + 1;
  }
  json parsed = json::parse(value, nullptr, false);
  *node = parsed.is_discarded() ? json(std::string(value)) : parsed;
}

double pseudo_critical_beta(const std::vector<double>& betas, const std::vector<double>& fractions) {
  if (betas.size() != fractions.size()) throw ParameterError("beta and fraction lists differ in length");
  for (std::size_t i = 0; i < betas.size(); ++i) {
    if (i > 0 && !(betas[i] > betas[i - 1])) throw ParameterError("betas must increase");
    if (fractions[i] > 0.5) {
      if (i == 0) return betas[0];
      const double w = (0.5 - fractions[i - 1]) / (fractions[i] - fractions[i - 1]);
      return betas[i - 1] + w * (betas[i] - betas[i - 1]);
    }
  }
  return std::numeric_limits<double>::quiet_NaN();
}

RunResult run_sample(const ExperimentConfig& cfg) {
  cfg.validate();
  prepare_output(cfg.out);
  const auto t0 = Clock::now();
  Recorder rec(cfg.out);
  const std::uint64_t seed = replica_seed(cfg.seed, 0, 0);
  rec.seed(0, 0, seed);
  auto config = std::make_shared<const MarkedConfiguration>(sample_window(cfg, cfg.window, seed));
  const GraphSample graph = sample_edges(config, cfg.model, seed, full_graph_sampler(cfg));
  rec.timing("sample_ms", ms_since(t0));
  const ClusterReport clusters = components(graph);
  const DegreeReport deg = degree_report(graph);

  CsvTable vertices{{"index", "location", "mark"}, {}};
  for (const auto& v : config->vertices())
    vertices.rows.push_back({fmt(v.index), fmt(v.location), fmt(v.mark)});
  CsvTable edges{{"i", "j"}, {}};
  for (const auto& [i, j] : graph.edges) edges.rows.push_back({fmt(i), fmt(j)});
  CsvTable degree{{"degree", "count"}, {}};
  for (const auto& [d, c] : deg.histogram) degree.rows.push_back({fmt(d), fmt(c)});
  rec.csv("vertices.csv", vertices);
  rec.csv("edges.csv", edges);
  rec.csv("degree.csv", degree);
  rec.document("summary.json",
               {{"n_vertices", graph.vertex_count()},
                {"n_edges", graph.edges.size()},
                {"largest", clusters.largest},
                {"largest_fraction", clusters.largest_fraction},
                {"root_size", clusters.root_component_size},
                {"reaches_boundary", clusters.root_reaches_boundary},
                {"mean_degree", deg.mean_degree},
                {"tail_index", deg.tail_index_estimate},
                {"tail_points", deg.tail_points},
                {"tail_reliable", deg.tail_reliable},
                {"tau_target", std::isfinite(deg.tau_target) ? json(deg.tau_target) : json(nullptr)}});
  if (cfg.plot && deg.histogram.size() > 1) rec.plot("degree.svg", degree, PlotKind::degree);
  return rec.finish(cfg, 0, t0);
}

RunResult run_sweep(const ExperimentConfig& cfg) {
  cfg.validate();
  prepare_output(cfg.out);
  const auto t0 = Clock::now();
  Recorder rec(cfg.out);

  struct Point {
    double window;
    ModelParams model;
  };
  std::vector<Point> points;
  const auto models = model_grid(cfg);
  const auto betas = cfg.beta_grid.empty() ? std::vector{cfg.model.beta} : cfg.beta_grid;
  for (double w : windows(cfg))
    for (const auto& m : models)
      for (double b : betas) {
        ModelParams mb = m;
        mb.beta = b;
        points.push_back({w, mb});
      }

  struct Outcome {
    bool ok = false;
    std::string error;
    std::size_t n_vertices = 0, n_edges = 0;
    ClusterReport clusters;
    double ms = 0.0;
  };
  const auto reps = static_cast<std::size_t>(cfg.replicas);
  std::vector<Outcome> outcomes(points.size() * reps);
  parallel_for(outcomes.size(), cfg.threads, [&](std::size_t task) {
    const std::size_t g = task / reps, r = task % reps;
    Outcome& o = outcomes[task];
    const auto start = Clock::now();
    try {
      const std::uint64_t seed = replica_seed(cfg.seed, g, r);
      auto config = std::make_shared<const MarkedConfiguration>(sample_window(cfg, points[g].window, seed));
      const GraphSample graph = sample_edges(config, points[g].model, seed, cfg.sampler);
      o.clusters = components(graph);
      o.n_vertices = graph.vertex_count();
      o.n_edges = graph.edges.size();
      o.ok = true;
    } catch (const Error& e) {
      o.error = e.what();
    }
    o.ms = ms_since(start);
  });

  CsvTable table{{"beta", "gamma", "delta", "kernel", "profile", "seed", "L_or_n", "n_vertices",
                  "n_edges", "largest", "largest_fraction", "root_size", "reaches_boundary",
                  "runtime_ms"},
                 {}};
  std::vector<TaskFailure> failures;
  // Mean largest fraction per point, for the pseudo-critical beta.
  std::vector<double> mean_fraction(points.size(), 0.0);
  std::vector<int> ok_count(points.size(), 0);
  for (std::size_t task = 0; task < outcomes.size(); ++task) {
    const std::size_t g = task / reps, r = task % reps;
    const std::uint64_t seed = replica_seed(cfg.seed, g, r);
    rec.seed(g, r, seed);
    const Outcome& o = outcomes[task];
    if (!o.ok) {
      failures.push_back({g, static_cast<std::int64_t>(r), seed, o.error});
      continue;
    }
    const auto& m = points[g].model;
    table.rows.push_back({fmt(m.beta), fmt(m.kernel.gamma), fmt(m.profile.delta),
                          std::string(to_string(m.kernel.variant)),
                          std::string(to_string(m.profile.variant)), std::to_string(seed),
                          fmt(points[g].window), std::to_string(o.n_vertices),
                          std::to_string(o.n_edges), fmt(o.clusters.largest),
                          fmt(o.clusters.largest_fraction), fmt(o.clusters.root_component_size),
                          o.clusters.root_reaches_boundary ? "1" : "0",
                          cfg.timings ? fmt(o.ms) : std::string()});
    mean_fraction[g] += o.clusters.largest_fraction;
    ++ok_count[g];
  }
  rec.csv("cluster.csv", table);

  CsvTable hat{{"kernel", "gamma", "delta", "profile", "L_or_n", "beta_hat"}, {}};
  const std::size_t per_block = betas.size();
  for (std::size_t block = 0; block < points.size() / per_block; ++block) {
    std::vector<double> bs, fs;
    for (std::size_t b = 0; b < per_block; ++b) {
      const std::size_t g = block * per_block + b;
      if (ok_count[g] == 0) continue;
      bs.push_back(points[g].model.beta);
      fs.push_back(mean_fraction[g] / ok_count[g]);
    }
    std::vector<std::size_t> order(bs.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return bs[a] < bs[b]; });
    std::vector<double> sb, sf;
    for (auto i : order) {
      if (!sb.empty() && bs[i] == sb.back()) continue;
      sb.push_back(bs[i]);
      sf.push_back(fs[i]);
    }
    const double bh = sb.empty() ? std::numeric_limits<double>::quiet_NaN() : pseudo_critical_beta(sb, sf);
    const auto& p = points[block * per_block];
    hat.rows.push_back({std::string(to_string(p.model.kernel.variant)), fmt(p.model.kernel.gamma),
                        fmt(p.model.profile.delta), std::string(to_string(p.model.profile.variant)),
                        fmt(p.window), std::isnan(bh) ? std::string() : fmt(bh)});
  }
  rec.csv("beta_hat.csv", hat);
  if (!failures.empty()) rec.csv("failures.csv", failure_table(failures));
  if (cfg.plot && !table.rows.empty()) rec.plot("sweep.svg", table, PlotKind::sweep);
  return rec.finish(cfg, static_cast<std::int64_t>(failures.size()), t0);
}

RunResult run_finite_graph(const ExperimentConfig& cfg) {
  cfg.validate();
  prepare_output(cfg.out);
  const auto t0 = Clock::now();
  Recorder rec(cfg.out);
  const std::vector<std::int64_t> sizes =
      cfg.n_grid.empty() ? std::vector<std::int64_t>{static_cast<std::int64_t>(cfg.window)} : cfg.n_grid;
  const auto reps = static_cast<std::size_t>(cfg.replicas);
  struct Outcome {
    bool ok = false;
    std::string error;
    std::size_t n_edges = 0;
    std::int64_t largest = 0;
    double fraction = 0.0, ms = 0.0;
  };
  std::vector<Outcome> outcomes(sizes.size() * reps);
  parallel_for(outcomes.size(), cfg.threads, [&](std::size_t task) {
    const std::size_t g = task / reps, r = task % reps;
    Outcome& o = outcomes[task];
    const auto start = Clock::now();
    try {
      const GraphSample graph =
          sample_finite_graph(sizes[g], cfg.model, replica_seed(cfg.seed, g, r), cfg.sampler);
      const ClusterReport c = components(graph);
      o.n_edges = graph.edges.size();
      o.largest = c.largest;
      o.fraction = c.largest_fraction;
      o.ok = true;
    } catch (const Error& e) {
      o.error = e.what();
    }
    o.ms = ms_since(start);
  });

  CsvTable rows{{"n", "replica", "seed", "n_edges", "largest", "largest_fraction", "runtime_ms"}, {}};
  CsvTable summary{{"n", "replicas", "median_fraction", "ci_low", "ci_high", "mean_fraction"}, {}};
  std::vector<TaskFailure> failures;
  for (std::size_t g = 0; g < sizes.size(); ++g) {
    std::vector<double> fractions;
    for (std::size_t r = 0; r < reps; ++r) {
      const std::uint64_t seed = replica_seed(cfg.seed, g, r);
      rec.seed(g, r, seed);
      const Outcome& o = outcomes[g * reps + r];
      if (!o.ok) {
        failures.push_back({g, static_cast<std::int64_t>(r), seed, o.error});
        continue;
      }
      rows.rows.push_back({fmt(sizes[g]), std::to_string(r), std::to_string(seed),
                           std::to_string(o.n_edges), fmt(o.largest), fmt(o.fraction),
                           cfg.timings ? fmt(o.ms) : std::string()});
      fractions.push_back(o.fraction);
    }
    if (fractions.empty()) continue;
    const auto [lo, hi] = median_interval(fractions);
    summary.rows.push_back({fmt(sizes[g]), std::to_string(fractions.size()), fmt(median(fractions)),
                            fmt(lo), fmt(hi), fmt(mean(fractions))});
  }
  rec.csv("finite_graph.csv", rows);
  rec.csv("finite_summary.csv", summary);
  if (!failures.empty()) rec.csv("failures.csv", failure_table(failures));
  if (cfg.plot && !summary.rows.empty()) rec.plot("finite_graph.svg", summary, PlotKind::finite_graph);
  return rec.finish(cfg, static_cast<std::int64_t>(failures.size()), t0);
}

RunResult run_delta_eff(const ExperimentConfig& cfg) {
  cfg.validate();
  prepare_output(cfg.out);
  const auto t0 = Clock::now();
  Recorder rec(cfg.out);
  const auto models = model_grid(cfg);
  const auto grid = cfg.delta_eff_n_grid.empty() ? default_n_grid() : cfg.delta_eff_n_grid;
  std::vector<DeltaEffReport> reports(models.size());
  parallel_for(models.size(), cfg.threads, [&](std::size_t i) {
    reports[i] = delta_eff_estimate(models[i].kernel, models[i].profile, grid);
  });
  CsvTable table{{"kernel", "gamma", "delta", "n", "I_n"}, {}};
  json out = json::array();
  for (std::size_t i = 0; i < models.size(); ++i) {
    const auto& m = models[i];
    const auto& r = reports[i];
    const std::string kernel(to_string(m.kernel.variant));
    for (std::size_t p = 0; p < r.n_grid.size(); ++p)
      table.rows.push_back({kernel, fmt(m.kernel.gamma), fmt(m.profile.delta), fmt(r.n_grid[p]),
                            fmt(r.I_values[p])});
    const RegimeLabel label = classify_regime(m.kernel.variant, m.profile.delta, m.kernel.gamma);
    out.push_back({{"kernel", kernel},
                   {"gamma", m.kernel.gamma},
                   {"delta", m.profile.delta},
                   {"profile", to_string(m.profile.variant)},
                   {"delta_eff", r.delta_eff},
                   {"closed_form", r.closed_form ? json(*r.closed_form) : json(nullptr)},
                   {"residual", r.residual},
                   {"label", to_string(label.label)},
                   {"provenance", label.provenance},
                   {"warnings", r.warnings}});
  }
  rec.csv("delta_eff.csv", table);
  rec.document("delta_eff.json", out);
  if (cfg.plot) rec.plot("delta_eff.svg", table, PlotKind::delta_eff);
  return rec.finish(cfg, 0, t0);
}

RunResult run_classify(const ExperimentConfig& cfg) {
  cfg.validate();
  prepare_output(cfg.out);
  const auto t0 = Clock::now();
  Recorder rec(cfg.out);
  CsvTable table{{"kernel", "gamma", "delta", "delta_eff_closed_form", "label", "provenance"}, {}};
  json out = json::array();
  for (const auto& m : model_grid(cfg)) {
    const auto cf = delta_eff_closed_form(m.kernel.variant, m.profile.delta, m.kernel.gamma);
    const auto label = classify_regime(m.kernel.variant, m.profile.delta, m.kernel.gamma);
    const std::string kernel(to_string(m.kernel.variant));
    table.rows.push_back({kernel, fmt(m.kernel.gamma), fmt(m.profile.delta), cf ? fmt(*cf) : std::string(),
                          std::string(to_string(label.label)), cell_text(label.provenance)});
    out.push_back({{"kernel", kernel},
                   {"gamma", m.kernel.gamma},
                   {"delta", m.profile.delta},
                   {"delta_eff_closed_form", cf ? json(*cf) : json(nullptr)},
                   {"label", to_string(label.label)},
                   {"provenance", label.provenance}});
  }
  rec.csv("classify.csv", table);
  rec.document("classify.json", out);
  return rec.finish(cfg, 0, t0);
}

RunResult run_diagnose(const ExperimentConfig& cfg) {
  cfg.validate();
  prepare_output(cfg.out);
  const auto t0 = Clock::now();
  Recorder rec(cfg.out);
  const auto& d = cfg.diagnose;
  json report = json::object();

  const CrossingReport crossing =
      crossing_sweep(cfg.model, cfg.process, d.k_max, cfg.replicas, cfg.seed, cfg.threads);
  for (std::int64_t r = 0; r < cfg.replicas; ++r)
    rec.seed(0, static_cast<std::uint64_t>(r), replica_seed(cfg.seed, 0, static_cast<std::uint64_t>(r)));
  rec.timing("crossing_ms", ms_since(t0));
  CsvTable chi{{"stage", "chi_freq", "ci_low", "ci_high"}, {}};
  std::vector<int> stages;
  std::vector<std::int64_t> hits, trials;
  for (const auto& s : crossing.stages) {
    chi.rows.push_back({std::to_string(s.k), fmt(s.probability.estimate), fmt(s.probability.lower),
                        fmt(s.probability.upper)});
    if (s.k >= std::max(2, d.k_max / 2)) {
      stages.push_back(s.k);
      hits.push_back(s.probability.successes);
      trials.push_back(s.probability.trials);
    }
  }
  rec.csv("crossing.csv", chi);
  report["no_crossing"] = proportion_json(crossing.no_crossing);
  if (stages.size() >= 2 && std::any_of(hits.begin(), hits.end(), [](auto h) { return h > 0; })) {
    const DecayFit fit = fit_binomial_decay(stages, hits, trials);
    report["decay_fit"] = {{"first_stage", stages.front()}, {"last_stage", stages.back()},
                           {"rate", fit.rate},          {"rate_stderr", fit.rate_stderr},
                           {"lower95", fit.lower95},    {"upper95", fit.upper95},
                           {"converged", fit.converged}};
  }

  // Goodness of the blocks i = -blocks/2 .. blocks/2 - 1 in one sample.
  const auto t_blocks = Clock::now();
  const std::int64_t half = d.blocks / 2;
  const std::int64_t i_first = -half, i_last = d.blocks - half - 1;
  const std::int64_t per_side = d.block_N * (std::max(half, i_last + 1) + 1);
  const std::uint64_t block_seed = derive_seed(cfg.seed, 3);
  auto config = std::make_shared<const MarkedConfiguration>(
      sample_configuration_by_count(cfg.process, per_side, block_seed));
  const GraphSample graph = sample_edges(config, cfg.model, block_seed, full_graph_sampler(cfg));
  const BlockReport blocks = block_goodness(graph, d.block_N, d.theta, i_first, i_last);
  CsvTable block_table{{"scale", "block_index", "first", "last", "largest", "is_good"}, {}};
  for (const auto& b : blocks.blocks)
    block_table.rows.push_back({fmt(d.block_N), fmt(b.block.i), fmt(b.block.first), fmt(b.block.last),
                                fmt(b.largest), b.good ? "1" : "0"});
  rec.csv("blocks.csv", block_table);
  const Proportion p_bad = block_bad_probability(cfg.model, cfg.process, d.block_N, d.theta,
                                                 cfg.replicas, derive_seed(cfg.seed, 4), cfg.threads);
  report["blocks"] = {{"N", d.block_N}, {"theta", d.theta}, {"bad_fraction", blocks.bad_fraction},
                      {"empirical_p_bad", proportion_json(p_bad)}};
  rec.timing("blocks_ms", ms_since(t_blocks));

  const A1Sequence a1 = condition_A1_sequence(cfg.model.kernel, cfg.model.profile, d.K, d.mu, d.a1_n_max);
  report["a1"] = {{"K", d.K}, {"mu", d.mu}, {"n", a1.n}, {"values", a1.values},
                  {"exponents", a1.exponents}, {"underflow", a1.underflow}};
  const A2Series a2 = condition_A2_partial_sums(cfg.model.kernel, cfg.model.profile, d.mu, d.a2_n_max);
  report["a2"] = {{"mu", d.mu},
                  {"terms", a2.terms},
                  {"partial_sums", a2.partial_sums},
                  {"tail_ratio", a2.tail_ratio},
                  {"converging", a2.converging},
                  {"rho_zero_below_one", a2.rho_zero_below_one}};
  rec.document("diagnose.json", report);
  if (cfg.plot) rec.plot("crossing.svg", chi, PlotKind::crossing);
  return rec.finish(cfg, 0, t0);
}

RunResult run_experiment(const ExperimentConfig& cfg) {
  switch (cfg.kind) {
    case ExperimentKind::sample: return run_sample(cfg);
    case ExperimentKind::sweep: return run_sweep(cfg);
    case ExperimentKind::delta_eff: return run_delta_eff(cfg);
    case ExperimentKind::classify: return run_classify(cfg);
    case ExperimentKind::diagnose: return run_diagnose(cfg);
    case ExperimentKind::finite_graph: return run_finite_graph(cfg);
  }
  throw ParameterError("unknown experiment kind");
}

}  // namespace wrcm
