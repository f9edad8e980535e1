#include "wrcm/cluster.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "wrcm/errors.hpp"
#include "wrcm/parallel.hpp"
#include "wrcm/rng.hpp"

namespace wrcm {

DisjointSets::DisjointSets(std::size_t n) : parent_(n), size_(n, 1), smallest_(n) {
  std::iota(parent_.begin(), parent_.end(), std::size_t{0});
  std::iota(smallest_.begin(), smallest_.end(), std::size_t{0});
}

std::size_t DisjointSets::find(std::size_t x) noexcept {
  std::size_t root = x;
  while (parent_[root] != root) root = parent_[root];
  while (parent_[x] != root) {
    const std::size_t next = parent_[x];
    parent_[x] = root;
    x = next;
  }
  return root;
}

bool DisjointSets::unite(std::size_t x, std::size_t y) noexcept {
  x = find(x);
  y = find(y);
  if (x == y) return false;
  if (size_[x] < size_[y]) std::swap(x, y);
  parent_[y] = x;
  size_[x] += size_[y];
  smallest_[x] = std::min(smallest_[x], smallest_[y]);
  return true;
}

ClusterReport components(const GraphSample& graph) {
  const MarkedConfiguration& cfg = *graph.config;
  const std::int64_t base = cfg.first_index();
  DisjointSets sets(cfg.size());
  for (const auto& [i, j] : graph.edges) {
    sets.unite(static_cast<std::size_t>(i - base), static_cast<std::size_t>(j - base));
  }
  ClusterReport report;
  for (std::size_t p = 0; p < cfg.size(); ++p) {
    if (sets.find(p) == p) report.component_sizes.push_back(static_cast<std::int64_t>(sets.set_size(p)));
  }
  std::sort(report.component_sizes.begin(), report.component_sizes.end(), std::greater<>());
  report.largest = report.component_sizes.front();
  report.largest_fraction = static_cast<double>(report.largest) / static_cast<double>(cfg.size());

  if (const auto root = cfg.root_index()) {
    const std::size_t root_pos = cfg.position(*root);
    report.root_component_size = static_cast<std::int64_t>(sets.set_size(root_pos));
    const double edge_zone = 0.95 * cfg.halfwidth();
    const std::size_t root_set = sets.find(root_pos);
    const auto vertices = cfg.vertices();
    for (std::size_t p = 0; p < vertices.size(); ++p) {
      if (std::abs(vertices[p].location) >= edge_zone && sets.find(p) == root_set) {
        report.root_reaches_boundary = true;
        break;
      }
    }
  }
  return report;
}

std::vector<std::int64_t> largest_induced_component(const GraphSample& graph, std::int64_t first,
                                                    std::int64_t last) {
  const MarkedConfiguration& cfg = *graph.config;
  cfg.at(first);
  cfg.at(last);
  const auto n = static_cast<std::size_t>(last - first + 1);
  DisjointSets sets(n);
  auto it = std::lower_bound(graph.edges.begin(), graph.edges.end(), Edge{first, first});
  for (; it != graph.edges.end() && it->first <= last; ++it) {
    if (it->second <= last) {
      sets.unite(static_cast<std::size_t>(it->first - first), static_cast<std::size_t>(it->second - first));
    }
  }
  std::size_t best = 0;
  for (std::size_t p = 1; p < n; ++p) {
    if (sets.set_size(p) > sets.set_size(best)) best = p;
  }
  const std::size_t best_set = sets.find(best);
  std::vector<std::int64_t> members;
  for (std::size_t p = 0; p < n; ++p) {
    if (sets.find(p) == best_set) members.push_back(first + static_cast<std::int64_t>(p));
  }
  return members;
}

Proportion theta_estimate(const ModelParams& params, const PointProcessSpec& pp, double L,
                          std::int64_t replicas, std::uint64_t master_seed, unsigned threads,
                          SamplerKind sampler) {
  if (replicas < 1) throw ParameterError("theta estimate needs at least one replica");
  params.validate();
  pp.validate();
  std::vector<char> reached(static_cast<std::size_t>(replicas), 0);
  parallel_for(reached.size(), threads, [&](std::size_t r) {
    const std::uint64_t seed = replica_seed(master_seed, 0, r);
    auto cfg = std::make_shared<const MarkedConfiguration>(sample_configuration(pp, L, seed));
    const GraphSample graph = sample_edges(std::move(cfg), params, seed, sampler);
    reached[r] = components(graph).root_reaches_boundary ? 1 : 0;
  });
  const auto hits = std::count(reached.begin(), reached.end(), char{1});
  return wilson_interval(hits, replicas);
}

std::vector<std::int64_t> degrees(const GraphSample& graph) {
  const std::int64_t base = graph.config->first_index();
  std::vector<std::int64_t> deg(graph.vertex_count(), 0);
  for (const auto& [i, j] : graph.edges) {
    ++deg[static_cast<std::size_t>(i - base)];
    ++deg[static_cast<std::size_t>(j - base)];
  }
  return deg;
}

DegreeReport degree_report(const GraphSample& graph, double tail_fraction) {
  if (!(tail_fraction > 0.0 && tail_fraction <= 0.2)) {
    throw ParameterError("degree tail fraction must lie in (0, 0.2]");
  }
  DegreeReport report;
  const auto deg = degrees(graph);
  std::vector<double> values;
  values.reserve(deg.size());
  for (std::int64_t d : deg) {
    ++report.histogram[d];
    values.push_back(static_cast<double>(d));
  }
  report.mean_degree = 2.0 * static_cast<double>(graph.edges.size()) / static_cast<double>(deg.size());
  const HillEstimate hill = hill_estimator(std::move(values), tail_fraction);
  report.tail_index_estimate = hill.tail_index;
  report.tail_points = hill.tail_points;
  report.tail_reliable = hill.reliable;
  const double gamma = graph.params.kernel.gamma;
  report.tau_target = gamma > 0.0 ? 1.0 + 1.0 / gamma : std::numeric_limits<double>::infinity();
  return report;
}

}  // namespace wrcm
