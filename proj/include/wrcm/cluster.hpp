#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "wrcm/graph_sampler.hpp"
#include "wrcm/rng.hpp"
#include "wrcm/stats.hpp"

namespace wrcm {

/// Union-find with path compression and union by size. Each set also tracks its
/// smallest element, which serves as the deterministic representative.
class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n);
  std::size_t find(std::size_t x) noexcept;
  /// Returns true when x and y were in different sets.
  bool unite(std::size_t x, std::size_t y) noexcept;
  std::size_t set_size(std::size_t x) noexcept { return size_[find(x)]; }
  std::size_t representative(std::size_t x) noexcept { return smallest_[find(x)]; }

 private:
  std::vector<std::size_t> parent_;
  std::vector<std::size_t> size_;
  std::vector<std::size_t> smallest_;
};

struct ClusterReport {
  std::vector<std::int64_t> component_sizes;  ///< descending
  std::int64_t largest = 0;
  double largest_fraction = 0.0;
  std::int64_t root_component_size = 0;  ///< 0 when the configuration has no root
  bool root_reaches_boundary = false;    ///< root cluster meets the outer 5% of the window
};

ClusterReport components(const GraphSample& graph);

/// Vertex indices of the largest component of the subgraph induced on
/// [first, last]; ties go to the component with the smallest member.
std::vector<std::int64_t> largest_induced_component(const GraphSample& graph, std::int64_t first,
                                                    std::int64_t last);

/// Fraction of replicas whose root cluster reaches the outer 5% of [-L, L],
/// with a Wilson 95% interval. Replica seeds are derive_seed(master, replica, r).
Proportion theta_estimate(const ModelParams& params, const PointProcessSpec& pp, double L,
                          std::int64_t replicas, std::uint64_t master_seed, unsigned threads = 1,
                          SamplerKind sampler = SamplerKind::layered);

struct DegreeReport {
  std::map<std::int64_t, std::int64_t> histogram;
  double mean_degree = 0.0;
  double tail_index_estimate = 0.0;
  std::size_t tail_points = 0;
  bool tail_reliable = false;
  double tau_target = 0.0;  ///< 1 + 1/gamma; infinity for gamma == 0
};

/// Degree histogram and Hill estimate over the top `tail_fraction` of degrees.
DegreeReport degree_report(const GraphSample& graph, double tail_fraction = 0.05);

std::vector<std::int64_t> degrees(const GraphSample& graph);

/// Seed of replica r under a master seed.
inline std::uint64_t replica_seed(std::uint64_t master, std::uint64_t grid_index, std::uint64_t replica) {
  return derive_seed(master, grid_index, replica);
}

}  // namespace wrcm
