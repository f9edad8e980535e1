#pragma once

#include <cstdint>
#include <memory>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "wrcm/kernels.hpp"
#include "wrcm/point_process.hpp"

namespace wrcm {

/// naive: all pairs against their edge marks; layered: mark-layer envelope walk;
/// crossing: only the edges joining negative to non-negative indices.
enum class SamplerKind { naive, layered, crossing };

using Edge = std::pair<std::int64_t, std::int64_t>;

/// Edge set of G_beta over a configuration. Edges are index pairs (i < j),
/// lexicographically sorted, without duplicates.
struct GraphSample {
  std::shared_ptr<const MarkedConfiguration> config;
  std::vector<Edge> edges;
  ModelParams params;
  std::uint64_t seed = 0;
  SamplerKind sampler = SamplerKind::naive;

  std::size_t vertex_count() const noexcept { return config->size(); }
  bool has_edge(std::int64_t i, std::int64_t j) const;
};

/// Edge mark U_{i,j}: stateless, symmetric in (i, j), uniform on (0,1).
/// Throws DomainError when i == j.
double pair_uniform(std::uint64_t seed, std::int64_t i, std::int64_t j);

/// Reference O(N^2) sampler: {i,j} present iff pair_uniform(seed,i,j) <= p_ij.
GraphSample sample_edges_naive(std::shared_ptr<const MarkedConfiguration> cfg,
                               const ModelParams& params, std::uint64_t seed);

/// Same distribution as the naive sampler. Marks are bucketed into dyadic layers
/// (2^-a-1, 2^-a]; each vertex walks every layer to its right through dyadic
/// distance bins, skipping geometrically under the envelope rho evaluated at the
/// layer lower endpoints and the bin's inner radius, then thinning.
GraphSample sample_edges_layered(std::shared_ptr<const MarkedConfiguration> cfg,
                                 const ModelParams& params, std::uint64_t seed);

/// Edges between indices [-left_count, -1] and [0, right_count - 1] only, with the
/// law of the corresponding edges of the full graph. Index-dyadic blocks on each
/// side are paired with mark layers, and each block-layer product set is walked
/// with geometric skips.
GraphSample sample_crossing_edges(std::shared_ptr<const MarkedConfiguration> cfg,
                                  const ModelParams& params, std::uint64_t seed,
                                  std::int64_t left_count, std::int64_t right_count);

GraphSample sample_edges(std::shared_ptr<const MarkedConfiguration> cfg, const ModelParams& params,
                         std::uint64_t seed, SamplerKind sampler);

/// n vertices with Uniform(-1/2,1/2) locations and uniform marks; edge
/// probability rho(g(s,t) n |x-y| / beta). Locations are stored rescaled by n,
/// indices 0..n-1 follow location order, and there is no root.
GraphSample sample_finite_graph(std::int64_t n, const ModelParams& params, std::uint64_t seed,
                                SamplerKind sampler = SamplerKind::layered);

/// Mark layer a with mark in (2^-a-1, 2^-a]; capped at 63.
int mark_layer(double mark) noexcept;

std::string_view to_string(SamplerKind kind);
SamplerKind parse_sampler_kind(std::string_view name);

nlohmann::json to_json(const GraphSample& sample);

}  // namespace wrcm
