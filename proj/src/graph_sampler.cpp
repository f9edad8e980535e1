#include "wrcm/graph_sampler.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <limits>

#include "wrcm/errors.hpp"
#include "wrcm/rng.hpp"

namespace wrcm {

namespace {

constexpr int kLayers = 64;
constexpr double kNegligible = 0x1.0p-53;

double layer_lower(int a) { return std::ldexp(1.0, -a - 1); }

void finish(GraphSample& sample) {
  std::sort(sample.edges.begin(), sample.edges.end());
  sample.edges.erase(std::unique(sample.edges.begin(), sample.edges.end()), sample.edges.end());
}

GraphSample empty_sample(std::shared_ptr<const MarkedConfiguration> cfg, const ModelParams& params,
                         std::uint64_t seed, SamplerKind kind) {
  if (!cfg) throw ParameterError("graph sampler needs a configuration");
  params.validate();
  GraphSample sample;
  sample.config = std::move(cfg);
  sample.params = params;
  sample.seed = seed;
  sample.sampler = kind;
  return sample;
}

// Vertices of one mark layer, in location order.
struct Layer {
  std::vector<std::uint32_t> positions;
  std::vector<double> locations;
};

std::array<Layer, kLayers> build_layers(std::span<const Vertex> vertices) {
  std::array<Layer, kLayers> layers;
  for (std::size_t p = 0; p < vertices.size(); ++p) {
    Layer& layer = layers[static_cast<std::size_t>(mark_layer(vertices[p].mark))];
    layer.positions.push_back(static_cast<std::uint32_t>(p));
    layer.locations.push_back(vertices[p].location);
  }
  return layers;
}

}  // namespace

bool GraphSample::has_edge(std::int64_t i, std::int64_t j) const {
  const Edge e = i < j ? Edge{i, j} : Edge{j, i};
  return std::binary_search(edges.begin(), edges.end(), e);
}

int mark_layer(double mark) noexcept {
  int exponent = 0;
  const double mantissa = std::frexp(mark, &exponent);
  const int layer = mantissa == 0.5 ? 1 - exponent : -exponent;
  return std::clamp(layer, 0, kLayers - 1);
}

double pair_uniform(std::uint64_t seed, std::int64_t i, std::int64_t j) {
  if (i == j) throw DomainError("edge mark requested for a self-pair");
  const auto lo = static_cast<std::uint64_t>(std::min(i, j));
  const auto hi = static_cast<std::uint64_t>(std::max(i, j));
  return keyed_uniform(stream_key(seed, Stream::edge_mark), lo, hi);
}

GraphSample sample_edges_naive(std::shared_ptr<const MarkedConfiguration> cfg,
                               const ModelParams& params, std::uint64_t seed) {
  GraphSample sample = empty_sample(std::move(cfg), params, seed, SamplerKind::naive);
  const auto vertices = sample.config->vertices();
  const std::uint64_t key = stream_key(seed, Stream::edge_mark);
  for (std::size_t a = 0; a < vertices.size(); ++a) {
    const Vertex& u = vertices[a];
    for (std::size_t b = a + 1; b < vertices.size(); ++b) {
      const Vertex& v = vertices[b];
      const double p = params.edge_probability(u.mark, v.mark, v.location - u.location);
      const double mark = keyed_uniform(key, static_cast<std::uint64_t>(u.index),
                                        static_cast<std::uint64_t>(v.index));
      if (mark <= p) sample.edges.emplace_back(u.index, v.index);
    }
  }
  return sample;  // pairs are generated in lexicographic order
}

GraphSample sample_edges_layered(std::shared_ptr<const MarkedConfiguration> cfg,
                                 const ModelParams& params, std::uint64_t seed) {
  GraphSample sample = empty_sample(std::move(cfg), params, seed, SamplerKind::layered);
  const auto vertices = sample.config->vertices();
  const auto layers = build_layers(vertices);
  const std::uint64_t key = stream_key(seed, Stream::layered_walk);
  const double rho_zero = params.profile.at_zero();

  for (std::size_t p = 0; p < vertices.size(); ++p) {
    const Vertex& u = vertices[p];
    const int a = mark_layer(u.mark);
    for (int b = 0; b < kLayers; ++b) {
      const Layer& layer = layers[static_cast<std::size_t>(b)];
      if (layer.positions.empty()) continue;
      auto first = std::upper_bound(layer.positions.begin(), layer.positions.end(),
                                    static_cast<std::uint32_t>(p));
      std::size_t cur = static_cast<std::size_t>(first - layer.positions.begin());
      const std::size_t end_all = layer.positions.size();
      if (cur >= end_all) continue;

      CounterStream stream(key, static_cast<std::uint64_t>(u.index) * kLayers + static_cast<std::uint64_t>(b));
      // Envelope rho(g_low * d / beta); distance bins are dyadic in the rescaled
      // argument z = g_low * d / beta: [0,1), [1,2), [2,4), ...
      const double unit = params.beta / params.kernel.value(layer_lower(a), layer_lower(b));
      for (int bin = 0; cur < end_all; ++bin) {
        const double z_inner = bin == 0 ? 0.0 : std::ldexp(1.0, bin - 1);
        const double envelope = bin == 0 ? rho_zero : params.profile.value(z_inner);
        const std::size_t remaining = end_all - cur;
        if (envelope * static_cast<double>(remaining) < kNegligible) break;

        const double outer = std::ldexp(unit, bin);  // distance where the bin ends
        std::size_t bin_end = end_all;
        if (std::isfinite(outer) && u.location + outer < layer.locations.back()) {
          bin_end = static_cast<std::size_t>(
              std::lower_bound(layer.locations.begin() + static_cast<std::ptrdiff_t>(cur),
                               layer.locations.end(), u.location + outer) -
              layer.locations.begin());
        }
        while (cur < bin_end) {
          cur += stream.geometric_failures(envelope, bin_end - cur);
          if (cur >= bin_end) break;
          const Vertex& v = vertices[layer.positions[cur]];
          const double prob = params.edge_probability(u.mark, v.mark, v.location - u.location);
          if (stream.uniform() * envelope < prob) sample.edges.emplace_back(u.index, v.index);
          ++cur;
        }
        cur = std::max(cur, bin_end);
      }
    }
  }
  finish(sample);
  return sample;
}

GraphSample sample_crossing_edges(std::shared_ptr<const MarkedConfiguration> cfg,
                                  const ModelParams& params, std::uint64_t seed,
                                  std::int64_t left_count, std::int64_t right_count) {
  GraphSample sample = empty_sample(std::move(cfg), params, seed, SamplerKind::crossing);
  const MarkedConfiguration& config = *sample.config;
  if (left_count < 1 || right_count < 1) throw ParameterError("crossing sampler needs both sides non-empty");
  config.at(-left_count);
  config.at(right_count - 1);

  // buckets[side][block][layer]: indices sorted by distance from the origin.
  auto block_of = [](std::int64_t offset) { return std::bit_width(static_cast<std::uint64_t>(offset)) - 1; };
  const int left_blocks = block_of(left_count) + 1;
  const int right_blocks = block_of(right_count) + 1;
  using Buckets = std::vector<std::array<std::vector<std::int64_t>, kLayers>>;
  Buckets left(static_cast<std::size_t>(left_blocks)), right(static_cast<std::size_t>(right_blocks));
  for (std::int64_t offset = 1; offset <= left_count; ++offset) {
    const std::int64_t index = -offset;
    left[static_cast<std::size_t>(block_of(offset))][static_cast<std::size_t>(mark_layer(config.at(index).mark))]
        .push_back(index);
  }
  for (std::int64_t offset = 1; offset <= right_count; ++offset) {
    const std::int64_t index = offset - 1;
    right[static_cast<std::size_t>(block_of(offset))][static_cast<std::size_t>(mark_layer(config.at(index).mark))]
        .push_back(index);
  }

  const std::uint64_t key = stream_key(seed, Stream::crossing_walk);
  for (int p = 0; p < left_blocks; ++p) {
    const double x_left = config.at(-(std::int64_t{1} << p)).location;
    for (int q = 0; q < right_blocks; ++q) {
      const double x_right = config.at((std::int64_t{1} << q) - 1).location;
      const double gap = x_right - x_left;
      for (int l = 0; l < kLayers; ++l) {
        const auto& lefts = left[static_cast<std::size_t>(p)][static_cast<std::size_t>(l)];
        if (lefts.empty()) continue;
        for (int r = 0; r < kLayers; ++r) {
          const auto& rights = right[static_cast<std::size_t>(q)][static_cast<std::size_t>(r)];
          if (rights.empty()) continue;
          const double envelope = params.edge_probability(layer_lower(l), layer_lower(r), gap);
          const std::uint64_t total = lefts.size() * rights.size();
          if (envelope * static_cast<double>(total) < kNegligible) continue;
          const std::uint64_t id = ((static_cast<std::uint64_t>(p) * kLayers + static_cast<std::uint64_t>(q)) * kLayers +
                                    static_cast<std::uint64_t>(l)) * kLayers + static_cast<std::uint64_t>(r);
          CounterStream stream(key, id);
          for (std::uint64_t cur = 0;; ++cur) {
            cur += stream.geometric_failures(envelope, total - cur);
            if (cur >= total) break;
            const Vertex& u = config.at(lefts[cur / rights.size()]);
            const Vertex& v = config.at(rights[cur % rights.size()]);
            const double prob = params.edge_probability(u.mark, v.mark, v.location - u.location);
            if (stream.uniform() * envelope < prob) sample.edges.emplace_back(u.index, v.index);
          }
        }
      }
    }
  }
  finish(sample);
  return sample;
}

GraphSample sample_edges(std::shared_ptr<const MarkedConfiguration> cfg, const ModelParams& params,
                         std::uint64_t seed, SamplerKind sampler) {
  switch (sampler) {
    case SamplerKind::naive:
      return sample_edges_naive(std::move(cfg), params, seed);
    case SamplerKind::layered:
      return sample_edges_layered(std::move(cfg), params, seed);
    case SamplerKind::crossing:
      break;
  }
  throw ParameterError("the crossing sampler needs explicit index ranges");
}

GraphSample sample_finite_graph(std::int64_t n, const ModelParams& params, std::uint64_t seed,
                                SamplerKind sampler) {
  if (n < 1) throw ParameterError("finite graph needs at least one vertex");
  params.validate();
  const std::uint64_t loc_key = stream_key(seed, Stream::finite_location);
  const std::uint64_t mark_key = stream_key(seed, Stream::finite_mark);
  std::vector<std::pair<double, double>> points(static_cast<std::size_t>(n));
  const double scale = static_cast<double>(n);
  for (std::int64_t k = 0; k < n; ++k) {
    const double x = keyed_uniform(loc_key, static_cast<std::uint64_t>(k)) - 0.5;
    points[static_cast<std::size_t>(k)] = {x * scale, keyed_uniform(mark_key, static_cast<std::uint64_t>(k))};
  }
  std::sort(points.begin(), points.end());
  std::vector<Vertex> vertices(points.size());
  for (std::size_t k = 0; k < points.size(); ++k) {
    vertices[k] = {static_cast<std::int64_t>(k), points[k].first, points[k].second};
  }
  PointProcessSpec spec{ProcessKind::poisson, 1.0, 1.0};
  auto cfg = std::make_shared<const MarkedConfiguration>(std::move(vertices), 0.5 * scale, spec, seed, false);
  return sample_edges(std::move(cfg), params, seed, sampler);
}

std::string_view to_string(SamplerKind kind) {
  switch (kind) {
    case SamplerKind::naive: return "naive";
    case SamplerKind::layered: return "layered";
    case SamplerKind::crossing: return "crossing";
  }
  return "?";
}

SamplerKind parse_sampler_kind(std::string_view name) {
  if (name == "naive") return SamplerKind::naive;
  if (name == "layered") return SamplerKind::layered;
  if (name == "crossing") return SamplerKind::crossing;
  throw ParameterError("unknown sampler '" + std::string(name) + "'");
}

nlohmann::json to_json(const GraphSample& sample) {
  nlohmann::json edges = nlohmann::json::array();
  for (const auto& [i, j] : sample.edges) edges.push_back({i, j});
  return {{"params", sample.params},
          {"seed", sample.seed},
          {"sampler", to_string(sample.sampler)},
          {"n_vertices", sample.vertex_count()},
          {"edges", std::move(edges)}};
}

}  // namespace wrcm
