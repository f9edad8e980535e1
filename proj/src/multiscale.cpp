#include "wrcm/multiscale.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <memory>

#include "wrcm/cluster.hpp"
#include "wrcm/errors.hpp"
#include "wrcm/parallel.hpp"

namespace wrcm {

namespace {

// Smallest k >= 0 with m <= 2^{k+1}, for m >= 1.
int outer_stage(std::int64_t m) noexcept {
  const int w = std::bit_width(static_cast<std::uint64_t>(m - 1));  // ceil(log2 m)
  return std::max(0, w - 1);
}

void require_indices(const MarkedConfiguration& cfg, std::int64_t first, std::int64_t last) {
  if (!cfg.contains(first)) cfg.at(first);  // throws RangeError naming the index
  if (!cfg.contains(last)) cfg.at(last);
}

}  // namespace

void ScaleSchedule::validate() const {
  if (K < 2) throw ParameterError("K must be at least 2");
  if (!(a1 > 0.0) || !(a2 > 0.0)) throw ParameterError("spacing constants must be positive");
  if (!(mu > 0.0 && mu < 0.5)) throw ParameterError("mu must lie in (0, 1/2)");
  if (!(theta > 0.0 && theta < 1.0)) throw ParameterError("theta must lie in (0,1)");
  if (!(theta_star > 0.75 && theta_star < 1.0))
    throw ParameterError("theta_star must lie in (3/4, 1)");
}

int crossing_stage(std::int64_t i, std::int64_t j) noexcept {
  if (i > j) std::swap(i, j);
  if (i >= 0 || j < 0) return 0;
  return std::max({1, outer_stage(-i), outer_stage(j + 1)});
}

bool crossing_stage_indicator(const GraphSample& g, int k) {
  if (k < 1 || k > 62) throw DomainError("stage must lie in [1, 62]");
  const std::int64_t outer = std::int64_t{1} << (k + 1);
  require_indices(*g.config, -outer, outer - 1);
  for (const auto& [i, j] : g.edges)
    if (crossing_stage(i, j) == k) return true;
  return false;
}

std::vector<bool> crossing_indicators(const GraphSample& g, int k_max) {
  if (k_max < 1 || k_max > 62) throw DomainError("stage must lie in [1, 62]");
  const std::int64_t outer = std::int64_t{1} << (k_max + 1);
  require_indices(*g.config, -outer, outer - 1);
  std::vector<bool> chi(static_cast<std::size_t>(k_max), false);
  for (const auto& [i, j] : g.edges) {
    const int k = crossing_stage(i, j);
    if (k >= 1 && k <= k_max) chi[static_cast<std::size_t>(k - 1)] = true;
  }
  return chi;
}

CrossingReport crossing_sweep(const ModelParams& params, const PointProcessSpec& pp, int k_max,
                              std::int64_t replicas, std::uint64_t seed, unsigned threads) {
  params.validate();
  pp.validate();
  if (k_max < 1 || k_max > kMaxCrossingStage)
    throw ParameterError("k_max must lie in [1, 22]");
  if (replicas < 1) throw ParameterError("replicas must be positive");
  const std::int64_t per_side = std::int64_t{1} << (k_max + 1);
  std::vector<std::vector<bool>> chi(static_cast<std::size_t>(replicas));
  parallel_for(chi.size(), threads, [&](std::size_t r) {
    const std::uint64_t rs = replica_seed(seed, 0, r);
    auto cfg = std::make_shared<const MarkedConfiguration>(
        sample_configuration_by_count(pp, per_side, rs));
    const GraphSample g = sample_crossing_edges(cfg, params, rs, per_side, per_side);
    chi[r] = crossing_indicators(g, k_max);
  });
  CrossingReport report;
  report.replicas = replicas;
  std::int64_t none = 0;
  std::vector<std::int64_t> hits(static_cast<std::size_t>(k_max), 0);
  for (const auto& row : chi) {
    bool any = false;
    for (int k = 0; k < k_max; ++k)
      if (row[static_cast<std::size_t>(k)]) {
        ++hits[static_cast<std::size_t>(k)];
        any = true;
      }
    if (!any) ++none;
  }
  for (int k = 1; k <= k_max; ++k)
    report.stages.push_back({k, wilson_interval(hits[static_cast<std::size_t>(k - 1)], replicas)});
  report.no_crossing = wilson_interval(none, replicas);
  return report;
}

Block block_at(std::int64_t N, std::int64_t i) {
  if (N < 1) throw ParameterError("block scale N must be positive");
  return {i, N * (i - 1), N * (i + 1) - 1};
}

std::vector<Block> block_partition(const MarkedConfiguration& cfg, std::int64_t N,
                                   std::int64_t i_first, std::int64_t i_last) {
  if (i_last < i_first) throw ParameterError("empty block range");
  std::vector<Block> blocks;
  for (std::int64_t i = i_first; i <= i_last; ++i) {
    const Block b = block_at(N, i);
    require_indices(cfg, b.first, b.last);
    blocks.push_back(b);
  }
  return blocks;
}

BlockReport block_goodness(const GraphSample& g, std::int64_t N, double theta,
                           std::int64_t i_first, std::int64_t i_last) {
  if (!(theta > 0.0 && theta < 1.0)) throw ParameterError("theta must lie in (0,1)");
  BlockReport report;
  report.N = N;
  report.theta = theta;
  std::int64_t bad = 0;
  for (const Block& b : block_partition(*g.config, N, i_first, i_last)) {
    BlockEntry entry{b, static_cast<std::int64_t>(largest_induced_component(g, b.first, b.last).size()),
                     false};
    entry.good = static_cast<double>(entry.largest) >= 2.0 * theta * static_cast<double>(N);
    if (!entry.good) ++bad;
    report.blocks.push_back(entry);
  }
  report.bad_fraction = static_cast<double>(bad) / static_cast<double>(report.blocks.size());
  return report;
}

Proportion block_bad_probability(const ModelParams& params, const PointProcessSpec& pp,
                                 std::int64_t N, double theta, std::int64_t replicas,
                                 std::uint64_t seed, unsigned threads) {
  params.validate();
  pp.validate();
  if (replicas < 1) throw ParameterError("replicas must be positive");
  std::vector<char> bad(static_cast<std::size_t>(replicas), 0);
  parallel_for(bad.size(), threads, [&](std::size_t r) {
    const std::uint64_t rs = replica_seed(seed, 1, r);
    // Block 0 covers [-N, N-1]; edges leaving it do not matter for the induced subgraph.
    auto cfg = std::make_shared<const MarkedConfiguration>(sample_configuration_by_count(pp, N, rs));
    const GraphSample g = sample_edges_layered(cfg, params, rs);
    bad[r] = block_goodness(g, N, theta, 0, 0).blocks.front().good ? 0 : 1;
  });
  return wilson_interval(std::count(bad.begin(), bad.end(), 1), replicas);
}

RecursionSides recursion_sides(const ModelParams& params, const PointProcessSpec& pp,
                               const ScaleSchedule& schedule, std::int64_t replicas,
                               std::uint64_t seed, unsigned threads) {
  schedule.validate();
  RecursionSides out;
  const double theta_next = schedule.theta - 2.0 / static_cast<double>(schedule.C_n(2));
  if (!(theta_next > 0.0)) throw ParameterError("theta - 2/C_2 must be positive");
  out.p_prev = block_bad_probability(params, pp, schedule.K_n(1), schedule.theta, replicas,
                                     derive_seed(seed, 1), threads);
  out.p_next = block_bad_probability(params, pp, schedule.K_n(2), theta_next, replicas,
                                     derive_seed(seed, 2), threads);
  const double c2 = static_cast<double>(schedule.C_n(2));
  const double p = out.p_prev.estimate;
  out.lhs = out.p_next.estimate;
  out.rhs = p / 100.0 + 2.0 * c2 * c2 * p * p;
  return out;
}

bool mu_regular_lower(std::span<const double> marks, double mu, double theta_star,
                      std::int64_t K_prev) {
  if (!(mu > 0.0 && mu < 0.5)) throw ParameterError("mu must lie in (0, 1/2)");
  if (!(theta_star > 0.0 && theta_star < 1.0)) throw ParameterError("theta_star must lie in (0,1)");
  const double v = theta_star * static_cast<double>(K_prev);
  if (marks.size() != static_cast<std::size_t>(std::floor(v)))
    throw DomainError("mark list must hold floor(theta_star K_prev) marks");
  const auto h = static_cast<std::int64_t>(std::floor(std::pow(v, 1.0 - mu)));
  if (h < 1) throw DomainError("theta_star K_prev too small for any level");
  std::vector<double> sorted(marks.begin(), marks.end());
  std::sort(sorted.begin(), sorted.end());
  for (std::int64_t i = 1; i <= h; ++i) {
    const double level = static_cast<double>(i) / static_cast<double>(h);
    const auto count = std::upper_bound(sorted.begin(), sorted.end(), level) - sorted.begin();
    if (static_cast<double>(count) < static_cast<double>(i) * v / (2.0 * static_cast<double>(h)))
      return false;
  }
  return true;
}

bool mu_regular_upper(std::span<const double> marks, double mu, int k) {
  if (!(mu > 0.0 && mu < 0.5)) throw ParameterError("mu must lie in (0, 1/2)");
  if (k < 0 || k > 40) throw DomainError("k must lie in [0, 40]");
  const std::int64_t size = std::int64_t{1} << k;
  if (marks.size() != static_cast<std::size_t>(size)) throw DomainError("mark list must hold 2^k marks");
  const double floor_level = std::exp2(-(1.0 + mu) * k);
  std::vector<double> sorted(marks.begin(), marks.end());
  std::sort(sorted.begin(), sorted.end());
  if (sorted.front() < floor_level) return false;
  const auto h = static_cast<std::int64_t>(std::ceil(std::exp2((1.0 - mu) * k)));
  const double per_level = std::exp2(k + 1.0) / static_cast<double>(h);
  for (std::int64_t i = 1; i <= h; ++i) {
    const double level = static_cast<double>(i) / static_cast<double>(h);
    const auto count = std::upper_bound(sorted.begin(), sorted.end(), level) - sorted.begin();
    if (static_cast<double>(count) > static_cast<double>(i) * per_level) return false;
  }
  return true;
}

}  // namespace wrcm
