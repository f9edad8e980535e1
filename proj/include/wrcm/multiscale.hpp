#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "wrcm/graph_sampler.hpp"
#include "wrcm/point_process.hpp"
#include "wrcm/stats.hpp"

namespace wrcm {

/// Renormalisation constants: K_n = (n!)³Kⁿ and C_n = n³K, so K_n = C_n K_{n-1}.
struct ScaleSchedule {
  std::int64_t K = 4;
  double a1 = 3.0;
  double a2 = 0.5;
  double mu = 0.25;
  double theta = 0.75;
  double theta_star = 0.8;

  void validate() const;
  std::int64_t K_n(int n) const { return renormalisation_scale(n, K); }
  std::int64_t C_n(int n) const { return static_cast<std::int64_t>(n) * n * n * K; }
};

/// Largest stage accepted by crossing_sweep (2^23 vertices per side).
inline constexpr int kMaxCrossingStage = 22;

/// Stage at which an edge between index i < 0 and j >= 0 is counted, or 0 for
/// edges that do not straddle the origin. Each crossing edge is counted at
/// exactly one stage: the first whose outer window [-2^{k+1}, 2^{k+1}-1]
/// holds both ends (stage 1 also takes the edges inside [-2, 1]).
int crossing_stage(std::int64_t i, std::int64_t j) noexcept;

/// chi(k). Throws RangeError unless the configuration holds indices
/// -2^{k+1} .. 2^{k+1}-1.
bool crossing_stage_indicator(const GraphSample& g, int k);

/// chi(1..k_max) in one pass over the edges; element k-1 is chi(k).
std::vector<bool> crossing_indicators(const GraphSample& g, int k_max);

struct CrossingStage {
  int k = 0;
  Proportion probability;
};

struct CrossingReport {
  std::vector<CrossingStage> stages;  ///< k = 1..k_max
  Proportion no_crossing;  ///< replicas with chi(k) = 0 for every k <= k_max
  std::int64_t replicas = 0;
};

/// Empirical P{chi(k) = 1} over independent replicas. Each replica samples
/// 2^{k_max+1} vertices per side and only the edges across the origin.
CrossingReport crossing_sweep(const ModelParams& params, const PointProcessSpec& pp, int k_max,
                              std::int64_t replicas, std::uint64_t seed, unsigned threads = 1);

/// B_N^i = indices [N(i-1), N(i+1)-1].
struct Block {
  std::int64_t i = 0;
  std::int64_t first = 0;
  std::int64_t last = 0;
};

Block block_at(std::int64_t N, std::int64_t i);

/// Blocks i_first..i_last; throws RangeError when an index is missing from cfg.
std::vector<Block> block_partition(const MarkedConfiguration& cfg, std::int64_t N,
                                   std::int64_t i_first, std::int64_t i_last);

struct BlockEntry {
  Block block;
  std::int64_t largest = 0;  ///< largest component of the induced subgraph
  bool good = false;  ///< largest >= 2 theta N
};

struct BlockReport {
  std::int64_t N = 0;
  double theta = 0.0;
  std::vector<BlockEntry> blocks;
  double bad_fraction = 0.0;
  std::optional<Proportion> empirical_p_bad;
};

BlockReport block_goodness(const GraphSample& g, std::int64_t N, double theta,
                           std::int64_t i_first, std::int64_t i_last);

/// Fraction of replicas in which block B_N^0 is theta-bad.
Proportion block_bad_probability(const ModelParams& params, const PointProcessSpec& pp,
                                 std::int64_t N, double theta, std::int64_t replicas,
                                 std::uint64_t seed, unsigned threads = 1);

/// Both sides of p(K_n, theta - 2/C_n) <= p(K_{n-1}, theta)/100 + 2 C_n² p(K_{n-1}, theta)²
/// at n = 2, measured by replicas. Reported, never asserted.
struct RecursionSides {
  int n = 2;
  Proportion p_prev;
  Proportion p_next;
  double lhs = 0.0;
  double rhs = 0.0;
};

RecursionSides recursion_sides(const ModelParams& params, const PointProcessSpec& pp,
                               const ScaleSchedule& schedule, std::int64_t replicas,
                               std::uint64_t seed, unsigned threads = 1);

/// Lower mu-regularity of floor(theta_star K_prev) marks: with
/// h = floor((theta_star K_prev)^{1-mu}), every level i <= h holds at least
/// i theta_star K_prev / (2h) marks at or below i/h.
bool mu_regular_lower(std::span<const double> marks, double mu, double theta_star,
                      std::int64_t K_prev);

/// Upper mu-regularity of 2^k marks: none below 2^{-(1+mu)k}, and with
/// h = ceil(2^{(1-mu)k}) at most i 2^{k+1}/h marks at or below i/h.
bool mu_regular_upper(std::span<const double> marks, double mu, int k);

}  // namespace wrcm
