#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace wrcm {

/// A vertex (X_j, T_j): signed index in location order, location, uniform mark.
struct Vertex {
  std::int64_t index = 0;
  double location = 0.0;
  double mark = 0.5;
};

enum class ProcessKind { poisson, lattice_bernoulli, deterministic_lattice };

struct PointProcessSpec {
  ProcessKind kind = ProcessKind::poisson;
  double intensity = 1.0;  ///< points per unit length (poisson)
  double retention = 1.0;  ///< site-retention probability (lattice-bernoulli)

  void validate() const;
};

/// Ordered marked vertex set with contiguous indices. Palm configurations carry
/// a root with index 0 at location 0; finite-graph configurations have no root.
class MarkedConfiguration {
 public:
  /// Validates ordering, index contiguity, marks in (0,1) and (if `palm`) the root.
  MarkedConfiguration(std::vector<Vertex> vertices, double halfwidth, PointProcessSpec spec,
                      std::uint64_t seed, bool palm = true);

  std::span<const Vertex> vertices() const noexcept { return vertices_; }
  std::size_t size() const noexcept { return vertices_.size(); }
  std::int64_t first_index() const noexcept { return vertices_.front().index; }
  std::int64_t last_index() const noexcept { return vertices_.back().index; }
  bool contains(std::int64_t index) const noexcept {
    return index >= first_index() && index <= last_index();
  }
  /// Throws RangeError naming the missing index.
  const Vertex& at(std::int64_t index) const;
  std::size_t position(std::int64_t index) const { return static_cast<std::size_t>(at(index).index - first_index()); }
  std::optional<std::int64_t> root_index() const noexcept {
    return palm_ ? std::optional<std::int64_t>(0) : std::nullopt;
  }
  double halfwidth() const noexcept { return halfwidth_; }
  const PointProcessSpec& spec() const noexcept { return spec_; }
  std::uint64_t seed() const noexcept { return seed_; }

 private:
  std::vector<Vertex> vertices_;
  double halfwidth_;
  PointProcessSpec spec_;
  std::uint64_t seed_;
  bool palm_;
};

/// Palm version of a Poisson process of intensity `lambda` on [-L, L].
MarkedConfiguration sample_poisson_palm(double lambda, double L, std::uint64_t seed);

/// Same stream as sample_poisson_palm, with the window grown until at least
/// `per_side` points lie on each side of the root.
MarkedConfiguration sample_poisson_palm_count(double lambda, std::int64_t per_side,
                                              std::uint64_t seed);

/// Bernoulli(p) site percolation on Z with site 0 forced open; at least `count`
/// retained sites on each side of the root.
MarkedConfiguration sample_lattice_bernoulli(double p, std::int64_t count, std::uint64_t seed);

/// X_j = j for |j| <= halfwidth.
MarkedConfiguration deterministic_lattice(std::int64_t halfwidth, std::uint64_t seed);

/// Dispatches on spec.kind; `window` is L for poisson, the per-side count otherwise.
MarkedConfiguration sample_configuration(const PointProcessSpec& spec, double window,
                                         std::uint64_t seed);

/// Configuration guaranteed to contain indices [-per_side, per_side - 1].
MarkedConfiguration sample_configuration_by_count(const PointProcessSpec& spec,
                                                  std::int64_t per_side, std::uint64_t seed);

/// K_n = (n!)^3 K^n. Throws ParameterError on int64 overflow.
std::int64_t renormalisation_scale(int n, std::int64_t K);

/// Per n = 1..n_max: |X_{-K_n} - X_{K_n - 1}| <= a1 K_n.
std::vector<bool> check_evenly_spaced_a(const MarkedConfiguration& cfg, double a1,
                                        std::int64_t K, int n_max);

/// Per n = 1..n_max: |X_{-2^{n+1}} - X_{2^n}| >= a2 2^n.
std::vector<bool> check_evenly_spaced_b(const MarkedConfiguration& cfg, double a2, int n_max);

std::string_view to_string(ProcessKind kind);
ProcessKind parse_process_kind(std::string_view name);

/// Shortest round-trip decimal representation of a double.
std::string format_double(double value);

void to_json(nlohmann::json& j, const PointProcessSpec& spec);
void from_json(const nlohmann::json& j, PointProcessSpec& spec);
nlohmann::json to_json(const MarkedConfiguration& cfg);
MarkedConfiguration configuration_from_json(const nlohmann::json& j);

}  // namespace wrcm
