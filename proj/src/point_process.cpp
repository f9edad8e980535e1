#include "wrcm/point_process.hpp"

#include <charconv>
#include <cmath>
#include <limits>

#include "wrcm/errors.hpp"
#include "wrcm/rng.hpp"

namespace wrcm {

namespace {

double mark_for(std::uint64_t key, std::int64_t index) {
  return keyed_uniform(key, static_cast<std::uint64_t>(index));
}

void require_positive(double value, const char* name) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw ParameterError(std::string(name) + " must be positive and finite");
  }
}

// Palm-Poisson locations generated outward from the root, one keyed gap per index,
// so windows of different size agree on every shared index.
struct PoissonWalk {
  std::uint64_t gap_key;
  double lambda;

  double gap(std::int64_t index) const {
    return -std::log(keyed_uniform(gap_key, static_cast<std::uint64_t>(index))) / lambda;
  }
};

MarkedConfiguration assemble(std::vector<double> left, std::vector<double> right, double halfwidth,
                             PointProcessSpec spec, std::uint64_t seed) {
  const std::uint64_t mark_key = stream_key(seed, Stream::vertex_mark);
  std::vector<Vertex> vertices;
  vertices.reserve(left.size() + right.size() + 1);
  const auto n_left = static_cast<std::int64_t>(left.size());
  for (std::int64_t k = n_left; k >= 1; --k) {
    vertices.push_back({-k, left[static_cast<std::size_t>(k - 1)], mark_for(mark_key, -k)});
  }
  vertices.push_back({0, 0.0, mark_for(mark_key, 0)});
  for (std::size_t k = 0; k < right.size(); ++k) {
    const auto index = static_cast<std::int64_t>(k + 1);
    vertices.push_back({index, right[k], mark_for(mark_key, index)});
  }
  return MarkedConfiguration(std::move(vertices), halfwidth, spec, seed, true);
}

}  // namespace

void PointProcessSpec::validate() const {
  switch (kind) {
    case ProcessKind::poisson:
      require_positive(intensity, "poisson intensity");
      break;
    case ProcessKind::lattice_bernoulli:
      if (!(retention > 0.0 && retention <= 1.0)) {
        throw ParameterError("lattice retention probability must lie in (0,1]");
      }
      break;
    case ProcessKind::deterministic_lattice:
      break;
  }
}

MarkedConfiguration::MarkedConfiguration(std::vector<Vertex> vertices, double halfwidth,
                                         PointProcessSpec spec, std::uint64_t seed, bool palm)
    : vertices_(std::move(vertices)), halfwidth_(halfwidth), spec_(spec), seed_(seed), palm_(palm) {
  if (vertices_.empty()) throw ParameterError("configuration must contain at least one vertex");
  for (std::size_t k = 0; k < vertices_.size(); ++k) {
    const Vertex& v = vertices_[k];
    if (!(v.mark > 0.0 && v.mark < 1.0)) throw DomainError("vertex mark outside (0,1)");
    if (!std::isfinite(v.location)) throw DomainError("vertex location must be finite");
    if (k > 0) {
      if (v.index != vertices_[k - 1].index + 1) throw ParameterError("vertex indices must be contiguous");
      if (!(v.location > vertices_[k - 1].location)) {
        throw ParameterError("vertex locations must be strictly increasing with the index");
      }
    }
  }
  if (palm_) {
    if (!contains(0) || at(0).location != 0.0) {
      throw ParameterError("palm configuration needs a root with index 0 at location 0");
    }
  }
}

const Vertex& MarkedConfiguration::at(std::int64_t index) const {
  if (!contains(index)) {
    throw RangeError("vertex index " + std::to_string(index) + " is not in the configuration [" +
                     std::to_string(first_index()) + ", " + std::to_string(last_index()) + "]");
  }
  return vertices_[static_cast<std::size_t>(index - first_index())];
}

MarkedConfiguration sample_poisson_palm(double lambda, double L, std::uint64_t seed) {
  require_positive(lambda, "poisson intensity");
  require_positive(L, "window halfwidth");
  const PoissonWalk walk{stream_key(seed, Stream::poisson_gap), lambda};
  std::vector<double> right, left;
  for (double x = walk.gap(1); x <= L; x += walk.gap(static_cast<std::int64_t>(right.size()) + 1)) {
    right.push_back(x);
  }
  for (double x = -walk.gap(-1); x >= -L; x -= walk.gap(-static_cast<std::int64_t>(left.size()) - 1)) {
    left.push_back(x);
  }
  PointProcessSpec spec{ProcessKind::poisson, lambda, 1.0};
  return assemble(std::move(left), std::move(right), L, spec, seed);
}

MarkedConfiguration sample_poisson_palm_count(double lambda, std::int64_t per_side,
                                              std::uint64_t seed) {
  require_positive(lambda, "poisson intensity");
  if (per_side < 1) throw ParameterError("per-side vertex count must be at least 1");
  const PoissonWalk walk{stream_key(seed, Stream::poisson_gap), lambda};
  double right = 0.0, left = 0.0;
  for (std::int64_t k = 1; k <= per_side; ++k) {
    right += walk.gap(k);
    left += walk.gap(-k);
  }
  // Window just large enough for both sides; the shorter side is then filled up.
  const double L = std::nextafter(std::max(right, left), std::numeric_limits<double>::infinity());
  return sample_poisson_palm(lambda, L, seed);
}

MarkedConfiguration sample_lattice_bernoulli(double p, std::int64_t count, std::uint64_t seed) {
  if (!(p > 0.0 && p <= 1.0)) throw ParameterError("retention probability must lie in (0,1]");
  if (count < 1) throw ParameterError("retained site count must be at least 1");
  const std::uint64_t key = stream_key(seed, Stream::site_retention);
  auto retained = [&](std::int64_t site) {
    return p >= 1.0 || keyed_uniform(key, static_cast<std::uint64_t>(site)) < p;
  };
  std::int64_t reach = 0;
  for (int side : {-1, 1}) {
    std::int64_t found = 0, site = 0;
    while (found < count) {
      site += side;
      if (retained(site)) ++found;
    }
    reach = std::max(reach, site * side);
  }
  std::vector<double> left, right;
  for (std::int64_t site = 1; site <= reach; ++site) {
    if (retained(site)) right.push_back(static_cast<double>(site));
    if (retained(-site)) left.push_back(static_cast<double>(-site));
  }
  PointProcessSpec spec{ProcessKind::lattice_bernoulli, 1.0, p};
  return assemble(std::move(left), std::move(right), static_cast<double>(reach), spec, seed);
}

MarkedConfiguration deterministic_lattice(std::int64_t halfwidth, std::uint64_t seed) {
  if (halfwidth < 1) throw ParameterError("lattice halfwidth must be at least 1");
  std::vector<double> left, right;
  left.reserve(static_cast<std::size_t>(halfwidth));
  right.reserve(static_cast<std::size_t>(halfwidth));
  for (std::int64_t site = 1; site <= halfwidth; ++site) {
    left.push_back(static_cast<double>(-site));
    right.push_back(static_cast<double>(site));
  }
  PointProcessSpec spec{ProcessKind::deterministic_lattice, 1.0, 1.0};
  return assemble(std::move(left), std::move(right), static_cast<double>(halfwidth), spec, seed);
}

MarkedConfiguration sample_configuration(const PointProcessSpec& spec, double window,
                                         std::uint64_t seed) {
  spec.validate();
  switch (spec.kind) {
    case ProcessKind::poisson:
      return sample_poisson_palm(spec.intensity, window, seed);
    case ProcessKind::lattice_bernoulli:
      return sample_lattice_bernoulli(spec.retention, static_cast<std::int64_t>(window), seed);
    case ProcessKind::deterministic_lattice:
      return deterministic_lattice(static_cast<std::int64_t>(window), seed);
  }
  throw ParameterError("unknown point process kind");
}

MarkedConfiguration sample_configuration_by_count(const PointProcessSpec& spec,
                                                  std::int64_t per_side, std::uint64_t seed) {
  spec.validate();
  switch (spec.kind) {
    case ProcessKind::poisson:
      return sample_poisson_palm_count(spec.intensity, per_side, seed);
    case ProcessKind::lattice_bernoulli:
      return sample_lattice_bernoulli(spec.retention, per_side, seed);
    case ProcessKind::deterministic_lattice:
      return deterministic_lattice(per_side, seed);
  }
  throw ParameterError("unknown point process kind");
}

std::int64_t renormalisation_scale(int n, std::int64_t K) {
  if (n < 1 || K < 1) throw ParameterError("renormalisation scale needs n >= 1 and K >= 1");
  // Accumulate in long double and check against int64 range.
  long double value = 1.0L;
  for (int m = 1; m <= n; ++m) value *= static_cast<long double>(m) * m * m * static_cast<long double>(K);
  if (value > static_cast<long double>(std::numeric_limits<std::int64_t>::max() / 4)) {
    throw ParameterError("K_n = (n!)^3 K^n overflows for n = " + std::to_string(n));
  }
  std::int64_t exact = 1;
  for (int m = 1; m <= n; ++m) exact *= static_cast<std::int64_t>(m) * m * m * K;
  return exact;
}

std::vector<bool> check_evenly_spaced_a(const MarkedConfiguration& cfg, double a1, std::int64_t K,
                                        int n_max) {
  require_positive(a1, "spacing constant a1");
  std::vector<bool> result;
  for (int n = 1; n <= n_max; ++n) {
    const std::int64_t Kn = renormalisation_scale(n, K);
    const double span = std::abs(cfg.at(-Kn).location - cfg.at(Kn - 1).location);
    result.push_back(span <= a1 * static_cast<double>(Kn));
  }
  return result;
}

std::vector<bool> check_evenly_spaced_b(const MarkedConfiguration& cfg, double a2, int n_max) {
  require_positive(a2, "spacing constant a2");
  if (n_max > 61) throw ParameterError("dyadic spacing check supports n <= 61");
  std::vector<bool> result;
  for (int n = 1; n <= n_max; ++n) {
    const std::int64_t scale = std::int64_t{1} << n;
    const double span = std::abs(cfg.at(-2 * scale).location - cfg.at(scale).location);
    result.push_back(span >= a2 * static_cast<double>(scale));
  }
  return result;
}

std::string_view to_string(ProcessKind kind) {
  switch (kind) {
    case ProcessKind::poisson: return "poisson";
    case ProcessKind::lattice_bernoulli: return "lattice-bernoulli";
    case ProcessKind::deterministic_lattice: return "deterministic-lattice";
  }
  return "?";
}

ProcessKind parse_process_kind(std::string_view name) {
  if (name == "poisson") return ProcessKind::poisson;
  if (name == "lattice-bernoulli") return ProcessKind::lattice_bernoulli;
  if (name == "deterministic-lattice" || name == "lattice") return ProcessKind::deterministic_lattice;
  throw ParameterError("unknown point process kind '" + std::string(name) + "'");
}

std::string format_double(double value) {
  char buffer[64];
  const auto result = std::to_chars(buffer, buffer + sizeof buffer, value);
  return std::string(buffer, result.ptr);
}

namespace {

double parse_double(const nlohmann::json& j) {
  if (j.is_number()) return j.get<double>();
  const std::string text = j.get<std::string>();
  double value = 0.0;
  const auto result = std::from_chars(text.data(), text.data() + text.size(), value);
  if (result.ec != std::errc{} || result.ptr != text.data() + text.size()) {
    throw FormatError("malformed decimal '" + text + "'");
  }
  return value;
}

}  // namespace

void to_json(nlohmann::json& j, const PointProcessSpec& spec) {
  j = {{"kind", to_string(spec.kind)}, {"intensity", spec.intensity}, {"retention", spec.retention}};
}

void from_json(const nlohmann::json& j, PointProcessSpec& spec) {
  spec.kind = parse_process_kind(j.at("kind").get<std::string>());
  spec.intensity = j.value("intensity", 1.0);
  spec.retention = j.value("retention", 1.0);
}

nlohmann::json to_json(const MarkedConfiguration& cfg) {
  nlohmann::json vertices = nlohmann::json::array();
  for (const Vertex& v : cfg.vertices()) {
    vertices.push_back({v.index, format_double(v.location), format_double(v.mark)});
  }
  return {{"kind", to_string(cfg.spec().kind)},
          {"params", {{"intensity", cfg.spec().intensity}, {"retention", cfg.spec().retention}}},
          {"seed", cfg.seed()},
          {"L", format_double(cfg.halfwidth())},
          {"palm", cfg.root_index().has_value()},
          {"vertices", std::move(vertices)}};
}

MarkedConfiguration configuration_from_json(const nlohmann::json& j) {
  try {
    PointProcessSpec spec;
    spec.kind = parse_process_kind(j.at("kind").get<std::string>());
    spec.intensity = j.at("params").value("intensity", 1.0);
    spec.retention = j.at("params").value("retention", 1.0);
    std::vector<Vertex> vertices;
    for (const auto& row : j.at("vertices")) {
      vertices.push_back({row.at(0).get<std::int64_t>(), parse_double(row.at(1)), parse_double(row.at(2))});
    }
    return MarkedConfiguration(std::move(vertices), parse_double(j.at("L")), spec,
                               j.at("seed").get<std::uint64_t>(), j.value("palm", true));
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed configuration document: ") + e.what());
  }
}

}  // namespace wrcm
