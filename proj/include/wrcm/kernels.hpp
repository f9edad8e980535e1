#pragma once

#include <string>
#include <string_view>

#include <json.hpp>

namespace wrcm {

struct Vertex;

enum class KernelVariant { constant, sum, min, product, preferential_attachment };
enum class ProfileVariant { hard_polynomial, exponential_polynomial, capped_polynomial };

/// Symmetric kernel g(s,t) acting on two vertex marks.
///
/// All variants are non-decreasing in each mark, so small marks (heavy
/// vertices) shrink the rescaled distance g(s,t)|x-y| and connect further.
struct KernelSpec {
  KernelVariant variant = KernelVariant::constant;
  double gamma = 0.0;

  /// Throws ParameterError unless gamma lies in [0,1].
  void validate() const;

  /// Unchecked evaluation; callers guarantee s,t in (0,1).
  double value(double s, double t) const noexcept;
};

/// Profile rho(z), a non-increasing [0,1]-valued function with rho(z) ~ 1 ^ z^-delta.
struct ProfileSpec {
  ProfileVariant variant = ProfileVariant::hard_polynomial;
  double delta = 2.0;
  double cap = 1.0;  ///< rho_0 of the capped variant; ignored otherwise.

  void validate() const;

  /// Unchecked evaluation for z >= 0; z == 0 yields the one-sided limit.
  double value(double z) const noexcept;

  /// rho(0+).
  double at_zero() const noexcept;

  /// True when rho has a kink at z == 1 (the `1 ^ z^-delta` variants).
  bool has_breakpoint() const noexcept { return variant != ProfileVariant::exponential_polynomial; }
};

struct ModelParams {
  KernelSpec kernel;
  ProfileSpec profile;
  double beta = 1.0;

  void validate() const;

  /// rho(g(s,t) * distance / beta) without argument checks.
  double edge_probability(double s, double t, double distance) const noexcept {
    return profile.value(kernel.value(s, t) * distance / beta);
  }
};

/// g(s,t); throws DomainError for marks outside (0,1).
double kernel_eval(const KernelSpec& kernel, double s, double t);

/// rho(z); throws DomainError for negative or NaN z.
double profile_eval(const ProfileSpec& profile, double z);

/// Probability that vertices a and b are joined; throws DomainError when a and b
/// are the same vertex.
double connection_probability(const ModelParams& params, const Vertex& a, const Vertex& b);

std::string_view to_string(KernelVariant v);
std::string_view to_string(ProfileVariant v);
KernelVariant parse_kernel_variant(std::string_view name);
ProfileVariant parse_profile_variant(std::string_view name);

void to_json(nlohmann::json& j, const KernelSpec& k);
void from_json(const nlohmann::json& j, KernelSpec& k);
void to_json(nlohmann::json& j, const ProfileSpec& p);
void from_json(const nlohmann::json& j, ProfileSpec& p);
void to_json(nlohmann::json& j, const ModelParams& m);
void from_json(const nlohmann::json& j, ModelParams& m);

}  // namespace wrcm
