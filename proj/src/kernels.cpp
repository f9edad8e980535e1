#include "wrcm/kernels.hpp"

#include <algorithm>
#include <cmath>

#include "wrcm/errors.hpp"
#include "wrcm/point_process.hpp"

namespace wrcm {

void KernelSpec::validate() const {
  // gamma == 1 is accepted for evaluation; 1/g is then no longer integrable,
  // which only matters to the theory routines (they check gamma < 1 themselves).
  if (!(gamma >= 0.0 && gamma <= 1.0)) {
    throw ParameterError("kernel gamma must lie in [0,1], got " + std::to_string(gamma));
  }
}

double KernelSpec::value(double s, double t) const noexcept {
  switch (variant) {
    case KernelVariant::constant:
      return 1.0;
    case KernelVariant::sum:
      return 1.0 / (std::pow(s, -gamma) + std::pow(t, -gamma));
    case KernelVariant::min:
      return std::pow(std::min(s, t), gamma);
    case KernelVariant::product:
      return std::pow(s * t, gamma);
    case KernelVariant::preferential_attachment: {
      const double lo = std::min(s, t);
      const double hi = std::max(s, t);
      return std::pow(lo, gamma) * std::pow(hi, 1.0 - gamma);
    }
  }
  return 1.0;
}

void ProfileSpec::validate() const {
  if (!(delta > 1.0) || !std::isfinite(delta)) {
    throw ParameterError("profile delta must exceed 1, got " + std::to_string(delta));
  }
  if (variant == ProfileVariant::capped_polynomial && !(cap > 0.0 && cap <= 1.0)) {
    throw ParameterError("profile cap must lie in (0,1], got " + std::to_string(cap));
  }
}

double ProfileSpec::value(double z) const noexcept {
  switch (variant) {
    case ProfileVariant::hard_polynomial:
      return z <= 1.0 ? 1.0 : std::pow(z, -delta);
    case ProfileVariant::exponential_polynomial:
      return z <= 0.0 ? 1.0 : -std::expm1(-std::pow(z, -delta));
    case ProfileVariant::capped_polynomial:
      return cap * (z <= 1.0 ? 1.0 : std::pow(z, -delta));
  }
  return 0.0;
}

double ProfileSpec::at_zero() const noexcept {
  return variant == ProfileVariant::capped_polynomial ? cap : 1.0;
}

void ModelParams::validate() const {
  kernel.validate();
  profile.validate();
  if (!(beta > 0.0) || !std::isfinite(beta)) {
    throw ParameterError("edge intensity beta must be positive, got " + std::to_string(beta));
  }
}

double kernel_eval(const KernelSpec& kernel, double s, double t) {
  kernel.validate();
  if (!(s > 0.0 && s < 1.0) || !(t > 0.0 && t < 1.0)) {
    throw DomainError("kernel marks must lie in (0,1)");
  }
  return kernel.value(s, t);
}

double profile_eval(const ProfileSpec& profile, double z) {
  profile.validate();
  if (!(z >= 0.0)) throw DomainError("profile argument must be non-negative");
  return profile.value(z);
}

double connection_probability(const ModelParams& params, const Vertex& a, const Vertex& b) {
  params.validate();
  if (a.index == b.index) throw DomainError("connection probability of a vertex with itself is undefined");
  if (!(a.mark > 0.0 && a.mark < 1.0) || !(b.mark > 0.0 && b.mark < 1.0)) {
    throw DomainError("vertex marks must lie in (0,1)");
  }
  return params.edge_probability(a.mark, b.mark, std::abs(a.location - b.location));
}

std::string_view to_string(KernelVariant v) {
  switch (v) {
    case KernelVariant::constant: return "constant";
    case KernelVariant::sum: return "sum";
    case KernelVariant::min: return "min";
    case KernelVariant::product: return "product";
    case KernelVariant::preferential_attachment: return "preferential-attachment";
  }
  return "?";
}

std::string_view to_string(ProfileVariant v) {
  switch (v) {
    case ProfileVariant::hard_polynomial: return "hard-polynomial";
    case ProfileVariant::exponential_polynomial: return "exponential-polynomial";
    case ProfileVariant::capped_polynomial: return "capped-polynomial";
  }
  return "?";
}

KernelVariant parse_kernel_variant(std::string_view name) {
  if (name == "constant") return KernelVariant::constant;
  if (name == "sum") return KernelVariant::sum;
  if (name == "min") return KernelVariant::min;
  if (name == "product") return KernelVariant::product;
  if (name == "preferential-attachment" || name == "pa") return KernelVariant::preferential_attachment;
  throw ParameterError("unknown kernel variant '" + std::string(name) + "'");
}

ProfileVariant parse_profile_variant(std::string_view name) {
  if (name == "hard-polynomial") return ProfileVariant::hard_polynomial;
  if (name == "exponential-polynomial") return ProfileVariant::exponential_polynomial;
  if (name == "capped-polynomial") return ProfileVariant::capped_polynomial;
  throw ParameterError("unknown profile variant '" + std::string(name) + "'");
}

void to_json(nlohmann::json& j, const KernelSpec& k) {
  j = {{"variant", to_string(k.variant)}, {"gamma", k.gamma}};
}

void from_json(const nlohmann::json& j, KernelSpec& k) {
  k.variant = parse_kernel_variant(j.at("variant").get<std::string>());
  k.gamma = j.value("gamma", 0.0);
}

void to_json(nlohmann::json& j, const ProfileSpec& p) {
  j = {{"variant", to_string(p.variant)}, {"delta", p.delta}, {"cap", p.cap}};
}

void from_json(const nlohmann::json& j, ProfileSpec& p) {
  p.variant = parse_profile_variant(j.at("variant").get<std::string>());
  p.delta = j.at("delta").get<double>();
  p.cap = j.value("cap", 1.0);
}

void to_json(nlohmann::json& j, const ModelParams& m) {
  j = {{"kernel", m.kernel}, {"profile", m.profile}, {"beta", m.beta}};
}

void from_json(const nlohmann::json& j, ModelParams& m) {
  m.kernel = j.at("kernel").get<KernelSpec>();
  m.profile = j.at("profile").get<ProfileSpec>();
  m.beta = j.at("beta").get<double>();
}

}  // namespace wrcm
