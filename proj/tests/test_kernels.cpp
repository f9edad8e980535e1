#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "wrcm/errors.hpp"
#include "wrcm/kernels.hpp"
#include "wrcm/point_process.hpp"
#include "wrcm/rng.hpp"

using namespace wrcm;
using doctest::Approx;

namespace {

const std::vector<std::pair<KernelVariant, std::string>> kKernels = {
    {KernelVariant::constant, "constant"},
    {KernelVariant::sum, "sum"},
    {KernelVariant::min, "min"},
    {KernelVariant::product, "product"},
    {KernelVariant::preferential_attachment, "pa"}};

const std::vector<std::pair<ProfileVariant, std::string>> kProfiles = {
    {ProfileVariant::hard_polynomial, "hard"},
    {ProfileVariant::exponential_polynomial, "exp"},
    {ProfileVariant::capped_polynomial, "capped"}};

ModelParams model(KernelVariant k, double gamma, ProfileVariant p, double delta, double beta,
                  double cap = 1.0) {
  ModelParams m;
  m.kernel = {k, gamma};
  m.profile = {p, delta, cap};
  m.beta = beta;
  return m;
}

}  // namespace

TEST_CASE("kernel examples") {
  CHECK(kernel_eval({KernelVariant::min, 0.5}, 0.25, 0.5) == Approx(0.5));
  CHECK(kernel_eval({KernelVariant::sum, 1.0}, 0.5, 0.5) == Approx(0.25));
  CHECK(kernel_eval({KernelVariant::preferential_attachment, 0.5}, 0.25, 0.5) ==
        Approx(std::sqrt(0.125)).epsilon(1e-12));
  CHECK(kernel_eval({KernelVariant::constant, 0.7}, 0.01, 0.9) == 1.0);
}

TEST_CASE("kernels agree with the reference formulas") {
  SplitMixEngine rng(1);
  for (int trial = 0; trial < 2000; ++trial) {
    const double s = rng.uniform(), t = rng.uniform(), gamma = 0.99 * rng.uniform();
    for (auto& [v, name] : kKernels)
      CHECK(kernel_eval({v, gamma}, s, t) == Approx(oracle::kernel(name, gamma, s, t)).epsilon(1e-12));
  }
}

TEST_CASE("profile examples") {
  CHECK(profile_eval({ProfileVariant::hard_polynomial, 2.0}, 0.5) == 1.0);
  CHECK(profile_eval({ProfileVariant::hard_polynomial, 2.0}, 2.0) == Approx(0.25));
  CHECK(profile_eval({ProfileVariant::exponential_polynomial, 3.0}, 10.0) ==
        Approx(-std::expm1(-0.001)).epsilon(1e-12));
  CHECK(profile_eval({ProfileVariant::exponential_polynomial, 3.0}, 10.0) == Approx(9.995e-4).epsilon(1e-4));
}

TEST_CASE("rho(0+) is exposed and used at z = 0") {
  ProfileSpec hard{ProfileVariant::hard_polynomial, 2.0};
  ProfileSpec capped{ProfileVariant::capped_polynomial, 2.0, 0.8};
  ProfileSpec expo{ProfileVariant::exponential_polynomial, 2.0};
  CHECK(hard.at_zero() == 1.0);
  CHECK(capped.at_zero() == Approx(0.8));
  CHECK(expo.at_zero() == 1.0);
  CHECK(profile_eval(capped, 0.0) == Approx(0.8));
  CHECK(profile_eval(expo, 0.0) == 1.0);
}

TEST_CASE("profiles agree with the reference formulas") {
  SplitMixEngine rng(2);
  for (int trial = 0; trial < 2000; ++trial) {
    const double z = std::exp(10.0 * (rng.uniform() - 0.5));
    const double delta = 1.0 + 1e-3 + 4.0 * rng.uniform(), cap = 0.05 + 0.95 * rng.uniform();
    for (auto& [v, name] : kProfiles)
      CHECK(profile_eval({v, delta, cap}, z) == Approx(oracle::profile(name, delta, cap, z)).epsilon(1e-12));
  }
}

TEST_CASE("connection probability examples") {
  auto m = model(KernelVariant::min, 0.5, ProfileVariant::hard_polynomial, 2.0, 1.0);
  const Vertex a{0, 0.0, 0.25}, b{1, 4.0, 0.25};
  CHECK(connection_probability(m, a, b) == Approx(0.25));
  const Vertex c{1, 1e-12, 0.25};
  CHECK(connection_probability(m, a, c) == 1.0);
  m.profile = {ProfileVariant::capped_polynomial, 2.0, 0.8};
  CHECK(connection_probability(m, a, b) == Approx(0.2));
}

TEST_CASE("randomized symmetry and monotonicity") {
  SplitMixEngine rng(3);
  for (int trial = 0; trial < 3000; ++trial) {
    const double s = rng.uniform(), t = rng.uniform(), s2 = rng.uniform();
    const double gamma = 0.99 * rng.uniform(), delta = 1.01 + 4 * rng.uniform();
    for (auto& [v, name] : kKernels) {
      KernelSpec k{v, gamma};
      CHECK(kernel_eval(k, s, t) == kernel_eval(k, t, s));
      // Non-decreasing in the first mark.
      const double lo = std::min(s, s2), hi = std::max(s, s2);
      CHECK(kernel_eval(k, lo, t) <= kernel_eval(k, hi, t) * (1 + 1e-12));
    }
    const double z1 = std::exp(8 * (rng.uniform() - 0.5)), z2 = std::exp(8 * (rng.uniform() - 0.5));
    for (auto& [v, name] : kProfiles) {
      ProfileSpec p{v, delta, 0.5};
      const double r1 = profile_eval(p, std::min(z1, z2)), r2 = profile_eval(p, std::max(z1, z2));
      CHECK(r1 >= r2);
      CHECK(r1 <= 1.0);
      CHECK(r2 >= 0.0);
    }
    const double beta1 = std::exp(6 * (rng.uniform() - 0.5)), beta2 = beta1 * (1 + rng.uniform());
    const Vertex a{0, 0.0, s}, b{1, 1 + 20 * rng.uniform(), t};
    auto m1 = model(kKernels[trial % 5].first, gamma, kProfiles[trial % 3].first, delta, beta1, 0.7);
    auto m2 = m1;
    m2.beta = beta2;
    CHECK(connection_probability(m1, a, b) == connection_probability(m1, b, a));
    CHECK(connection_probability(m1, a, b) <= connection_probability(m2, a, b));
  }
}

TEST_CASE("kernel sandwich") {
  SplitMixEngine rng(4);
  for (int trial = 0; trial < 5000; ++trial) {
    const double s = rng.uniform(), t = rng.uniform(), gamma = rng.uniform();
    const double gs = kernel_eval({KernelVariant::sum, gamma}, s, t);
    const double gm = kernel_eval({KernelVariant::min, gamma}, s, t);
    const double gp = kernel_eval({KernelVariant::preferential_attachment, gamma}, s, t);
    CHECK(gs <= gm * (1 + 1e-12));
    CHECK(gm <= 2 * gs * (1 + 1e-12));
    CHECK(gp <= gm * (1 + 1e-12));
  }
}

TEST_CASE("integrability of 1/g with a diverging control") {
  // Exact values of the double integral of 1/g over the unit square.
  const double gamma = 0.6;
  const std::vector<std::pair<KernelVariant, double>> exact = {
      {KernelVariant::constant, 1.0},
      {KernelVariant::min, 2.0 * (1.0 / (1 - gamma) - 1.0 / (2 - gamma))},
      {KernelVariant::product, 1.0 / ((1 - gamma) * (1 - gamma))},
      // 1/g^sum = s^-γ + t^-γ
      {KernelVariant::sum, 2.0 / (1 - gamma)}};
  for (auto [v, value] : exact) {
    KernelSpec k{v, gamma};
    auto f = [&](double s, double t) { return 1.0 / kernel_eval(k, s, t); };
    const double coarse = oracle::log_midpoint_square(f, 1e-14, 1.0, 400);
    const double fine = oracle::log_midpoint_square(f, 1e-14, 1.0, 800);
    CHECK(std::abs(fine - coarse) < 1e-3 * fine);
    CHECK(fine == Approx(value).epsilon(2e-3));
  }
  // pa: finite and bounded by the min-kernel value via the sandwich.
  {
    KernelSpec k{KernelVariant::preferential_attachment, gamma};
    auto f = [&](double s, double t) { return 1.0 / kernel_eval(k, s, t); };
    const double a = oracle::log_midpoint_square(f, 1e-14, 1.0, 400);
    const double b = oracle::log_midpoint_square(f, 1e-14, 1.0, 800);
    CHECK(std::abs(a - b) < 1e-3 * b);
  }
  // Control: gamma = 1 for the min kernel diverges logarithmically, so pushing
  // the lower cutoff down keeps adding mass.
  KernelSpec k{KernelVariant::min, 1.0};
  auto f = [&](double s, double t) { return 1.0 / kernel_eval(k, s, t); };
  const double i6 = oracle::log_midpoint_square(f, 1e-6, 1.0, 600);
  const double i12 = oracle::log_midpoint_square(f, 1e-12, 1.0, 600);
  CHECK(i12 - i6 > 10.0);
}

TEST_CASE("validation errors") {
  CHECK_THROWS_AS(kernel_eval({KernelVariant::min, 0.5}, 0.0, 0.5), DomainError);
  CHECK_THROWS_AS(kernel_eval({KernelVariant::min, 0.5}, 0.5, 1.0), DomainError);
  CHECK_THROWS_AS(profile_eval({ProfileVariant::hard_polynomial, 2.0}, -1.0), DomainError);
  CHECK_THROWS_AS((ProfileSpec{ProfileVariant::hard_polynomial, 1.0}).validate(), ParameterError);
  CHECK_THROWS_AS((ProfileSpec{ProfileVariant::capped_polynomial, 2.0, 0.0}).validate(), ParameterError);
  CHECK_THROWS_AS((ProfileSpec{ProfileVariant::capped_polynomial, 2.0, 1.5}).validate(), ParameterError);
  CHECK_THROWS_AS((KernelSpec{KernelVariant::min, -0.1}).validate(), ParameterError);
  CHECK_THROWS_AS((KernelSpec{KernelVariant::min, 1.1}).validate(), ParameterError);
  auto m = model(KernelVariant::min, 0.5, ProfileVariant::hard_polynomial, 2.0, 0.0);
  CHECK_THROWS_AS(m.validate(), ParameterError);
  m.beta = 1.0;
  const Vertex a{3, 1.0, 0.5};
  CHECK_THROWS_AS(connection_probability(m, a, a), DomainError);
}

TEST_CASE("names and JSON round trip") {
  for (auto& [v, name] : kKernels) CHECK(parse_kernel_variant(to_string(v)) == v);
  for (auto& [v, name] : kProfiles) CHECK(parse_profile_variant(to_string(v)) == v);
  CHECK_THROWS_AS(parse_kernel_variant("nonsense"), ParameterError);
  auto m = model(KernelVariant::preferential_attachment, 0.3, ProfileVariant::capped_polynomial, 2.5, 4.0, 0.6);
  nlohmann::json j = m;
  CHECK(j["kernel"]["variant"] == "preferential-attachment");
  CHECK(j["profile"]["cap"] == 0.6);
  const ModelParams back = j.get<ModelParams>();
  CHECK(back.kernel.variant == m.kernel.variant);
  CHECK(back.kernel.gamma == m.kernel.gamma);
  CHECK(back.profile.delta == m.profile.delta);
  CHECK(back.beta == m.beta);
}
