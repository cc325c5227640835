#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <random>

#include "critlab/boundary.hpp"
#include "critlab/error.hpp"
#include "critlab/io.hpp"
#include "oracles.hpp"

using namespace critlab;

namespace {

BoundaryProfile cosines(std::vector<double> c, std::vector<double> s = {}) {
  BoundaryProfile p;
  p.cos_coeffs = std::move(c);
  p.sin_coeffs = std::move(s);
  return p;
}

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return ErrorCode::Io;
}

BoundaryProfile random_profile(std::mt19937& rng) {
  std::uniform_int_distribution<int> kdist(1, 5);
  std::uniform_real_distribution<double> c(-1.0, 1.0);
  const int K = kdist(rng);
  BoundaryProfile p;
  p.cos_coeffs.assign(K + 1, 0.0);
  p.sin_coeffs.assign(K, 0.0);
  for (auto& x : p.cos_coeffs) x = c(rng);
  for (auto& x : p.sin_coeffs) x = c(rng);
  return p;
}

}  // namespace

TEST_CASE("profile evaluation") {
  const auto c2 = cosines({0, 0, 1});
  CHECK(eval_profile(c2, 0.0) == doctest::Approx(1.0));
  CHECK(eval_profile(c2, M_PI / 2) == doctest::Approx(-1.0));
  CHECK(eval_profile(cosines({2, 0, 1}), M_PI / 4) == doctest::Approx(2.0));
  const auto mixed = cosines({0.5, 0.0, 0.0}, {0.0, 0.0, 1.0});
  CHECK(eval_profile(mixed, M_PI / 6) == doctest::Approx(1.5));
}

TEST_CASE("derivatives of the profile") {
  const auto p = cosines({0.1, 0.7, -0.2}, {0.3, 0.4});
  const double th = 0.83;
  const double d = 1e-5;
  CHECK(p.derivative(th, 1) == doctest::Approx((eval_profile(p, th + d) - eval_profile(p, th - d)) / (2 * d)).epsilon(1e-8));
  CHECK(p.derivative(th, 2) ==
        doctest::Approx((eval_profile(p, th + d) - 2 * eval_profile(p, th) + eval_profile(p, th - d)) / (d * d)).epsilon(1e-4));
}

TEST_CASE("extrema of cos 2theta") {
  const auto s = count_extrema(cosines({0, 0, 1}));
  CHECK(s.n_local_max == 2);
  CHECK(s.n_local_min == 2);
  CHECK(s.all_extrema_global);
  CHECK(s.z_min == doctest::Approx(-1.0));
  CHECK(s.z_max == doctest::Approx(1.0));
}

TEST_CASE("extrema of cos theta + 0.3 cos 2theta match brute-force sampling") {
  const auto p = cosines({0, 1, 0.3});
  const auto brute = oracle::brute_extrema([](double t) { return std::cos(t) + 0.3 * std::cos(2 * t); });
  const auto s = count_extrema(p);
  CHECK(s.n_local_max == brute.n_max);
  CHECK(s.n_local_min == brute.n_min);
  CHECK(s.n_local_max == 2);
  CHECK_FALSE(s.all_extrema_global);
  REQUIRE(s.local_maxima.size() == 2);
  // Maxima at 0 (global, 1.3) and pi (local, -0.7).
  CHECK(s.local_maxima[0].theta == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(s.local_maxima[0].value == doctest::Approx(1.3));
  CHECK(s.local_maxima[0].global);
  CHECK(s.local_maxima[1].theta == doctest::Approx(M_PI));
  CHECK(s.local_maxima[1].value == doctest::Approx(-0.7));
  CHECK_FALSE(s.local_maxima[1].global);
  CHECK(s.n_global_max == 1);
}

TEST_CASE("shifted cosine counts global extrema") {
  const auto s = count_extrema(cosines({2, 0, 1}));
  CHECK(s.n_global_max == 2);
  CHECK(s.n_global_min == 2);
  for (const auto& e : s.local_maxima) CHECK(e.value == doctest::Approx(3.0));
  for (const auto& e : s.local_minima) CHECK(e.value == doctest::Approx(1.0));
}

TEST_CASE("constant and plateau profiles are rejected") {
  CHECK(code_of([] { count_extrema(cosines({3.0})); }) == ErrorCode::DegenerateProfile);
  CHECK(code_of([] { count_extrema(cosines({1.0, 0.0, 0.0})); }) == ErrorCode::DegenerateProfile);
  // psi' = -sin t (1 - cos t): psi' and psi'' both vanish at t = 0.
  CHECK(code_of([] { count_extrema(cosines({0, 1, -0.25})); }) == ErrorCode::DegenerateProfile);
}

TEST_CASE("scenario classification") {
  const auto ge = count_extrema(cosines({2, 0, 1}));
  CHECK(classify_scenario(DomainKind::Annulus, ge, 0.0).kind == ScenarioKind::AnnulusPsiGeH);
  CHECK(classify_scenario(DomainKind::Annulus, ge, 5.0).kind == ScenarioKind::AnnulusPsiLeH);
  CHECK(classify_scenario(DomainKind::Disk, ge, std::nullopt).kind == ScenarioKind::SimplyConnected);
  const auto between = count_extrema(cosines({0, 0, 1}));
  CHECK(classify_scenario(DomainKind::Annulus, between, 0.0).kind == ScenarioKind::AnnulusHBetween);
  CHECK(code_of([&] { classify_scenario(DomainKind::Annulus, ge, 1.0); }) == ErrorCode::DegenerateClass);
  CHECK(code_of([&] { classify_scenario(DomainKind::Annulus, ge, 3.0); }) == ErrorCode::DegenerateClass);
  CHECK(code_of([&] { classify_scenario(DomainKind::Annulus, ge, std::nullopt); }) == ErrorCode::InvalidArgument);
  CHECK(code_of([&] { classify_scenario(DomainKind::Disk, ge, 0.0); }) == ErrorCode::InvalidArgument);
  CHECK(to_string(ScenarioKind::AnnulusPsiGeH) == "ANNULUS_PSI_GE_H");
}

TEST_CASE("profile JSON round trip") {
  const auto p = cosines({0.5, 1.0}, {0.0, 0.25});
  const auto back = profile_from_json(nlohmann::json::parse(profile_to_json(p).dump()));
  CHECK(back.cos_coeffs == p.cos_coeffs);
  CHECK(back.sin_coeffs == p.sin_coeffs);
  CHECK_THROWS_AS(profile_from_json(nlohmann::json::parse(R"({"cos": ["x"]})")), Error);
  CHECK_THROWS_AS(profile_from_json(nlohmann::json::parse("[1, 2]")), Error);
}

TEST_CASE("property: random profiles") {
  std::mt19937 rng(20240611);
  int checked = 0;
  for (int trial = 0; trial < 60; ++trial) {
    const auto p = random_profile(rng);
    BoundaryExtremaSummary s;
    try {
      s = count_extrema(p);
    } catch (const Error& e) {
      REQUIRE(e.code() == ErrorCode::DegenerateProfile);
      continue;
    }
    ++checked;
    CAPTURE(trial);

    SUBCASE("counts agree with brute-force sampling") {
      const auto brute = oracle::brute_extrema([&](double t) { return eval_profile(p, t); });
      CHECK(s.n_local_max == brute.n_max);
      CHECK(s.n_local_min == brute.n_min);
      CHECK(s.z_max == doctest::Approx(brute.top).epsilon(1e-6));
      CHECK(s.z_min == doctest::Approx(brute.bottom).epsilon(1e-6));
    }
    SUBCASE("summary invariants") {
      CHECK(s.n_global_max <= s.n_local_max);
      CHECK(s.n_global_min <= s.n_local_min);
      CHECK(s.n_local_max == s.n_local_min);
      CHECK(s.all_extrema_global == (s.n_global_max == s.n_local_max && s.n_global_min == s.n_local_min));
    }
    SUBCASE("maxima and minima alternate") {
      std::vector<std::pair<double, int>> all;
      for (const auto& e : s.local_maxima) all.emplace_back(e.theta, 1);
      for (const auto& e : s.local_minima) all.emplace_back(e.theta, -1);
      std::sort(all.begin(), all.end());
      for (std::size_t i = 0; i < all.size(); ++i) CHECK(all[i].second != all[(i + 1) % all.size()].second);
    }
    SUBCASE("rotation moves extrema and keeps counts") {
      const double alpha = 0.7;
      const auto r = count_extrema(p.rotated(alpha));
      CHECK(r.n_local_max == s.n_local_max);
      CHECK(r.n_local_min == s.n_local_min);
      CHECK(r.n_global_max == s.n_global_max);
      for (const auto& e : s.local_maxima) {
        const double target = std::fmod(e.theta + alpha, 2 * M_PI);
        const bool found = std::any_of(r.local_maxima.begin(), r.local_maxima.end(), [&](const Extremum& x) {
          const double d = std::abs(x.theta - target);
          return std::min(d, 2 * M_PI - d) < 1e-7;
        });
        CHECK(found);
      }
    }
    SUBCASE("adding a constant shifts the extremal values") {
      const auto sh = count_extrema(p.shifted(1.75));
      CHECK(sh.n_local_max == s.n_local_max);
      CHECK(sh.n_local_min == s.n_local_min);
      CHECK(sh.z_max == doctest::Approx(s.z_max + 1.75));
      CHECK(sh.z_min == doctest::Approx(s.z_min + 1.75));
    }
  }
  CHECK(checked > 40);
}
