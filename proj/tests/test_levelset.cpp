#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <complex>

#include "critlab/critical_points.hpp"
#include "critlab/error.hpp"
#include "critlab/io.hpp"
#include "critlab/levelset.hpp"
#include "oracles.hpp"

using namespace critlab;

namespace {

std::shared_ptr<const MeshedDomain> disk(double h) {
  return std::make_shared<const MeshedDomain>(build_disk_mesh(1.0, h));
}

DiscreteSolution re_power(int n, double h) {
  return DiscreteSolution::interpolate(disk(h), [n](const Point& p) { return oracle::re_power(p, n); });
}

DiscreteSolution x_field(double h) {
  return DiscreteSolution::interpolate(disk(h), [](const Point& p) { return p.x(); });
}

BoundaryProfile cosines(std::vector<double> c) {
  BoundaryProfile p;
  p.cos_coeffs = std::move(c);
  return p;
}

DiscreteSolution annulus_1_3(double h) {
  auto mesh = std::make_shared<const MeshedDomain>(build_annulus_mesh(1.0, 3.0, h));
  return solve(mesh, CoefficientField::laplace(), {cosines({2, 0, 1}), 0.0});
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

std::vector<CriticalPointRecord> interior_records(const DiscreteSolution& u) {
  std::vector<CriticalPointRecord> out;
  for (const auto& r : detect_critical_points(u)) {
    if (!r.has(CpFlag::NearBoundary)) out.push_back(r);
  }
  return out;
}

}  // namespace

TEST_CASE("Re z^2 at its critical level") {
  const auto u = re_power(2, 0.02);
  const auto sup = superlevel_components(u, 0.0);
  const auto sub = sublevel_components(u, 0.0);
  CHECK(sup.count() == 2);
  CHECK(sub.count() == 2);
  for (const auto& c : sup.components) {
    CHECK(c.touches_outer);
    CHECK(c.simply_connected);
    CHECK(c.euler_characteristic == 1);
  }
  const auto recs = interior_records(u);
  CHECK(critical_clusters(u, recs).q == 1);
}

TEST_CASE("Re z^3 at its critical level") {
  const auto u = re_power(3, 0.02);
  CHECK(superlevel_components(u, 0.0).count() == 3);
  CHECK(sublevel_components(u, 0.0).count() == 3);
  const auto rep = analyze_level(u, 0.0, interior_records(u));
  CHECK(rep.M1 == 3);
  CHECK(rep.M2 == 3);
  REQUIRE(rep.q);
  CHECK(*rep.q == 1);
}

TEST_CASE("u = x splits the disk in two halves") {
  const auto u = x_field(0.02);
  CHECK(superlevel_components(u, 0.0).count() == 1);
  CHECK(sublevel_components(u, 0.0).count() == 1);
  const auto rep = analyze_level(u, 0.3);
  CHECK(rep.M1 == 1);
  CHECK(rep.M2 == 1);
  CHECK_FALSE(rep.q.has_value());
}

TEST_CASE("levels outside the range are rejected") {
  const auto u = x_field(0.1);
  CHECK(code_of([&] { superlevel_components(u, 1.0); }) == ErrorCode::LevelOutOfRange);
  CHECK(code_of([&] { sublevel_components(u, -2.0); }) == ErrorCode::LevelOutOfRange);
}

TEST_CASE("cluster count preconditions") {
  const auto u = re_power(2, 0.05);
  CHECK(code_of([&] { critical_clusters(u, {}); }) == ErrorCode::InvalidArgument);
  CriticalPointRecord a, b;
  a.location = Point(0.0, 0.0);
  b.location = Point(0.5, 0.0);
  a.level = a.critical_value = 0.0;
  b.level = b.critical_value = 0.25;
  CHECK(code_of([&] { critical_clusters(u, {a, b}); }) == ErrorCode::SplitLevels);
}

TEST_CASE("grouping records by level") {
  std::vector<CriticalPointRecord> recs(4);
  const double levels[] = {0.5, 0.1, 0.5000001, 0.1000002};
  for (int i = 0; i < 4; ++i) recs[i].level = levels[i];
  const auto groups = group_by_level(recs, 1e-5);
  REQUIRE(groups.size() == 2);
  CHECK(groups[0].size() == 2);
  CHECK(groups[1].size() == 2);
  CHECK(recs[groups[0][0]].level == doctest::Approx(0.1).epsilon(1e-5));
}

TEST_CASE("counting identity") {
  CHECK(check_counting_identity(2, 2, 1, 1));
  CHECK(check_counting_identity(3, 3, 2, 1));
  CHECK_FALSE(check_counting_identity(2, 2, 2, 1));
  CHECK_FALSE(check_counting_identity(3, 2, 1, 1));
  CHECK(check_ring_contact_identity(2, 2, 1));
  CHECK_FALSE(check_ring_contact_identity(3, 2, 1));
}

TEST_CASE("annulus a = 1, b = 3 at the saddle level") {
  const auto u = annulus_1_3(0.02);
  const auto recs = interior_records(u);
  REQUIRE(recs.size() == 2);
  const double t = recs[0].level;
  CHECK(std::abs(recs[1].level - t) <= 1e-9);

  const auto sub = sublevel_components(u, t);
  bool inner_ring = false;
  for (const auto& c : sub.components) {
    if (c.touches_inner) {
      inner_ring = true;
      CHECK_FALSE(c.simply_connected);
      CHECK_FALSE(c.touches_outer);
    }
  }
  CHECK(inner_ring);

  // Independent trace of the oracle field: along every ray the level t is
  // first reached at some r(theta) in (1, 3), so the level curve bounding the
  // inner ring is one closed loop. On the rays theta = +-pi/2 u peaks at t
  // exactly at the saddles, which therefore lie on that one loop.
  const oracle::AnnulusCos2 exact{1.0, 3.0, 0.0, 2.0, 1.0};
  const double saddle = exact.root_moduli()[1];
  const double t_exact = exact(Point(0.0, saddle));
  bool closed = true;
  double r_top = 0.0;
  for (int i = 0; i < 720; ++i) {
    const double th = 2 * M_PI * i / 720;
    double r = 1.0;
    while (r < 3.0 && exact(Point(r * std::cos(th), r * std::sin(th))) < t_exact - 1e-7) r += 1e-4;
    closed = closed && r < 3.0;
    if (i == 180) r_top = r;
  }
  CHECK(closed);
  CHECK(r_top == doctest::Approx(saddle).epsilon(1e-3));

  const auto clusters = critical_clusters(u, recs);
  CHECK(clusters.q == 1);
  CHECK(clusters.record_cluster[0] == clusters.record_cluster[1]);

  const auto rep = analyze_level(u, t, recs);
  CHECK(rep.M1 == 2);
  CHECK(rep.M2 == 3);
  // Caps near theta = +-pi/2 are the simply connected sublevel pieces on the outer circle.
  CHECK(simply_connected_outer_contacts(rep.sub) == 2);
  CHECK(check_ring_contact_identity(simply_connected_outer_contacts(rep.sub), 2, *rep.q));
  CHECK(annulus_component_diagnostics(u, t, recs).empty());
}

TEST_CASE("annulus diagnostics") {
  const auto u = annulus_1_3(0.04);
  const auto recs = interior_records(u);

  SUBCASE("level just above H: inner ring holds no critical point") {
    const auto sub = sublevel_components(u, 0.01);
    int rings = 0;
    for (const auto& c : sub.components) rings += !c.simply_connected && !c.touches_outer;
    CHECK(rings == 1);
    CHECK(annulus_component_diagnostics(u, 0.01, recs).empty());
  }
  SUBCASE("fabricated record inside the ring") {
    // At t = 0.01 the ring is a single layer of triangles; t = 0.3 leaves room inside.
    CriticalPointRecord fake;
    fake.location = Point(0.0, 1.05);
    fake.level = fake.critical_value = 0.1;
    auto with_fake = recs;
    with_fake.push_back(fake);
    const auto d = annulus_component_diagnostics(u, 0.3, with_fake);
    REQUIRE(d.size() == 1);
    CHECK(d[0].kind == "LEMMA_3_3_VIOLATION");
    CHECK(d[0].side == Side::Sub);
    CHECK(d[0].record == static_cast<int>(with_fake.size()) - 1);
  }
  SUBCASE("no critical points, regular level") {
    auto mesh = std::make_shared<const MeshedDomain>(build_annulus_mesh(1.0, 3.0, 0.04));
    const auto v = solve(mesh, CoefficientField::laplace(), {cosines({2, 1}), 0.0});
    CHECK(interior_records(v).empty());
    CHECK(annulus_component_diagnostics(v, 0.5, {}).empty());
  }
  SUBCASE("disk is rejected") {
    CHECK(code_of([] { annulus_component_diagnostics(re_power(2, 0.1), 0.1, {}); }) == ErrorCode::InvalidArgument);
  }
}

TEST_CASE("level lines and SVG export") {
  const auto u = re_power(2, 0.05);
  const auto segs = level_segments(u, 0.1);
  CHECK_FALSE(segs.empty());
  for (const auto& s : segs) {
    CHECK(oracle::re_power(s.a, 2) == doctest::Approx(0.1).epsilon(0.05));
    CHECK(s.super_component >= 0);
  }
  const auto lines = level_polylines(u, 0.1);
  CHECK(lines.size() == 2);
  const auto svg = level_lines_svg(u, 0.1, {}, interior_records(u));
  CHECK(svg.rfind("<svg", 0) == 0);
  CHECK(svg.find("<polyline") != std::string::npos);
  CHECK(svg.find("m=1") != std::string::npos);
}

TEST_CASE("level report JSON") {
  const auto u = re_power(2, 0.05);
  const auto j = level_report_to_json(analyze_level(u, 0.0, interior_records(u)));
  CHECK(j["M1"] == 2);
  CHECK(j["M2"] == 2);
  CHECK(j["q"] == 1);
  CHECK(j["superlevel"].size() == 2);
  CHECK(j["superlevel"][0]["touches_outer"] == true);
}

TEST_CASE("property: regular levels are stable under small shifts") {
  const auto u = annulus_1_3(0.04);
  const double range = u.max_value() - u.min_value();
  const double delta = default_band_delta(u);
  CHECK(delta == doctest::Approx(1e-6 * range));
  for (double t : {0.3, 0.9, 1.5, 2.5}) {
    const auto base = analyze_level(u, t);
    for (double s : {-delta, delta}) {
      const auto moved = analyze_level(u, t + s);
      CHECK(moved.M1 == base.M1);
      CHECK(moved.M2 == base.M2);
    }
  }
}

TEST_CASE("property: components meet the boundary") {
  SUBCASE("disk: every component of either side touches the circle") {
    auto mesh = disk(0.03);
    BoundaryProfile p = cosines({0.1, 0.4, -0.6, 0.3, 0.2});
    const auto u = solve(mesh, CoefficientField::laplace(), {p, std::nullopt});
    for (int i = 1; i < 10; ++i) {
      const double t = u.min_value() + (u.max_value() - u.min_value()) * i / 10.0;
      for (const auto& set : {superlevel_components(u, t), sublevel_components(u, t)}) {
        for (const auto& c : set.components) CHECK(c.touches_outer);
      }
    }
  }
  SUBCASE("annulus, t above H: superlevel components touch the outer circle") {
    const auto u = annulus_1_3(0.04);
    for (double t : {0.2, 0.8, 1.2, 2.0, 2.9}) {
      for (const auto& c : superlevel_components(u, t).components) CHECK(c.touches_outer);
    }
  }
}

TEST_CASE("property: crossing a single critical level changes M1 + M2 by the multiplicity") {
  for (int n = 2; n <= 5; ++n) {
    CAPTURE(n);
    const auto u = re_power(n, 0.02);
    const auto recs = interior_records(u);
    REQUIRE(recs.size() == 1);
    const double t = recs[0].level;
    const double delta = default_band_delta(u);
    const auto at = analyze_level(u, t, recs);
    for (double s : {-2.0 * delta, 2.0 * delta}) {
      const auto off = analyze_level(u, t + s);
      CHECK(at.M1 + at.M2 - (off.M1 + off.M2) == recs[0].multiplicity);
    }
    CHECK(check_counting_identity(at.M1, at.M2, recs[0].multiplicity, *at.q));
  }
}

TEST_CASE("property: component counts survive refinement") {
  const auto coarse = annulus_1_3(0.04);
  const auto fine = annulus_1_3(0.02);
  for (double t : {0.5, 1.2, 2.2}) {
    const auto a = analyze_level(coarse, t);
    const auto b = analyze_level(fine, t);
    CHECK(a.M1 == b.M1);
    CHECK(a.M2 == b.M2);
  }
}
