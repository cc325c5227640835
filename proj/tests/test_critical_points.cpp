#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <complex>
#include <sstream>

#include "critlab/critical_points.hpp"
#include "critlab/error.hpp"
#include "critlab/io.hpp"
#include "critlab/oracle.hpp"
#include "oracles.hpp"

using namespace critlab;
using cplx = std::complex<double>;

namespace {

std::shared_ptr<const MeshedDomain> disk(double h) {
  return std::make_shared<const MeshedDomain>(build_disk_mesh(1.0, h));
}

DiscreteSolution re_power(int n, double h) {
  return DiscreteSolution::interpolate(disk(h), [n](const Point& p) { return oracle::re_power(p, n); });
}

// Re F for an analytic F given by a lambda on complex numbers.
template <class F>
DiscreteSolution analytic_field(std::shared_ptr<const MeshedDomain> mesh, F f) {
  return DiscreteSolution::interpolate(std::move(mesh), [f](const Point& p) { return std::real(f(cplx(p.x(), p.y()))); });
}

BoundaryProfile pure_cos(int n) {
  BoundaryProfile p;
  p.cos_coeffs.assign(n + 1, 0.0);
  p.cos_coeffs[n] = 1.0;
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

}  // namespace

TEST_CASE("interpolated Re z^2 has one simple saddle at the origin") {
  const double h = 0.02;
  const auto recs = detect_critical_points(re_power(2, h));
  REQUIRE(recs.size() == 1);
  CHECK(recs[0].location.norm() <= 2 * h);
  CHECK(recs[0].multiplicity == 1);
  CHECK(recs[0].flags == 0);
}

TEST_CASE("interpolated Re z^3 has a double saddle at the origin") {
  const double h = 0.02;
  const auto recs = detect_critical_points(re_power(3, h));
  REQUIRE(recs.size() == 1);
  CHECK(recs[0].location.norm() <= 2 * h);
  CHECK(recs[0].multiplicity == 2);
}

TEST_CASE("u = x has no critical points") {
  const auto u = DiscreteSolution::interpolate(disk(0.02), [](const Point& p) { return p.x(); });
  CHECK(detect_critical_points(u).empty());
}

TEST_CASE("constant field is rejected") {
  const auto u = DiscreteSolution::interpolate(disk(0.1), [](const Point&) { return 2.0; });
  CHECK(code_of([&] { detect_critical_points(u); }) == ErrorCode::ConstantField);
}

TEST_CASE("winding number of the gradient") {
  CHECK(winding_multiplicity(re_power(2, 0.02), Point(0, 0), 0.1) == -1);
  CHECK(winding_multiplicity(re_power(3, 0.02), Point(0, 0), 0.1) == -2);
  const auto x = DiscreteSolution::interpolate(disk(0.02), [](const Point& p) { return p.x(); });
  CHECK(winding_multiplicity(x, Point(0.2, -0.3), 0.25) == 0);

  const auto w = winding_number(re_power(2, 0.02), Point(0, 0), 0.1, 64);
  CHECK(w.samples == 64);
  CHECK(w.residue < 0.15);
  CHECK_FALSE(w.uncertain);
  // Minimum at the origin: degree +1.
  const auto bowl = DiscreteSolution::interpolate(disk(0.02), [](const Point& p) { return p.squaredNorm(); });
  CHECK(winding_multiplicity(bowl, Point(0, 0), 0.2) == 1);
}

TEST_CASE("winding loop errors") {
  const auto u = re_power(2, 0.05);
  CHECK(code_of([&] { winding_multiplicity(u, Point(0.9, 0), 0.2); }) == ErrorCode::LoopExitsDomain);
  CHECK(code_of([&] { winding_multiplicity(u, Point(0, 0), 0.0); }) == ErrorCode::InvalidArgument);
  const auto flat = DiscreteSolution::interpolate(disk(0.05), [](const Point&) { return 0.0; });
  CHECK(code_of([&] { winding_multiplicity(flat, Point(0, 0), 0.3); }) == ErrorCode::LoopThroughZero);
}

TEST_CASE("sign changes of u - t around the loop") {
  CHECK(sign_change_count(re_power(2, 0.02), Point(0, 0), 0.1, 0.0) == 4);
  CHECK(sign_change_count(re_power(3, 0.02), Point(0, 0), 0.1, 0.0) == 6);
  const auto x = DiscreteSolution::interpolate(disk(0.02), [](const Point& p) { return p.x(); });
  CHECK(sign_change_count(x, Point(0, 0), 0.1, 0.0) == 2);
}

TEST_CASE("vertex link sign changes") {
  const auto mesh = disk(0.1);
  const auto u = analytic_field(mesh, [](cplx z) { return z * z; });
  const auto x = analytic_field(mesh, [](cplx z) { return z; });
  // Vertex 0 is the center of the polar mesh.
  REQUIRE(mesh->vertices()[0].norm() == 0.0);
  CHECK(link_sign_changes(u, 0) == 4);
  CHECK(link_sign_changes(x, 0) == 2);
}

TEST_CASE("boundary degree equals minus the multiplicity sum") {
  for (int n = 1; n <= 5; ++n) {
    const auto u = re_power(n, 0.04);
    CHECK(boundary_degree(u) == -(n - 1));
  }
}

TEST_CASE("nearby saddles merge with summed multiplicity") {
  // f' = z^2 - 0.0025: two simple saddles at +-0.05, closer than 6h.
  const double h = 0.02;
  const auto u = analytic_field(disk(h), [](cplx z) { return z * z * z / 3.0 - 0.0025 * z; });
  const auto recs = detect_critical_points(u);
  REQUIRE(recs.size() == 1);
  CHECK(recs[0].multiplicity == 2);
  CHECK(recs[0].has(CpFlag::NearOtherCp));
  CHECK(recs[0].location.norm() <= 2 * h + 0.05);
}

TEST_CASE("well separated saddles stay separate") {
  // f' = z^2 - 0.25: saddles at +-0.5.
  const double h = 0.02;
  const auto u = analytic_field(disk(h), [](cplx z) { return z * z * z / 3.0 - 0.25 * z; });
  const auto recs = detect_critical_points(u);
  REQUIRE(recs.size() == 2);
  for (const auto& r : recs) {
    CHECK(r.multiplicity == 1);
    CHECK(std::abs(std::abs(r.location.x()) - 0.5) <= 2 * h);
    CHECK(std::abs(r.location.y()) <= 2 * h);
    CHECK_FALSE(r.has(CpFlag::NearOtherCp));
  }
  CHECK(recs[0].location.x() < recs[1].location.x());
  CHECK(interior_multiplicity_sum(recs) == 2);
}

TEST_CASE("saddle close to the boundary is flagged") {
  const double h = 0.02;
  const auto u = analytic_field(disk(h), [](cplx z) { return (z - 0.97) * (z - 0.97); });
  const auto recs = detect_critical_points(u);
  REQUIRE(recs.size() == 1);
  CHECK(recs[0].has(CpFlag::NearBoundary));
  CHECK(interior_multiplicity_sum(recs) == 0);
}

TEST_CASE("records export as CSV") {
  const auto recs = detect_critical_points(re_power(2, 0.05));
  const auto csv = records_to_csv(recs);
  std::istringstream in(csv);
  std::string header, row;
  std::getline(in, header);
  CHECK(header == "x,y,multiplicity,critical_value,gradient_residual,flags");
  std::getline(in, row);
  CHECK(std::count(row.begin(), row.end(), ',') == 5);
}

TEST_CASE("property: sign changes equal 2(m + 1) at every record") {
  const auto mesh = disk(0.02);
  for (int n = 2; n <= 5; ++n) {
    const auto u = solve(mesh, CoefficientField::laplace(), {pure_cos(n), std::nullopt});
    for (const auto& r : detect_critical_points(u)) {
      CAPTURE(n);
      CHECK(sign_change_count(u, r.location, r.probe_radius, r.level) == 2 * (r.multiplicity + 1));
      CHECK(winding_multiplicity(u, r.location, r.probe_radius) == -r.multiplicity);
    }
  }
}

TEST_CASE("property: records match the oracle on Laplace data") {
  const double h = 0.02;
  const auto mesh = disk(h);
  std::vector<BoundaryProfile> profiles;
  for (int n = 2; n <= 5; ++n) profiles.push_back(pure_cos(n));
  BoundaryProfile mixed;
  mixed.cos_coeffs = {0.0, 0.2, 0.0, 1.0};
  mixed.sin_coeffs = {0.0, 0.4};
  profiles.push_back(mixed);
  for (const auto& p : profiles) {
    const auto u = solve(mesh, CoefficientField::laplace(), {p, std::nullopt});
    const auto recs = detect_critical_points(u);
    const auto truth = oracle_critical_points(disk_harmonic(1.0, p));
    int oracle_sum = 0;
    for (const auto& t : truth) oracle_sum += t.multiplicity;
    CHECK(interior_multiplicity_sum(recs) == oracle_sum);
    CHECK(-boundary_degree(u) == oracle_sum);
  }
}

TEST_CASE("property: refinement keeps multiplicities and locations") {
  auto f = [](cplx z) { return z * z * z / 3.0 - 0.16 * z + 0.2 * z * z; };
  const auto coarse = detect_critical_points(analytic_field(disk(0.04), f));
  const auto fine = detect_critical_points(analytic_field(disk(0.02), f));
  REQUIRE(coarse.size() == fine.size());
  for (std::size_t i = 0; i < coarse.size(); ++i) {
    CHECK(coarse[i].multiplicity == fine[i].multiplicity);
    CHECK((coarse[i].location - fine[i].location).norm() <= 2 * 0.04);
  }
}
