#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "critlab/solver.hpp"

namespace critlab {

enum class CpFlag : std::uint8_t {
  NearBoundary = 1,
  NearOtherCp = 2,
  WindingUncertain = 4,
};

std::string_view to_string(CpFlag flag);

struct CriticalPointRecord {
  Point location;
  int multiplicity = 1;
  double gradient_residual = 0.0;  // |grad u_h| in the triangle containing location
  double critical_value = 0.0;     // u_h(location)
  /// Level of the discrete saddle: u_h at the anchor vertex, or the middle of
  /// the range when several discrete saddles merged. Level analyses use this
  /// value rather than the interpolated one.
  double level = 0.0;
  /// Half the spread of the discrete saddle levels merged into this record;
  /// level sits midway. Zero for a single discrete saddle.
  double level_spread = 0.0;
  int anchor_vertex = -1;
  double probe_radius = 0.0;
  std::uint8_t flags = 0;

  bool has(CpFlag f) const { return (flags & static_cast<std::uint8_t>(f)) != 0; }
  void set(CpFlag f) { flags |= static_cast<std::uint8_t>(f); }
  std::vector<std::string> flag_names() const;
};

struct DetectOptions {
  std::optional<double> grad_tol;      // default 1e-3 * range / diameter
  std::optional<double> merge_radius;  // default 3h
  std::optional<double> group_radius;  // default 6h
  int max_escalations = 4;
};

struct WindingResult {
  int degree = 0;
  double residue = 0.0;        // |total / 2pi - degree|
  double max_increment = 0.0;  // largest single angle step
  int samples = 0;
  bool uncertain = false;
};

/// Degree of grad u_h along the counterclockwise circle. The gradient of each
/// sample is taken from its containing triangle. Throws LoopExitsDomain and
/// LoopThroughZero.
WindingResult winding_number(const DiscreteSolution& sol, const Point& center, double radius, int samples = 0);
int winding_multiplicity(const DiscreteSolution& sol, const Point& center, double radius);

/// Sign changes of u_h - t along the sampled circle.
int sign_change_count(const DiscreteSolution& sol, const Point& center, double radius, double t, int samples = 0);

/// Degree of grad u_h over the oriented boundary (outer counterclockwise,
/// inner clockwise), sampled on loops h/4 inside each boundary circle.
int boundary_degree(const DiscreteSolution& sol);

/// Number of sign changes of u(w) - u(v) around the link of an interior
/// vertex, ties broken by vertex index. 0 extremum, 2 regular, 2(m+1) saddle.
int link_sign_changes(const DiscreteSolution& sol, int v);

std::vector<CriticalPointRecord> detect_critical_points(const DiscreteSolution& sol, const DetectOptions& opts = {});

/// Records without NEAR_BOUNDARY, the ones that enter the sum of multiplicities.
int interior_multiplicity_sum(const std::vector<CriticalPointRecord>& records);

}  // namespace critlab
