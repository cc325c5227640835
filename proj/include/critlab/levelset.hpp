#pragma once

#include <optional>
#include <string>
#include <vector>

#include "critlab/critical_points.hpp"

namespace critlab {

enum class Side { Super, Sub };
std::string_view to_string(Side side);

struct LevelOptions {
  std::optional<double> delta;         // snapping half-width, default 1e-6 * range
  std::optional<double> merge_radius;  // default 3h, used by the diagnostics
};

/// Maximal run of consecutive boundary vertices of one loop inside a component.
struct ContactArc {
  LoopTag loop = LoopTag::Outer;
  double theta_begin = 0.0;
  double theta_end = 0.0;
  int vertex_count = 0;
  bool full_loop = false;
};

struct LevelComponent {
  int id = 0;
  std::vector<int> vertices;   // vertices strictly on this side of t
  std::vector<int> triangles;  // triangles meeting the component
  bool touches_outer = false;
  bool touches_inner = false;
  int euler_characteristic = 1;
  bool simply_connected = true;
  std::vector<ContactArc> contact_arcs;
};

/// Components of {u_h > t} or {u_h < t}. Nodal values within delta of t are
/// snapped onto the level; the region is the exact set where the snapped
/// piecewise-linear field lies on the requested side.
struct ComponentSet {
  Side side = Side::Super;
  double t = 0.0;
  double delta = 0.0;
  std::vector<LevelComponent> components;
  std::vector<int> vertex_component;  // per vertex, -1 if not on this side

  int count() const { return static_cast<int>(components.size()); }
  /// Component containing triangle t, or -1.
  int component_of_triangle(const MeshedDomain& mesh, int tri) const;
};

double default_band_delta(const DiscreteSolution& sol);

ComponentSet superlevel_components(const DiscreteSolution& sol, double t, const LevelOptions& opts = {});
ComponentSet sublevel_components(const DiscreteSolution& sol, double t, const LevelOptions& opts = {});

/// Partition of record indices by level, consecutive levels closer than tol joined.
std::vector<std::vector<int>> group_by_level(const std::vector<CriticalPointRecord>& records, double tol);

struct ClusterResult {
  double t = 0.0;
  int q = 0;
  std::vector<int> record_cluster;  // band component per record
};

/// Connected clusters of the band {|u_h - t| <= delta} that contain records.
/// All records must share one level within 10 delta, else SplitLevels.
ClusterResult critical_clusters(const DiscreteSolution& sol, const std::vector<CriticalPointRecord>& records,
                                const LevelOptions& opts = {});

/// M1 >= sum_m + 1, M2 >= sum_m + 1 and M1 + M2 = 2 sum_m + q + 1.
bool check_counting_identity(int M1, int M2, int sum_m, int q);

/// Simply connected components meeting the outer boundary number sum_m + q - 1.
bool check_ring_contact_identity(int ring_contacts, int sum_m, int q);
int simply_connected_outer_contacts(const ComponentSet& set);

struct LevelSegment {
  Point a;
  Point b;
  int super_component = -1;
  int sub_component = -1;
};

/// Pieces of {u_h = t} (snapped), one per triangle that the level crosses.
std::vector<LevelSegment> level_segments(const DiscreteSolution& sol, double t, const LevelOptions& opts = {});

/// Segments chained into polylines, grouped by super-level component.
struct LevelPolyline {
  int component = -1;
  std::vector<Point> points;
};
std::vector<LevelPolyline> level_polylines(const DiscreteSolution& sol, double t, const LevelOptions& opts = {});

struct LevelSetReport {
  double t = 0.0;
  double delta = 0.0;
  int M1 = 0;
  int M2 = 0;
  std::optional<int> q;
  ComponentSet super;
  ComponentSet sub;
};

/// Both component sets at t and, when records are given, the cluster count.
LevelSetReport analyze_level(const DiscreteSolution& sol, double t,
                             const std::vector<CriticalPointRecord>& records = {}, const LevelOptions& opts = {});

struct ComponentDiagnostic {
  std::string kind;  // LEMMA_3_3_VIOLATION, LEMMA_4_3_VIOLATION, OUTER_CURVE_WITHOUT_CRITICAL_POINT
  Side side = Side::Sub;
  int component = -1;
  int record = -1;
  std::string message;
};

/// For every non-simply-connected component that stays off the outer
/// boundary: records strictly inside it are violations, and at a critical
/// level its outer curve is expected to carry a record.
std::vector<ComponentDiagnostic> annulus_component_diagnostics(const DiscreteSolution& sol, double t,
                                                               const std::vector<CriticalPointRecord>& records,
                                                               const LevelOptions& opts = {});

}  // namespace critlab
