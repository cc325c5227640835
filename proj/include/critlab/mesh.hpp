#pragma once

#include <array>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace critlab {

using Point = Eigen::Vector2d;
using Triangle = std::array<int, 3>;

enum class DomainKind { Disk, Annulus };
enum class LoopTag { Outer, Inner };

/// One boundary component. Vertices are ordered with the domain on the left,
/// so the outer loop runs counterclockwise and the inner loop clockwise.
struct BoundaryLoop {
  LoopTag tag = LoopTag::Outer;
  double radius = 0.0;
  std::vector<int> vertices;
};

/// Conforming triangulation of a disk or a concentric annulus centered at
/// the origin. Immutable once built; all adjacency is precomputed.
class MeshedDomain {
 public:
  MeshedDomain(DomainKind kind, double inner_radius, double outer_radius, double h,
               std::vector<Point> vertices, std::vector<Triangle> triangles,
               std::vector<BoundaryLoop> loops);

  DomainKind kind() const noexcept { return kind_; }
  double h() const noexcept { return h_; }
  /// Zero for a disk.
  double inner_radius() const noexcept { return inner_radius_; }
  double outer_radius() const noexcept { return outer_radius_; }

  const std::vector<Point>& vertices() const noexcept { return vertices_; }
  const std::vector<Triangle>& triangles() const noexcept { return triangles_; }
  const std::vector<BoundaryLoop>& boundary_loops() const noexcept { return loops_; }
  int num_vertices() const noexcept { return static_cast<int>(vertices_.size()); }
  int num_triangles() const noexcept { return static_cast<int>(triangles_.size()); }

  bool is_boundary(int v) const { return loop_of_[v] >= 0; }
  /// Index into boundary_loops(), or -1 for interior vertices.
  int loop_of(int v) const { return loop_of_[v]; }
  /// Polar angle in [0, 2pi) for boundary vertices, NaN otherwise.
  double boundary_param(int v) const { return boundary_param_[v]; }

  /// Neighbor across the edge opposite local vertex i, or -1 on the boundary.
  const std::array<int, 3>& neighbors(int t) const { return neighbors_[t]; }
  std::span<const int> incident_triangles(int v) const;
  /// Neighbor vertices of v in counterclockwise order. Closed cycle for
  /// interior vertices; for boundary vertices the fan is open.
  const std::vector<int>& link(int v) const { return links_[v]; }

  double signed_area(int t) const;
  Point centroid(int t) const;

  /// Triangle containing p (closed, with a small tolerance), or -1.
  int locate(const Point& p) const;
  /// Distance from p to the nearest analytic boundary circle.
  double distance_to_boundary(const Point& p) const;
  double diameter() const noexcept { return 2.0 * outer_radius_; }

  std::size_t num_edges() const noexcept { return num_edges_; }

 private:
  void build_adjacency();
  void build_locator();

  DomainKind kind_;
  double inner_radius_;
  double outer_radius_;
  double h_;
  std::vector<Point> vertices_;
  std::vector<Triangle> triangles_;
  std::vector<BoundaryLoop> loops_;
  std::vector<int> loop_of_;
  std::vector<double> boundary_param_;
  std::vector<std::array<int, 3>> neighbors_;
  std::vector<int> vt_offsets_;
  std::vector<int> vt_list_;
  std::vector<std::vector<int>> links_;
  std::size_t num_edges_ = 0;

  // Uniform bucket grid for point location.
  double grid_x0_ = 0.0;
  double grid_y0_ = 0.0;
  double cell_ = 1.0;
  int grid_n_ = 1;
  std::vector<int> cell_offsets_;
  std::vector<int> cell_tris_;
};

MeshedDomain build_disk_mesh(double radius, double h);
MeshedDomain build_annulus_mesh(double inner_radius, double outer_radius, double h);

/// V - E + F of the subcomplex induced by a set of triangles. The subset must
/// be nonempty and connected through shared edges.
int euler_characteristic(const MeshedDomain& mesh, std::span<const int> triangles);

}  // namespace critlab
