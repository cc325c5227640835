#include "critlab/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <numeric>
#include <string>

#include "critlab/error.hpp"

namespace critlab {

namespace {

std::uint64_t edge_key(int a, int b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) |
         static_cast<std::uint32_t>(b);
}

double cross(const Point& a, const Point& b, const Point& c) {
  return (b.x() - a.x()) * (c.y() - a.y()) - (b.y() - a.y()) * (c.x() - a.x());
}

struct Ring {
  double radius;
  int first;  // index of the vertex at angle 0
  int count;  // always even
};

void add_ring(std::vector<Point>& vertices, std::vector<Ring>& rings, double radius, int count) {
  rings.push_back({radius, static_cast<int>(vertices.size()), count});
  for (int j = 0; j < count; ++j) {
    const double theta = 2.0 * std::numbers::pi * j / count;
    vertices.emplace_back(radius * std::cos(theta), radius * std::sin(theta));
  }
}

int ring_vertex(const Ring& r, int j) { return r.first + ((j % r.count) + r.count) % r.count; }

// Mirror of ring vertex j across the x axis.
int mirror_index(const Ring& r, int j) { return ring_vertex(r, r.count - j); }

void push_oriented(std::vector<Triangle>& out, const std::vector<Point>& vx, Triangle t) {
  if (cross(vx[t[0]], vx[t[1]], vx[t[2]]) < 0.0) std::swap(t[1], t[2]);
  out.push_back(t);
}

struct RingSlot {
  int ring;
  int j;
};

// Triangulates the strip between two rings over the upper half plane and
// mirrors it, so the mesh is exactly symmetric under y -> -y.
void stitch_rings(const std::vector<Point>& vx, const std::vector<Ring>& rings, int ia, int ib,
                  std::vector<Triangle>& out) {
  const Ring& A = rings[ia];
  const Ring& B = rings[ib];
  const int na = A.count / 2;
  const int nb = B.count / 2;
  std::vector<std::array<RingSlot, 3>> upper;
  int i = 0;
  int k = 0;
  while (i < na || k < nb) {
    bool advance_a;
    if (i == na) {
      advance_a = false;
    } else if (k == nb) {
      advance_a = true;
    } else {
      const double da = (vx[ring_vertex(A, i + 1)] - vx[ring_vertex(B, k)]).squaredNorm();
      const double db = (vx[ring_vertex(A, i)] - vx[ring_vertex(B, k + 1)]).squaredNorm();
      advance_a = da <= db;
    }
    if (advance_a) {
      upper.push_back({RingSlot{ia, i}, RingSlot{ia, i + 1}, RingSlot{ib, k}});
      ++i;
    } else {
      upper.push_back({RingSlot{ia, i}, RingSlot{ib, k + 1}, RingSlot{ib, k}});
      ++k;
    }
  }
  for (const auto& tri : upper) {
    Triangle t{};
    Triangle m{};
    for (int c = 0; c < 3; ++c) {
      const Ring& r = rings[tri[c].ring];
      t[c] = ring_vertex(r, tri[c].j);
      m[c] = mirror_index(r, tri[c].j);
    }
    push_oriented(out, vx, t);
    push_oriented(out, vx, m);
  }
}

void require_positive(double value, const char* name) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw Error(ErrorCode::Sizing, std::string(name) + " must be positive and finite");
  }
}

}  // namespace

MeshedDomain::MeshedDomain(DomainKind kind, double inner_radius, double outer_radius, double h,
                           std::vector<Point> vertices, std::vector<Triangle> triangles,
                           std::vector<BoundaryLoop> loops)
    : kind_(kind),
      inner_radius_(inner_radius),
      outer_radius_(outer_radius),
      h_(h),
      vertices_(std::move(vertices)),
      triangles_(std::move(triangles)),
      loops_(std::move(loops)) {
  const int nv = num_vertices();
  loop_of_.assign(nv, -1);
  boundary_param_.assign(nv, std::numeric_limits<double>::quiet_NaN());
  for (int l = 0; l < static_cast<int>(loops_.size()); ++l) {
    for (int v : loops_[l].vertices) {
      loop_of_[v] = l;
      double theta = std::atan2(vertices_[v].y(), vertices_[v].x());
      if (theta < 0.0) theta += 2.0 * std::numbers::pi;
      if (theta >= 2.0 * std::numbers::pi) theta = 0.0;
      boundary_param_[v] = theta;
    }
  }
  const std::size_t expected_loops = kind_ == DomainKind::Disk ? 1 : 2;
  if (loops_.size() != expected_loops) {
    throw Error(ErrorCode::InvalidArgument, "wrong number of boundary loops for domain kind");
  }
  for (int t = 0; t < num_triangles(); ++t) {
    if (!(signed_area(t) > 0.0)) {
      throw Error(ErrorCode::InvalidArgument, "triangle " + std::to_string(t) + " is not counterclockwise");
    }
  }
  build_adjacency();
  build_locator();
}

void MeshedDomain::build_adjacency() {
  const int nt = num_triangles();
  const int nv = num_vertices();

  struct HalfEdge {
    std::uint64_t key;
    int tri;
    int local;
  };
  std::vector<HalfEdge> half;
  half.reserve(3 * static_cast<std::size_t>(nt));
  for (int t = 0; t < nt; ++t) {
    for (int i = 0; i < 3; ++i) {
      half.push_back({edge_key(triangles_[t][(i + 1) % 3], triangles_[t][(i + 2) % 3]), t, i});
    }
  }
  std::sort(half.begin(), half.end(), [](const HalfEdge& a, const HalfEdge& b) {
    return a.key != b.key ? a.key < b.key : a.tri < b.tri;
  });

  neighbors_.assign(nt, {-1, -1, -1});
  std::vector<std::uint64_t> boundary_edges;
  num_edges_ = 0;
  for (std::size_t s = 0; s < half.size();) {
    std::size_t e = s;
    while (e < half.size() && half[e].key == half[s].key) ++e;
    const std::size_t count = e - s;
    ++num_edges_;
    if (count == 2) {
      neighbors_[half[s].tri][half[s].local] = half[s + 1].tri;
      neighbors_[half[s + 1].tri][half[s + 1].local] = half[s].tri;
    } else if (count == 1) {
      boundary_edges.push_back(half[s].key);
    } else {
      throw Error(ErrorCode::InvalidArgument, "non-manifold edge in triangulation");
    }
    s = e;
  }

  std::vector<std::uint64_t> loop_edges;
  for (const auto& loop : loops_) {
    const auto& lv = loop.vertices;
    for (std::size_t i = 0; i < lv.size(); ++i) loop_edges.push_back(edge_key(lv[i], lv[(i + 1) % lv.size()]));
  }
  std::sort(loop_edges.begin(), loop_edges.end());
  if (loop_edges != boundary_edges) {
    throw Error(ErrorCode::InvalidArgument, "boundary edges do not match the boundary loops");
  }

  const long chi = static_cast<long>(nv) - static_cast<long>(num_edges_) + nt;
  const long expected_chi = kind_ == DomainKind::Disk ? 1 : 0;
  if (chi != expected_chi) {
    throw Error(ErrorCode::InvalidArgument, "Euler characteristic " + std::to_string(chi) + " does not match domain");
  }

  vt_offsets_.assign(nv + 1, 0);
  for (const auto& t : triangles_) {
    for (int v : t) ++vt_offsets_[v + 1];
  }
  std::partial_sum(vt_offsets_.begin(), vt_offsets_.end(), vt_offsets_.begin());
  vt_list_.assign(vt_offsets_.back(), -1);
  std::vector<int> fill(vt_offsets_.begin(), vt_offsets_.end() - 1);
  for (int t = 0; t < nt; ++t) {
    for (int v : triangles_[t]) vt_list_[fill[v]++] = t;
  }

  links_.assign(nv, {});
  for (int v = 0; v < nv; ++v) {
    // Each incident ccw triangle (v, a, b) contributes the link edge a -> b.
    std::vector<std::pair<int, int>> arcs;
    for (int t : incident_triangles(v)) {
      const auto& tri = triangles_[t];
      const int i = tri[0] == v ? 0 : (tri[1] == v ? 1 : 2);
      arcs.emplace_back(tri[(i + 1) % 3], tri[(i + 2) % 3]);
    }
    if (arcs.empty()) continue;
    std::sort(arcs.begin(), arcs.end());
    auto next_of = [&](int a) -> int {
      auto it = std::lower_bound(arcs.begin(), arcs.end(), std::make_pair(a, std::numeric_limits<int>::min()));
      return (it != arcs.end() && it->first == a) ? it->second : -1;
    };
    int start = arcs.front().first;
    if (is_boundary(v)) {
      for (const auto& arc : arcs) {
        bool has_incoming = false;
        for (const auto& other : arcs) has_incoming = has_incoming || other.second == arc.first;
        if (!has_incoming) {
          start = arc.first;
          break;
        }
      }
    }
    auto& link = links_[v];
    link.push_back(start);
    int cur = start;
    for (std::size_t step = 0; step < arcs.size(); ++step) {
      const int nxt = next_of(cur);
      if (nxt < 0 || nxt == start) break;
      link.push_back(nxt);
      cur = nxt;
    }
  }
}

void MeshedDomain::build_locator() {
  const double extent = outer_radius_ * (1.0 + 1e-9) + 1e-12;
  grid_x0_ = -extent;
  grid_y0_ = -extent;
  grid_n_ = std::clamp(static_cast<int>(std::ceil(2.0 * extent / (2.0 * h_))), 1, 2048);
  cell_ = 2.0 * extent / grid_n_;
  const auto cell_of = [&](double x, double y) {
    const int cx = std::clamp(static_cast<int>(std::floor((x - grid_x0_) / cell_)), 0, grid_n_ - 1);
    const int cy = std::clamp(static_cast<int>(std::floor((y - grid_y0_) / cell_)), 0, grid_n_ - 1);
    return std::array<int, 2>{cx, cy};
  };
  const std::size_t ncell = static_cast<std::size_t>(grid_n_) * grid_n_;
  std::vector<std::vector<int>> buckets(ncell);
  for (int t = 0; t < num_triangles(); ++t) {
    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    for (int v : triangles_[t]) {
      xmin = std::min(xmin, vertices_[v].x());
      xmax = std::max(xmax, vertices_[v].x());
      ymin = std::min(ymin, vertices_[v].y());
      ymax = std::max(ymax, vertices_[v].y());
    }
    const auto lo = cell_of(xmin, ymin);
    const auto hi = cell_of(xmax, ymax);
    for (int cy = lo[1]; cy <= hi[1]; ++cy) {
      for (int cx = lo[0]; cx <= hi[0]; ++cx) buckets[static_cast<std::size_t>(cy) * grid_n_ + cx].push_back(t);
    }
  }
  cell_offsets_.assign(ncell + 1, 0);
  for (std::size_t c = 0; c < ncell; ++c) cell_offsets_[c + 1] = cell_offsets_[c] + static_cast<int>(buckets[c].size());
  cell_tris_.clear();
  cell_tris_.reserve(cell_offsets_.back());
  for (const auto& b : buckets) cell_tris_.insert(cell_tris_.end(), b.begin(), b.end());
}

std::span<const int> MeshedDomain::incident_triangles(int v) const {
  return {vt_list_.data() + vt_offsets_[v], static_cast<std::size_t>(vt_offsets_[v + 1] - vt_offsets_[v])};
}

double MeshedDomain::signed_area(int t) const {
  const auto& tri = triangles_[t];
  return 0.5 * cross(vertices_[tri[0]], vertices_[tri[1]], vertices_[tri[2]]);
}

Point MeshedDomain::centroid(int t) const {
  const auto& tri = triangles_[t];
  return (vertices_[tri[0]] + vertices_[tri[1]] + vertices_[tri[2]]) / 3.0;
}

int MeshedDomain::locate(const Point& p) const {
  if (!std::isfinite(p.x()) || !std::isfinite(p.y())) return -1;
  const double fx = (p.x() - grid_x0_) / cell_;
  const double fy = (p.y() - grid_y0_) / cell_;
  if (fx < 0.0 || fy < 0.0 || fx >= grid_n_ || fy >= grid_n_) return -1;
  const std::size_t c = static_cast<std::size_t>(static_cast<int>(fy)) * grid_n_ + static_cast<int>(fx);
  for (int k = cell_offsets_[c]; k < cell_offsets_[c + 1]; ++k) {
    const int t = cell_tris_[k];
    const auto& tri = triangles_[t];
    const Point& a = vertices_[tri[0]];
    const Point& b = vertices_[tri[1]];
    const Point& d = vertices_[tri[2]];
    const double area2 = cross(a, b, d);
    const double tol = -1e-12 * area2;
    if (cross(a, b, p) >= tol && cross(b, d, p) >= tol && cross(d, a, p) >= tol) return t;
  }
  return -1;
}

double MeshedDomain::distance_to_boundary(const Point& p) const {
  const double r = p.norm();
  if (kind_ == DomainKind::Disk) return outer_radius_ - r;
  return std::min(r - inner_radius_, outer_radius_ - r);
}

MeshedDomain build_disk_mesh(double radius, double h) {
  require_positive(radius, "radius");
  require_positive(h, "h");
  if (h >= radius) throw Error(ErrorCode::Sizing, "mesh size h must be smaller than the radius");

  const int nr = static_cast<int>(std::ceil(radius / h - 1e-12));
  std::vector<Point> vertices{Point(0.0, 0.0)};
  std::vector<Ring> rings{{0.0, 0, 1}};
  for (int i = 1; i <= nr; ++i) add_ring(vertices, rings, i == nr ? radius : radius * i / nr, 6 * i);

  std::vector<Triangle> triangles;
  const Ring& first = rings[1];
  for (int j = 0; j < first.count / 2; ++j) {
    push_oriented(triangles, vertices, {0, ring_vertex(first, j), ring_vertex(first, j + 1)});
    push_oriented(triangles, vertices, {0, mirror_index(first, j), mirror_index(first, j + 1)});
  }
  for (int i = 1; i < nr; ++i) stitch_rings(vertices, rings, i, i + 1, triangles);

  BoundaryLoop outer{LoopTag::Outer, radius, {}};
  for (int j = 0; j < rings.back().count; ++j) outer.vertices.push_back(ring_vertex(rings.back(), j));
  return MeshedDomain(DomainKind::Disk, 0.0, radius, h, std::move(vertices), std::move(triangles), {outer});
}

MeshedDomain build_annulus_mesh(double inner_radius, double outer_radius, double h) {
  require_positive(inner_radius, "inner radius");
  require_positive(outer_radius, "outer radius");
  require_positive(h, "h");
  if (inner_radius >= outer_radius) throw Error(ErrorCode::Sizing, "inner radius must be below outer radius");
  if (h >= outer_radius - inner_radius) throw Error(ErrorCode::Sizing, "mesh size h must be below the annulus width");

  const double width = outer_radius - inner_radius;
  const int nr = static_cast<int>(std::ceil(width / h - 1e-12));
  const double hr = width / nr;
  std::vector<Point> vertices;
  std::vector<Ring> rings;
  for (int i = 0; i <= nr; ++i) {
    const double r = i == nr ? outer_radius : inner_radius + hr * i;
    const int count = std::max(8, 2 * static_cast<int>(std::lround(std::numbers::pi * r / hr)));
    add_ring(vertices, rings, r, count);
  }
  std::vector<Triangle> triangles;
  for (int i = 0; i < nr; ++i) stitch_rings(vertices, rings, i, i + 1, triangles);

  BoundaryLoop outer{LoopTag::Outer, outer_radius, {}};
  for (int j = 0; j < rings.back().count; ++j) outer.vertices.push_back(ring_vertex(rings.back(), j));
  BoundaryLoop inner{LoopTag::Inner, inner_radius, {}};
  for (int j = 0; j < rings.front().count; ++j) inner.vertices.push_back(ring_vertex(rings.front(), -j));
  return MeshedDomain(DomainKind::Annulus, inner_radius, outer_radius, h, std::move(vertices), std::move(triangles),
                      {outer, inner});
}

int euler_characteristic(const MeshedDomain& mesh, std::span<const int> triangles) {
  if (triangles.empty()) throw Error(ErrorCode::InvalidArgument, "empty triangle subset");
  std::vector<char> in(mesh.num_triangles(), 0);
  for (int t : triangles) {
    if (t < 0 || t >= mesh.num_triangles()) throw Error(ErrorCode::InvalidArgument, "triangle index out of range");
    in[t] = 1;
  }
  // Edge-connectivity check by flood fill.
  std::vector<char> seen(mesh.num_triangles(), 0);
  std::vector<int> stack{triangles.front()};
  seen[triangles.front()] = 1;
  std::size_t reached = 0;
  while (!stack.empty()) {
    const int t = stack.back();
    stack.pop_back();
    ++reached;
    for (int n : mesh.neighbors(t)) {
      if (n >= 0 && in[n] && !seen[n]) {
        seen[n] = 1;
        stack.push_back(n);
      }
    }
  }
  std::size_t distinct = 0;
  for (char c : in) distinct += c;
  if (reached != distinct) throw Error(ErrorCode::DisconnectedSubset, "triangle subset is not edge-connected");

  std::vector<int> verts;
  std::vector<std::uint64_t> edges;
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    if (!in[t]) continue;
    const auto& tri = mesh.triangles()[t];
    for (int i = 0; i < 3; ++i) {
      verts.push_back(tri[i]);
      edges.push_back(edge_key(tri[i], tri[(i + 1) % 3]));
    }
  }
  std::sort(verts.begin(), verts.end());
  std::sort(edges.begin(), edges.end());
  const long v = std::unique(verts.begin(), verts.end()) - verts.begin();
  const long e = std::unique(edges.begin(), edges.end()) - edges.begin();
  return static_cast<int>(v - e + static_cast<long>(distinct));
}

}  // namespace critlab
