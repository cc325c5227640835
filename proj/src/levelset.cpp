#include "critlab/levelset.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "critlab/error.hpp"
#include "disjoint_sets.hpp"

namespace critlab {

namespace {

std::vector<int> snapped_signs(const DiscreteSolution& sol, double t, double delta) {
  std::vector<int> s(sol.domain().num_vertices());
  for (int v = 0; v < sol.domain().num_vertices(); ++v) {
    const double d = sol.value(v) - t;
    s[v] = d > delta ? 1 : (d < -delta ? -1 : 0);
  }
  return s;
}

double resolve_delta(const DiscreteSolution& sol, const LevelOptions& opts) {
  return opts.delta.value_or(default_band_delta(sol));
}

void require_in_range(const DiscreteSolution& sol, double t) {
  if (!(t > sol.min_value() && t < sol.max_value())) {
    std::ostringstream os;
    os << "level " << t << " outside (" << sol.min_value() << ", " << sol.max_value() << ")";
    throw Error(ErrorCode::LevelOutOfRange, os.str());
  }
}

std::pair<int, int> edge_of(const Triangle& tri, int k) {
  return {tri[(k + 1) % 3], tri[(k + 2) % 3]};
}

std::vector<ContactArc> contact_arcs(const MeshedDomain& mesh, const std::vector<int>& vertex_component, int id) {
  std::vector<ContactArc> arcs;
  for (const auto& loop : mesh.boundary_loops()) {
    const auto& lv = loop.vertices;
    const int n = static_cast<int>(lv.size());
    std::vector<char> in(n);
    int inside = 0;
    for (int i = 0; i < n; ++i) inside += in[i] = vertex_component[lv[i]] == id;
    if (inside == 0) continue;
    if (inside == n) {
      arcs.push_back({loop.tag, mesh.boundary_param(lv[0]), mesh.boundary_param(lv[n - 1]), n, true});
      continue;
    }
    for (int i = 0; i < n; ++i) {
      if (!in[i] || in[(i + n - 1) % n]) continue;
      int len = 0;
      while (in[(i + len) % n]) ++len;
      arcs.push_back({loop.tag, mesh.boundary_param(lv[i]), mesh.boundary_param(lv[(i + len - 1) % n]), len, false});
    }
  }
  return arcs;
}

ComponentSet components_on_side(const DiscreteSolution& sol, double t, const LevelOptions& opts, Side side) {
  require_in_range(sol, t);
  const MeshedDomain& mesh = sol.domain();
  const double delta = resolve_delta(sol, opts);
  const std::vector<int> sign = snapped_signs(sol, t, delta);
  const int want = side == Side::Super ? 1 : -1;
  const int nv = mesh.num_vertices();

  detail::DisjointSets ds(nv);
  for (const auto& tri : mesh.triangles()) {
    for (int k = 0; k < 3; ++k) {
      const auto [a, b] = edge_of(tri, k);
      if (sign[a] == want && sign[b] == want) ds.unite(a, b);
    }
  }

  ComponentSet out;
  out.side = side;
  out.t = t;
  out.delta = delta;
  out.vertex_component.assign(nv, -1);
  std::vector<int> root_id(nv, -1);
  for (int v = 0; v < nv; ++v) {
    if (sign[v] != want) continue;
    const int r = ds.find(v);
    if (root_id[r] < 0) {
      root_id[r] = static_cast<int>(out.components.size());
      out.components.push_back({});
      out.components.back().id = root_id[r];
    }
    out.vertex_component[v] = root_id[r];
    auto& comp = out.components[root_id[r]];
    comp.vertices.push_back(v);
    if (mesh.is_boundary(v)) {
      const LoopTag tag = mesh.boundary_loops()[mesh.loop_of(v)].tag;
      (tag == LoopTag::Outer ? comp.touches_outer : comp.touches_inner) = true;
    }
  }

  // Each component retracts onto the subcomplex spanned by its vertices.
  std::vector<int> edges(out.components.size(), 0);
  std::vector<int> faces(out.components.size(), 0);
  for (int ti = 0; ti < mesh.num_triangles(); ++ti) {
    const auto& tri = mesh.triangles()[ti];
    int count = 0;
    int cid = -1;
    for (int v : tri) {
      if (out.vertex_component[v] >= 0) {
        ++count;
        cid = out.vertex_component[v];
      }
    }
    if (cid < 0) continue;
    out.components[cid].triangles.push_back(ti);
    faces[cid] += count == 3;
    for (int k = 0; k < 3; ++k) {
      const int nb = mesh.neighbors(ti)[k];
      if (nb >= 0 && nb < ti) continue;
      const auto [a, b] = edge_of(tri, k);
      if (out.vertex_component[a] >= 0 && out.vertex_component[b] >= 0) ++edges[cid];
    }
  }
  for (auto& comp : out.components) {
    comp.euler_characteristic = static_cast<int>(comp.vertices.size()) - edges[comp.id] + faces[comp.id];
    comp.simply_connected = comp.euler_characteristic == 1;
    comp.contact_arcs = contact_arcs(mesh, out.vertex_component, comp.id);
  }
  return out;
}

// Band triangles and their connected pieces; -1 for triangles off the band.
std::vector<int> band_labels(const DiscreteSolution& sol, const std::vector<int>& sign) {
  const MeshedDomain& mesh = sol.domain();
  const int nt = mesh.num_triangles();
  std::vector<char> in_band(nt, 0);
  for (int ti = 0; ti < nt; ++ti) {
    bool zero = false, pos = false, neg = false;
    for (int v : mesh.triangles()[ti]) {
      zero = zero || sign[v] == 0;
      pos = pos || sign[v] > 0;
      neg = neg || sign[v] < 0;
    }
    in_band[ti] = zero || (pos && neg);
  }
  detail::DisjointSets ds(nt);
  for (int ti = 0; ti < nt; ++ti) {
    if (!in_band[ti]) continue;
    for (int k = 0; k < 3; ++k) {
      const int nb = mesh.neighbors(ti)[k];
      if (nb < 0 || nb < ti || !in_band[nb]) continue;
      const auto [a, b] = edge_of(mesh.triangles()[ti], k);
      const bool through_vertex = (sign[a] == 0 && !mesh.is_boundary(a)) || (sign[b] == 0 && !mesh.is_boundary(b));
      if (through_vertex || sign[a] * sign[b] < 0) ds.unite(ti, nb);
    }
  }
  std::vector<int> label(nt, -1);
  for (int ti = 0; ti < nt; ++ti) {
    if (in_band[ti]) label[ti] = ds.find(ti);
  }
  return label;
}

int record_vertex(const MeshedDomain& mesh, const CriticalPointRecord& rec) {
  if (rec.anchor_vertex >= 0 && rec.anchor_vertex < mesh.num_vertices()) return rec.anchor_vertex;
  const int t = mesh.locate(rec.location);
  if (t < 0) return -1;
  int best = -1;
  for (int v : mesh.triangles()[t]) {
    if (best < 0 || (mesh.vertices()[v] - rec.location).norm() < (mesh.vertices()[best] - rec.location).norm()) best = v;
  }
  return best;
}

double segment_distance(const Point& p, const Point& a, const Point& b) {
  const Point ab = b - a;
  const double len2 = ab.squaredNorm();
  const double s = len2 > 0.0 ? std::clamp((p - a).dot(ab) / len2, 0.0, 1.0) : 0.0;
  return (p - (a + s * ab)).norm();
}

}  // namespace

std::string_view to_string(Side side) { return side == Side::Super ? "SUPER" : "SUB"; }

int ComponentSet::component_of_triangle(const MeshedDomain& mesh, int tri) const {
  for (int v : mesh.triangles()[tri]) {
    if (vertex_component[v] >= 0) return vertex_component[v];
  }
  return -1;
}

double default_band_delta(const DiscreteSolution& sol) { return 1e-6 * (sol.max_value() - sol.min_value()); }

ComponentSet superlevel_components(const DiscreteSolution& sol, double t, const LevelOptions& opts) {
  return components_on_side(sol, t, opts, Side::Super);
}

ComponentSet sublevel_components(const DiscreteSolution& sol, double t, const LevelOptions& opts) {
  return components_on_side(sol, t, opts, Side::Sub);
}

std::vector<std::vector<int>> group_by_level(const std::vector<CriticalPointRecord>& records, double tol) {
  std::vector<int> order(records.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return records[a].level < records[b].level; });
  std::vector<std::vector<int>> groups;
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (i == 0 || records[order[i]].level - records[order[i - 1]].level > tol) groups.emplace_back();
    groups.back().push_back(order[i]);
  }
  for (auto& g : groups) std::sort(g.begin(), g.end());
  return groups;
}

ClusterResult critical_clusters(const DiscreteSolution& sol, const std::vector<CriticalPointRecord>& records,
                                const LevelOptions& opts) {
  if (records.empty()) throw Error(ErrorCode::InvalidArgument, "cluster count needs at least one critical point");
  const double delta = resolve_delta(sol, opts);
  const auto groups = group_by_level(records, 10.0 * delta);
  if (groups.size() > 1) {
    std::ostringstream os;
    os << "records sit at " << groups.size() << " distinct levels:";
    for (const auto& g : groups) {
      os << " {" << records[g.front()].level << ":";
      for (int i : g) os << " " << i;
      os << "}";
    }
    throw Error(ErrorCode::SplitLevels, os.str());
  }
  double t = 0.0;
  for (const auto& r : records) t += r.level;
  t /= static_cast<double>(records.size());

  const MeshedDomain& mesh = sol.domain();
  const std::vector<int> sign = snapped_signs(sol, t, delta);
  const std::vector<int> label = band_labels(sol, sign);

  ClusterResult out;
  out.t = t;
  for (const auto& rec : records) {
    int tri = -1;
    const int v = record_vertex(mesh, rec);
    if (v >= 0) {
      for (int ti : mesh.incident_triangles(v)) {
        if (label[ti] >= 0) {
          tri = ti;
          break;
        }
      }
    }
    if (tri < 0) {
      const int ti = mesh.locate(rec.location);
      if (ti >= 0 && label[ti] >= 0) tri = ti;
    }
    if (tri < 0) {
      double best = std::numeric_limits<double>::infinity();
      for (int ti = 0; ti < mesh.num_triangles(); ++ti) {
        if (label[ti] < 0) continue;
        const double d = (mesh.centroid(ti) - rec.location).norm();
        if (d < best) {
          best = d;
          tri = ti;
        }
      }
    }
    out.record_cluster.push_back(tri >= 0 ? label[tri] : -1);
  }
  std::vector<int> distinct = out.record_cluster;
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  std::erase(distinct, -1);
  out.q = static_cast<int>(distinct.size());
  // Relabel clusters densely in order of first appearance.
  std::map<int, int> dense;
  for (int& c : out.record_cluster) {
    if (c < 0) continue;
    auto it = dense.try_emplace(c, static_cast<int>(dense.size())).first;
    c = it->second;
  }
  return out;
}

bool check_counting_identity(int M1, int M2, int sum_m, int q) {
  return M1 >= sum_m + 1 && M2 >= sum_m + 1 && M1 + M2 == 2 * sum_m + q + 1;
}

bool check_ring_contact_identity(int ring_contacts, int sum_m, int q) { return ring_contacts == sum_m + q - 1; }

int simply_connected_outer_contacts(const ComponentSet& set) {
  int n = 0;
  for (const auto& c : set.components) n += c.simply_connected && c.touches_outer;
  return n;
}

std::vector<LevelSegment> level_segments(const DiscreteSolution& sol, double t, const LevelOptions& opts) {
  const ComponentSet sup = superlevel_components(sol, t, opts);
  const ComponentSet sub = sublevel_components(sol, t, opts);
  const MeshedDomain& mesh = sol.domain();
  const std::vector<int> sign = snapped_signs(sol, t, sup.delta);
  std::vector<LevelSegment> out;
  for (int ti = 0; ti < mesh.num_triangles(); ++ti) {
    const auto& tri = mesh.triangles()[ti];
    std::vector<Point> pts;
    int zeros = 0;
    for (int v : tri) {
      if (sign[v] == 0) {
        pts.push_back(mesh.vertices()[v]);
        ++zeros;
      }
    }
    if (zeros == 3) continue;
    for (int k = 0; k < 3; ++k) {
      const auto [a, b] = edge_of(tri, k);
      if (sign[a] * sign[b] >= 0) continue;
      const double ua = sol.value(a) - t;
      const double ub = sol.value(b) - t;
      const double lam = ua / (ua - ub);
      pts.push_back(mesh.vertices()[a] + lam * (mesh.vertices()[b] - mesh.vertices()[a]));
    }
    if (pts.size() != 2) continue;
    if (zeros == 2) {
      // A level edge shared by two triangles is emitted once, from its super side.
      int k = 0;
      while (sign[tri[k]] == 0) ++k;
      const int nb = mesh.neighbors(ti)[k];
      if (sign[tri[k]] < 0 && nb >= 0) {
        bool other_super = false;
        for (int v : mesh.triangles()[nb]) other_super = other_super || sign[v] > 0;
        if (other_super) continue;
      }
    }
    out.push_back({pts[0], pts[1], sup.component_of_triangle(mesh, ti), sub.component_of_triangle(mesh, ti)});
  }
  return out;
}

std::vector<LevelPolyline> level_polylines(const DiscreteSolution& sol, double t, const LevelOptions& opts) {
  const std::vector<LevelSegment> segs = level_segments(sol, t, opts);
  const double snap = 1e-9 * sol.domain().h();
  auto key = [&](const Point& p) {
    return std::pair<long long, long long>(std::llround(p.x() / snap), std::llround(p.y() / snap));
  };
  std::map<std::pair<long long, long long>, std::vector<int>> at;
  for (int i = 0; i < static_cast<int>(segs.size()); ++i) {
    at[key(segs[i].a)].push_back(i);
    at[key(segs[i].b)].push_back(i);
  }
  std::vector<char> used(segs.size(), 0);
  auto extend = [&](std::vector<Point>& line, int comp) {
    for (;;) {
      const auto& cands = at[key(line.back())];
      int next = -1;
      for (int c : cands) {
        if (!used[c] && segs[c].super_component == comp) {
          next = c;
          break;
        }
      }
      if (next < 0) return;
      used[next] = 1;
      line.push_back(key(segs[next].a) == key(line.back()) ? segs[next].b : segs[next].a);
    }
  };
  std::vector<LevelPolyline> out;
  for (int pass = 0; pass < 2; ++pass) {
    for (int i = 0; i < static_cast<int>(segs.size()); ++i) {
      if (used[i]) continue;
      const bool open_end = at[key(segs[i].a)].size() != 2 || at[key(segs[i].b)].size() != 2;
      if (pass == 0 && !open_end) continue;
      used[i] = 1;
      LevelPolyline pl{segs[i].super_component, {segs[i].a, segs[i].b}};
      extend(pl.points, pl.component);
      std::reverse(pl.points.begin(), pl.points.end());
      extend(pl.points, pl.component);
      out.push_back(std::move(pl));
    }
  }
  return out;
}

LevelSetReport analyze_level(const DiscreteSolution& sol, double t, const std::vector<CriticalPointRecord>& records,
                             const LevelOptions& opts) {
  LevelSetReport rep;
  rep.t = t;
  rep.super = superlevel_components(sol, t, opts);
  rep.sub = sublevel_components(sol, t, opts);
  rep.delta = rep.super.delta;
  rep.M1 = rep.super.count();
  rep.M2 = rep.sub.count();
  if (!records.empty()) rep.q = critical_clusters(sol, records, opts).q;
  return rep;
}

std::vector<ComponentDiagnostic> annulus_component_diagnostics(const DiscreteSolution& sol, double t,
                                                               const std::vector<CriticalPointRecord>& records,
                                                               const LevelOptions& opts) {
  const MeshedDomain& mesh = sol.domain();
  if (mesh.kind() != DomainKind::Annulus) {
    throw Error(ErrorCode::InvalidArgument, "component diagnostics apply to annular domains");
  }
  const double merge = opts.merge_radius.value_or(3.0 * mesh.h());
  const ComponentSet sets[2] = {sublevel_components(sol, t, opts), superlevel_components(sol, t, opts)};
  const double delta = sets[0].delta;
  bool critical_level = false;
  for (const auto& r : records) critical_level = critical_level || std::abs(r.level - t) <= 10.0 * delta;

  std::vector<LevelSegment> segs;
  if (critical_level) segs = level_segments(sol, t, opts);

  std::vector<ComponentDiagnostic> out;
  for (const ComponentSet& set : sets) {
    const bool sub = set.side == Side::Sub;
    for (const auto& comp : set.components) {
      if (comp.simply_connected || comp.touches_outer) continue;
      for (int i = 0; i < static_cast<int>(records.size()); ++i) {
        const auto& rec = records[i];
        const int v = record_vertex(mesh, rec);
        const bool beyond = sub ? rec.level < t - delta : rec.level > t + delta;
        if (v >= 0 && beyond && set.vertex_component[v] == comp.id) {
          std::ostringstream os;
          os << "critical point at (" << rec.location.x() << ", " << rec.location.y() << ") lies inside "
             << (sub ? "sub" : "super") << "-level component " << comp.id << " at t=" << t;
          out.push_back({sub ? "LEMMA_3_3_VIOLATION" : "LEMMA_4_3_VIOLATION", set.side, comp.id, i, os.str()});
        }
      }
      if (!critical_level) continue;
      bool seen_curve = false;
      bool carried = false;
      for (const auto& s : segs) {
        if ((sub ? s.sub_component : s.super_component) != comp.id) continue;
        seen_curve = true;
        for (const auto& rec : records) carried = carried || segment_distance(rec.location, s.a, s.b) <= merge;
        if (carried) break;
      }
      if (seen_curve && !carried) {
        std::ostringstream os;
        os << "outer curve of " << (sub ? "sub" : "super") << "-level component " << comp.id
           << " carries no critical point at critical level t=" << t;
        out.push_back({"OUTER_CURVE_WITHOUT_CRITICAL_POINT", set.side, comp.id, -1, os.str()});
      }
    }
  }
  return out;
}

}  // namespace critlab
