#include "critlab/critical_points.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Dense>

#include "critlab/error.hpp"
#include "disjoint_sets.hpp"

namespace critlab {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

int default_samples(const DiscreteSolution& sol, double radius) {
  const double h = sol.domain().h();
  return std::max(64, static_cast<int>(std::ceil(kTwoPi * radius / (h / 8.0))));
}

const Eigen::Vector2d& gradient_at(const DiscreteSolution& sol, const Point& p) {
  const int t = sol.domain().locate(p);
  if (t < 0) throw Error(ErrorCode::LoopExitsDomain, "probe loop leaves the mesh");
  return sol.gradient(t);
}

double wrap_pi(double d) {
  while (d > std::numbers::pi) d -= kTwoPi;
  while (d <= -std::numbers::pi) d += kTwoPi;
  return d;
}

// Winding of grad u_h along a circle; orientation +1 counterclockwise, -1 clockwise.
WindingResult loop_degree(const DiscreteSolution& sol, const Point& center, double radius, int samples,
                          int orientation) {
  WindingResult out;
  out.samples = samples;
  double total = 0.0;
  double prev = 0.0;
  for (int i = 0; i <= samples; ++i) {
    const double phi = orientation * kTwoPi * (i % samples) / samples;
    const Point p = center + radius * Point(std::cos(phi), std::sin(phi));
    const Eigen::Vector2d& g = gradient_at(sol, p);
    if (g.norm() < 1e-14) throw Error(ErrorCode::LoopThroughZero, "gradient vanishes on the probe loop");
    const double ang = std::atan2(g.y(), g.x());
    if (i > 0) {
      const double d = wrap_pi(ang - prev);
      out.max_increment = std::max(out.max_increment, std::abs(d));
      total += d;
    }
    prev = ang;
  }
  const double turns = total / kTwoPi;
  out.degree = static_cast<int>(std::lround(turns));
  out.residue = std::abs(turns - out.degree);
  out.uncertain = out.residue > 0.15 || out.max_increment > 0.9 * std::numbers::pi;
  return out;
}

int nearest_vertex(const MeshedDomain& mesh, const Point& p) {
  const int t = mesh.locate(p);
  if (t < 0) return -1;
  int best = -1;
  double bd = 0.0;
  for (int v : mesh.triangles()[t]) {
    const double d = (mesh.vertices()[v] - p).squaredNorm();
    if (best < 0 || d < bd) {
      best = v;
      bd = d;
    }
  }
  return best;
}

// Newton on a least-squares quadratic fitted over the 2-ring patch of the
// nearest vertex. Returns nothing if the fit degenerates or wanders off.
std::optional<Point> refine_quadratic(const DiscreteSolution& sol, Point p, double max_move) {
  const MeshedDomain& mesh = sol.domain();
  const Point start = p;
  for (int it = 0; it < 8; ++it) {
    const int v0 = nearest_vertex(mesh, p);
    if (v0 < 0) return std::nullopt;
    std::vector<int> patch{v0};
    for (int w : mesh.link(v0)) patch.push_back(w);
    const std::size_t first_ring = patch.size();
    for (std::size_t i = 1; i < first_ring; ++i) {
      for (int w : mesh.link(patch[i])) {
        if (std::find(patch.begin(), patch.end(), w) == patch.end()) patch.push_back(w);
      }
    }
    if (patch.size() < 6) return std::nullopt;
    Eigen::MatrixXd A(patch.size(), 6);
    Eigen::VectorXd b(patch.size());
    for (std::size_t i = 0; i < patch.size(); ++i) {
      const Point d = mesh.vertices()[patch[i]] - p;
      A.row(i) << 1.0, d.x(), d.y(), 0.5 * d.x() * d.x(), d.x() * d.y(), 0.5 * d.y() * d.y();
      b[i] = sol.value(patch[i]);
    }
    const Eigen::VectorXd c = A.colPivHouseholderQr().solve(b);
    Eigen::Matrix2d H;
    H << c[3], c[4], c[4], c[5];
    const Eigen::Vector2d g(c[1], c[2]);
    const double hscale = H.cwiseAbs().maxCoeff();
    if (!(hscale > 0.0) || std::abs(H.determinant()) < 1e-10 * hscale * hscale) return std::nullopt;
    const Eigen::Vector2d step = -(H.inverse() * g);
    p += step;
    if ((p - start).norm() > max_move) return std::nullopt;
    if (step.norm() < 1e-12 * mesh.h()) break;
  }
  if (mesh.locate(p) < 0) return std::nullopt;
  return p;
}

struct Candidate {
  Point p;
  int vertex = -1;  // PL-critical vertex, or -1 for a small-gradient triangle
  int pl_index = 0;
  double grad = 0.0;
};

struct Survivor {
  CriticalPointRecord rec;
  std::vector<Point> members;
};

}  // namespace

std::string_view to_string(CpFlag flag) {
  switch (flag) {
    case CpFlag::NearBoundary: return "NEAR_BOUNDARY";
    case CpFlag::NearOtherCp: return "NEAR_OTHER_CP";
    case CpFlag::WindingUncertain: return "WINDING_UNCERTAIN";
  }
  return "UNKNOWN";
}

std::vector<std::string> CriticalPointRecord::flag_names() const {
  std::vector<std::string> out;
  for (CpFlag f : {CpFlag::NearBoundary, CpFlag::NearOtherCp, CpFlag::WindingUncertain}) {
    if (has(f)) out.emplace_back(to_string(f));
  }
  return out;
}

WindingResult winding_number(const DiscreteSolution& sol, const Point& center, double radius, int samples) {
  if (!(radius > 0.0)) throw Error(ErrorCode::InvalidArgument, "probe radius must be positive");
  if (sol.domain().distance_to_boundary(center) <= radius) {
    throw Error(ErrorCode::LoopExitsDomain, "probe circle is not inside the domain");
  }
  return loop_degree(sol, center, radius, samples > 0 ? samples : default_samples(sol, radius), +1);
}

int winding_multiplicity(const DiscreteSolution& sol, const Point& center, double radius) {
  return winding_number(sol, center, radius).degree;
}

int sign_change_count(const DiscreteSolution& sol, const Point& center, double radius, double t, int samples) {
  if (!(radius > 0.0)) throw Error(ErrorCode::InvalidArgument, "probe radius must be positive");
  if (sol.domain().distance_to_boundary(center) <= radius) {
    throw Error(ErrorCode::LoopExitsDomain, "probe circle is not inside the domain");
  }
  const int n = samples > 0 ? samples : default_samples(sol, radius);
  std::vector<int> signs;
  signs.reserve(n);
  for (int i = 0; i < n; ++i) {
    const double phi = kTwoPi * i / n;
    const auto val = sol.value_at(center + radius * Point(std::cos(phi), std::sin(phi)));
    if (!val) throw Error(ErrorCode::LoopExitsDomain, "probe loop leaves the mesh");
    const double d = *val - t;
    if (d != 0.0) signs.push_back(d > 0.0 ? 1 : -1);
  }
  int changes = 0;
  for (std::size_t i = 0; i < signs.size(); ++i) changes += signs[i] != signs[(i + 1) % signs.size()];
  return changes;
}

int boundary_degree(const DiscreteSolution& sol) {
  const MeshedDomain& mesh = sol.domain();
  const double off = 0.25 * mesh.h();
  const Point origin(0.0, 0.0);
  const double ro = mesh.outer_radius() - off;
  int deg = loop_degree(sol, origin, ro, default_samples(sol, ro), +1).degree;
  if (mesh.kind() == DomainKind::Annulus) {
    const double ri = mesh.inner_radius() + off;
    deg += loop_degree(sol, origin, ri, default_samples(sol, ri), -1).degree;
  }
  return deg;
}

int link_sign_changes(const DiscreteSolution& sol, int v) {
  const auto& link = sol.domain().link(v);
  const double uv = sol.value(v);
  auto above = [&](int w) { return sol.value(w) > uv || (sol.value(w) == uv && w > v); };
  int changes = 0;
  for (std::size_t i = 0; i < link.size(); ++i) changes += above(link[i]) != above(link[(i + 1) % link.size()]);
  return changes;
}

std::vector<CriticalPointRecord> detect_critical_points(const DiscreteSolution& sol, const DetectOptions& opts) {
  const MeshedDomain& mesh = sol.domain();
  const double range = sol.max_value() - sol.min_value();
  if (!(range > 1e-14 * std::max(1.0, std::abs(sol.max_value())))) {
    throw Error(ErrorCode::ConstantField, "critical point detection on a constant field");
  }
  const double h = mesh.h();
  const double grad_tol = opts.grad_tol.value_or(1e-3 * range / mesh.diameter());
  const double merge = opts.merge_radius.value_or(3.0 * h);
  const double group = opts.group_radius.value_or(6.0 * h);

  std::vector<Candidate> cands;
  for (int v = 0; v < mesh.num_vertices(); ++v) {
    if (mesh.is_boundary(v)) continue;
    const int sc = link_sign_changes(sol, v);
    if (sc != 2) cands.push_back({mesh.vertices()[v], v, 1 - sc / 2, 0.0});
  }
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const double g = sol.gradient(t).norm();
    if (g >= grad_tol) continue;
    bool local_min = true;
    for (int n : mesh.neighbors(t)) local_min = local_min && (n < 0 || sol.gradient(n).norm() >= g);
    if (local_min) cands.push_back({mesh.centroid(t), -1, 0, g});
  }

  detail::DisjointSets ds(static_cast<int>(cands.size()));
  for (std::size_t i = 0; i < cands.size(); ++i) {
    for (std::size_t j = i + 1; j < cands.size(); ++j) {
      if ((cands[i].p - cands[j].p).norm() <= merge) ds.unite(static_cast<int>(i), static_cast<int>(j));
    }
  }
  std::vector<std::vector<int>> clusters;
  {
    std::vector<int> slot(cands.size(), -1);
    for (std::size_t i = 0; i < cands.size(); ++i) {
      const int r = ds.find(static_cast<int>(i));
      if (slot[r] < 0) {
        slot[r] = static_cast<int>(clusters.size());
        clusters.emplace_back();
      }
      clusters[slot[r]].push_back(static_cast<int>(i));
    }
  }

  std::vector<Survivor> survivors;
  for (const auto& cl : clusters) {
    Point loc = Point::Zero();
    double wsum = 0.0;
    int anchor = -1;
    int anchor_index = 2;
    int saddle_vertices = 0;
    for (int i : cl) {
      const Candidate& c = cands[i];
      if (c.vertex < 0) continue;
      const double w = std::abs(c.pl_index);
      loc += w * c.p;
      wsum += w;
      saddle_vertices += c.pl_index < 0;
      if (c.pl_index < anchor_index || (c.pl_index == anchor_index && c.vertex < anchor)) {
        anchor = c.vertex;
        anchor_index = c.pl_index;
      }
    }
    double level_lo = 0.0;
    double level_hi = 0.0;
    if (anchor >= 0) level_lo = level_hi = sol.value(anchor);
    for (int i : cl) {
      if (cands[i].vertex < 0 || cands[i].pl_index >= 0 || anchor_index >= 0) continue;
      level_lo = std::min(level_lo, sol.value(cands[i].vertex));
      level_hi = std::max(level_hi, sol.value(cands[i].vertex));
    }
    if (wsum > 0.0) {
      loc /= wsum;
      if (saddle_vertices == 1 && anchor_index == -1) {
        if (auto refined = refine_quadratic(sol, loc, h)) loc = *refined;
      }
    } else {
      const auto best = std::min_element(cl.begin(), cl.end(), [&](int a, int b) { return cands[a].grad < cands[b].grad; });
      loc = cands[*best].p;
      if (auto refined = refine_quadratic(sol, loc, merge)) loc = *refined;
      anchor = nearest_vertex(mesh, loc);
      if (anchor < 0) continue;
      anchor_index = 0;
    }
    double spread = 0.0;
    for (int i : cl) spread = std::max(spread, (cands[i].p - loc).norm());

    Survivor s;
    CriticalPointRecord& rec = s.rec;
    rec.location = loc;
    rec.anchor_vertex = anchor;
    if (anchor_index == 0) level_lo = level_hi = sol.value(anchor);
    rec.level = 0.5 * (level_lo + level_hi);
    rec.level_spread = 0.5 * (level_hi - level_lo);
    for (int i : cl) s.members.push_back(cands[i].p);

    const double dist = mesh.distance_to_boundary(loc);
    double r = std::max(3.0 * h, merge) + spread;
    std::optional<WindingResult> res;
    bool uncertain = true;
    if (r < dist) {
      for (int e = 0; e <= opts.max_escalations && r < dist; ++e, r *= 2.0) {
        try {
          WindingResult w = winding_number(sol, loc, r);
          bool bad = w.uncertain;
          if (!bad && w.degree < 0) bad = sign_change_count(sol, loc, r, rec.level) != 2 * (1 - w.degree);
          res = w;
          rec.probe_radius = r;
          if (!bad) {
            uncertain = false;
            break;
          }
        } catch (const Error& err) {
          if (err.code() != ErrorCode::LoopThroughZero && err.code() != ErrorCode::LoopExitsDomain) throw;
        }
      }
    } else {
      rec.set(CpFlag::NearBoundary);
      r = 0.75 * dist;
      rec.probe_radius = r;
      if (r >= 0.5 * h) {
        try {
          res = winding_number(sol, loc, r);
          uncertain = res->uncertain;
        } catch (const Error& err) {
          if (err.code() != ErrorCode::LoopThroughZero && err.code() != ErrorCode::LoopExitsDomain) throw;
        }
      }
    }
    if (res && res->degree < 0) {
      rec.multiplicity = -res->degree;
    } else if (res || anchor_index >= 0) {
      continue;  // regular point or extremum
    } else {
      rec.multiplicity = -anchor_index;  // no usable loop; fall back on the PL index
    }
    if (uncertain) rec.set(CpFlag::WindingUncertain);
    survivors.push_back(std::move(s));
  }

  // Group survivors whose loops overlap or that sit closer than the group radius.
  const int ns = static_cast<int>(survivors.size());
  detail::DisjointSets gs(ns);
  for (int i = 0; i < ns; ++i) {
    for (int j = i + 1; j < ns; ++j) {
      const double d = (survivors[i].rec.location - survivors[j].rec.location).norm();
      if (d <= group || d <= std::max(survivors[i].rec.probe_radius, survivors[j].rec.probe_radius)) gs.unite(i, j);
    }
  }
  std::vector<CriticalPointRecord> out;
  std::vector<int> done(ns, 0);
  for (int i = 0; i < ns; ++i) {
    if (done[i]) continue;
    std::vector<int> members;
    for (int j = i; j < ns; ++j) {
      if (gs.find(j) == gs.find(i)) {
        members.push_back(j);
        done[j] = 1;
      }
    }
    if (members.size() == 1) {
      out.push_back(survivors[i].rec);
      continue;
    }
    CriticalPointRecord rec;
    Point center = Point::Zero();
    int msum = 0;
    int lead = members.front();
    for (int j : members) {
      const auto& r = survivors[j].rec;
      center += r.multiplicity * r.location;
      msum += r.multiplicity;
      rec.flags |= r.flags;
      if (r.multiplicity > survivors[lead].rec.multiplicity) lead = j;
    }
    center /= msum;
    double radius = 0.0;
    for (int j : members) {
      radius = std::max(radius, survivors[j].rec.probe_radius);
      for (const Point& p : survivors[j].members) radius = std::max(radius, (p - center).norm() + std::max(3.0 * h, merge));
    }
    rec.location = center;
    rec.anchor_vertex = survivors[lead].rec.anchor_vertex;
    double lo = survivors[lead].rec.level;
    double hi = lo;
    for (int j : members) {
      lo = std::min(lo, survivors[j].rec.level - survivors[j].rec.level_spread);
      hi = std::max(hi, survivors[j].rec.level + survivors[j].rec.level_spread);
    }
    rec.level = 0.5 * (lo + hi);
    rec.level_spread = 0.5 * (hi - lo);
    rec.probe_radius = radius;
    rec.set(CpFlag::NearOtherCp);
    bool joint = false;
    if (radius < mesh.distance_to_boundary(center)) {
      try {
        const WindingResult w = winding_number(sol, center, radius);
        if (w.degree < 0 && !w.uncertain) {
          rec.multiplicity = -w.degree;
          joint = true;
        }
      } catch (const Error& err) {
        if (err.code() != ErrorCode::LoopThroughZero && err.code() != ErrorCode::LoopExitsDomain) throw;
      }
    } else {
      rec.set(CpFlag::NearBoundary);
    }
    if (!joint) {
      rec.multiplicity = msum;
      rec.set(CpFlag::WindingUncertain);
    }
    out.push_back(rec);
  }

  for (auto& rec : out) {
    const int t = mesh.locate(rec.location);
    const int v = rec.anchor_vertex;
    rec.critical_value = t >= 0 ? *sol.value_at(rec.location) : sol.value(v);
    rec.gradient_residual = t >= 0 ? sol.gradient(t).norm() : 0.0;
  }
  std::sort(out.begin(), out.end(), [](const CriticalPointRecord& a, const CriticalPointRecord& b) {
    if (a.location.x() != b.location.x()) return a.location.x() < b.location.x();
    return a.location.y() < b.location.y();
  });
  return out;
}

int interior_multiplicity_sum(const std::vector<CriticalPointRecord>& records) {
  int sum = 0;
  for (const auto& r : records) {
    if (!r.has(CpFlag::NearBoundary)) sum += r.multiplicity;
  }
  return sum;
}

}  // namespace critlab
