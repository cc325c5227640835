#include "critlab/io.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <thread>

#include "critlab/error.hpp"

namespace critlab {

namespace fs = std::filesystem;

ordered_json mesh_to_json(const MeshedDomain& mesh) {
  ordered_json j;
  j["vertices"] = ordered_json::array();
  for (const auto& p : mesh.vertices()) j["vertices"].push_back({p.x(), p.y()});
  j["triangles"] = ordered_json::array();
  for (const auto& t : mesh.triangles()) j["triangles"].push_back({t[0], t[1], t[2]});
  j["boundary_loops"] = ordered_json::array();
  for (const auto& loop : mesh.boundary_loops()) {
    j["boundary_loops"].push_back({{"tag", loop.tag == LoopTag::Outer ? "OUTER" : "INNER"},
                                   {"radius", loop.radius},
                                   {"vertex_indices", loop.vertices}});
  }
  return j;
}

ordered_json solution_to_json(const DiscreteSolution& sol) {
  ordered_json j;
  j["nodal_values"] = std::vector<double>(sol.nodal_values().begin(), sol.nodal_values().end());
  j["newton"] = {{"iters", sol.newton_report().iterations}, {"residual", sol.newton_report().residual}};
  return j;
}

ordered_json profile_to_json(const BoundaryProfile& p) {
  return {{"cos", p.cos_coeffs}, {"sin", p.sin_coeffs}};
}

BoundaryProfile profile_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw Error(ErrorCode::InvalidArgument, "profile must be an object with cos/sin arrays");
  BoundaryProfile p;
  p.cos_coeffs.clear();
  auto read = [&](const char* key, std::vector<double>& out) {
    if (!j.contains(key)) return;
    if (!j.at(key).is_array()) throw Error(ErrorCode::InvalidArgument, std::string("profile.") + key + " must be an array");
    for (const auto& v : j.at(key)) {
      if (!v.is_number()) throw Error(ErrorCode::InvalidArgument, std::string("profile.") + key + " must hold numbers");
      const double x = v.get<double>();
      if (!std::isfinite(x)) throw Error(ErrorCode::InvalidArgument, "profile coefficients must be finite");
      out.push_back(x);
    }
  };
  read("cos", p.cos_coeffs);
  read("sin", p.sin_coeffs);
  if (p.cos_coeffs.empty()) p.cos_coeffs.push_back(0.0);
  return p;
}

ordered_json oracle_to_json(const HarmonicRepresentation& rep, const std::vector<OracleCriticalPoint>& points) {
  ordered_json j;
  j["critical_points"] = ordered_json::array();
  for (const auto& cp : points) {
    j["critical_points"].push_back({{"x", cp.location.x()},
                                    {"y", cp.location.y()},
                                    {"multiplicity", cp.multiplicity},
                                    {"location", std::string(to_string(cp.where))}});
  }
  ordered_json modes = ordered_json::array();
  for (const auto& m : rep.modes) modes.push_back({{"k", m.k}, {"A", m.A}, {"B", m.B}, {"C", m.C}, {"D", m.D}});
  j["coefficients"] = {{"domain", rep.kind == DomainKind::Disk ? "disk" : "annulus"},
                       {"inner_radius", rep.inner_radius},
                       {"outer_radius", rep.outer_radius},
                       {"A0", rep.A0},
                       {"B0", rep.B0},
                       {"modes", modes}};
  return j;
}

ordered_json record_to_json(const CriticalPointRecord& rec) {
  return {{"x", rec.location.x()},
          {"y", rec.location.y()},
          {"multiplicity", rec.multiplicity},
          {"critical_value", rec.critical_value},
          {"level", rec.level},
          {"gradient_residual", rec.gradient_residual},
          {"probe_radius", rec.probe_radius},
          {"flags", rec.flag_names()}};
}

namespace {

ordered_json components_to_json(const ComponentSet& set) {
  ordered_json arr = ordered_json::array();
  for (const auto& c : set.components) {
    ordered_json arcs = ordered_json::array();
    for (const auto& a : c.contact_arcs) {
      arcs.push_back({{"loop", a.loop == LoopTag::Outer ? "OUTER" : "INNER"},
                      {"theta_begin", a.theta_begin},
                      {"theta_end", a.theta_end},
                      {"vertices", a.vertex_count},
                      {"full_loop", a.full_loop}});
    }
    arr.push_back({{"id", c.id},
                   {"touches_outer", c.touches_outer},
                   {"touches_inner", c.touches_inner},
                   {"euler_characteristic", c.euler_characteristic},
                   {"simply_connected", c.simply_connected},
                   {"contact_arcs", arcs}});
  }
  return arr;
}

}  // namespace

ordered_json level_report_to_json(const LevelSetReport& rep) {
  ordered_json j{{"t", rep.t}, {"delta", rep.delta}, {"M1", rep.M1}, {"M2", rep.M2}};
  j["q"] = rep.q ? ordered_json(*rep.q) : ordered_json(nullptr);
  j["superlevel"] = components_to_json(rep.super);
  j["sublevel"] = components_to_json(rep.sub);
  return j;
}

std::string records_to_csv(const std::vector<CriticalPointRecord>& records) {
  std::ostringstream os;
  os << std::setprecision(17);
  os << "x,y,multiplicity,critical_value,gradient_residual,flags\n";
  for (const auto& r : records) {
    std::string flags;
    for (const auto& f : r.flag_names()) flags += (flags.empty() ? "" : "|") + f;
    os << r.location.x() << ',' << r.location.y() << ',' << r.multiplicity << ',' << r.critical_value << ','
       << r.gradient_residual << ',' << flags << '\n';
  }
  return os.str();
}

std::string level_lines_svg(const DiscreteSolution& sol, double t, const LevelOptions& opts,
                            const std::vector<CriticalPointRecord>& records) {
  static constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                             "#ff7f0e", "#17becf", "#8c564b", "#e377c2"};
  const MeshedDomain& mesh = sol.domain();
  const double R = mesh.outer_radius();
  const double size = 600.0;
  const double scale = size / (2.2 * R);
  auto X = [&](double x) { return size / 2 + scale * x; };
  auto Y = [&](double y) { return size / 2 - scale * y; };

  std::ostringstream os;
  os << std::setprecision(8);
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size << "\" height=\"" << size << "\" viewBox=\"0 0 "
     << size << ' ' << size << "\">\n";
  os << "<title>u_h = " << t << "</title>\n";
  for (const auto& loop : mesh.boundary_loops()) {
    os << "<circle cx=\"" << X(0) << "\" cy=\"" << Y(0) << "\" r=\"" << scale * loop.radius
       << "\" fill=\"none\" stroke=\"#000\" stroke-width=\"1.5\"/>\n";
  }
  for (const auto& pl : level_polylines(sol, t, opts)) {
    const char* color = pl.component < 0 ? "#777" : kPalette[pl.component % 8];
    os << "<polyline class=\"component-" << pl.component << "\" fill=\"none\" stroke=\"" << color
       << "\" stroke-width=\"1\" points=\"";
    for (const auto& p : pl.points) os << X(p.x()) << ',' << Y(p.y()) << ' ';
    os << "\"/>\n";
  }
  for (const auto& r : records) {
    os << "<circle cx=\"" << X(r.location.x()) << "\" cy=\"" << Y(r.location.y())
       << "\" r=\"4\" fill=\"#000\"><title>m=" << r.multiplicity << "</title></circle>\n";
  }
  os << "</svg>\n";
  return os.str();
}

void write_file_atomic(const fs::path& path, const std::string& contents) {
  std::error_code ec;
  if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
  std::ostringstream suffix;
  suffix << ".tmp." << std::this_thread::get_id();
  fs::path tmp = path;
  tmp += suffix.str();
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::Io, "cannot open " + tmp.string());
    out << contents;
    out.flush();
    if (!out) throw Error(ErrorCode::Io, "short write to " + tmp.string());
  }
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw Error(ErrorCode::Io, "cannot move report into place at " + path.string());
  }
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot read " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace critlab
