#include "critlab/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "critlab/error.hpp"
#include "disjoint_sets.hpp"

namespace critlab {

namespace fs = std::filesystem;

namespace {

double number(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_number()) {
    throw Error(ErrorCode::InvalidArgument, std::string("config field '") + key + "' must be a number");
  }
  const double x = j.at(key).get<double>();
  if (!std::isfinite(x)) throw Error(ErrorCode::InvalidArgument, std::string("config field '") + key + "' is not finite");
  return x;
}

std::optional<double> optional_number(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return number(j, key);
}

bool boolean(const nlohmann::json& j, const char* key) {
  if (!j.contains(key)) return false;
  if (!j.at(key).is_boolean()) throw Error(ErrorCode::InvalidArgument, std::string("config field '") + key + "' must be a boolean");
  return j.at(key).get<bool>();
}

CoefficientField make_coefficient(CoefficientFamily family) {
  switch (family) {
    case CoefficientFamily::Laplace: return CoefficientField::laplace();
    case CoefficientFamily::MinimalSurface: return CoefficientField::minimal_surface();
    case CoefficientFamily::CustomFlux: break;
  }
  throw Error(ErrorCode::InvalidArgument, "custom flux fields cannot be configured from a scenario file");
}

// Interior oracle roots grouped like the detector groups its records.
struct OracleGroup {
  Point center;
  int multiplicity = 0;
  double spread = 0.0;
};

std::vector<OracleGroup> group_oracle_roots(const std::vector<OracleCriticalPoint>& roots, double radius) {
  std::vector<const OracleCriticalPoint*> interior;
  for (const auto& r : roots) {
    if (r.where == RootLocation::Interior) interior.push_back(&r);
  }
  const int n = static_cast<int>(interior.size());
  detail::DisjointSets ds(n);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if ((interior[i]->location - interior[j]->location).norm() <= radius) ds.unite(i, j);
    }
  }
  std::vector<OracleGroup> groups;
  std::vector<int> slot(n, -1);
  for (int i = 0; i < n; ++i) {
    const int r = ds.find(i);
    if (slot[r] < 0) {
      slot[r] = static_cast<int>(groups.size());
      groups.push_back({Point::Zero(), 0, 0.0});
    }
    auto& g = groups[slot[r]];
    g.center += interior[i]->multiplicity * interior[i]->location;
    g.multiplicity += interior[i]->multiplicity;
  }
  for (auto& g : groups) g.center /= g.multiplicity;
  for (int i = 0; i < n; ++i) {
    auto& g = groups[slot[ds.find(i)]];
    g.spread = std::max(g.spread, (interior[i]->location - g.center).norm());
  }
  return groups;
}

// Each oracle group must pair with a distinct record of equal multiplicity
// within 2h (plus the group's own extent).
bool multisets_match(const std::vector<OracleGroup>& groups, const std::vector<CriticalPointRecord>& records, double h) {
  std::vector<const CriticalPointRecord*> pool;
  for (const auto& r : records) {
    if (!r.has(CpFlag::NearBoundary)) pool.push_back(&r);
  }
  if (pool.size() != groups.size()) return false;
  std::vector<char> used(pool.size(), 0);
  for (const auto& g : groups) {
    int best = -1;
    double bd = 0.0;
    for (std::size_t i = 0; i < pool.size(); ++i) {
      if (used[i] || pool[i]->multiplicity != g.multiplicity) continue;
      const double d = (pool[i]->location - g.center).norm();
      if (d <= 2.0 * h + g.spread && (best < 0 || d < bd)) {
        best = static_cast<int>(i);
        bd = d;
      }
    }
    if (best < 0) return false;
    used[best] = 1;
  }
  return true;
}

void add_flag(std::vector<std::string>& flags, const char* f) {
  if (std::find(flags.begin(), flags.end(), f) == flags.end()) flags.emplace_back(f);
}

void sort_flags(std::vector<std::string>& flags) {
  static const std::vector<std::string> order = {"BOUNDARY_CRITICAL", "NEAR_BOUNDARY",       "SPLIT_LEVELS",
                                                 "DEGENERATE_CLASS",  "ORACLE_DISAGREEMENT", "WINDING_UNCERTAIN"};
  auto rank = [&](const std::string& f) {
    return std::find(order.begin(), order.end(), f) - order.begin();
  };
  std::sort(flags.begin(), flags.end(), [&](const auto& a, const auto& b) { return rank(a) < rank(b); });
}

struct PipelineResult {
  VerdictRecord verdict;
  std::optional<DiscreteSolution> solution;
  std::optional<LevelOptions> level_opts;
};

PipelineResult run_pipeline(const ScenarioConfig& cfg) {
  PipelineResult out;
  VerdictRecord& v = out.verdict;
  v.scenario = cfg.id;
  v.h = cfg.h;
  const Tolerances& tol = cfg.tolerances;

  const auto mesh = build_mesh(cfg);
  const BoundaryExtremaSummary summary = count_extrema(cfg.profile, tol.extremum_tol);
  v.N_local_max = summary.n_local_max;
  v.N_global_max = summary.n_global_max;
  v.N_local_min = summary.n_local_min;
  v.N_global_min = summary.n_global_min;
  try {
    const ScenarioClass cls = classify_scenario(cfg.domain.kind, summary, cfg.H);
    v.scenario_class = cls.kind;
    v.relation = applicable_relation(cfg.domain.kind, cls, summary);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::DegenerateClass) throw;
    add_flag(v.flags, "DEGENERATE_CLASS");
  }

  out.solution = solve_scenario(cfg, mesh);
  const DiscreteSolution& sol = *out.solution;
  v.newton = sol.newton_report();

  const DetectOptions dopts = detect_options(cfg, sol);
  v.records = detect_critical_points(sol, dopts);
  v.sum_m = interior_multiplicity_sum(v.records);
  v.boundary_degree = boundary_degree(sol);
  for (const auto& r : v.records) {
    if (r.has(CpFlag::NearBoundary)) add_flag(v.flags, "NEAR_BOUNDARY");
    if (r.has(CpFlag::WindingUncertain)) add_flag(v.flags, "WINDING_UNCERTAIN");
  }

  if (cfg.coefficient == CoefficientFamily::Laplace) {
    OracleCheck& oc = v.oracle;
    oc.applicable = true;
    const HarmonicRepresentation rep = harmonic_oracle(cfg);
    oc.roots = oracle_roots(rep, {tol.oracle_cluster_tol, tol.oracle_boundary_band});
    for (const auto& r : oc.roots) {
      if (r.where == RootLocation::BoundaryCritical) ++oc.boundary_critical;
      if (r.where == RootLocation::Interior) oc.sum_m += r.multiplicity;
    }
    if (oc.boundary_critical > 0) add_flag(v.flags, "BOUNDARY_CRITICAL");
    try {
      oc.argument_count = argument_principle_count(rep);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::LoopThroughZero) throw;
      oc.argument_count = -1;
    }
    const auto groups = group_oracle_roots(oc.roots, *dopts.group_radius);
    oc.agree = multisets_match(groups, v.records, cfg.h) && oc.sum_m == v.sum_m &&
               (oc.argument_count < 0 || oc.argument_count == oc.sum_m);
    if (!oc.agree) add_flag(v.flags, "ORACLE_DISAGREEMENT");
  }

  // Level analyses at each distinct critical level.
  std::vector<CriticalPointRecord> interior;
  for (const auto& r : v.records) {
    if (!r.has(CpFlag::NearBoundary)) interior.push_back(r);
  }
  double delta = tol.band_delta.value_or(default_band_delta(sol));
  for (const auto& r : interior) delta = std::max(delta, 2.0 * r.level_spread);
  LevelOptions lopts{delta, dopts.merge_radius};
  out.level_opts = lopts;
  const auto level_groups = group_by_level(interior, 10.0 * delta);
  if (level_groups.size() > 1) add_flag(v.flags, "SPLIT_LEVELS");
  for (const auto& g : level_groups) {
    std::vector<CriticalPointRecord> recs;
    for (int i : g) recs.push_back(interior[i]);
    LevelAnalysis la;
    for (const auto& r : recs) {
      la.level += r.level;
      la.sum_m += r.multiplicity;
    }
    la.level /= static_cast<double>(recs.size());
    la.delta = delta;
    if (!(la.level > sol.min_value() && la.level < sol.max_value())) continue;
    const LevelSetReport rep = analyze_level(sol, la.level, recs, lopts);
    la.M1 = rep.M1;
    la.M2 = rep.M2;
    la.q = rep.q.value_or(0);
    la.identity = "COUNTING";
    if (mesh->kind() == DomainKind::Annulus && cfg.H) {
      const ComponentSet* ring_side = nullptr;
      if (la.level > *cfg.H + delta) ring_side = &rep.sub;
      if (la.level < *cfg.H - delta) ring_side = &rep.super;
      if (ring_side) {
        const bool enclosed = std::any_of(ring_side->components.begin(), ring_side->components.end(),
                                          [](const LevelComponent& c) { return !c.simply_connected && !c.touches_outer; });
        if (enclosed) {
          la.identity = "RING_CONTACT";
          la.ring_contacts = simply_connected_outer_contacts(*ring_side);
        }
      }
      la.diagnostics = annulus_component_diagnostics(sol, la.level, interior, lopts);
    }
    la.identity_holds = la.identity == "RING_CONTACT" ? check_ring_contact_identity(la.ring_contacts, la.sum_m, la.q)
                                                      : check_counting_identity(la.M1, la.M2, la.sum_m, la.q);
    v.levels.push_back(std::move(la));
  }

  if (v.relation) {
    const RelationCheck rc = evaluate_relation(*v.relation, summary, v.sum_m);
    v.N_used = rc.N_used;
    v.relation_form = rc.form;
    sort_flags(v.flags);
    v.verdict = !v.flags.empty() ? Verdict::Degenerate : (rc.holds ? Verdict::Holds : Verdict::Violated);
  } else {
    sort_flags(v.flags);
    v.verdict = Verdict::Degenerate;
  }

  v.tolerances = {{"grad_tol", *dopts.grad_tol},
                  {"merge_radius", *dopts.merge_radius},
                  {"group_radius", *dopts.group_radius},
                  {"band_delta", delta},
                  {"extremum_tol", summary.tol_value},
                  {"newton_tol", tol.newton_tol},
                  {"max_iter", tol.max_iter},
                  {"oracle_cluster_tol", tol.oracle_cluster_tol},
                  {"oracle_boundary_band", tol.oracle_boundary_band}};
  return out;
}

void write_outputs(const ScenarioConfig& cfg, const PipelineResult& res) {
  const fs::path dir = *cfg.outputs.dir;
  write_file_atomic(dir / (cfg.id + ".verdict.json"), verdict_to_json(res.verdict).dump(2) + "\n");
  if (cfg.outputs.csv) write_file_atomic(dir / (cfg.id + ".critical_points.csv"), records_to_csv(res.verdict.records));
  if (cfg.outputs.svg && res.solution) {
    int i = 0;
    for (const auto& la : res.verdict.levels) {
      write_file_atomic(dir / (cfg.id + ".level" + std::to_string(i++) + ".svg"),
                        level_lines_svg(*res.solution, la.level, *res.level_opts, res.verdict.records));
    }
  }
}

}  // namespace

ScenarioConfig config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw Error(ErrorCode::InvalidArgument, "scenario config must be a JSON object");
  ScenarioConfig cfg;
  if (!j.contains("id") || !j.at("id").is_string() || j.at("id").get<std::string>().empty()) {
    throw Error(ErrorCode::InvalidArgument, "config field 'id' must be a nonempty string");
  }
  cfg.id = j.at("id").get<std::string>();
  if (cfg.id.find_first_of("/\\") != std::string::npos) {
    throw Error(ErrorCode::InvalidArgument, "scenario id must not contain path separators");
  }

  if (!j.contains("domain") || !j.at("domain").is_object()) throw Error(ErrorCode::InvalidArgument, "config needs a 'domain' object");
  const auto& d = j.at("domain");
  const std::string kind = d.value("kind", "");
  if (kind == "disk") {
    cfg.domain = {DomainKind::Disk, 0.0, number(d, "radius")};
  } else if (kind == "annulus") {
    cfg.domain = {DomainKind::Annulus, number(d, "inner"), number(d, "outer")};
  } else {
    throw Error(ErrorCode::InvalidArgument, "domain.kind must be \"disk\" or \"annulus\"");
  }

  if (j.contains("h")) cfg.h = number(j, "h");
  const std::string coeff = j.value("coefficient", "laplace");
  if (coeff == "laplace") {
    cfg.coefficient = CoefficientFamily::Laplace;
  } else if (coeff == "minimal_surface") {
    cfg.coefficient = CoefficientFamily::MinimalSurface;
  } else {
    throw Error(ErrorCode::InvalidArgument, "coefficient must be \"laplace\" or \"minimal_surface\"");
  }
  if (!j.contains("profile")) throw Error(ErrorCode::InvalidArgument, "config needs a 'profile'");
  cfg.profile = profile_from_json(j.at("profile"));
  cfg.H = optional_number(j, "H");

  if (j.contains("tolerances")) {
    const auto& t = j.at("tolerances");
    if (!t.is_object()) throw Error(ErrorCode::InvalidArgument, "'tolerances' must be an object");
    Tolerances& tol = cfg.tolerances;
    tol.grad_tol = optional_number(t, "grad_tol");
    tol.merge_radius = optional_number(t, "merge_radius");
    tol.group_radius = optional_number(t, "group_radius");
    tol.band_delta = optional_number(t, "band_delta");
    tol.extremum_tol = optional_number(t, "extremum_tol");
    if (t.contains("newton_tol")) tol.newton_tol = number(t, "newton_tol");
    if (t.contains("max_iter")) tol.max_iter = static_cast<int>(number(t, "max_iter"));
    if (t.contains("oracle_cluster_tol")) tol.oracle_cluster_tol = number(t, "oracle_cluster_tol");
    if (t.contains("oracle_boundary_band")) tol.oracle_boundary_band = number(t, "oracle_boundary_band");
  }
  if (j.contains("outputs")) {
    const auto& o = j.at("outputs");
    if (!o.is_object()) throw Error(ErrorCode::InvalidArgument, "'outputs' must be an object");
    if (o.contains("dir")) {
      if (!o.at("dir").is_string()) throw Error(ErrorCode::InvalidArgument, "outputs.dir must be a string");
      cfg.outputs.dir = o.at("dir").get<std::string>();
    }
    cfg.outputs.svg = boolean(o, "svg");
    cfg.outputs.csv = boolean(o, "csv");
  }
  return cfg;
}

ScenarioConfig load_config(const fs::path& path) {
  const std::string text = read_file(path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::InvalidArgument, path.string() + ": " + e.what());
  }
  return config_from_json(j);
}

ordered_json config_to_json(const ScenarioConfig& cfg) {
  ordered_json j;
  j["id"] = cfg.id;
  if (cfg.domain.kind == DomainKind::Disk) {
    j["domain"] = {{"kind", "disk"}, {"radius", cfg.domain.outer_radius}};
  } else {
    j["domain"] = {{"kind", "annulus"}, {"inner", cfg.domain.inner_radius}, {"outer", cfg.domain.outer_radius}};
  }
  j["h"] = cfg.h;
  j["coefficient"] = cfg.coefficient == CoefficientFamily::Laplace ? "laplace" : "minimal_surface";
  j["profile"] = profile_to_json(cfg.profile);
  if (cfg.H) j["H"] = *cfg.H;
  return j;
}

std::string_view to_string(Relation r) {
  switch (r) {
    case Relation::INEQ_1_3: return "INEQ_1_3";
    case Relation::EQ_1_4: return "EQ_1_4";
    case Relation::INEQ_1_6: return "INEQ_1_6";
    case Relation::EQ_1_7_OR_1_8: return "EQ_1_7_OR_1_8";
    case Relation::INEQ_1_9: return "INEQ_1_9";
    case Relation::EQ_1_10_OR_1_11: return "EQ_1_10_OR_1_11";
    case Relation::COR_2_5: return "COR_2_5";
    case Relation::COR_3_6: return "COR_3_6";
    case Relation::COR_3_7: return "COR_3_7";
    case Relation::COR_4_6: return "COR_4_6";
  }
  return "UNKNOWN";
}

Relation applicable_relation(DomainKind kind, const ScenarioClass& cls, const BoundaryExtremaSummary& s) {
  const bool single = s.n_local_max == 1;
  const bool global = s.all_extrema_global;
  if (kind == DomainKind::Disk) {
    if (cls.kind != ScenarioKind::SimplyConnected) throw Error(ErrorCode::InvalidArgument, "disk scenario with an annular class");
    return single ? Relation::COR_2_5 : (global ? Relation::EQ_1_4 : Relation::INEQ_1_3);
  }
  switch (cls.kind) {
    case ScenarioKind::AnnulusPsiGeH:
      return single ? Relation::COR_3_6 : (global ? Relation::EQ_1_7_OR_1_8 : Relation::INEQ_1_6);
    case ScenarioKind::AnnulusPsiLeH:
      return Relation::COR_3_7;
    case ScenarioKind::AnnulusHBetween:
      return single ? Relation::COR_4_6 : (global ? Relation::EQ_1_10_OR_1_11 : Relation::INEQ_1_9);
    case ScenarioKind::SimplyConnected:
      break;
  }
  throw Error(ErrorCode::InvalidArgument, "annular scenario with a simply connected class");
}

RelationCheck evaluate_relation(Relation r, const BoundaryExtremaSummary& s, int S) {
  auto at_most_one = [&](int N) { return RelationCheck{N, S <= 1, "sum_m <= 1"}; };
  auto equality = [&](int N) { return RelationCheck{N, S == N || S + 1 == N, "sum_m == N or sum_m + 1 == N"}; };
  switch (r) {
    case Relation::INEQ_1_3: return {s.n_local_max, S + 1 <= s.n_local_max, "sum_m + 1 <= N"};
    case Relation::EQ_1_4: return {s.n_global_max, S + 1 == s.n_global_max, "sum_m + 1 == N"};
    case Relation::COR_2_5: return {s.n_local_max, S == 0, "sum_m == 0"};
    case Relation::INEQ_1_6:
    case Relation::INEQ_1_9: return {s.n_local_max, S <= s.n_local_max, "sum_m <= N"};
    case Relation::EQ_1_7_OR_1_8:
    case Relation::EQ_1_10_OR_1_11: return equality(s.n_global_max);
    case Relation::COR_3_6:
    case Relation::COR_4_6: return at_most_one(s.n_local_max);
    case Relation::COR_3_7:
      // Mirror image of the psi >= H case, counted on minima.
      if (s.n_local_min == 1) return at_most_one(1);
      if (s.all_extrema_global) return equality(s.n_global_min);
      return {s.n_local_min, S <= s.n_local_min, "sum_m <= N"};
  }
  throw Error(ErrorCode::InvalidArgument, "unknown relation");
}

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::Holds: return "HOLDS";
    case Verdict::Violated: return "VIOLATED";
    case Verdict::Degenerate: return "DEGENERATE";
    case Verdict::Error: return "ERROR";
  }
  return "UNKNOWN";
}

ordered_json verdict_to_json(const VerdictRecord& v) {
  ordered_json j;
  j["scenario"] = v.scenario;
  j["class"] = v.scenario_class ? ordered_json(std::string(to_string(*v.scenario_class))) : ordered_json(nullptr);
  j["relation"] = v.relation ? ordered_json(std::string(to_string(*v.relation))) : ordered_json(nullptr);
  if (v.error) {
    j["verdict"] = std::string(to_string(v.verdict));
    j["flags"] = v.flags;
    j["error"] = *v.error;
    return j;
  }
  j["relation_form"] = v.relation_form;
  j["N_local_max"] = v.N_local_max;
  j["N_global_max"] = v.N_global_max;
  j["N_local_min"] = v.N_local_min;
  j["N_global_min"] = v.N_global_min;
  j["N_used"] = v.N_used;
  j["sum_m"] = v.sum_m;
  ordered_json levels = ordered_json::array();
  for (const auto& la : v.levels) {
    ordered_json diags = ordered_json::array();
    for (const auto& d : la.diagnostics) {
      diags.push_back({{"kind", d.kind}, {"side", std::string(to_string(d.side))}, {"message", d.message}});
    }
    ordered_json e{{"level", la.level}, {"q", la.q},         {"M1", la.M1},
                   {"M2", la.M2},       {"sum_m", la.sum_m}, {"identity", la.identity}};
    if (la.ring_contacts >= 0) e["ring_contacts"] = la.ring_contacts;
    e["identity_holds"] = la.identity_holds;
    e["diagnostics"] = diags;
    levels.push_back(e);
  }
  j["q_per_level"] = levels;
  j["verdict"] = std::string(to_string(v.verdict));
  j["flags"] = v.flags;
  j["boundary_degree"] = v.boundary_degree;
  ordered_json recs = ordered_json::array();
  for (const auto& r : v.records) recs.push_back(record_to_json(r));
  j["critical_points"] = recs;

  ordered_json prov;
  prov["h"] = v.h;
  prov["tolerances"] = v.tolerances;
  prov["oracle_agreement"] = !v.oracle.applicable ? "NOT_APPLICABLE" : (v.oracle.agree ? "AGREE" : "DISAGREE");
  if (v.oracle.applicable) {
    ordered_json roots = ordered_json::array();
    for (const auto& r : v.oracle.roots) {
      roots.push_back({{"x", r.location.x()},
                       {"y", r.location.y()},
                       {"modulus", r.location.norm()},
                       {"multiplicity", r.multiplicity},
                       {"location", std::string(to_string(r.where))}});
    }
    prov["oracle"] = {{"sum_m", v.oracle.sum_m},
                      {"argument_count", v.oracle.argument_count},
                      {"boundary_critical", v.oracle.boundary_critical},
                      {"roots", roots}};
  }
  prov["newton"] = {{"iters", v.newton.iterations}, {"residual", v.newton.residual}};
  j["provenance"] = prov;
  return j;
}

std::shared_ptr<const MeshedDomain> build_mesh(const ScenarioConfig& cfg) {
  if (cfg.domain.kind == DomainKind::Disk) {
    return std::make_shared<const MeshedDomain>(build_disk_mesh(cfg.domain.outer_radius, cfg.h));
  }
  return std::make_shared<const MeshedDomain>(build_annulus_mesh(cfg.domain.inner_radius, cfg.domain.outer_radius, cfg.h));
}

DiscreteSolution solve_scenario(const ScenarioConfig& cfg, std::shared_ptr<const MeshedDomain> mesh) {
  const DirichletData data{cfg.profile, cfg.H};
  NewtonOptions nopts;
  nopts.tol = cfg.tolerances.newton_tol;
  nopts.max_iter = cfg.tolerances.max_iter;
  return solve(std::move(mesh), make_coefficient(cfg.coefficient), data, nopts);
}

DetectOptions detect_options(const ScenarioConfig& cfg, const DiscreteSolution& sol) {
  DetectOptions d;
  const double range = sol.max_value() - sol.min_value();
  d.grad_tol = cfg.tolerances.grad_tol.value_or(1e-3 * range / sol.domain().diameter());
  d.merge_radius = cfg.tolerances.merge_radius.value_or(3.0 * cfg.h);
  d.group_radius = cfg.tolerances.group_radius.value_or(6.0 * cfg.h);
  return d;
}

HarmonicRepresentation harmonic_oracle(const ScenarioConfig& cfg) {
  if (cfg.coefficient != CoefficientFamily::Laplace) {
    throw Error(ErrorCode::InvalidArgument, "closed-form oracle exists only for the Laplace family");
  }
  if (cfg.domain.kind == DomainKind::Disk) return disk_harmonic(cfg.domain.outer_radius, cfg.profile);
  if (!cfg.H) throw Error(ErrorCode::InvalidArgument, "annular scenario requires H");
  return annulus_harmonic(cfg.domain.inner_radius, cfg.domain.outer_radius, *cfg.H, cfg.profile);
}

VerdictRecord run_scenario(const ScenarioConfig& cfg) {
  try {
    PipelineResult res = run_pipeline(cfg);
    if (cfg.outputs.dir) write_outputs(cfg, res);
    return std::move(res.verdict);
  } catch (const Error& e) {
    throw Error(e.code(), "scenario " + cfg.id + ": " + e.detail());
  }
}

VerdictRecord error_record(const std::string& scenario, const std::string& message) {
  VerdictRecord v;
  v.scenario = scenario;
  v.verdict = Verdict::Error;
  v.error = message;
  return v;
}

std::vector<VerdictRecord> sweep(std::span<const ScenarioConfig> cfgs, bool parallel) {
  std::vector<VerdictRecord> out(cfgs.size());
  auto run_one = [&](std::size_t i) {
    try {
      out[i] = run_scenario(cfgs[i]);
    } catch (const std::exception& e) {
      out[i] = error_record(cfgs[i].id, e.what());
    }
  };
  if (!parallel || cfgs.size() < 2) {
    for (std::size_t i = 0; i < cfgs.size(); ++i) run_one(i);
    return out;
  }
  std::atomic<std::size_t> next{0};
  const unsigned workers = std::clamp<unsigned>(std::thread::hardware_concurrency(), 1u, static_cast<unsigned>(cfgs.size()));
  std::vector<std::jthread> pool;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < cfgs.size(); i = next++) run_one(i);
    });
  }
  pool.clear();  // joins
  return out;
}

int exit_code(std::span<const VerdictRecord> verdicts) {
  auto any = [&](Verdict k) {
    return std::any_of(verdicts.begin(), verdicts.end(), [&](const VerdictRecord& v) { return v.verdict == k; });
  };
  if (any(Verdict::Error)) return 3;
  if (any(Verdict::Violated)) return 1;
  if (any(Verdict::Degenerate)) return 2;
  return 0;
}

}  // namespace critlab
