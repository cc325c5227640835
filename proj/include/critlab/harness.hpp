#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "critlab/io.hpp"
#include "critlab/levelset.hpp"
#include "critlab/oracle.hpp"

namespace critlab {

struct DomainSpec {
  DomainKind kind = DomainKind::Disk;
  double inner_radius = 0.0;  // annulus only
  double outer_radius = 1.0;
};

/// Optional overrides; unset values fall back to the module defaults.
struct Tolerances {
  std::optional<double> grad_tol;
  std::optional<double> merge_radius;
  std::optional<double> group_radius;
  std::optional<double> band_delta;
  std::optional<double> extremum_tol;
  double newton_tol = 1e-10;
  int max_iter = 50;
  double oracle_cluster_tol = 1e-8;
  double oracle_boundary_band = 1e-8;
};

struct OutputRequest {
  std::optional<std::filesystem::path> dir;
  bool svg = false;
  bool csv = false;
};

struct ScenarioConfig {
  std::string id;
  DomainSpec domain;
  double h = 0.02;
  CoefficientFamily coefficient = CoefficientFamily::Laplace;
  BoundaryProfile profile;
  std::optional<double> H;
  Tolerances tolerances;
  OutputRequest outputs;
};

ScenarioConfig config_from_json(const nlohmann::json& j);
ScenarioConfig load_config(const std::filesystem::path& path);
ordered_json config_to_json(const ScenarioConfig& cfg);

enum class Relation {
  INEQ_1_3,
  EQ_1_4,
  INEQ_1_6,
  EQ_1_7_OR_1_8,
  INEQ_1_9,
  EQ_1_10_OR_1_11,
  COR_2_5,
  COR_3_6,
  COR_3_7,
  COR_4_6,
};
std::string_view to_string(Relation r);

/// Which counting relation the scenario's hypotheses select. A single boundary
/// maximum selects the corollary before the equality relation.
Relation applicable_relation(DomainKind kind, const ScenarioClass& cls, const BoundaryExtremaSummary& summary);

struct RelationCheck {
  int N_used = 0;
  bool holds = false;
  std::string form;  // human-readable relation, e.g. "sum_m + 1 == N"
};

RelationCheck evaluate_relation(Relation r, const BoundaryExtremaSummary& summary, int sum_m);

enum class Verdict { Holds, Violated, Degenerate, Error };
std::string_view to_string(Verdict v);

struct LevelAnalysis {
  double level = 0.0;
  double delta = 0.0;
  int sum_m = 0;
  int M1 = 0;
  int M2 = 0;
  int q = 0;
  std::string identity;  // COUNTING or RING_CONTACT
  int ring_contacts = -1;
  bool identity_holds = false;
  std::vector<ComponentDiagnostic> diagnostics;
};

struct OracleCheck {
  bool applicable = false;
  bool agree = false;
  int sum_m = 0;
  int argument_count = 0;
  int boundary_critical = 0;
  std::vector<OracleCriticalPoint> roots;
};

struct VerdictRecord {
  std::string scenario;
  std::optional<ScenarioKind> scenario_class;
  std::optional<Relation> relation;
  int N_local_max = 0;
  int N_global_max = 0;
  int N_local_min = 0;
  int N_global_min = 0;
  int N_used = 0;
  int sum_m = 0;
  std::string relation_form;
  std::vector<LevelAnalysis> levels;
  Verdict verdict = Verdict::Error;
  std::vector<std::string> flags;
  int boundary_degree = 0;
  std::vector<CriticalPointRecord> records;
  OracleCheck oracle;
  double h = 0.0;
  ordered_json tolerances;
  NewtonReport newton;
  std::optional<std::string> error;
};

/// Verdict JSON. Deterministic: no timestamps, fixed key order.
ordered_json verdict_to_json(const VerdictRecord& v);

/// Full pipeline for one scenario; writes the report and any requested side
/// outputs when cfg.outputs.dir is set. Errors are rethrown as Error with the
/// scenario id prefixed and the original code kept.
VerdictRecord run_scenario(const ScenarioConfig& cfg);

VerdictRecord error_record(const std::string& scenario, const std::string& message);

/// Independent runs, output in input order; a failing scenario becomes an
/// error record. parallel runs scenarios on a thread pool.
std::vector<VerdictRecord> sweep(std::span<const ScenarioConfig> cfgs, bool parallel = false);

/// 0 all HOLDS, 1 any VIOLATED, 2 any DEGENERATE without VIOLATED, 3 any error.
int exit_code(std::span<const VerdictRecord> verdicts);

/// Pipeline stages shared with the command-line tool.
std::shared_ptr<const MeshedDomain> build_mesh(const ScenarioConfig& cfg);
DiscreteSolution solve_scenario(const ScenarioConfig& cfg, std::shared_ptr<const MeshedDomain> mesh);
DetectOptions detect_options(const ScenarioConfig& cfg, const DiscreteSolution& sol);
/// Closed-form solution for Laplace scenarios; InvalidArgument otherwise.
HarmonicRepresentation harmonic_oracle(const ScenarioConfig& cfg);

}  // namespace critlab
