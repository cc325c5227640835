#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

#include "critlab/critical_points.hpp"
#include "critlab/levelset.hpp"
#include "critlab/oracle.hpp"

namespace critlab {

using ordered_json = nlohmann::ordered_json;

ordered_json mesh_to_json(const MeshedDomain& mesh);
ordered_json solution_to_json(const DiscreteSolution& sol);
ordered_json profile_to_json(const BoundaryProfile& p);
BoundaryProfile profile_from_json(const nlohmann::json& j);
ordered_json oracle_to_json(const HarmonicRepresentation& rep, const std::vector<OracleCriticalPoint>& points);
ordered_json record_to_json(const CriticalPointRecord& rec);
ordered_json level_report_to_json(const LevelSetReport& rep);

/// Columns x, y, multiplicity, critical_value, gradient_residual, flags.
std::string records_to_csv(const std::vector<CriticalPointRecord>& records);

/// Level lines of u_h = t as one polyline group per super-level component,
/// drawn over the domain outline.
std::string level_lines_svg(const DiscreteSolution& sol, double t, const LevelOptions& opts = {},
                            const std::vector<CriticalPointRecord>& records = {});

/// Writes to a sibling temporary file and renames it into place.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);

std::string read_file(const std::filesystem::path& path);

}  // namespace critlab
