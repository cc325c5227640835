#include <algorithm>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "critlab/error.hpp"
#include "critlab/harness.hpp"

namespace fs = std::filesystem;
using namespace critlab;

namespace {

struct Overrides {
  std::optional<double> h;
  std::optional<double> grad_tol;
  std::optional<double> band_delta;
  std::optional<std::string> out;
  bool svg = false;
  bool csv = false;
};

void apply(const Overrides& o, ScenarioConfig& cfg) {
  if (o.h) cfg.h = *o.h;
  if (o.grad_tol) cfg.tolerances.grad_tol = o.grad_tol;
  if (o.band_delta) cfg.tolerances.band_delta = o.band_delta;
  if (o.out) cfg.outputs.dir = *o.out;
  cfg.outputs.svg = cfg.outputs.svg || o.svg;
  cfg.outputs.csv = cfg.outputs.csv || o.csv;
}

void add_overrides(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--h", o.h, "Target mesh size")->check(CLI::PositiveNumber);
  cmd->add_option("--grad-tol", o.grad_tol, "Gradient threshold for candidate triangles")->check(CLI::PositiveNumber);
  cmd->add_option("--band-delta", o.band_delta, "Half-width of the level band")->check(CLI::PositiveNumber);
  cmd->add_option("--out", o.out, "Directory for report files");
  cmd->add_flag("--svg", o.svg, "Write level-line SVGs");
  cmd->add_flag("--csv", o.csv, "Write the critical point table as CSV");
}

// Prints the document, or writes it to <out>/<id>.<suffix> when --out is given.
void emit(const ScenarioConfig& cfg, const ordered_json& doc, const std::string& suffix) {
  const std::string text = doc.dump(2) + "\n";
  if (cfg.outputs.dir) {
    write_file_atomic(*cfg.outputs.dir / (cfg.id + "." + suffix), text);
  } else {
    std::cout << text;
  }
}

std::vector<fs::path> scenario_files(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw Error(ErrorCode::Io, dir.string() + " is not a directory");
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == ".json") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  return files;
}

void summarize(const VerdictRecord& v) {
  std::cerr << v.scenario << ": " << to_string(v.verdict);
  if (v.relation) std::cerr << " " << to_string(*v.relation) << " sum_m=" << v.sum_m << " N=" << v.N_used;
  for (const auto& f : v.flags) std::cerr << " [" << f << "]";
  if (v.error) std::cerr << " " << *v.error;
  std::cerr << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Critical points of elliptic Dirichlet problems on disks and annuli"};
  app.require_subcommand(1);
  app.set_help_flag("--help", "Print this help message and exit");  // -h would clash with --h

  Overrides ov;
  std::string cfg_path;
  std::string dir;
  double level = 0.0;
  bool parallel = false;

  auto* solve_cmd = app.add_subcommand("solve", "Solve the boundary value problem and print nodal values");
  auto* oracle_cmd = app.add_subcommand("oracle", "Closed-form critical points of the Laplace solution");
  auto* analyze_cmd = app.add_subcommand("analyze", "Level set topology at one level");
  auto* verify_cmd = app.add_subcommand("verify", "Run the full pipeline and print the verdict");
  auto* sweep_cmd = app.add_subcommand("sweep", "Verify every *.json scenario in a directory");

  for (auto* cmd : {solve_cmd, oracle_cmd, analyze_cmd, verify_cmd}) {
    cmd->add_option("config", cfg_path, "Scenario JSON")->required()->check(CLI::ExistingFile);
    add_overrides(cmd, ov);
  }
  analyze_cmd->add_option("--level", level, "Level t")->required();
  sweep_cmd->add_option("dir", dir, "Scenario directory")->required();
  add_overrides(sweep_cmd, ov);
  auto* seq = sweep_cmd->add_flag("--seq", "Run scenarios one at a time (default)");
  sweep_cmd->add_flag("--par", parallel, "Run scenarios concurrently")->excludes(seq);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*sweep_cmd) {
      std::vector<ScenarioConfig> cfgs;
      std::vector<VerdictRecord> failed;
      for (const auto& f : scenario_files(dir)) {
        try {
          cfgs.push_back(load_config(f));
          apply(ov, cfgs.back());
        } catch (const Error& e) {
          failed.push_back(error_record(f.stem().string(), e.what()));
        }
      }
      auto verdicts = sweep(cfgs, parallel);
      verdicts.insert(verdicts.end(), failed.begin(), failed.end());
      ordered_json all = ordered_json::array();
      for (const auto& v : verdicts) {
        summarize(v);
        all.push_back(verdict_to_json(v));
      }
      if (!ov.out) std::cout << all.dump(2) << "\n";
      return exit_code(verdicts);
    }

    ScenarioConfig cfg = load_config(cfg_path);
    apply(ov, cfg);

    if (*verify_cmd) {
      const VerdictRecord v = run_scenario(cfg);
      summarize(v);
      if (!cfg.outputs.dir) std::cout << verdict_to_json(v).dump(2) << "\n";
      return exit_code(std::span(&v, 1));
    }
    if (*solve_cmd) {
      const auto sol = solve_scenario(cfg, build_mesh(cfg));
      emit(cfg, solution_to_json(sol), "solution.json");
      return 0;
    }
    if (*oracle_cmd) {
      const auto rep = harmonic_oracle(cfg);
      const auto& t = cfg.tolerances;
      emit(cfg, oracle_to_json(rep, oracle_critical_points(rep, {t.oracle_cluster_tol, t.oracle_boundary_band})),
           "oracle.json");
      return 0;
    }
    if (*analyze_cmd) {
      const auto sol = solve_scenario(cfg, build_mesh(cfg));
      const auto records = detect_critical_points(sol, detect_options(cfg, sol));
      std::vector<CriticalPointRecord> interior;
      for (const auto& r : records) {
        if (!r.has(CpFlag::NearBoundary)) interior.push_back(r);
      }
      LevelOptions lopts{cfg.tolerances.band_delta.value_or(default_band_delta(sol)), detect_options(cfg, sol).merge_radius};
      std::vector<CriticalPointRecord> at_level;
      for (const auto& r : interior) {
        if (std::abs(r.level - level) <= 10.0 * *lopts.delta) at_level.push_back(r);
      }
      const auto rep = analyze_level(sol, level, at_level, lopts);
      emit(cfg, level_report_to_json(rep), "level.json");
      if (cfg.outputs.dir && cfg.outputs.svg) {
        write_file_atomic(*cfg.outputs.dir / (cfg.id + ".level.svg"), level_lines_svg(sol, level, lopts, records));
      }
      return 0;
    }
  } catch (const Error& e) {
    std::cerr << "error (" << to_string(e.code()) << "): " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
  return 0;
}
