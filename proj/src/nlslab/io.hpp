#pragma once

#include <span>
#include <string>

#include <json.hpp>

#include "ansatz.hpp"
#include "metrics.hpp"
#include "solver.hpp"

namespace nlslab::io {

/// %.17g; parses back to the same double.
std::string fmt17(double v);

/// Header "<tag>,<M>,<L>,<dim>", then M^(dim-1) rows of M values.
void write_grid_field_csv(const std::string& path, const std::string& tag, const geometry::Grid& grid,
                          std::span<const double> values);

struct GridFieldCsv {
  std::string tag;
  geometry::Grid grid;
  RealField values;
};
GridFieldCsv read_grid_field_csv(const std::string& path);

/// Columns t, x0[, x1...], re, im; one row per (time, node).
void write_spacetime_csv(const std::string& path, const geometry::Grid& grid, std::span<const double> times,
                         const ansatz::SpaceTimeField& f);
void write_trajectory_csv(const std::string& path, const geometry::Grid& grid,
                          const solver::TrajectoryRecord& traj);
/// Snapshots only; per-step diagnostics are not part of the CSV.
solver::TrajectoryRecord read_trajectory_csv(const std::string& path, const geometry::Grid& grid);
void write_steps_csv(const std::string& path, const solver::TrajectoryRecord& traj);

nlohmann::json to_json(const model::ModelParams& p);
nlohmann::json to_json(const model::SchemeParams& s);
nlohmann::json to_json(const metrics::Check& c);
nlohmann::json to_json(const metrics::RateFit& f);

/// Level CSVs U_j, w_j, Err_j plus manifest.json with slopes fitted on [fit_lo, fit_hi].
void write_bundle(const std::string& dir, const ansatz::AnsatzBundle& b, double fit_lo, double fit_hi);

nlohmann::json report_json(const metrics::RunReport& r);
void write_norms_csv(const std::string& path, const std::vector<metrics::NormSeries>& series);
/// report.json and norms.csv in dir.
void write_report(const std::string& dir, const metrics::RunReport& r);

void write_text(const std::string& path, const std::string& text);

}  // namespace nlslab::io
