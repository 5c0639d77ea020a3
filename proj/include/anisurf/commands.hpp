#pragma once

#include "anisurf/config.hpp"
#include "anisurf/json_writer.hpp"

#include <string>
#include <vector>

namespace anisurf {

enum ExitCode : int { exit_pass = 0, exit_check_failure = 2, exit_config_error = 3, exit_numeric_failure = 4 };

/// Thresholds of the delaunay verdict.
struct DelaunayTolerances {
  double lambda = 1e-6;
  double xi_jump = 1e-8;
  double force_jump = 1e-8;
  double tangency = 1e-6;
  double independence = 1e-6;
  double periodicity = 1e-6;
  double catenoid = 1e-6;
};

/// Each command writes into c.output_dir (created if needed), echoes the
/// resolved config as config.ini there, and returns an ExitCode. Messages go
/// to `log`.
int cmd_wulff(const ScenarioConfig& c, std::ostream& log);
int cmd_verify(const ScenarioConfig& c, std::ostream& log);
int cmd_delaunay(const ScenarioConfig& c, std::ostream& log);
/// Merges report JSON files into out_dir/merged.json; exit 2 when any merged
/// check failed.
int cmd_report_merge(const std::vector<std::string>& inputs, const std::string& out_dir, std::ostream& log);

/// Verdict JSON of a delaunay run (summary plus pass flags).
Json delaunay_verdict(const Json& summary, const DelaunayTolerances& tol, bool* pass);

}  // namespace anisurf
