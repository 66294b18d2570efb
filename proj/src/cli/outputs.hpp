#pragma once

// Writers for the trajectory CSV, the per-step audit CSV and the report JSON.

#include <filesystem>
#include <fstream>
#include <ostream>
#include <vector>

#include "phdae/diagnostics.hpp"
#include "scenario.hpp"

namespace phdae::cli {

/// Header "t,z_0,...,z_{n-1},H,supply,dissipation"; states in the coordinates
/// of s.original, row 0 has zero supply and dissipation.
void write_trajectory_csv(std::ostream& os, const Scenario& s, const Trajectory& traj);
void write_audit_csv(std::ostream& os, const Trajectory& traj);

struct RunInfo {
  bool completed = true;
  std::string error;
};

void write_report_json(std::ostream& os, const Scenario& s, const Trajectory& traj,
                       const DiagnosticsReport& report, const RunInfo& info);

struct OrderRow {
  std::string scheme;
  bool applicable = true;
  std::string failure;
  OrderEstimate estimate;
};

/// One line per (scheme, tau): scheme,tau,error,pair_order,order,reference,status.
void write_orders_csv(std::ostream& os, const std::vector<OrderRow>& rows);
void write_table1_csv(std::ostream& os, const std::vector<Table1Grid>& grids);

/// Opens `path` for writing, creating parent directories; throws ConfigError.
std::ofstream open_output(const std::filesystem::path& path);

}  // namespace phdae::cli
