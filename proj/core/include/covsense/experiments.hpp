#pragma once

// Figure-reproduction and exploration commands producing data tables.

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "covsense/config.hpp"
#include "covsense/table.hpp"

namespace covsense {

struct ExperimentOutput {
  std::string command;
  Table table;
  /// One line per failed grid point; the table holds the successful ones.
  std::vector<std::string> failures;
};

/// Cosine and phase estimates over a theta grid for each variant.
ExperimentOutput run_fig3(const RunConfig& config);
/// MSE vs N_B in the fixed-covertness and fixed-power regimes.
ExperimentOutput run_fig4(const RunConfig& config);
/// Square-root-law obeying and violating schedules over integration time.
ExperimentOutput run_fig5(const RunConfig& config);
/// QFI, QCRB and receiver efficiency over the generic grid.
ExperimentOutput run_qcrb(const RunConfig& config);
/// Covertness ladder (epsilon, fidelity bound, optimal counting test) over the generic grid.
ExperimentOutput run_covertness(const RunConfig& config);
/// Monte Carlo estimation over the generic grid.
ExperimentOutput run_sweep(const RunConfig& config);

const std::vector<std::string>& command_names();
/// Validates the config and dispatches; throws ConfigError for unknown commands.
ExperimentOutput run_command(std::string_view command, const RunConfig& config);

/// Writes the table in the configured format with the resolved config in the header.
void write_output(std::ostream& out, const ExperimentOutput& output, const RunConfig& config);

std::string version_string();

}  // namespace covsense
