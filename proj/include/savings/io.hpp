#pragma once

#include <string>

#include "savings/asymptotics.hpp"
#include "savings/config.hpp"
#include "savings/simulate.hpp"
#include "savings/solver.hpp"

namespace savings {

const char* version();

// Shortest round-trippable decimal form of a double; deterministic across
// runs so output files compare byte-for-byte.
std::string format_double(double x);

// Two-line "# ..." comment block (tool version + config hash) prepended to
// every output file.
std::string file_header(const RunConfig& cfg);

void write_text_file(const std::string& path, const std::string& content);

std::string render_policy_csv(const RunConfig& cfg, const ConsumptionPolicy& policy);
std::string render_diagnostics(const RunConfig& cfg, const SolveDiagnostics& diag);
std::string render_rho_history_csv(const RunConfig& cfg, const SolveDiagnostics& diag);

std::string render_asymptotics_table(const RunConfig& cfg, const AsymptoticReport& report);
std::string render_asymptotics_csv(const RunConfig& cfg, const AsymptoticReport& report);

std::string render_paths_csv(const RunConfig& cfg, const WealthGrid& grid,
                             const SimulationRun& run);

struct ValidationOutcome {
    std::string report;
    bool all_pass = false;
};

// Cross-checks the solved policy against the analytic asymptotics: gap at
// w_max for fixed-point MPCs, decade trend for zero-MPC states, and a
// nonconcavity witness for MPC-1 states.
ValidationOutcome validate_cross_check(const RunConfig& cfg, const ConsumptionPolicy& policy,
                                       const AsymptoticReport& report);

} // namespace savings
