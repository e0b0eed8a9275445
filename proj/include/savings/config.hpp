#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>

#include "savings/env.hpp"
#include "savings/simulate.hpp"
#include "savings/solver.hpp"

namespace savings {

struct GridParams {
    GridSpacing spacing = GridSpacing::Geometric;
    // w_min/w_max default to 1e-2*min(Y) and 1e4*max(Y) when unset
    std::optional<double> w_min;
    std::optional<double> w_max;
    std::size_t size = 400;
};

// Parsed run configuration: the environment plus optional grid, solver,
// simulate, and output blocks with documented defaults.
struct RunConfig {
    std::shared_ptr<const ExogenousEnvironment> env;
    GridParams grid;
    SolveParams solver;
    SimulateParams simulate;
    std::string output_dir = "./out";
    std::string config_hash; // FNV-1a over the canonical form, hex

    std::shared_ptr<const WealthGrid> make_grid() const;
};

// Builds a validated environment from the "environment" block. Throws
// ConfigError with the offending index on every validation failure.
ExogenousEnvironment build_environment(const std::string& json_text);

RunConfig load_run_config_text(const std::string& json_text);
RunConfig load_run_config_file(const std::string& path);

} // namespace savings
