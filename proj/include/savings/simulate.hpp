#pragma once

#include <cstdint>
#include <vector>

#include "savings/solver.hpp"

namespace savings {

// One simulated trajectory. Arrays are indexed by t = 0..T with the step
// quantities (saving rate, drawn return/income) attached to their arrival
// period; entries at t = 0 are NaN placeholders.
struct SimulatedPath {
    std::vector<double> wealth;
    std::vector<double> consumption;
    std::vector<std::size_t> state;
    std::vector<double> saving_rate;
    std::vector<double> return_drawn;
    std::vector<double> income_drawn;
    bool truncated = false; // wealth underflow; recording stopped early
};

struct SimulationRun {
    std::uint64_t seed = 0;
    int horizon = 0;
    int n_paths = 0;
    double initial_wealth = 0.0;
    std::size_t initial_state = 0;
    std::vector<SimulatedPath> paths;
};

struct SimulateParams {
    std::uint64_t seed = 1;
    int n_paths = 10;
    int horizon = 100;
    double initial_wealth = 1.0;
    std::size_t initial_state = 0;
};

// Deterministic counter-based uniform draw on [0,1), keyed by
// (seed, path, t, stream); identical keys give identical draws regardless of
// evaluation order.
double counter_uniform(std::uint64_t seed, std::uint64_t path, std::uint64_t t,
                       std::uint64_t stream);

SimulationRun simulate_paths(const ConsumptionPolicy& policy, const ExogenousEnvironment& env,
                             const SimulateParams& params);

struct MpcSample {
    double wealth;
    double average_propensity; // c/w
    double local_slope;        // centered finite difference, h = 1e-3
};

// Average propensity and local MPC slope of a policy at the given wealth
// levels, which must lie in (0, 10*w_max].
std::vector<MpcSample> empirical_mpc(const ConsumptionPolicy& policy, std::size_t state,
                                     const std::vector<double>& wealth_levels);

} // namespace savings
