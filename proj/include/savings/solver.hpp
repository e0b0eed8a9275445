#pragma once

#include <memory>
#include <string>
#include <vector>

#include "savings/env.hpp"

namespace savings {

enum class GridSpacing { Linear, Geometric };

// Strictly increasing discretization of the asset space.
class WealthGrid {
public:
    WealthGrid(GridSpacing spacing, double w_min, double w_max, std::size_t size);

    const std::vector<double>& points() const { return points_; }
    double operator[](std::size_t g) const { return points_[g]; }
    std::size_t size() const { return points_.size(); }
    double w_min() const { return points_.front(); }
    double w_max() const { return points_.back(); }
    GridSpacing spacing() const { return spacing_; }

    // index of the segment [points[g], points[g+1]] containing w (clamped)
    std::size_t segment(double w) const;

    bool same_as(const WealthGrid& other) const;

private:
    GridSpacing spacing_;
    std::vector<double> points_;
};

// Consumption table on grid x composite state with a piecewise-linear
// interpolation contract: linear between knots, first-segment extension
// below w_min (clipped into (0, w]), slope-capped linear extension above
// w_max. Values satisfy 0 < c <= w with c and w - c nondecreasing per state.
class ConsumptionPolicy {
public:
    ConsumptionPolicy(std::shared_ptr<const WealthGrid> grid, std::size_t n_states,
                      std::vector<std::vector<double>> values);

    static ConsumptionPolicy identity(std::shared_ptr<const WealthGrid> grid, std::size_t n_states);

    const WealthGrid& grid() const { return *grid_; }
    std::shared_ptr<const WealthGrid> grid_ptr() const { return grid_; }
    std::size_t n_states() const { return values_.size(); }

    double value_at(std::size_t g, std::size_t state) const { return values_[state][g]; }
    const std::vector<double>& values(std::size_t state) const { return values_[state]; }
    double extrapolation_slope(std::size_t state) const { return slopes_[state]; }

    // interpolated/extrapolated consumption at arbitrary wealth w > 0
    double operator()(double w, std::size_t state) const;

    // max violation of the feasibility/monotonicity contract, 0 when clean
    double contract_violation() const;

private:
    std::shared_ptr<const WealthGrid> grid_;
    std::vector<std::vector<double>> values_; // [state][grid]
    std::vector<double> slopes_;              // last-segment slope clipped to [0,1]
};

struct SolveDiagnostics {
    int iterations = 0;
    std::vector<double> rho_history;
    bool converged = false;
    std::vector<double> threshold_wealth; // per state; +inf means always constrained
    double euler_residual_max = 0.0;
    double monotonicity_violation = 0.0;  // worst grid violation seen across sweeps
};

struct SolveParams {
    double tol = 1e-10;
    int max_iter = 5000;
};

// u'(c, z) = c^(-gamma(zbar)); errors on c <= 0.
double marginal_utility(double c, std::size_t state, const ExogenousEnvironment& env);

// (u')^{-1}(m, z) = m^(-1/gamma(zbar)); errors on m <= 0.
double inverse_marginal_utility(double m, std::size_t state, const ExogenousEnvironment& env);

// Wealth threshold below which the updated policy consumes everything:
// u'^{-1}( E_z[ beta*R * u'(policy(Y, Zhat), Zhat) ] ). Returns +inf when the
// expectation is zero (no future weight: the agent is always constrained).
double saving_threshold(const ConsumptionPolicy& policy, std::size_t state,
                        const ExogenousEnvironment& env);

// One sweep of the time-iteration operator: corner below the per-state
// threshold, otherwise the unique interior root of the Euler equation found
// by bisection on (1e-12*w, w).
ConsumptionPolicy time_iteration_step(const ConsumptionPolicy& policy,
                                      const ExogenousEnvironment& env);

// sup distance in marginal-utility units, evaluated on grid points.
double rho_distance(const ConsumptionPolicy& a, const ConsumptionPolicy& b,
                    const ExogenousEnvironment& env);

// Iterates from the identity policy until rho < tol or max_iter sweeps.
// Non-convergence is flagged, not thrown.
std::pair<ConsumptionPolicy, SolveDiagnostics> solve(const ExogenousEnvironment& env,
                                                     std::shared_ptr<const WealthGrid> grid,
                                                     const SolveParams& params);

// Max Euler-equation residual of the policy against itself over interior
// (unconstrained) grid points, in marginal-utility units.
double euler_residual_max(const ConsumptionPolicy& policy, const ExogenousEnvironment& env);

// Per-state grid-sup distances in marginal-utility units (the vector-valued
// metric of the contraction diagnostic).
std::vector<double> state_distances(const ConsumptionPolicy& a, const ConsumptionPolicy& b,
                                    const ExogenousEnvironment& env);

} // namespace savings
