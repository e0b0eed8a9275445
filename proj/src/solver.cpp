#include "savings/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace savings {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// c^(-gamma) with fast paths for the common integer exponents
inline double pow_neg(double c, double gamma) {
    if (gamma == 1.0) return 1.0 / c;
    if (gamma == 2.0) return 1.0 / (c * c);
    if (gamma == 3.0) return 1.0 / (c * c * c);
    return std::pow(c, -gamma);
}

// Flattened expectation terms for one current state: weight = P(z,zhat)*prob*beta*R.
struct ExpectationTerm {
    double weight;
    double R;
    double Y;
    double gamma_next;
    std::size_t state_next;
};

std::vector<std::vector<ExpectationTerm>> build_terms(const ExogenousEnvironment& env) {
    const std::size_t n = env.n_states();
    std::vector<std::vector<ExpectationTerm>> terms(n);
    for (std::size_t z = 0; z < n; ++z) {
        for (std::size_t zh = 0; zh < n; ++zh) {
            double p = env.P()(z, zh);
            if (p == 0.0) continue;
            for (const Atom& a : env.atoms(z, zh)) {
                double w = p * a.prob * a.beta * a.rate_of_return;
                if (w == 0.0) continue;
                terms[z].push_back({w, a.rate_of_return, a.income, env.gamma_of(zh), zh});
            }
        }
    }
    return terms;
}

} // namespace

WealthGrid::WealthGrid(GridSpacing spacing, double w_min, double w_max, std::size_t size)
    : spacing_(spacing) {
    if (!(w_min > 0.0)) throw ConfigError("grid w_min must be positive");
    if (!(w_max > w_min)) throw ConfigError("grid w_max must exceed w_min");
    if (size < 16) throw ConfigError("grid size must be at least 16");
    points_.resize(size);
    if (spacing == GridSpacing::Linear) {
        double step = (w_max - w_min) / double(size - 1);
        for (std::size_t g = 0; g < size; ++g) points_[g] = w_min + step * double(g);
    } else {
        double log_ratio = std::log(w_max / w_min) / double(size - 1);
        for (std::size_t g = 0; g < size; ++g) points_[g] = w_min * std::exp(log_ratio * double(g));
    }
    points_.front() = w_min;
    points_.back() = w_max;
}

std::size_t WealthGrid::segment(double w) const {
    if (w <= points_.front()) return 0;
    if (w >= points_.back()) return points_.size() - 2;
    auto it = std::upper_bound(points_.begin(), points_.end(), w);
    return std::size_t(it - points_.begin()) - 1;
}

bool WealthGrid::same_as(const WealthGrid& other) const {
    return this == &other || points_ == other.points_;
}

ConsumptionPolicy::ConsumptionPolicy(std::shared_ptr<const WealthGrid> grid, std::size_t n_states,
                                     std::vector<std::vector<double>> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
    if (values_.size() != n_states) throw NumericError("policy state count mismatch");
    for (const auto& col : values_)
        if (col.size() != grid_->size()) throw NumericError("policy grid size mismatch");
    slopes_.resize(n_states);
    const auto& pts = grid_->points();
    std::size_t last = pts.size() - 1;
    for (std::size_t z = 0; z < n_states; ++z) {
        double s = (values_[z][last] - values_[z][last - 1]) / (pts[last] - pts[last - 1]);
        slopes_[z] = std::clamp(s, 0.0, 1.0);
    }
}

ConsumptionPolicy ConsumptionPolicy::identity(std::shared_ptr<const WealthGrid> grid,
                                              std::size_t n_states) {
    std::vector<std::vector<double>> vals(n_states, grid->points());
    return ConsumptionPolicy(std::move(grid), n_states, std::move(vals));
}

double ConsumptionPolicy::operator()(double w, std::size_t state) const {
    const auto& pts = grid_->points();
    const auto& v = values_[state];
    if (w >= pts.back()) {
        double c = v.back() + slopes_[state] * (w - pts.back());
        return std::min(c, w);
    }
    if (w <= pts.front()) {
        // extend the first segment downward, clipped into (0, w]
        double slope = (v[1] - v[0]) / (pts[1] - pts[0]);
        double c = v[0] - slope * (pts[0] - w);
        if (!(c > 0.0)) return w;
        return std::min(c, w);
    }
    std::size_t g = grid_->segment(w);
    double t = (w - pts[g]) / (pts[g + 1] - pts[g]);
    return v[g] + t * (v[g + 1] - v[g]);
}

double ConsumptionPolicy::contract_violation() const {
    const auto& pts = grid_->points();
    double worst = 0.0;
    for (const auto& v : values_) {
        for (std::size_t g = 0; g < v.size(); ++g) {
            worst = std::max(worst, v[g] - pts[g]);      // c <= w
            worst = std::max(worst, v[g] > 0.0 ? 0.0 : kInf); // c > 0
            if (g > 0) {
                worst = std::max(worst, v[g - 1] - v[g]); // c nondecreasing
                worst = std::max(worst, (pts[g - 1] - v[g - 1]) - (pts[g] - v[g])); // savings nondecreasing
            }
        }
    }
    return worst;
}

double marginal_utility(double c, std::size_t state, const ExogenousEnvironment& env) {
    if (!(c > 0.0)) throw NumericError("marginal utility requires positive consumption");
    return pow_neg(c, env.gamma_of(state));
}

double inverse_marginal_utility(double m, std::size_t state, const ExogenousEnvironment& env) {
    if (!(m > 0.0)) throw NumericError("inverse marginal utility requires a positive argument");
    return std::pow(m, -1.0 / env.gamma_of(state));
}

double saving_threshold(const ConsumptionPolicy& policy, std::size_t state,
                        const ExogenousEnvironment& env) {
    const std::size_t n = env.n_states();
    if (policy.n_states() != n || state >= n)
        throw NumericError("policy does not match the environment's state space");
    double acc = 0.0;
    for (std::size_t zh = 0; zh < n; ++zh) {
        double p = env.P()(state, zh);
        if (p == 0.0) continue;
        for (const Atom& a : env.atoms(state, zh)) {
            double w = p * a.prob * a.beta * a.rate_of_return;
            if (w == 0.0) continue;
            acc += w * pow_neg(policy(a.income, zh), env.gamma_of(zh));
        }
    }
    if (acc == 0.0) return kInf;
    return std::pow(acc, -1.0 / env.gamma_of(state));
}

namespace {

// E_z[ beta*R*u'(c(R*(w-xi)+Y, Zhat), Zhat) ] using the flattened terms
inline double expected_future_mu(const std::vector<ExpectationTerm>& terms,
                                 const ConsumptionPolicy& policy, double w, double xi) {
    double acc = 0.0;
    double savings = w - xi;
    for (const ExpectationTerm& t : terms) {
        double wn = t.R * savings + t.Y;
        acc += t.weight * pow_neg(policy(wn, t.state_next), t.gamma_next);
    }
    return acc;
}

} // namespace

ConsumptionPolicy time_iteration_step(const ConsumptionPolicy& policy,
                                      const ExogenousEnvironment& env) {
    const std::size_t n = env.n_states();
    if (policy.n_states() != n)
        throw NumericError("policy does not match the environment's state space");
    const auto terms = build_terms(env);
    const WealthGrid& grid = policy.grid();
    std::vector<std::vector<double>> next(n, std::vector<double>(grid.size()));

    for (std::size_t z = 0; z < n; ++z) {
        const double gamma = env.gamma_of(z);
        const double wbar = saving_threshold(policy, z, env);
        for (std::size_t g = 0; g < grid.size(); ++g) {
            const double w = grid[g];
            if (w <= wbar) {
                next[z][g] = w;
                continue;
            }
            // interior root of u'(xi) = E[beta*R*u'(c(R(w-xi)+Y))]; the left
            // side falls in xi, the right side rises, so signs bracket it
            double lo = 1e-12 * w;
            double hi = w;
            double f_hi = pow_neg(hi, gamma) - expected_future_mu(terms[z], policy, w, hi);
            if (f_hi >= 0.0) {
                // w <= true threshold up to roundoff; treat as corner
                next[z][g] = w;
                continue;
            }
            for (int it = 0; it < 200; ++it) {
                double mid = 0.5 * (lo + hi);
                double f = pow_neg(mid, gamma) - expected_future_mu(terms[z], policy, w, mid);
                if (f > 0.0)
                    lo = mid;
                else
                    hi = mid;
                if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * hi) break;
            }
            next[z][g] = 0.5 * (lo + hi);
        }
    }
    return ConsumptionPolicy(policy.grid_ptr(), n, std::move(next));
}

double rho_distance(const ConsumptionPolicy& a, const ConsumptionPolicy& b,
                    const ExogenousEnvironment& env) {
    auto d = state_distances(a, b, env);
    return *std::max_element(d.begin(), d.end());
}

std::vector<double> state_distances(const ConsumptionPolicy& a, const ConsumptionPolicy& b,
                                    const ExogenousEnvironment& env) {
    if (!a.grid().same_as(b.grid())) throw NumericError("rho distance requires matching grids");
    if (a.n_states() != b.n_states() || a.n_states() != env.n_states())
        throw NumericError("rho distance requires matching state counts");
    std::vector<double> out(a.n_states(), 0.0);
    for (std::size_t z = 0; z < a.n_states(); ++z) {
        double gamma = env.gamma_of(z);
        double worst = 0.0;
        for (std::size_t g = 0; g < a.grid().size(); ++g) {
            double d = std::fabs(pow_neg(a.value_at(g, z), gamma) - pow_neg(b.value_at(g, z), gamma));
            worst = std::max(worst, d);
        }
        out[z] = worst;
    }
    return out;
}

double euler_residual_max(const ConsumptionPolicy& policy, const ExogenousEnvironment& env) {
    if (policy.n_states() != env.n_states())
        throw NumericError("policy does not match the environment's state space");
    const auto terms = build_terms(env);
    const WealthGrid& grid = policy.grid();
    double worst = 0.0;
    for (std::size_t z = 0; z < policy.n_states(); ++z) {
        double gamma = env.gamma_of(z);
        for (std::size_t g = 0; g < grid.size(); ++g) {
            double w = grid[g];
            double c = policy.value_at(g, z);
            if (c >= w * (1.0 - 1e-12)) continue; // constrained point
            double lhs = pow_neg(c, gamma);
            double rhs = expected_future_mu(terms[z], policy, w, c);
            worst = std::max(worst, std::fabs(lhs - rhs));
        }
    }
    return worst;
}

std::pair<ConsumptionPolicy, SolveDiagnostics> solve(const ExogenousEnvironment& env,
                                                     std::shared_ptr<const WealthGrid> grid,
                                                     const SolveParams& params) {
    if (!(params.tol > 0.0)) throw ConfigError("solver tol must be positive");
    if (params.max_iter < 1) throw ConfigError("solver max_iter must be at least 1");

    SolveDiagnostics diag;
    ConsumptionPolicy current = ConsumptionPolicy::identity(grid, env.n_states());
    for (int k = 0; k < params.max_iter; ++k) {
        ConsumptionPolicy next = time_iteration_step(current, env);
        diag.monotonicity_violation = std::max(diag.monotonicity_violation, next.contract_violation());
        double rho = rho_distance(current, next, env);
        diag.rho_history.push_back(rho);
        diag.iterations = k + 1;
        current = std::move(next);
        if (rho < params.tol) {
            diag.converged = true;
            break;
        }
    }
    diag.threshold_wealth.resize(env.n_states());
    for (std::size_t z = 0; z < env.n_states(); ++z)
        diag.threshold_wealth[z] = saving_threshold(current, z, env);
    diag.euler_residual_max = euler_residual_max(current, env);
    return {std::move(current), std::move(diag)};
}

} // namespace savings
