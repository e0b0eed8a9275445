#include "savings/simulate.hpp"

#include <cmath>
#include <limits>

namespace savings {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

inline std::uint64_t mix64(std::uint64_t x) {
    // splitmix64 finalizer
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

} // namespace

double counter_uniform(std::uint64_t seed, std::uint64_t path, std::uint64_t t,
                       std::uint64_t stream) {
    std::uint64_t h = mix64(seed);
    h = mix64(h ^ path);
    h = mix64(h ^ t);
    h = mix64(h ^ stream);
    return double(h >> 11) * 0x1.0p-53;
}

SimulationRun simulate_paths(const ConsumptionPolicy& policy, const ExogenousEnvironment& env,
                             const SimulateParams& params) {
    if (!(params.initial_wealth > 0.0)) throw ConfigError("simulate w0 must be positive");
    if (params.n_paths < 1) throw ConfigError("simulate n_paths must be at least 1");
    if (params.horizon < 1) throw ConfigError("simulate horizon must be at least 1");
    if (params.initial_state >= env.n_states()) throw ConfigError("simulate z0 out of range");

    SimulationRun run;
    run.seed = params.seed;
    run.horizon = params.horizon;
    run.n_paths = params.n_paths;
    run.initial_wealth = params.initial_wealth;
    run.initial_state = params.initial_state;
    run.paths.resize(params.n_paths);

    const std::size_t n = env.n_states();
    for (int p = 0; p < params.n_paths; ++p) {
        SimulatedPath& path = run.paths[p];
        double w = params.initial_wealth;
        std::size_t z = params.initial_state;
        path.wealth.push_back(w);
        path.state.push_back(z);
        path.consumption.push_back(policy(w, z));
        path.saving_rate.push_back(kNaN);
        path.return_drawn.push_back(kNaN);
        path.income_drawn.push_back(kNaN);

        for (int t = 1; t <= params.horizon; ++t) {
            double c = path.consumption.back();

            // next composite state from P(z, .), canonical flat order
            double u = counter_uniform(params.seed, std::uint64_t(p), std::uint64_t(t), 0);
            std::size_t zn = n - 1;
            double acc = 0.0;
            for (std::size_t k = 0; k < n; ++k) {
                acc += env.P()(z, k);
                if (u < acc) {
                    zn = k;
                    break;
                }
            }

            // innovation atom for the realized pair
            double ua = counter_uniform(params.seed, std::uint64_t(p), std::uint64_t(t), 1);
            const auto& atoms = env.atoms(z, zn);
            const Atom* drawn = &atoms.back();
            acc = 0.0;
            for (const Atom& a : atoms) {
                acc += a.prob;
                if (ua < acc) {
                    drawn = &a;
                    break;
                }
            }

            double wn = drawn->rate_of_return * (w - c) + drawn->income;
            double denom = std::max((drawn->rate_of_return - 1.0) * (w - c), 0.0) + drawn->income;
            double s = (wn - w) / denom;

            if (wn < 1e-300) {
                path.truncated = true;
                break;
            }

            w = wn;
            z = zn;
            path.wealth.push_back(w);
            path.state.push_back(z);
            path.consumption.push_back(policy(w, z));
            path.saving_rate.push_back(s);
            path.return_drawn.push_back(drawn->rate_of_return);
            path.income_drawn.push_back(drawn->income);
        }
    }
    return run;
}

std::vector<MpcSample> empirical_mpc(const ConsumptionPolicy& policy, std::size_t state,
                                     const std::vector<double>& wealth_levels) {
    const double h = 1e-3;
    const double w_cap = 10.0 * policy.grid().w_max();
    std::vector<MpcSample> out;
    out.reserve(wealth_levels.size());
    for (double w : wealth_levels) {
        if (!(w > 0.0) || w > w_cap)
            throw NumericError("wealth level outside (0, 10*w_max]");
        double c = policy(w, state);
        double slope = (policy(w * (1.0 + h), state) - policy(w * (1.0 - h), state)) / (2.0 * w * h);
        out.push_back({w, c / w, slope});
    }
    return out;
}

} // namespace savings
