#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "savings/env.hpp"

namespace savings {

// Exhaustive case labels for the asymptotic-MPC classification. Each bar
// state lands in exactly one:
//   DownwardReachable        lower risk aversion reachable, positive beta*R  -> MPC 0
//   PersistentExplosive      self-persistent with irreducible G, r(G) >= 1   -> MPC 0
//   AbsorbingContractive     absorbing risk aversion, r(G) < 1               -> MPC x*^(-1/gamma)
//   StrictlyUpward           strictly more risk averse next period           -> MPC 1
//   PartPersistentContractive  partially persistent, r(G) < 1, R,Y bounded   -> MPC x*^(-1/gamma)
//   Unclassified             no case's hypotheses hold
enum class AsymptoticCaseLabel {
    DownwardReachable,
    PersistentExplosive,
    AbsorbingContractive,
    StrictlyUpward,
    PartPersistentContractive,
    Unclassified,
};

const char* to_string(AsymptoticCaseLabel label);

struct AsymptoticCase {
    AsymptoticCaseLabel label = AsymptoticCaseLabel::Unclassified;
    std::vector<std::pair<std::string, bool>> hypotheses_checked;
};

struct FixedPointResult {
    enum class Status { Converged, Diverged, BoundaryInconclusive };
    Status status = Status::Diverged;
    std::vector<double> x; // valid when Converged
    int iterations = 0;
};

// Per-composite-state row of the asymptotic report.
struct AsymptoticRow {
    std::size_t state = 0;
    AsymptoticCase classification;
    std::optional<double> mpc;       // empty = UNDETERMINED
    std::string mpc_provenance;      // why undetermined, or how the value was obtained
    std::optional<double> x_star;    // the F fixed-point coordinate, when finite
    // asymptotic saving rate per distinct realized gross return; -inf allowed
    std::vector<std::pair<double, double>> saving_rate_per_return;
};

struct AsymptoticReport {
    std::vector<AsymptoticRow> rows; // one per composite state, flat order
};

// One application of x |-> (1 + (G x)^(1/gamma))^gamma, coordinatewise.
std::vector<double> f_operator(const Matrix& G, double gamma, const std::vector<double>& x);
std::vector<double> f_operator(const ExogenousEnvironment& env, std::size_t bar,
                               const std::vector<double>& x);

// Fixed-point iteration from the ones vector. The dichotomy is decided by
// r(G) up front: r >= 1 reports Diverged (iteration only confirms), the band
// |r - 1| < 1e-8 reports BoundaryInconclusive. Throws NumericError when
// max_iter runs out with r < 1.
FixedPointResult f_fixed_point(const Matrix& G, double gamma, double tol, int max_iter);
FixedPointResult f_fixed_point(const ExogenousEnvironment& env, std::size_t bar, double tol,
                               int max_iter);

AsymptoticCase classify_state(const ExogenousEnvironment& env, const SpectralReport& spectral,
                              std::size_t bar);

AsymptoticReport asymptotic_mpc(const ExogenousEnvironment& env);
AsymptoticReport asymptotic_mpc(const ExogenousEnvironment& env, const SpectralReport& spectral);

// s = 1 - [(R-1)^-(1-c) + c] / [(R-1)^+(1-c)] for a deterministic gross
// return; -inf when the denominator vanishes with a positive numerator (and
// for the indeterminate R = 1, c = 0 corner).
double asymptotic_saving_rate(double mpc, double R_value);

} // namespace savings
