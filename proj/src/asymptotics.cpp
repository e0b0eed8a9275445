#include "savings/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace savings {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kBoundaryBand = 1e-8;
} // namespace

const char* to_string(AsymptoticCaseLabel label) {
    switch (label) {
        case AsymptoticCaseLabel::DownwardReachable: return "DownwardReachable";
        case AsymptoticCaseLabel::PersistentExplosive: return "PersistentExplosive";
        case AsymptoticCaseLabel::AbsorbingContractive: return "AbsorbingContractive";
        case AsymptoticCaseLabel::StrictlyUpward: return "StrictlyUpward";
        case AsymptoticCaseLabel::PartPersistentContractive: return "PartPersistentContractive";
        case AsymptoticCaseLabel::Unclassified: return "Unclassified";
    }
    return "Unclassified";
}

std::vector<double> f_operator(const Matrix& G, double gamma, const std::vector<double>& x) {
    if (!G.square() || G.rows() != x.size()) throw NumericError("F operator size mismatch");
    for (double xi : x)
        if (!(xi >= 1.0)) throw NumericError("F operator requires x >= 1 coordinatewise");
    std::vector<double> gx = G.apply(x);
    std::vector<double> out(x.size());
    for (std::size_t j = 0; j < x.size(); ++j)
        out[j] = std::pow(1.0 + std::pow(gx[j], 1.0 / gamma), gamma);
    return out;
}

std::vector<double> f_operator(const ExogenousEnvironment& env, std::size_t bar,
                               const std::vector<double>& x) {
    return f_operator(g_matrix(env, bar), env.gamma_bar(bar), x);
}

FixedPointResult f_fixed_point(const Matrix& G, double gamma, double tol, int max_iter) {
    if (!(tol > 0.0)) throw NumericError("fixed point tol must be positive");
    FixedPointResult res;
    double r = spectral_radius(G);
    if (std::fabs(r - 1.0) < kBoundaryBand) {
        res.status = FixedPointResult::Status::BoundaryInconclusive;
        return res;
    }
    if (r >= 1.0) {
        res.status = FixedPointResult::Status::Diverged;
        return res;
    }
    std::vector<double> x(G.rows(), 1.0);
    for (int it = 1; it <= max_iter; ++it) {
        std::vector<double> next = f_operator(G, gamma, x);
        double step = 0.0, scale = 1.0;
        for (std::size_t j = 0; j < x.size(); ++j) {
            step = std::max(step, std::fabs(next[j] - x[j]));
            scale = std::max(scale, next[j]);
        }
        for (std::size_t j = 0; j < x.size(); ++j) {
            if (next[j] > 1e12) {
                // only reachable near the boundary; the dichotomy was decided above
                res.status = FixedPointResult::Status::Diverged;
                res.iterations = it;
                return res;
            }
        }
        x = std::move(next);
        // scale-aware stop: the absolute sup-step stalls at machine precision
        // once the fixed point is large
        if (step < tol * (1.0 + scale)) {
            res.status = FixedPointResult::Status::Converged;
            res.x = std::move(x);
            res.iterations = it;
            return res;
        }
    }
    throw NumericError("F fixed-point iteration did not converge although r(G) < 1");
}

FixedPointResult f_fixed_point(const ExogenousEnvironment& env, std::size_t bar, double tol,
                               int max_iter) {
    return f_fixed_point(g_matrix(env, bar), env.gamma_bar(bar), tol, max_iter);
}

AsymptoticCase classify_state(const ExogenousEnvironment& env, const SpectralReport& spectral,
                              std::size_t bar) {
    AsymptoticCase out;
    const Matrix& barP = env.bar_P();

    double downward = 0.0;
    for (std::size_t l = 0; l < bar; ++l) downward += barP(bar, l);
    double pii = barP(bar, bar);
    bool absorbing = pii > 1.0 - 1e-12;

    bool betaR_all_pairs = true;
    for (const auto& row : spectral.betaR_positive_prob)
        for (bool b : row) betaR_all_pairs = betaR_all_pairs && b;

    double rG = spectral.r_G[bar];
    bool irreducible = spectral.G_irreducible[bar];
    bool min_R_positive = env.min_return_atom() > 0.0;
    bool min_Y_positive = env.min_income() > 0.0; // true by construction, recorded anyway

    auto& h = out.hypotheses_checked;
    h.emplace_back("downward transition probability > 0", downward > 0.0);
    h.emplace_back("P(beta*R > 0) > 0 for all state pairs", betaR_all_pairs);
    h.emplace_back("p_ii > 0", pii > 0.0);
    h.emplace_back("p_ii = 1", absorbing);
    h.emplace_back("p_ii = 0", pii == 0.0);
    h.emplace_back("G irreducible", irreducible);
    h.emplace_back("r(G) < 1", rG < 1.0);
    h.emplace_back("R bounded below by m > 0", min_R_positive);
    h.emplace_back("Y bounded below by b > 0", min_Y_positive);

    if (downward > 0.0 && betaR_all_pairs) {
        out.label = AsymptoticCaseLabel::DownwardReachable;
    } else if (pii > 0.0 && irreducible && rG >= 1.0) {
        out.label = AsymptoticCaseLabel::PersistentExplosive;
    } else if (downward == 0.0 && absorbing && rG < 1.0) {
        out.label = AsymptoticCaseLabel::AbsorbingContractive;
    } else if (downward == 0.0 && pii == 0.0 && min_R_positive) {
        out.label = AsymptoticCaseLabel::StrictlyUpward;
    } else if (downward == 0.0 && pii > 0.0 && !absorbing && rG < 1.0 && min_R_positive &&
               min_Y_positive) {
        out.label = AsymptoticCaseLabel::PartPersistentContractive;
    } else {
        out.label = AsymptoticCaseLabel::Unclassified;
    }
    return out;
}

namespace {

std::vector<double> realized_returns(const ExogenousEnvironment& env, std::size_t state) {
    std::vector<double> rs;
    for (std::size_t zh = 0; zh < env.n_states(); ++zh) {
        if (env.P()(state, zh) == 0.0) continue;
        for (const Atom& a : env.atoms(state, zh)) rs.push_back(a.rate_of_return);
    }
    std::sort(rs.begin(), rs.end());
    rs.erase(std::unique(rs.begin(), rs.end()), rs.end());
    return rs;
}

} // namespace

AsymptoticReport asymptotic_mpc(const ExogenousEnvironment& env) {
    return asymptotic_mpc(env, check_assumptions(env));
}

AsymptoticReport asymptotic_mpc(const ExogenousEnvironment& env, const SpectralReport& spectral) {
    AsymptoticReport report;
    report.rows.resize(env.n_states());

    const double fp_tol = 1e-12;
    const int fp_max_iter = 1000000;

    for (std::size_t bar = 0; bar < env.n_bar(); ++bar) {
        AsymptoticCase cls = classify_state(env, spectral, bar);

        std::optional<std::vector<double>> x_star;
        std::string provenance;
        bool undetermined = false;

        switch (cls.label) {
            case AsymptoticCaseLabel::DownwardReachable:
                provenance = "downward transition reachable";
                break;
            case AsymptoticCaseLabel::PersistentExplosive:
                provenance = "r(G) >= 1 with irreducible G";
                break;
            case AsymptoticCaseLabel::StrictlyUpward:
                provenance = "strictly upward transitions";
                break;
            case AsymptoticCaseLabel::AbsorbingContractive:
            case AsymptoticCaseLabel::PartPersistentContractive: {
                FixedPointResult fp = f_fixed_point(env, bar, fp_tol, fp_max_iter);
                if (fp.status == FixedPointResult::Status::Converged) {
                    x_star = std::move(fp.x);
                    provenance = "F fixed point";
                } else if (fp.status == FixedPointResult::Status::BoundaryInconclusive) {
                    undetermined = true;
                    provenance = "boundary-inconclusive: |r(G) - 1| < 1e-8";
                } else {
                    undetermined = true;
                    provenance = "DIVERGED";
                }
                break;
            }
            case AsymptoticCaseLabel::Unclassified:
                undetermined = true;
                provenance = "no case hypotheses hold";
                break;
        }

        for (std::size_t j = 0; j < env.n_tilde(); ++j) {
            std::size_t state = env.flat(bar, j);
            AsymptoticRow& row = report.rows[state];
            row.state = state;
            row.classification = cls;
            row.mpc_provenance = provenance;
            if (undetermined) {
                row.mpc.reset();
            } else if (cls.label == AsymptoticCaseLabel::DownwardReachable ||
                       cls.label == AsymptoticCaseLabel::PersistentExplosive) {
                row.mpc = 0.0;
            } else if (cls.label == AsymptoticCaseLabel::StrictlyUpward) {
                row.mpc = 1.0;
            } else if (x_star) {
                row.x_star = (*x_star)[j];
                row.mpc = std::pow((*x_star)[j], -1.0 / env.gamma_bar(bar));
            }
            if (row.mpc) {
                for (double R : realized_returns(env, state))
                    row.saving_rate_per_return.emplace_back(R, asymptotic_saving_rate(*row.mpc, R));
            }
        }
    }
    return report;
}

double asymptotic_saving_rate(double mpc, double R_value) {
    if (!(mpc >= 0.0) || !(mpc <= 1.0)) throw NumericError("asymptotic MPC must lie in [0,1]");
    if (R_value < 0.0) throw NumericError("gross return must be nonnegative");
    double pos = std::max(R_value - 1.0, 0.0);
    double neg = std::max(1.0 - R_value, 0.0);
    double num = neg * (1.0 - mpc) + mpc;
    double den = pos * (1.0 - mpc);
    if (den > 0.0) return 1.0 - num / den;
    return -kInf; // positive or indeterminate numerator over zero denominator
}

} // namespace savings
