#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "savings/linalg.hpp"

namespace savings {

// One outcome of the innovation draw conditional on a state pair.
struct Atom {
    double prob = 1.0;
    double beta = 0.0;
    double rate_of_return = 0.0; // gross return R
    double income = 0.0;         // Y, strictly positive
};

// Finite mixture of (beta, R, Y) per ordered composite-state pair, indexed by
// flat state indices. Row-major over (from, to).
class InnovationTable {
public:
    InnovationTable() = default;
    InnovationTable(std::size_t n_states, std::vector<std::vector<Atom>> cells)
        : n_(n_states), cells_(std::move(cells)) {}

    std::size_t n_states() const { return n_; }
    const std::vector<Atom>& atoms(std::size_t from, std::size_t to) const {
        return cells_[from * n_ + to];
    }

private:
    std::size_t n_ = 0;
    std::vector<std::vector<Atom>> cells_; // size n_*n_
};

// Exogenous Markov environment: independent bar (risk aversion) and tilde
// chains, composite transition P = bar_P (x) tilde_P, state-dependent gamma,
// and the innovation mixture. Immutable after construction.
class ExogenousEnvironment {
public:
    ExogenousEnvironment(std::vector<std::string> bar_labels,
                         std::vector<std::string> tilde_labels,
                         Matrix bar_P, Matrix tilde_P,
                         std::vector<double> gamma,
                         InnovationTable innovations);

    std::size_t n_bar() const { return bar_labels_.size(); }
    std::size_t n_tilde() const { return tilde_labels_.size(); }
    std::size_t n_states() const { return n_bar() * n_tilde(); }

    // Canonical flat enumeration: (i, j) <-> i*M + j, zero-based.
    std::size_t flat(std::size_t bar, std::size_t tilde) const { return bar * n_tilde() + tilde; }
    std::size_t bar_of(std::size_t state) const { return state / n_tilde(); }
    std::size_t tilde_of(std::size_t state) const { return state % n_tilde(); }

    const Matrix& bar_P() const { return bar_P_; }
    const Matrix& tilde_P() const { return tilde_P_; }
    const Matrix& P() const { return P_; } // composite transition

    double gamma_bar(std::size_t bar) const { return gamma_[bar]; }
    double gamma_of(std::size_t state) const { return gamma_[bar_of(state)]; }
    const std::vector<double>& gamma() const { return gamma_; }

    const std::string& bar_label(std::size_t bar) const { return bar_labels_[bar]; }
    const std::string& tilde_label(std::size_t tilde) const { return tilde_labels_[tilde]; }
    std::string state_label(std::size_t state) const;

    const std::vector<Atom>& atoms(std::size_t from, std::size_t to) const {
        return innovations_.atoms(from, to);
    }

    double min_income() const { return min_income_; }
    double max_income() const { return max_income_; }
    // Smallest R (resp. Y) over every atom in the table; >0 encodes the
    // "bounded below with probability one" hypotheses on finite support.
    double min_return_atom() const { return min_return_; }

private:
    std::string state_label_pairless(std::size_t from, std::size_t to) const;

    std::vector<std::string> bar_labels_;
    std::vector<std::string> tilde_labels_;
    Matrix bar_P_;
    Matrix tilde_P_;
    Matrix P_;
    std::vector<double> gamma_;
    InnovationTable innovations_;
    double min_income_ = 0.0;
    double max_income_ = 0.0;
    double min_return_ = 0.0;
};

// Spectral objects behind the stability assumption and the asymptotic
// classification: K(1), the per-bar-state G_i family, and positivity flags.
struct SpectralReport {
    Matrix K1;
    double r_K1 = 0.0;
    std::vector<Matrix> G;            // one MxM matrix per bar state
    std::vector<double> r_G;
    std::vector<bool> G_irreducible;
    std::vector<std::vector<bool>> betaR_positive_prob; // per (from,to): some atom with beta*R > 0
    bool assumptions_hold = false;    // r(K(1)) < 1
    std::string finiteness_note;      // finite-expectation conditions under finite support
};

// K(theta): entry (z,zhat) = P(z,zhat) * sum_atoms prob*beta*R^theta.
// Errors when an entry diverges (R=0 atom with theta<0 and beta>0 at a pair
// with positive transition probability).
Matrix k_matrix(const ExogenousEnvironment& env, double theta);

// Q_i(j,k) = E[beta * R^(1-gamma_i)] over the atoms of pair (z_ij, z_ik).
Matrix q_matrix(const ExogenousEnvironment& env, std::size_t bar);

// G_i(j,k) = bar_P(i,i) * tilde_P(j,k) * Q_i(j,k); zero-weight cells are zero
// without evaluating the expectation.
Matrix g_matrix(const ExogenousEnvironment& env, std::size_t bar);

SpectralReport check_assumptions(const ExogenousEnvironment& env);

std::string render_spectral_report(const ExogenousEnvironment& env, const SpectralReport& report);

} // namespace savings
