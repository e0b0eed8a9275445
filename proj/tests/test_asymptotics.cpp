#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "savings/asymptotics.hpp"
#include "savings/config.hpp"

using namespace savings;

namespace {

struct Lcg {
    std::uint64_t s;
    explicit Lcg(std::uint64_t seed) : s(seed) {}
    double uniform() {
        s = s * 6364136223846793005ULL + 1442695040888963407ULL;
        return double(s >> 11) * 0x1.0p-53;
    }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
};

Matrix scalar_matrix(double g) {
    Matrix m(1, 1);
    m(0, 0) = g;
    return m;
}

std::string classical_config(const std::string& bar_P, const std::string& gamma,
                             double beta, double R) {
    return std::string(R"({"bar_states": ["g1", "g2"], "tilde_states": ["x"],)") +
           R"("bar_P": )" + bar_P + R"(, "tilde_P": [[1.0]], "gamma": )" + gamma +
           R"(, "innovations": {"constant": {"beta": )" + std::to_string(beta) +
           R"(, "R": )" + std::to_string(R) + R"(, "Y": 1.0}}})";
}

} // namespace

TEST_CASE("F operator evaluations") {
    std::vector<double> ones{1.0};

    CHECK(f_operator(scalar_matrix(0.0), 2.0, ones)[0] == doctest::Approx(1.0));
    // gamma=1, G=0.5: F(2) = 1 + 0.5*2 = 2, a fixed point
    CHECK(f_operator(scalar_matrix(0.5), 1.0, {2.0})[0] == doctest::Approx(2.0));
    // gamma=2, G=0.25: F(1) = (1 + 0.5)^2
    CHECK(f_operator(scalar_matrix(0.25), 2.0, ones)[0] == doctest::Approx(2.25));

    CHECK_THROWS_AS(f_operator(scalar_matrix(0.5), 2.0, {0.5}), NumericError);
}

TEST_CASE("F is monotone and its iterates grow from the ones vector") {
    Lcg rng(4242);
    for (int k = 0; k < 20; ++k) {
        std::size_t m = 1 + std::size_t(rng.uniform() * 3.0);
        Matrix G(m, m);
        for (double& v : G.data()) v = rng.uniform(0.0, 0.6);
        double gamma = rng.uniform(0.5, 3.0);

        std::vector<double> x(m), y(m);
        for (std::size_t j = 0; j < m; ++j) {
            x[j] = rng.uniform(1.0, 5.0);
            y[j] = x[j] + rng.uniform(0.0, 2.0); // y >= x
        }
        auto fx = f_operator(G, gamma, x);
        auto fy = f_operator(G, gamma, y);
        for (std::size_t j = 0; j < m; ++j) {
            CHECK(fx[j] >= 1.0);
            CHECK(fx[j] <= fy[j] + 1e-12);
        }

        std::vector<double> it(m, 1.0);
        for (int n = 0; n < 5; ++n) {
            auto next = f_operator(G, gamma, it);
            for (std::size_t j = 0; j < m; ++j) CHECK(next[j] >= it[j] - 1e-12);
            it = std::move(next);
        }
    }
}

TEST_CASE("scalar fixed points match the closed form") {
    // gamma=1, g=0.5: x* = 1/(1-g) = 2, implied MPC 0.5
    FixedPointResult fp = f_fixed_point(scalar_matrix(0.5), 1.0, 1e-13, 100000);
    REQUIRE(fp.status == FixedPointResult::Status::Converged);
    CHECK(fp.x[0] == doctest::Approx(2.0).epsilon(1e-10));
    CHECK(std::pow(fp.x[0], -1.0) == doctest::Approx(0.5).epsilon(1e-10));

    // benchmark G from the env module: g = 0.9*0.95/1.02^2, gamma = 2
    double g = 0.9 * 0.95 / (1.02 * 1.02);
    FixedPointResult fp2 = f_fixed_point(scalar_matrix(g), 2.0, 1e-13, 100000);
    REQUIRE(fp2.status == FixedPointResult::Status::Converged);
    double mpc = std::pow(fp2.x[0], -0.5);
    CHECK(mpc == doctest::Approx(1.0 - std::sqrt(g)).epsilon(1e-10));

    // divergence is detected up front
    FixedPointResult fp3 = f_fixed_point(scalar_matrix(1.2), 2.0, 1e-13, 100000);
    CHECK(fp3.status == FixedPointResult::Status::Diverged);

    // the boundary band is flagged, not guessed
    FixedPointResult fp4 = f_fixed_point(scalar_matrix(1.0 + 1e-10), 2.0, 1e-13, 100000);
    CHECK(fp4.status == FixedPointResult::Status::BoundaryInconclusive);
}

TEST_CASE("fixed-point dichotomy on random small matrices") {
    Lcg rng(99);
    for (int k = 0; k < 30; ++k) {
        std::size_t m = 1 + std::size_t(rng.uniform() * 3.0);
        Matrix G(m, m);
        for (double& v : G.data()) v = rng.uniform(0.05, 1.0);
        double target = rng.uniform(0.2, 1.8);
        if (std::fabs(target - 1.0) < 1e-3) continue;
        double r0 = spectral_radius(G);
        for (double& v : G.data()) v *= target / r0;
        double gamma = rng.uniform(0.5, 2.5);

        FixedPointResult fp = f_fixed_point(G, gamma, 1e-11, 2000000);
        if (target < 1.0) {
            REQUIRE(fp.status == FixedPointResult::Status::Converged);
            // fixed point verified by applying F once more
            auto fx = f_operator(G, gamma, fp.x);
            for (std::size_t j = 0; j < m; ++j)
                CHECK(fx[j] == doctest::Approx(fp.x[j]).epsilon(1e-6));
        } else {
            CHECK(fp.status == FixedPointResult::Status::Diverged);
        }
    }
}

TEST_CASE("classification by bar state") {
    // downward transition reachable with positive beta*R everywhere
    ExogenousEnvironment env =
        build_environment(classical_config("[[1.0, 0.0], [0.5, 0.5]]", "[1.5, 3.0]", 0.95, 1.02));
    SpectralReport rep = check_assumptions(env);
    AsymptoticCase c2 = classify_state(env, rep, 1);
    CHECK(c2.label == AsymptoticCaseLabel::DownwardReachable);

    // absorbing benchmark
    std::string single = R"({
      "bar_states": ["a"], "tilde_states": ["x"],
      "bar_P": [[1.0]], "tilde_P": [[1.0]],
      "gamma": [2.0],
      "innovations": {"constant": {"beta": 0.95, "R": 1.02, "Y": 1.0}}
    })";
    ExogenousEnvironment env2 = build_environment(single);
    SpectralReport rep2 = check_assumptions(env2);
    CHECK(classify_state(env2, rep2, 0).label == AsymptoticCaseLabel::AbsorbingContractive);

    // strictly upward transitions force MPC 1
    ExogenousEnvironment env3 =
        build_environment(classical_config("[[0.0, 1.0], [0.0, 1.0]]", "[1.5, 3.0]", 0.95, 1.02));
    SpectralReport rep3 = check_assumptions(env3);
    CHECK(classify_state(env3, rep3, 0).label == AsymptoticCaseLabel::StrictlyUpward);
    CHECK(classify_state(env3, rep3, 1).label == AsymptoticCaseLabel::AbsorbingContractive);

    // explosive persistent state: p_ii > 0, G irreducible, r(G) >= 1
    ExogenousEnvironment env4 =
        build_environment(classical_config("[[1.0, 0.0], [0.0, 1.0]]", "[1.5, 3.0]", 1.1, 1.0));
    SpectralReport rep4 = check_assumptions(env4);
    CHECK(rep4.r_G[0] >= 1.0);
    CHECK(classify_state(env4, rep4, 0).label == AsymptoticCaseLabel::PersistentExplosive);

    // every state receives exactly one label and all hypotheses are recorded
    for (std::size_t i = 0; i < 2; ++i) {
        AsymptoticCase c = classify_state(env, rep, i);
        CHECK(c.hypotheses_checked.size() == 9);
    }
}

TEST_CASE("asymptotic MPC table for the classical two-gamma setting") {
    // p all positive: the higher risk-aversion state has MPC 0, the lower one
    // solves the scalar fixed point
    ExogenousEnvironment env =
        build_environment(classical_config("[[0.5, 0.5], [0.5, 0.5]]", "[1.5, 3.0]", 0.95, 1.02));
    AsymptoticReport rep = asymptotic_mpc(env);
    REQUIRE(rep.rows.size() == 2);

    REQUIRE(rep.rows[1].mpc.has_value());
    CHECK(rep.rows[1].classification.label == AsymptoticCaseLabel::DownwardReachable);
    CHECK(*rep.rows[1].mpc == doctest::Approx(0.0));

    REQUIRE(rep.rows[0].mpc.has_value());
    CHECK(rep.rows[0].classification.label == AsymptoticCaseLabel::PartPersistentContractive);
    double g1 = 0.5 * 0.95 * std::pow(1.02, 1.0 - 1.5);
    CHECK(*rep.rows[0].mpc == doctest::Approx(1.0 - std::pow(g1, 1.0 / 1.5)).epsilon(1e-10));

    // per-return saving rates attach to every determined row
    CHECK(rep.rows[0].saving_rate_per_return.size() == 1);
    CHECK(rep.rows[1].saving_rate_per_return.size() == 1);
    CHECK(rep.rows[1].saving_rate_per_return[0].second == doctest::Approx(1.0)); // mpc 0, R > 1
}

TEST_CASE("asymptotic MPC with iid returns uses the mixture expectation") {
    std::string cfg = R"({
      "bar_states": ["a"], "tilde_states": ["x"],
      "bar_P": [[1.0]], "tilde_P": [[1.0]],
      "gamma": [2.0],
      "innovations": {"atoms": [{"prob": 0.5, "beta": 0.95, "R": 0.98, "Y": 1.0},
                                {"prob": 0.5, "beta": 0.95, "R": 1.06, "Y": 1.0}]}
    })";
    ExogenousEnvironment env = build_environment(cfg);
    AsymptoticReport rep = asymptotic_mpc(env);
    REQUIRE(rep.rows[0].mpc.has_value());
    double e = 0.95 * 0.5 * (1.0 / 0.98 + 1.0 / 1.06);
    CHECK(*rep.rows[0].mpc == doctest::Approx(1.0 - std::sqrt(e)).epsilon(1e-10));
    // one saving-rate row per distinct return realization
    CHECK(rep.rows[0].saving_rate_per_return.size() == 2);
}

TEST_CASE("upper-triangular persistence keeps every MPC positive") {
    ExogenousEnvironment env =
        build_environment(classical_config("[[0.6, 0.4], [0.0, 1.0]]", "[1.5, 3.0]", 0.95, 1.02));
    AsymptoticReport rep = asymptotic_mpc(env);
    for (const AsymptoticRow& row : rep.rows) {
        REQUIRE(row.mpc.has_value());
        CHECK(*row.mpc > 0.0);
    }
}

TEST_CASE("downward reachability without beta*R positivity is left unclassified") {
    // zero discounting kills the positivity hypothesis; the downward state
    // then fits no case and must not be assigned a guessed MPC
    ExogenousEnvironment env =
        build_environment(classical_config("[[0.5, 0.5], [0.5, 0.5]]", "[1.5, 3.0]", 0.0, 1.02));
    AsymptoticReport rep = asymptotic_mpc(env);
    CHECK(rep.rows[1].classification.label == AsymptoticCaseLabel::Unclassified);
    CHECK_FALSE(rep.rows[1].mpc.has_value());
    // the lower state still fits the part-persistent case, with G = 0 its
    // fixed point is the ones vector and the MPC is exactly 1
    CHECK(rep.rows[0].classification.label == AsymptoticCaseLabel::PartPersistentContractive);
    REQUIRE(rep.rows[0].mpc.has_value());
    CHECK(*rep.rows[0].mpc == doctest::Approx(1.0));
}

TEST_CASE("vector fixed point matches the solved policy across tilde states") {
    // absorbing risk aversion with a genuine secondary chain: the fixed point
    // is vector-valued and the per-tilde MPCs must line up with the solver
    std::string cfg = R"json({
      "bar_states": ["a"], "tilde_states": ["x", "y"],
      "bar_P": [[1.0]],
      "tilde_P": [[0.7, 0.3], [0.4, 0.6]],
      "gamma": [2.0],
      "innovations": {"pairs": {
        "(a.x,a.x)": [{"prob": 1.0, "beta": 0.95, "R": 1.00, "Y": 1.0}],
        "(a.x,a.y)": [{"prob": 1.0, "beta": 0.95, "R": 1.04, "Y": 1.0}],
        "(a.y,a.x)": [{"prob": 1.0, "beta": 0.95, "R": 0.98, "Y": 1.0}],
        "(a.y,a.y)": [{"prob": 1.0, "beta": 0.95, "R": 1.06, "Y": 1.0}]
      }}
    })json";
    ExogenousEnvironment env = build_environment(cfg);

    // hand-check G = tilde_P (Hadamard) Q with Q(j,k) = 0.95/R_jk
    Matrix G = g_matrix(env, 0);
    CHECK(G(0, 0) == doctest::Approx(0.7 * 0.95 / 1.00).epsilon(1e-14));
    CHECK(G(0, 1) == doctest::Approx(0.3 * 0.95 / 1.04).epsilon(1e-14));
    CHECK(G(1, 0) == doctest::Approx(0.4 * 0.95 / 0.98).epsilon(1e-14));
    CHECK(G(1, 1) == doctest::Approx(0.6 * 0.95 / 1.06).epsilon(1e-14));
    REQUIRE(spectral_radius(G) < 1.0);

    AsymptoticReport rep = asymptotic_mpc(env);
    REQUIRE(rep.rows.size() == 2);
    for (const AsymptoticRow& row : rep.rows) {
        CHECK(row.classification.label == AsymptoticCaseLabel::AbsorbingContractive);
        REQUIRE(row.mpc.has_value());
        REQUIRE(row.x_star.has_value());
        // reported MPC is consistent with its own fixed-point coordinate
        CHECK(*row.mpc == doctest::Approx(std::pow(*row.x_star, -0.5)).epsilon(1e-12));
    }
    // the two tilde states carry genuinely different MPCs
    CHECK(std::fabs(*rep.rows[0].mpc - *rep.rows[1].mpc) > 1e-4);

    auto grid = std::make_shared<WealthGrid>(GridSpacing::Geometric, 0.01, 1e4, 400);
    auto [policy, diag] = solve(env, grid, {1e-10, 5000});
    REQUIRE(diag.converged);
    for (std::size_t j = 0; j < 2; ++j) {
        double numeric = policy.value_at(grid->size() - 1, j) / grid->w_max();
        CHECK(std::fabs(numeric - *rep.rows[j].mpc) < 5e-3);
    }
}

TEST_CASE("asymptotic saving rate") {
    CHECK(asymptotic_saving_rate(0.0, 1.03) == doctest::Approx(1.0));
    CHECK(asymptotic_saving_rate(0.5, 1.05) == doctest::Approx(-19.0));
    CHECK(std::isinf(asymptotic_saving_rate(0.2, 0.98)));
    CHECK(asymptotic_saving_rate(0.2, 0.98) < 0.0);
    CHECK(std::isinf(asymptotic_saving_rate(0.0, 1.0))); // indeterminate corner reported as -inf
    CHECK(std::isinf(asymptotic_saving_rate(1.0, 1.05)));
    CHECK_THROWS_AS(asymptotic_saving_rate(1.5, 1.0), NumericError);

    // direct substitution check on a few interior values
    Lcg rng(3);
    for (int k = 0; k < 10; ++k) {
        double c = rng.uniform(0.05, 0.95);
        double R = rng.uniform(1.01, 1.2);
        double expect = 1.0 - c / ((R - 1.0) * (1.0 - c));
        CHECK(asymptotic_saving_rate(c, R) == doctest::Approx(expect).epsilon(1e-12));
    }
}
