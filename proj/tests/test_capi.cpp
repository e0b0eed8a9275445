#include <doctest.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "savings.h"

namespace {

const char* kBenchmark = R"({
  "environment": {
    "bar_states": ["a"], "tilde_states": ["x"],
    "bar_P": [[1.0]], "tilde_P": [[1.0]],
    "gamma": [2.0],
    "innovations": {"constant": {"beta": 0.95, "R": 1.02, "Y": 1.0}}
  },
  "grid": {"spacing": "geometric", "w_min": 0.01, "w_max": 10000.0, "size": 400},
  "solver": {"tol": 1e-9, "max_iter": 2000},
  "simulate": {"seed": 42, "n_paths": 4, "horizon": 30, "w0": 10.0, "z0": "a.x"}
})";

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::filesystem::path fresh_dir(const char* name) {
    auto dir = std::filesystem::temp_directory_path() / "savings_capi_tests" / name;
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

} // namespace

TEST_CASE("run lifecycle and metadata") {
    sv_run* run = nullptr;
    REQUIRE(sv_run_open_text(kBenchmark, &run) == SV_OK);
    CHECK(sv_run_state_count(run) == 1);

    char* label = nullptr;
    REQUIRE(sv_run_state_label(run, 0, &label) == SV_OK);
    CHECK(std::strcmp(label, "a.x") == 0);
    sv_string_free(label);

    char* hash = nullptr;
    REQUIRE(sv_run_config_hash(run, &hash) == SV_OK);
    CHECK(std::strlen(hash) == 16);
    sv_string_free(hash);

    CHECK(sv_run_state_label(run, 5, &label) == SV_ERR_INVALID);
    sv_run_close(run);
}

TEST_CASE("config errors surface with a message") {
    sv_run* run = nullptr;
    CHECK(sv_run_open_text("{not json", &run) == SV_ERR_CONFIG);
    CHECK(std::strlen(sv_last_error()) > 0);

    const char* bad = R"({"environment": {
      "bar_states": ["a"], "tilde_states": ["x"],
      "bar_P": [[0.9]], "tilde_P": [[1.0]],
      "gamma": [2.0],
      "innovations": {"constant": {"beta": 0.9, "R": 1.0, "Y": 1.0}}}})";
    CHECK(sv_run_open_text(bad, &run) == SV_ERR_CONFIG);
    CHECK(std::string(sv_last_error()).find("bar_P") != std::string::npos);

    CHECK(sv_run_open_file("/nonexistent/path.json", &run) == SV_ERR_CONFIG);
}

TEST_CASE("check, solve, asymptotics, simulate through the C surface") {
    sv_run* run = nullptr;
    REQUIRE(sv_run_open_text(kBenchmark, &run) == SV_OK);

    int hold = 0;
    double r_k1 = 0.0;
    REQUIRE(sv_check(run, &hold, &r_k1) == SV_OK);
    CHECK(hold == 1);
    CHECK(r_k1 == doctest::Approx(0.969).epsilon(1e-12));

    char* report = nullptr;
    REQUIRE(sv_check_report(run, &report) == SV_OK);
    CHECK(std::string(report).find("PASS") != std::string::npos);
    sv_string_free(report);

    sv_policy* policy = nullptr;
    REQUIRE(sv_solve(run, &policy) == SV_OK);
    CHECK(sv_policy_converged(policy) == 1);
    CHECK(sv_policy_iterations(policy) > 1);

    double c = 0.0;
    REQUIRE(sv_policy_value(policy, 0.5, 0, &c) == SV_OK);
    CHECK(c == doctest::Approx(0.5)); // constrained region consumes everything
    CHECK(sv_policy_value(policy, -1.0, 0, &c) == SV_ERR_INVALID);

    double wbar = 0.0;
    REQUIRE(sv_policy_threshold(policy, 0, &wbar) == SV_OK);
    CHECK(wbar == doctest::Approx(std::pow(0.95 * 1.02, -0.5)).epsilon(1e-9));

    sv_asym* asym = nullptr;
    REQUIRE(sv_asymptotics(run, &asym) == SV_OK);
    char* label = nullptr;
    REQUIRE(sv_asym_case(asym, 0, &label) == SV_OK);
    CHECK(std::strcmp(label, "AbsorbingContractive") == 0);
    sv_string_free(label);

    int determined = 0;
    double mpc = 0.0;
    REQUIRE(sv_asym_mpc(asym, 0, &determined, &mpc) == SV_OK);
    CHECK(determined == 1);
    CHECK(mpc == doctest::Approx(1.0 - std::sqrt(0.95 / 1.02)).epsilon(1e-10));

    auto dir = fresh_dir("outputs");
    REQUIRE(sv_policy_write(policy, dir.c_str()) == SV_OK);
    REQUIRE(sv_asym_write(asym, dir.c_str()) == SV_OK);
    REQUIRE(sv_simulate(run, policy, dir.c_str()) == SV_OK);
    for (const char* name :
         {"policy.csv", "diagnostics.txt", "rho_history.csv", "asymptotics.txt",
          "asymptotics.csv", "paths.csv"})
        CHECK(std::filesystem::exists(dir / name));

    // pinned file formats: version/hash header comment plus the column schema
    std::string policy_csv = slurp(dir / "policy.csv");
    CHECK(policy_csv.rfind("# savings ", 0) == 0);
    CHECK(policy_csv.find("# config_hash: ") != std::string::npos);
    CHECK(policy_csv.find("state_bar,state_tilde,wealth,consumption\n") != std::string::npos);
    std::string paths_csv = slurp(dir / "paths.csv");
    CHECK(paths_csv.find("path,t,state_bar,state_tilde,wealth,consumption,saving_rate,R_drawn,"
                         "Y_drawn\n") != std::string::npos);
    CHECK(paths_csv.find("# seed: 42") != std::string::npos);
    std::string rho_csv = slurp(dir / "rho_history.csv");
    CHECK(rho_csv.find("iteration,rho\n") != std::string::npos);
    std::string asym_csv = slurp(dir / "asymptotics.csv");
    CHECK(asym_csv.find("state_bar,state_tilde,case,mpc,x_star,R,saving_rate\n") !=
          std::string::npos);

    int all_pass = 0;
    char* validation = nullptr;
    REQUIRE(sv_validate(run, policy, asym, &all_pass, &validation) == SV_OK);
    CHECK(all_pass == 1);
    CHECK(std::string(validation).find("PASS") != std::string::npos);
    sv_string_free(validation);

    sv_asym_free(asym);
    sv_policy_free(policy);
    sv_run_close(run);
}

TEST_CASE("simulation output is byte-identical across runs and responds to seed") {
    sv_run* run = nullptr;
    REQUIRE(sv_run_open_text(kBenchmark, &run) == SV_OK);
    sv_policy* policy = nullptr;
    REQUIRE(sv_solve(run, &policy) == SV_OK);

    auto dir1 = fresh_dir("sim1");
    auto dir2 = fresh_dir("sim2");
    auto dir3 = fresh_dir("sim3");
    REQUIRE(sv_simulate(run, policy, dir1.c_str()) == SV_OK);
    REQUIRE(sv_simulate(run, policy, dir2.c_str()) == SV_OK);
    std::string a = slurp(dir1 / "paths.csv");
    std::string b = slurp(dir2 / "paths.csv");
    REQUIRE(!a.empty());
    CHECK(a == b);

    REQUIRE(sv_run_override_seed(run, 4711) == SV_OK);
    REQUIRE(sv_simulate(run, policy, dir3.c_str()) == SV_OK);
    CHECK(a != slurp(dir3 / "paths.csv"));

    sv_policy_free(policy);
    sv_run_close(run);
}
