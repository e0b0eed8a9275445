// Command-line front end for the savings shared library. Talks to the core
// exclusively through the C API in savings.h.
//
// Exit codes: 0 success, 2 config error, 3 assumption failure,
// 4 solver non-convergence, 5 validation FAIL.

#include <cstdint>
#include <cstdio>
#include <memory>
#include <string>

#include <CLI11.hpp>

#include "savings.h"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitAssumption = 3;
constexpr int kExitNoConverge = 4;
constexpr int kExitValidation = 5;

struct Options {
    std::string config_path;
    std::string out_dir = "./out";
    std::uint64_t seed = 0;
    bool seed_set = false;
    bool quiet = false;
};

struct RunCloser {
    void operator()(sv_run* r) const { sv_run_close(r); }
};
struct PolicyCloser {
    void operator()(sv_policy* p) const { sv_policy_free(p); }
};
struct AsymCloser {
    void operator()(sv_asym* a) const { sv_asym_free(a); }
};
using RunPtr = std::unique_ptr<sv_run, RunCloser>;
using PolicyPtr = std::unique_ptr<sv_policy, PolicyCloser>;
using AsymPtr = std::unique_ptr<sv_asym, AsymCloser>;

int report_error(const Options& opts, sv_status status) {
    std::fprintf(stderr, "error in %s: %s\n", opts.config_path.c_str(), sv_last_error());
    switch (status) {
        case SV_ERR_CONFIG:
        case SV_ERR_NUMERIC: return kExitConfig; // both are induced by config values
        default: return 1;
    }
}

RunPtr open_run(const Options& opts, sv_status& status) {
    sv_run* raw = nullptr;
    status = sv_run_open_file(opts.config_path.c_str(), &raw);
    RunPtr run(raw);
    if (status == SV_OK && opts.seed_set) sv_run_override_seed(run.get(), opts.seed);
    return run;
}

void say(const Options& opts, const char* text) {
    if (!opts.quiet) std::fputs(text, stdout);
}

int cmd_check(const Options& opts) {
    sv_status status;
    RunPtr run = open_run(opts, status);
    if (status != SV_OK) return report_error(opts, status);

    char* text = nullptr;
    status = sv_check_report(run.get(), &text);
    if (status != SV_OK) return report_error(opts, status);
    say(opts, text);
    sv_string_free(text);

    int hold = 0;
    double r_k1 = 0.0;
    status = sv_check(run.get(), &hold, &r_k1);
    if (status != SV_OK) return report_error(opts, status);
    return hold ? 0 : kExitAssumption;
}

int solve_run(const Options& opts, RunPtr& run, PolicyPtr& policy) {
    sv_status status;
    run = open_run(opts, status);
    if (status != SV_OK) return report_error(opts, status);

    int hold = 1;
    double r_k1 = 0.0;
    if (sv_check(run.get(), &hold, &r_k1) == SV_OK && !hold)
        std::fprintf(stderr, "warning: r(K(1)) = %.6f >= 1; time iteration may not converge\n",
                     r_k1);

    sv_policy* raw = nullptr;
    status = sv_solve(run.get(), &raw);
    policy.reset(raw);
    if (status != SV_OK) return report_error(opts, status);
    if (!opts.quiet)
        std::printf("solve: %s after %d sweep(s)\n",
                    sv_policy_converged(policy.get()) ? "converged" : "NOT converged",
                    sv_policy_iterations(policy.get()));
    return 0;
}

int cmd_solve(const Options& opts) {
    RunPtr run;
    PolicyPtr policy;
    int rc = solve_run(opts, run, policy);
    if (rc != 0) return rc;
    sv_status status = sv_policy_write(policy.get(), opts.out_dir.c_str());
    if (status != SV_OK) return report_error(opts, status);
    return sv_policy_converged(policy.get()) ? 0 : kExitNoConverge;
}

int cmd_asymptotics(const Options& opts) {
    sv_status status;
    RunPtr run = open_run(opts, status);
    if (status != SV_OK) return report_error(opts, status);

    sv_asym* raw = nullptr;
    status = sv_asymptotics(run.get(), &raw);
    AsymPtr asym(raw);
    if (status != SV_OK) return report_error(opts, status);

    char* text = nullptr;
    if (sv_asym_report(asym.get(), &text) == SV_OK) {
        say(opts, text);
        sv_string_free(text);
    }
    status = sv_asym_write(asym.get(), opts.out_dir.c_str());
    if (status != SV_OK) return report_error(opts, status);
    return 0;
}

int cmd_simulate(const Options& opts) {
    RunPtr run;
    PolicyPtr policy;
    int rc = solve_run(opts, run, policy);
    if (rc != 0) return rc;
    if (!sv_policy_converged(policy.get())) return kExitNoConverge;

    sv_status status = sv_policy_write(policy.get(), opts.out_dir.c_str());
    if (status != SV_OK) return report_error(opts, status);
    status = sv_simulate(run.get(), policy.get(), opts.out_dir.c_str());
    if (status != SV_OK) return report_error(opts, status);
    return 0;
}

int cmd_validate(const Options& opts) {
    RunPtr run;
    PolicyPtr policy;
    int rc = solve_run(opts, run, policy);
    if (rc != 0) return rc;
    if (!sv_policy_converged(policy.get())) return kExitNoConverge;

    sv_asym* raw = nullptr;
    sv_status status = sv_asymptotics(run.get(), &raw);
    AsymPtr asym(raw);
    if (status != SV_OK) return report_error(opts, status);

    int all_pass = 0;
    char* report = nullptr;
    status = sv_validate(run.get(), policy.get(), asym.get(), &all_pass, &report);
    if (status != SV_OK) return report_error(opts, status);
    say(opts, report);
    std::string out(report);
    sv_string_free(report);

    // persist the comparison table next to the other outputs
    std::string path = opts.out_dir + "/validation.txt";
    if (FILE* f = std::fopen(path.c_str(), "wb")) {
        std::fwrite(out.data(), 1, out.size(), f);
        std::fclose(f);
    }
    return all_pass ? 0 : kExitValidation;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"optimal savings under risk-preference dynamics"};
    app.set_version_flag("--version", sv_version());
    app.require_subcommand(1);

    Options opts;
    app.add_option("--config", opts.config_path, "configuration file (JSON)")->required();
    app.add_option("--out", opts.out_dir, "output directory");
    auto* seed_opt = app.add_option("--seed", opts.seed, "override the simulation seed");
    app.add_flag("--quiet", opts.quiet, "suppress stdout reports");

    auto* check = app.add_subcommand("check", "validate config and spectral assumptions");
    auto* solve = app.add_subcommand("solve", "solve for the optimal consumption policy");
    auto* asym = app.add_subcommand("asymptotics", "classify states and compute asymptotic MPCs");
    auto* simulate = app.add_subcommand("simulate", "simulate wealth paths under the solved policy");
    auto* validate = app.add_subcommand("validate", "cross-check numeric policy against analytics");

    // shared flags may appear after the subcommand name
    for (auto* sub : {check, solve, asym, simulate, validate}) sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : kExitConfig;
    }
    opts.seed_set = seed_opt->count() > 0;

    if (check->parsed()) return cmd_check(opts);
    if (solve->parsed()) return cmd_solve(opts);
    if (asym->parsed()) return cmd_asymptotics(opts);
    if (simulate->parsed()) return cmd_simulate(opts);
    if (validate->parsed()) return cmd_validate(opts);
    return kExitConfig;
}
