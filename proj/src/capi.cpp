#include "savings.h"

#include <cstring>
#include <filesystem>
#include <memory>
#include <new>
#include <string>

#include "savings/asymptotics.hpp"
#include "savings/config.hpp"
#include "savings/io.hpp"
#include "savings/simulate.hpp"
#include "savings/solver.hpp"

using namespace savings;

struct sv_run {
    RunConfig cfg;
};

struct sv_policy {
    RunConfig cfg; // snapshot of the run that produced the solve
    std::shared_ptr<const ConsumptionPolicy> policy;
    SolveDiagnostics diag;
};

struct sv_asym {
    RunConfig cfg;
    AsymptoticReport report;
};

namespace {

thread_local std::string g_last_error;

sv_status fail(sv_status code, const std::string& message) {
    g_last_error = message;
    return code;
}

char* dup_string(const std::string& s) {
    char* out = new (std::nothrow) char[s.size() + 1];
    if (out) std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

template <typename Fn>
sv_status guarded(Fn&& fn) {
    try {
        return fn();
    } catch (const ConfigError& e) {
        return fail(SV_ERR_CONFIG, e.what());
    } catch (const NumericError& e) {
        return fail(SV_ERR_NUMERIC, e.what());
    } catch (const std::exception& e) {
        return fail(SV_ERR_IO, e.what());
    }
}

sv_status write_outputs(const RunConfig& cfg, const char* out_dir,
                        std::initializer_list<std::pair<const char*, std::string>> files) {
    std::filesystem::path dir(out_dir ? out_dir : cfg.output_dir.c_str());
    std::filesystem::create_directories(dir);
    for (const auto& [name, content] : files) write_text_file((dir / name).string(), content);
    return SV_OK;
}

} // namespace

extern "C" {

const char* sv_version(void) { return version(); }

const char* sv_last_error(void) { return g_last_error.c_str(); }

void sv_string_free(char* s) { delete[] s; }

sv_status sv_run_open_file(const char* config_path, sv_run** out) {
    if (!config_path || !out) return fail(SV_ERR_INVALID, "null argument");
    return guarded([&] {
        auto run = std::make_unique<sv_run>();
        run->cfg = load_run_config_file(config_path);
        *out = run.release();
        return SV_OK;
    });
}

sv_status sv_run_open_text(const char* config_json, sv_run** out) {
    if (!config_json || !out) return fail(SV_ERR_INVALID, "null argument");
    return guarded([&] {
        auto run = std::make_unique<sv_run>();
        run->cfg = load_run_config_text(config_json);
        *out = run.release();
        return SV_OK;
    });
}

void sv_run_close(sv_run* run) { delete run; }

int sv_run_state_count(const sv_run* run) {
    return run ? int(run->cfg.env->n_states()) : 0;
}

sv_status sv_run_state_label(const sv_run* run, int state, char** out) {
    if (!run || !out) return fail(SV_ERR_INVALID, "null argument");
    if (state < 0 || std::size_t(state) >= run->cfg.env->n_states())
        return fail(SV_ERR_INVALID, "state index out of range");
    *out = dup_string(run->cfg.env->state_label(std::size_t(state)));
    return SV_OK;
}

sv_status sv_run_config_hash(const sv_run* run, char** out) {
    if (!run || !out) return fail(SV_ERR_INVALID, "null argument");
    *out = dup_string(run->cfg.config_hash);
    return SV_OK;
}

sv_status sv_run_override_seed(sv_run* run, uint64_t seed) {
    if (!run) return fail(SV_ERR_INVALID, "null argument");
    run->cfg.simulate.seed = seed;
    return SV_OK;
}

sv_status sv_check(sv_run* run, int* assumptions_hold, double* r_k1) {
    if (!run) return fail(SV_ERR_INVALID, "null argument");
    return guarded([&] {
        SpectralReport rep = check_assumptions(*run->cfg.env);
        if (assumptions_hold) *assumptions_hold = rep.assumptions_hold ? 1 : 0;
        if (r_k1) *r_k1 = rep.r_K1;
        return SV_OK;
    });
}

sv_status sv_check_report(sv_run* run, char** text) {
    if (!run || !text) return fail(SV_ERR_INVALID, "null argument");
    return guarded([&] {
        SpectralReport rep = check_assumptions(*run->cfg.env);
        *text = dup_string(render_spectral_report(*run->cfg.env, rep));
        return SV_OK;
    });
}

sv_status sv_solve(sv_run* run, sv_policy** out) {
    if (!run || !out) return fail(SV_ERR_INVALID, "null argument");
    return guarded([&] {
        auto handle = std::make_unique<sv_policy>();
        handle->cfg = run->cfg;
        auto [policy, diag] = solve(*run->cfg.env, run->cfg.make_grid(), run->cfg.solver);
        handle->policy = std::make_shared<const ConsumptionPolicy>(std::move(policy));
        handle->diag = std::move(diag);
        *out = handle.release();
        return SV_OK;
    });
}

void sv_policy_free(sv_policy* policy) { delete policy; }

int sv_policy_converged(const sv_policy* policy) {
    return policy && policy->diag.converged ? 1 : 0;
}

int sv_policy_iterations(const sv_policy* policy) {
    return policy ? policy->diag.iterations : 0;
}

sv_status sv_policy_value(const sv_policy* policy, double wealth, int state, double* out) {
    if (!policy || !out) return fail(SV_ERR_INVALID, "null argument");
    if (!(wealth > 0.0)) return fail(SV_ERR_INVALID, "wealth must be positive");
    if (state < 0 || std::size_t(state) >= policy->policy->n_states())
        return fail(SV_ERR_INVALID, "state index out of range");
    *out = (*policy->policy)(wealth, std::size_t(state));
    return SV_OK;
}

sv_status sv_policy_threshold(const sv_policy* policy, int state, double* out) {
    if (!policy || !out) return fail(SV_ERR_INVALID, "null argument");
    if (state < 0 || std::size_t(state) >= policy->diag.threshold_wealth.size())
        return fail(SV_ERR_INVALID, "state index out of range");
    *out = policy->diag.threshold_wealth[std::size_t(state)];
    return SV_OK;
}

sv_status sv_policy_write(const sv_policy* policy, const char* out_dir) {
    if (!policy) return fail(SV_ERR_INVALID, "null argument");
    return guarded([&] {
        return write_outputs(policy->cfg, out_dir,
                             {{"policy.csv", render_policy_csv(policy->cfg, *policy->policy)},
                              {"diagnostics.txt", render_diagnostics(policy->cfg, policy->diag)},
                              {"rho_history.csv", render_rho_history_csv(policy->cfg, policy->diag)}});
    });
}

sv_status sv_asymptotics(sv_run* run, sv_asym** out) {
    if (!run || !out) return fail(SV_ERR_INVALID, "null argument");
    return guarded([&] {
        auto handle = std::make_unique<sv_asym>();
        handle->cfg = run->cfg;
        handle->report = asymptotic_mpc(*run->cfg.env);
        *out = handle.release();
        return SV_OK;
    });
}

void sv_asym_free(sv_asym* asym) { delete asym; }

sv_status sv_asym_case(const sv_asym* asym, int state, char** out) {
    if (!asym || !out) return fail(SV_ERR_INVALID, "null argument");
    if (state < 0 || std::size_t(state) >= asym->report.rows.size())
        return fail(SV_ERR_INVALID, "state index out of range");
    *out = dup_string(to_string(asym->report.rows[std::size_t(state)].classification.label));
    return SV_OK;
}

sv_status sv_asym_mpc(const sv_asym* asym, int state, int* determined, double* mpc) {
    if (!asym) return fail(SV_ERR_INVALID, "null argument");
    if (state < 0 || std::size_t(state) >= asym->report.rows.size())
        return fail(SV_ERR_INVALID, "state index out of range");
    const auto& row = asym->report.rows[std::size_t(state)];
    if (determined) *determined = row.mpc ? 1 : 0;
    if (mpc && row.mpc) *mpc = *row.mpc;
    return SV_OK;
}

sv_status sv_asym_write(const sv_asym* asym, const char* out_dir) {
    if (!asym) return fail(SV_ERR_INVALID, "null argument");
    return guarded([&] {
        return write_outputs(asym->cfg, out_dir,
                             {{"asymptotics.txt", render_asymptotics_table(asym->cfg, asym->report)},
                              {"asymptotics.csv", render_asymptotics_csv(asym->cfg, asym->report)}});
    });
}

sv_status sv_asym_report(const sv_asym* asym, char** text) {
    if (!asym || !text) return fail(SV_ERR_INVALID, "null argument");
    *text = dup_string(render_asymptotics_table(asym->cfg, asym->report));
    return SV_OK;
}

sv_status sv_simulate(sv_run* run, const sv_policy* policy, const char* out_dir) {
    if (!run || !policy) return fail(SV_ERR_INVALID, "null argument");
    return guarded([&] {
        SimulationRun sim = simulate_paths(*policy->policy, *run->cfg.env, run->cfg.simulate);
        RunConfig cfg = run->cfg; // seed may have been overridden on the run
        return write_outputs(cfg, out_dir,
                             {{"paths.csv", render_paths_csv(cfg, policy->policy->grid(), sim)}});
    });
}

sv_status sv_validate(sv_run* run, const sv_policy* policy, const sv_asym* asym, int* all_pass,
                      char** report) {
    if (!run || !policy || !asym) return fail(SV_ERR_INVALID, "null argument");
    return guarded([&] {
        ValidationOutcome outcome = validate_cross_check(run->cfg, *policy->policy, asym->report);
        if (all_pass) *all_pass = outcome.all_pass ? 1 : 0;
        if (report) *report = dup_string(outcome.report);
        return SV_OK;
    });
}

} // extern "C"
