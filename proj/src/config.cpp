#include "savings/config.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include <json.hpp>

namespace savings {

namespace {

using nlohmann::json;

json parse_json(const std::string& text) {
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded()) throw ConfigError("configuration is not valid JSON");
    return j;
}

std::string string_at(const json& j, const std::string& key) {
    if (!j.contains(key) || !j[key].is_string())
        throw ConfigError("field '" + key + "' must be a string");
    return j[key].get<std::string>();
}

double number_at(const json& j, const std::string& key) {
    if (!j.contains(key) || !j[key].is_number())
        throw ConfigError("missing or non-numeric field '" + key + "'");
    return j[key].get<double>();
}

Matrix matrix_at(const json& j, const std::string& key, std::size_t n) {
    if (!j.contains(key) || !j[key].is_array())
        throw ConfigError("missing matrix '" + key + "'");
    const json& rows = j[key];
    if (rows.size() != n) throw ConfigError(key + " must have " + std::to_string(n) + " rows");
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        const json& row = rows[i];
        if (!row.is_array() || row.size() != n)
            throw ConfigError("row " + std::to_string(i + 1) + " of " + key + " must have " +
                              std::to_string(n) + " entries");
        for (std::size_t k = 0; k < n; ++k) {
            if (!row[k].is_number())
                throw ConfigError("row " + std::to_string(i + 1) + " of " + key +
                                  " has a non-numeric entry");
            m(i, k) = row[k].get<double>();
        }
    }
    return m;
}

std::vector<std::string> labels_at(const json& j, const std::string& key) {
    if (!j.contains(key) || !j[key].is_array() || j[key].empty())
        throw ConfigError("missing or empty '" + key + "'");
    std::vector<std::string> out;
    for (const json& item : j[key]) {
        if (!item.is_string()) throw ConfigError(key + " entries must be strings");
        std::string s = item.get<std::string>();
        if (s.empty() || s.find_first_of(".,()") != std::string::npos)
            throw ConfigError("state label '" + s + "' is empty or contains a reserved character");
        out.push_back(std::move(s));
    }
    return out;
}

Atom atom_from(const json& j, const std::string& where) {
    if (!j.is_object()) throw ConfigError(where + " must be an object");
    Atom a;
    a.prob = j.contains("prob") ? number_at(j, "prob") : 1.0;
    a.beta = number_at(j, "beta");
    a.rate_of_return = number_at(j, "R");
    a.income = number_at(j, "Y");
    return a;
}

ExogenousEnvironment environment_from(const json& envj) {
    auto bar = labels_at(envj, "bar_states");
    auto tilde = labels_at(envj, "tilde_states");
    const std::size_t N = bar.size(), M = tilde.size(), n = N * M;

    Matrix barP = matrix_at(envj, "bar_P", N);
    Matrix tildeP = matrix_at(envj, "tilde_P", M);

    if (!envj.contains("gamma") || !envj["gamma"].is_array() || envj["gamma"].size() != N)
        throw ConfigError("gamma must list one value per bar state");
    std::vector<double> gamma;
    for (const json& g : envj["gamma"]) {
        if (!g.is_number()) throw ConfigError("gamma entries must be numeric");
        gamma.push_back(g.get<double>());
    }

    if (!envj.contains("innovations") || !envj["innovations"].is_object())
        throw ConfigError("missing 'innovations' block");
    const json& inn = envj["innovations"];

    auto label_of = [&](std::size_t s) { return bar[s / M] + "." + tilde[s % M]; };

    std::vector<std::vector<Atom>> cells(n * n);
    if (inn.contains("constant")) {
        Atom a = atom_from(inn["constant"], "innovations.constant");
        a.prob = 1.0;
        for (auto& cell : cells) cell = {a};
    } else if (inn.contains("atoms")) {
        if (!inn["atoms"].is_array() || inn["atoms"].empty())
            throw ConfigError("innovations.atoms must be a nonempty list");
        std::vector<Atom> atoms;
        for (std::size_t k = 0; k < inn["atoms"].size(); ++k)
            atoms.push_back(atom_from(inn["atoms"][k], "atom " + std::to_string(k + 1)));
        for (auto& cell : cells) cell = atoms;
    } else if (inn.contains("pairs")) {
        const json& pairs = inn["pairs"];
        if (!pairs.is_object()) throw ConfigError("innovations.pairs must be an object");
        std::unordered_map<std::string, std::size_t> index;
        for (std::size_t s = 0; s < n; ++s) index[label_of(s)] = s;
        std::size_t filled = 0;
        for (auto it = pairs.begin(); it != pairs.end(); ++it) {
            const std::string& key = it.key();
            if (key.size() < 4 || key.front() != '(' || key.back() != ')')
                throw ConfigError("pair key '" + key + "' must look like (from,to)");
            std::string body = key.substr(1, key.size() - 2);
            auto comma = body.find(',');
            if (comma == std::string::npos)
                throw ConfigError("pair key '" + key + "' must look like (from,to)");
            auto from = index.find(body.substr(0, comma));
            auto to = index.find(body.substr(comma + 1));
            if (from == index.end() || to == index.end())
                throw ConfigError("pair key '" + key + "' names an unknown state");
            if (!it.value().is_array() || it.value().empty())
                throw ConfigError("pair " + key + " must list at least one atom");
            std::vector<Atom> atoms;
            for (std::size_t k = 0; k < it.value().size(); ++k)
                atoms.push_back(atom_from(it.value()[k], "atom " + std::to_string(k + 1) +
                                                             " of pair " + key));
            auto& cell = cells[from->second * n + to->second];
            if (!cell.empty()) throw ConfigError("pair " + key + " specified twice");
            cell = std::move(atoms);
            ++filled;
        }
        if (filled != n * n)
            throw ConfigError("innovations.pairs must cover all " + std::to_string(n * n) +
                              " ordered state pairs (" + std::to_string(filled) + " given)");
    } else {
        throw ConfigError("innovations must contain one of: constant, atoms, pairs");
    }

    return ExogenousEnvironment(std::move(bar), std::move(tilde), std::move(barP),
                                std::move(tildeP), std::move(gamma),
                                InnovationTable(n, std::move(cells)));
}

std::string fnv1a_hex(const std::string& text) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

} // namespace

std::shared_ptr<const WealthGrid> RunConfig::make_grid() const {
    double lo = grid.w_min.value_or(1e-2 * env->min_income());
    double hi = grid.w_max.value_or(1e4 * env->max_income());
    return std::make_shared<WealthGrid>(grid.spacing, lo, hi, grid.size);
}

ExogenousEnvironment build_environment(const std::string& json_text) {
    try {
        json j = parse_json(json_text);
        const json& envj = j.contains("environment") ? j["environment"] : j;
        return environment_from(envj);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("invalid configuration: ") + e.what());
    }
}

RunConfig load_run_config_text(const std::string& json_text) try {
    json j = parse_json(json_text);
    if (!j.is_object() || !j.contains("environment"))
        throw ConfigError("configuration must contain an 'environment' block");
    for (const char* block : {"grid", "solver", "simulate"})
        if (j.contains(block) && !j[block].is_object())
            throw ConfigError(std::string("'") + block + "' must be an object");

    RunConfig cfg;
    cfg.env = std::make_shared<const ExogenousEnvironment>(environment_from(j["environment"]));

    if (j.contains("grid")) {
        const json& g = j["grid"];
        if (g.contains("spacing")) {
            std::string s = string_at(g, "spacing");
            if (s == "linear")
                cfg.grid.spacing = GridSpacing::Linear;
            else if (s == "geometric")
                cfg.grid.spacing = GridSpacing::Geometric;
            else
                throw ConfigError("grid.spacing must be 'linear' or 'geometric'");
        }
        if (g.contains("w_min")) cfg.grid.w_min = number_at(g, "w_min");
        if (g.contains("w_max")) cfg.grid.w_max = number_at(g, "w_max");
        if (g.contains("size")) {
            double sz = number_at(g, "size");
            if (sz < 16 || sz != double(std::size_t(sz))) throw ConfigError("grid.size must be an integer >= 16");
            cfg.grid.size = std::size_t(sz);
        }
    }
    if (j.contains("solver")) {
        const json& s = j["solver"];
        if (s.contains("tol")) cfg.solver.tol = number_at(s, "tol");
        if (s.contains("max_iter")) cfg.solver.max_iter = int(number_at(s, "max_iter"));
        if (!(cfg.solver.tol > 0.0)) throw ConfigError("solver.tol must be positive");
        if (cfg.solver.max_iter < 1) throw ConfigError("solver.max_iter must be at least 1");
    }
    cfg.simulate.initial_wealth = std::max(1.0, cfg.env->min_income());
    if (j.contains("simulate")) {
        const json& s = j["simulate"];
        if (s.contains("seed")) {
            if (!s["seed"].is_number_unsigned())
                throw ConfigError("simulate.seed must be a nonnegative integer");
            cfg.simulate.seed = s["seed"].get<std::uint64_t>();
        }
        if (s.contains("n_paths")) cfg.simulate.n_paths = int(number_at(s, "n_paths"));
        if (s.contains("horizon")) cfg.simulate.horizon = int(number_at(s, "horizon"));
        if (s.contains("w0")) cfg.simulate.initial_wealth = number_at(s, "w0");
        if (s.contains("z0")) {
            std::string z0 = string_at(s, "z0");
            bool found = false;
            for (std::size_t k = 0; k < cfg.env->n_states(); ++k)
                if (cfg.env->state_label(k) == z0) {
                    cfg.simulate.initial_state = k;
                    found = true;
                    break;
                }
            if (!found) throw ConfigError("simulate.z0 names an unknown state '" + z0 + "'");
        }
        if (cfg.simulate.n_paths < 1) throw ConfigError("simulate.n_paths must be at least 1");
        if (cfg.simulate.horizon < 1) throw ConfigError("simulate.horizon must be at least 1");
        if (!(cfg.simulate.initial_wealth > 0.0)) throw ConfigError("simulate.w0 must be positive");
    }
    if (j.contains("output")) cfg.output_dir = string_at(j, "output");

    cfg.config_hash = fnv1a_hex(j.dump());
    return cfg;
} catch (const json::exception& e) {
    throw ConfigError(std::string("invalid configuration: ") + e.what());
}

RunConfig load_run_config_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return load_run_config_text(ss.str());
}

} // namespace savings
