#pragma once
#include <fstream>
#include <map>
#include <set>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "lobeq/equilibrium.hpp"
#include "lobeq/grid.hpp"
#include "lobeq/signals.hpp"

namespace lobeq {

using njson = nlohmann::json;

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DistributionSpec {
    std::string family = "trinomial";
    std::map<std::string, double> params;
    double shift = 0.0;
};

enum class Variant { dealer, same_price, both };

inline std::string variant_name(Variant v) {
    switch (v) {
        case Variant::dealer: return "dealer";
        case Variant::same_price: return "same_price";
        default: return "both";
    }
}

inline Variant parse_variant(const std::string& s) {
    if (s == "dealer") return Variant::dealer;
    if (s == "same_price") return Variant::same_price;
    if (s == "both") return Variant::both;
    throw ConfigError("unknown variant: " + s);
}

struct OutputSpec {
    std::string dir = "out";
    bool csv = true;
    bool json = true;
};

struct RunConfig {
    DistributionSpec distribution;
    MarketParams market;
    GridParams grid;
    SolveControls solver;
    OutputSpec outputs;
    Variant variant = Variant::dealer;

    DistPtr make_dist() const {
        return make_distribution(distribution.family, distribution.params,
                                 distribution.shift);
    }
};

namespace detail {

inline void reject_unknown_keys(const njson& j, const std::set<std::string>& allowed,
                                const std::string& where) {
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!allowed.count(it.key()))
            throw ConfigError("unknown key \"" + it.key() + "\" in " + where);
}

inline double num_field(const njson& j, const char* key, double dflt) {
    if (!j.contains(key)) return dflt;
    if (!j[key].is_number()) throw ConfigError(std::string(key) + " must be a number");
    return j[key].get<double>();
}

}  // namespace detail

// Merge a JSON document onto cfg.  Absent sections keep their current values, so
// file + flag overrides compose; unknown keys are errors rather than silent noise.
inline void apply_json(RunConfig& cfg, const njson& j) {
    if (!j.is_object()) throw ConfigError("config root must be a JSON object");
    detail::reject_unknown_keys(
        j, {"distribution", "market", "grid", "solver", "outputs", "variant"}, "config");

    if (j.contains("distribution")) {
        const njson& d = j["distribution"];
        detail::reject_unknown_keys(d, {"family", "params", "shift"}, "distribution");
        if (d.contains("family")) cfg.distribution.family = d["family"].get<std::string>();
        if (d.contains("params")) {
            if (!d["params"].is_object()) throw ConfigError("distribution.params must be an object");
            for (auto it = d["params"].begin(); it != d["params"].end(); ++it) {
                if (!it.value().is_number())
                    throw ConfigError("distribution.params." + it.key() + " must be a number");
                cfg.distribution.params[it.key()] = it.value().get<double>();
            }
        }
        cfg.distribution.shift = detail::num_field(d, "shift", cfg.distribution.shift);
    }
    if (j.contains("market")) {
        const njson& m = j["market"];
        detail::reject_unknown_keys(m, {"N", "sigma"}, "market");
        if (m.contains("N")) {
            if (!m["N"].is_number_integer()) throw ConfigError("market.N must be an integer");
            cfg.market.n_insiders = m["N"].get<int>();
        }
        cfg.market.sigma = detail::num_field(m, "sigma", cfg.market.sigma);
    }
    if (j.contains("grid")) {
        const njson& g = j["grid"];
        detail::reject_unknown_keys(g,
                                    {"core_halfwidth_sigmas", "core_step_sigmas", "tail_ratio",
                                     "tail_max_sigmas", "hermite_nodes"},
                                    "grid");
        cfg.grid.core_halfwidth_sigmas =
            detail::num_field(g, "core_halfwidth_sigmas", cfg.grid.core_halfwidth_sigmas);
        cfg.grid.core_step_sigmas =
            detail::num_field(g, "core_step_sigmas", cfg.grid.core_step_sigmas);
        cfg.grid.tail_ratio = detail::num_field(g, "tail_ratio", cfg.grid.tail_ratio);
        cfg.grid.tail_max_sigmas =
            detail::num_field(g, "tail_max_sigmas", cfg.grid.tail_max_sigmas);
        cfg.grid.hermite_nodes =
            int(detail::num_field(g, "hermite_nodes", cfg.grid.hermite_nodes));
    }
    if (j.contains("solver")) {
        const njson& s = j["solver"];
        detail::reject_unknown_keys(s, {"tol", "max_iter", "damping"}, "solver");
        cfg.solver.tol = detail::num_field(s, "tol", cfg.solver.tol);
        cfg.solver.max_iter = int(detail::num_field(s, "max_iter", cfg.solver.max_iter));
        cfg.solver.damping = detail::num_field(s, "damping", cfg.solver.damping);
    }
    if (j.contains("outputs")) {
        const njson& o = j["outputs"];
        detail::reject_unknown_keys(o, {"dir", "formats"}, "outputs");
        if (o.contains("dir")) cfg.outputs.dir = o["dir"].get<std::string>();
        if (o.contains("formats")) {
            if (!o["formats"].is_array()) throw ConfigError("outputs.formats must be an array");
            cfg.outputs.csv = cfg.outputs.json = false;
            for (const auto& f : o["formats"]) {
                std::string s = f.get<std::string>();
                if (s == "csv")
                    cfg.outputs.csv = true;
                else if (s == "json")
                    cfg.outputs.json = true;
                else
                    throw ConfigError("unknown output format: " + s);
            }
        }
    }
    if (j.contains("variant")) cfg.variant = parse_variant(j["variant"].get<std::string>());
}

inline void validate_config(const RunConfig& cfg) {
    if (cfg.market.n_insiders < 1) throw ConfigError("market.N must be >= 1");
    if (!(cfg.market.sigma > 0)) throw ConfigError("market.sigma must be positive");
    if (!(cfg.solver.tol > 0)) throw ConfigError("solver.tol must be positive");
    if (cfg.solver.max_iter < 1) throw ConfigError("solver.max_iter must be >= 1");
    if (cfg.solver.damping < 0 || cfg.solver.damping >= 1)
        throw ConfigError("solver.damping must lie in [0, 1)");
    if (!(cfg.grid.core_step_sigmas > 0) || !(cfg.grid.core_halfwidth_sigmas > 0) ||
        cfg.grid.tail_ratio <= 1.0 ||
        cfg.grid.tail_max_sigmas < cfg.grid.core_halfwidth_sigmas)
        throw ConfigError("grid parameters out of range");
    if (cfg.grid.hermite_nodes < 4) throw ConfigError("grid.hermite_nodes must be >= 4");
    try {
        cfg.make_dist();
    } catch (const std::exception& e) {
        throw ConfigError(e.what());
    }
}

inline RunConfig parse_config(const njson& j) {
    RunConfig cfg;
    apply_json(cfg, j);
    validate_config(cfg);
    return cfg;
}

inline njson config_to_json(const RunConfig& cfg) {
    njson p = njson::object();
    for (const auto& [k, v] : cfg.distribution.params) p[k] = v;
    njson formats = njson::array();
    if (cfg.outputs.csv) formats.push_back("csv");
    if (cfg.outputs.json) formats.push_back("json");
    return njson{
        {"distribution",
         {{"family", cfg.distribution.family}, {"params", p}, {"shift", cfg.distribution.shift}}},
        {"market", {{"N", cfg.market.n_insiders}, {"sigma", cfg.market.sigma}}},
        {"grid",
         {{"core_halfwidth_sigmas", cfg.grid.core_halfwidth_sigmas},
          {"core_step_sigmas", cfg.grid.core_step_sigmas},
          {"tail_ratio", cfg.grid.tail_ratio},
          {"tail_max_sigmas", cfg.grid.tail_max_sigmas},
          {"hermite_nodes", cfg.grid.hermite_nodes}}},
        {"solver",
         {{"tol", cfg.solver.tol},
          {"max_iter", cfg.solver.max_iter},
          {"damping", cfg.solver.damping}}},
        {"outputs", {{"dir", cfg.outputs.dir}, {"formats", formats}}},
        {"variant", variant_name(cfg.variant)}};
}

inline njson read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    njson j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw ConfigError("bad JSON in " + path + ": " + e.what());
    }
    return j;
}

inline RunConfig load_config(const std::string& path) {
    return parse_config(read_json_file(path));
}

}  // namespace lobeq
