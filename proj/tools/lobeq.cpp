// CLI front end: solve / validate / sweep over JSON run configs with flag
// overrides.  Exit codes: 0 ok, 1 config or I/O error, 2 non-convergence,
// 3 infeasible under --strict.
#include <cmath>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lobeq/pipeline.hpp"

namespace {

struct Opts {
    std::string config_path, family, out_dir, variant;
    std::vector<std::string> params;  // key=value pairs
    int N = -1, max_iter = -1, hermite = -1;
    double sigma = lobeq::kNan, tol = lobeq::kNan, damping = lobeq::kNan;
    double alpha = lobeq::kNan, shift = lobeq::kNan, scale = lobeq::kNan;
    double tail_max = lobeq::kNan, core_halfwidth = lobeq::kNan;
    bool strict = false;
};

void add_common(CLI::App* cmd, Opts& o) {
    cmd->add_option("--config", o.config_path, "JSON run config; flags override its fields");
    cmd->add_option("--family", o.family, "signal family name");
    cmd->add_option("--param", o.params, "family parameter as key=value (repeatable)");
    cmd->add_option("--alpha", o.alpha, "shorthand for --param alpha=...");
    cmd->add_option("--shift", o.shift, "shift the signal by a constant");
    cmd->add_option("--scale", o.scale, "rescale the signal by a factor");
    cmd->add_option("--N", o.N, "number of informed traders");
    cmd->add_option("--sigma", o.sigma, "noise-trade volume");
    cmd->add_option("--tol", o.tol, "fixed-point tolerance");
    cmd->add_option("--max-iter", o.max_iter, "iteration cap");
    cmd->add_option("--damping", o.damping, "damping weight on the previous iterate");
    cmd->add_option("--tail-max-sigmas", o.tail_max, "grid extent in noise units");
    cmd->add_option("--core-halfwidth-sigmas", o.core_halfwidth, "uniform core half-width");
    cmd->add_option("--hermite-nodes", o.hermite, "Gauss-Hermite node count");
    cmd->add_option("--variant", o.variant, "dealer | same_price | both");
    cmd->add_option("--out", o.out_dir, "output directory");
    cmd->add_flag("--strict", o.strict, "promote warnings to failures");
}

lobeq::RunConfig build_config(const Opts& o) {
    lobeq::RunConfig cfg;
    if (!o.config_path.empty())
        lobeq::apply_json(cfg, lobeq::read_json_file(o.config_path));
    if (!o.family.empty()) cfg.distribution.family = o.family;
    for (const std::string& kv : o.params) {
        auto eq = kv.find('=');
        if (eq == std::string::npos || eq == 0)
            throw lobeq::ConfigError("--param expects key=value, got: " + kv);
        try {
            cfg.distribution.params[kv.substr(0, eq)] = std::stod(kv.substr(eq + 1));
        } catch (const std::exception&) {
            throw lobeq::ConfigError("bad numeric value in --param " + kv);
        }
    }
    if (std::isfinite(o.alpha)) cfg.distribution.params["alpha"] = o.alpha;
    if (std::isfinite(o.scale)) cfg.distribution.params["scale"] = o.scale;
    if (std::isfinite(o.shift)) cfg.distribution.shift = o.shift;
    if (o.N >= 0) cfg.market.n_insiders = o.N;
    if (std::isfinite(o.sigma)) cfg.market.sigma = o.sigma;
    if (std::isfinite(o.tol)) cfg.solver.tol = o.tol;
    if (o.max_iter >= 0) cfg.solver.max_iter = o.max_iter;
    if (std::isfinite(o.damping)) cfg.solver.damping = o.damping;
    if (std::isfinite(o.tail_max)) cfg.grid.tail_max_sigmas = o.tail_max;
    if (std::isfinite(o.core_halfwidth)) cfg.grid.core_halfwidth_sigmas = o.core_halfwidth;
    if (o.hermite > 0) cfg.grid.hermite_nodes = o.hermite;
    if (!o.variant.empty()) cfg.variant = lobeq::parse_variant(o.variant);
    if (!o.out_dir.empty()) cfg.outputs.dir = o.out_dir;
    lobeq::validate_config(cfg);
    return cfg;
}

std::vector<std::string> split_csv(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ','))
        if (!tok.empty()) out.push_back(tok);
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"static limit-order-book equilibrium solver"};
    app.require_subcommand(1);

    Opts so, vo, wo;
    CLI::App* solve_cmd = app.add_subcommand("solve", "solve one configuration");
    add_common(solve_cmd, so);
    CLI::App* validate_cmd =
        app.add_subcommand("validate", "solve and check every model invariant");
    add_common(validate_cmd, vo);
    CLI::App* sweep_cmd = app.add_subcommand("sweep", "repeat a run along one axis");
    add_common(sweep_cmd, wo);
    std::string axis = "N", values;
    double ref_v = lobeq::kNan;
    sweep_cmd->add_option("--axis", axis, "N | sigma | scale_t");
    sweep_cmd->add_option("--values", values, "comma-separated axis values")->required();
    sweep_cmd->add_option("--ref-v", ref_v, "signal value for the profit column");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (solve_cmd->parsed())
            return lobeq::run_solve(build_config(so), so.strict, std::cerr).exit_code;
        if (validate_cmd->parsed())
            return lobeq::run_validate(build_config(vo), vo.strict, std::cerr);
        return lobeq::run_sweep(build_config(wo), axis, split_csv(values), ref_v, wo.strict,
                                std::cerr);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
