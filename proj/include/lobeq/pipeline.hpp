#pragma once
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "lobeq/asymptotics.hpp"
#include "lobeq/book.hpp"
#include "lobeq/config.hpp"
#include "lobeq/sameprice.hpp"

namespace lobeq {

// 17 significant digits: enough to round-trip a double, so re-runs are
// byte-identical and downstream regressions can diff the files directly.
inline std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline const char* status_name(SolveStatus s) {
    switch (s) {
        case SolveStatus::converged: return "converged";
        case SolveStatus::max_iter: return "max_iter";
        default: return "diverged";
    }
}

inline const char* status_name(SamePriceStatus s) {
    switch (s) {
        case SamePriceStatus::converged: return "converged";
        case SamePriceStatus::max_iter: return "max_iter";
        case SamePriceStatus::nonmonotone: return "nonmonotone";
        default: return "diverged";
    }
}

namespace detail {

inline void ensure_dir(const std::string& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw ConfigError("cannot create output dir " + dir + ": " + ec.message());
}

inline std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write " + path);
    return out;
}

}  // namespace detail

inline njson solution_report(const EquilibriumSolution& sol, const OrderBook* bk,
                             const std::string& status, const std::string& variant) {
    njson j{{"variant", variant},
            {"family", sol.dist->family()},
            {"N", sol.market.n_insiders},
            {"sigma", sol.market.sigma},
            {"status", status},
            {"iterations", sol.iterations},
            {"grid",
             {{"nodes", sol.grid.nodes},
              {"core_step", sol.grid.core_step},
              {"sigma", sol.grid.sigma},
              {"zero_index", sol.grid.zero_index},
              {"hermite_nodes", sol.grid.hermite_nodes}}},
            {"F", sol.F},
            {"history", sol.history}};
    if (bk) {
        j["best_ask"] = bk->best_ask;
        j["best_bid"] = bk->best_bid;
        j["spread"] = bk->best_ask - bk->best_bid;
    }
    return j;
}

// One row per grid node with every book-derived quantity; the optional variant
// label becomes a trailing column so merged files stay distinguishable.
inline void write_curves_csv(const std::string& path, const EquilibriumSolution& sol,
                             const OrderBook& bk, const std::string& variant_label = "") {
    const Grid& g = sol.grid;
    std::size_t n = g.size();
    Curve hb(g.nodes, bk.h_buy, Extrapolation::clamp);
    Curve hs(g.nodes, bk.h_sell, Extrapolation::clamp);
    std::vector<double> exec = convolve(g, hb, hs, g.sigma);
    VolumeTails vt = volume_tail(sol);

    auto out = detail::open_out(path);
    out << "x,F,h,IS,exec_price,profit,informed_tail,total_tail";
    if (!variant_label.empty()) out << ",variant";
    out << "\n";
    for (std::size_t i = 0; i < n; ++i) {
        double x = g.nodes[i];
        double h = i < g.zero_index   ? bk.h_sell[i]
                   : i > g.zero_index ? bk.h_buy[i]
                                      : 0.5 * (bk.best_ask + bk.best_bid);
        double is = implementation_shortfall(sol, x);
        double profit = x * (sol.F[i] - is);
        out << fmt17(x) << ',' << fmt17(sol.F[i]) << ',' << fmt17(h) << ',' << fmt17(is)
            << ',' << fmt17(exec[i]) << ',' << fmt17(profit) << ',' << fmt17(vt.informed[i])
            << ',' << fmt17(vt.total[i]);
        if (!variant_label.empty()) out << ',' << variant_label;
        out << "\n";
    }
}

inline void write_convergence_csv(const std::string& path,
                                  const std::vector<double>& history) {
    auto out = detail::open_out(path);
    out << "iteration,sup_distance\n";
    for (std::size_t i = 0; i < history.size(); ++i)
        out << (i + 1) << ',' << fmt17(history[i]) << "\n";
}

// ------------------------------------------------------------------ solve

struct RunResult {
    int exit_code = 0;
    bool infeasible = false;
    std::optional<EquilibriumSolution> dealer;
    std::optional<OrderBook> dealer_book;
    std::optional<SamePriceSolution> same_price;
};

inline bool feasibility_ok(const SignalDistribution& dist, int N, std::ostream& err) {
    bool ok = true;
    for (Side s : {Side::upper, Side::lower}) {
        AsymptoticPrediction p = predict(dist, N, s);
        if (!p.feasible) {
            err << "warning: " << (s == Side::upper ? "upper" : "lower")
                << " tail infeasible for N=" << N << " (" << p.note << ")\n";
            ok = false;
        }
    }
    return ok;
}

// wrap a same-price candidate so the book writers can reuse the dealer plumbing
inline EquilibriumSolution as_equilibrium(const SamePriceSolution& sp) {
    EquilibriumSolution es;
    es.grid = sp.grid;
    es.F = sp.F;
    es.history = sp.history;
    es.iterations = sp.iterations;
    es.dist = sp.dist;
    es.market = sp.market;
    es.status = (sp.status == SamePriceStatus::converged ||
                 sp.status == SamePriceStatus::nonmonotone)
                    ? SolveStatus::converged
                    : (sp.status == SamePriceStatus::diverged ? SolveStatus::diverged
                                                              : SolveStatus::max_iter);
    return es;
}

inline RunResult run_solve(const RunConfig& cfg, bool strict, std::ostream& err,
                           bool write_artifacts = true) {
    RunResult rr;
    DistPtr dist = cfg.make_dist();
    rr.infeasible = !feasibility_ok(*dist, cfg.market.n_insiders, err);
    if (rr.infeasible && strict) {
        err << "strict mode: infeasible configuration rejected\n";
        rr.exit_code = 3;
        return rr;
    }
    if (write_artifacts) {
        detail::ensure_dir(cfg.outputs.dir);
        if (cfg.outputs.json) {
            auto out = detail::open_out(cfg.outputs.dir + "/run_config.json");
            out << config_to_json(cfg).dump(2) << "\n";
        }
    }
    auto emit = [&](const EquilibriumSolution& sol, const OrderBook* bk,
                    const std::string& status, const std::string& variant,
                    const std::string& suffix, const njson& extra) {
        if (!write_artifacts) return;
        const std::string& dir = cfg.outputs.dir;
        if (cfg.outputs.json) {
            njson j = solution_report(sol, bk, status, variant);
            for (auto it = extra.begin(); it != extra.end(); ++it) j[it.key()] = it.value();
            auto out = detail::open_out(dir + "/solution" + suffix + ".json");
            out << j.dump() << "\n";
        }
        if (cfg.outputs.csv) {
            write_convergence_csv(dir + "/convergence" + suffix + ".csv", sol.history);
            if (bk)
                write_curves_csv(dir + "/curves" + suffix + ".csv", sol, *bk,
                                 variant == "same_price" ? variant : "");
        }
    };

    if (cfg.variant != Variant::same_price) {
        EquilibriumSolution sol = solve(dist, cfg.market, cfg.grid, cfg.solver);
        std::optional<OrderBook> bk;
        if (sol.status == SolveStatus::converged) bk = build_book(sol);
        emit(sol, bk ? &*bk : nullptr, status_name(sol.status), "dealer", "",
             njson::object());
        if (sol.status != SolveStatus::converged) {
            err << "dealer solve: " << status_name(sol.status) << " after "
                << sol.iterations << " iterations\n";
            rr.exit_code = 2;
        }
        rr.dealer = std::move(sol);
        rr.dealer_book = std::move(bk);
    }
    if (cfg.variant != Variant::dealer) {
        SamePriceSolution sp = solve_sameprice(dist, cfg.market, cfg.grid, cfg.solver);
        EquilibriumSolution es = as_equilibrium(sp);
        std::optional<OrderBook> bk;
        if (es.status == SolveStatus::converged) bk = build_book(es);
        std::string suffix = cfg.variant == Variant::both ? "_same_price" : "";
        emit(es, bk ? &*bk : nullptr, status_name(sp.status), "same_price", suffix,
             njson{{"monotone_ok", sp.monotone_ok}});
        if (es.status != SolveStatus::converged) {
            err << "same-price solve: " << status_name(sp.status) << " after "
                << sp.iterations << " iterations\n";
            rr.exit_code = 2;
        } else if (!sp.monotone_ok) {
            err << "warning: same-price candidate is not monotone\n";
            if (strict) rr.exit_code = 2;
        }
        rr.same_price = std::move(sp);
    }
    return rr;
}

// ---------------------------------------------------------------- validate

namespace detail {

inline void add_check(njson& arr, bool& all_pass, const std::string& name, double measured,
                      double threshold, bool pass, const std::string& note = "") {
    njson c{{"name", name}, {"measured", measured}, {"threshold", threshold}, {"pass", pass}};
    if (!note.empty()) c["note"] = note;
    arr.push_back(c);
    all_pass = all_pass && pass;
}

inline const char* side_name(Side s) { return s == Side::upper ? "upper" : "lower"; }

inline const char* regime_name(PredictRegime r) {
    switch (r) {
        case PredictRegime::power_law: return "power_law";
        case PredictRegime::log_law: return "log_law";
        case PredictRegime::heuristic: return "heuristic";
        default: return "none";
    }
}

}  // namespace detail

// Every structural invariant of a converged run, with measured values; the
// asymptotic entries carry their own fit windows.
inline njson validation_report(const RunConfig& cfg, const EquilibriumSolution& sol,
                               bool run_envelopes, bool& all_pass) {
    all_pass = true;
    njson checks = njson::array();
    const Grid& g = sol.grid;
    const SignalDistribution& dist = *sol.dist;
    int N = sol.market.n_insiders;
    double sigma = sol.market.sigma;
    double tol = cfg.solver.tol;
    std::size_t n = g.size();
    double m = dist.support_lo(), M = dist.support_hi();
    double vscale = std::isfinite(M - m) ? M - m : dist.stdev();

    detail::add_check(checks, all_pass, "status_converged", sol.iterations, 0,
                      sol.status == SolveStatus::converged, status_name(sol.status));
    if (sol.status != SolveStatus::converged) {
        return njson{{"checks", checks}, {"all_pass", false}};
    }

    // fixed-point residual
    std::vector<double> TF = apply_T(dist, g, sol.F, sol.market);
    double res = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        res = std::max(res, std::abs(TF[i] - sol.F[i]) / std::max(1.0, std::abs(sol.F[i])));
    detail::add_check(checks, all_pass, "fixed_point_residual", res, 10 * tol,
                      res <= 10 * tol);

    // strict monotonicity
    double min_step = kInf;
    for (std::size_t i = 0; i + 1 < n; ++i) min_step = std::min(min_step, sol.F[i + 1] - sol.F[i]);
    detail::add_check(checks, all_pass, "impact_strictly_increasing", min_step, 0.0,
                      min_step > 0.0);

    // geometric decay of the iteration history
    if (sol.history.size() > 6) {
        double ratio = std::pow(sol.history.back() / sol.history[4],
                                1.0 / double(sol.history.size() - 5));
        detail::add_check(checks, all_pass, "geometric_decay", ratio, 1.0, ratio < 1.0);
    }

    OrderBook bk = build_book(sol);

    // book bounded and monotone per branch
    double viol = 0.0, bstep = kInf;
    for (std::size_t i = 0; i < n; ++i) {
        viol = std::max({viol, m - bk.h_buy[i], bk.h_buy[i] - M, m - bk.h_sell[i],
                         bk.h_sell[i] - M});
        if (i + 1 < n) {
            bstep = std::min(bstep, bk.h_buy[i + 1] - bk.h_buy[i]);
            bstep = std::min(bstep, bk.h_sell[i + 1] - bk.h_sell[i]);
        }
    }
    double slack = 1e-9 * std::max(1.0, vscale);
    detail::add_check(checks, all_pass, "book_within_support", viol, slack, viol <= slack);
    detail::add_check(checks, all_pass, "book_branches_nondecreasing", bstep, -slack,
                      bstep >= -slack);
    detail::add_check(checks, all_pass, "spread_nonnegative", bk.best_ask - bk.best_bid,
                      -1e-12, bk.best_ask - bk.best_bid >= -1e-12);

    // first-order-condition consistency from the book side
    {
        Curve hb(g.nodes, bk.h_buy, Extrapolation::clamp);
        Curve hs(g.nodes, bk.h_sell, Extrapolation::clamp);
        std::vector<double> C =
            detail::combine_with_average(g, convolve(g, hb, hs, sigma), N, false);
        double dev = 0.0, core = cfg.grid.core_halfwidth_sigmas * sigma + 1e-12;
        for (std::size_t i = 0; i < n; ++i)
            if (std::abs(g.nodes[i]) <= core) dev = std::max(dev, std::abs(C[i] - sol.F[i]));
        detail::add_check(checks, all_pass, "book_impact_consistency", dev, 5 * tol,
                          dev <= 5 * tol);
    }

    // liquidity providers earn nothing in aggregate
    double lp = lp_profit_check(sol, bk);
    double lp_tol = 1e-3 * sigma * dist.stdev();
    detail::add_check(checks, all_pass, "lp_profit_zero", lp, lp_tol, std::abs(lp) <= lp_tol);

    // shortfall sits strictly inside the impact curve
    double is_margin = kInf;
    double core = cfg.grid.core_halfwidth_sigmas * sigma + 1e-12;
    for (std::size_t i = 0; i < n; ++i) {
        double x = g.nodes[i];
        if (x == 0.0 || std::abs(x) > core) continue;
        double is = implementation_shortfall(sol, x);
        is_margin = std::min(is_margin, x > 0 ? sol.F[i] - is : is - sol.F[i]);
    }
    detail::add_check(checks, all_pass, "shortfall_inside_impact", is_margin, 0.0,
                      is_margin > 0.0);

    // symmetric laws must give antisymmetric solutions
    bool symmetric = std::abs(dist.mean()) < 1e-12 &&
                     std::abs(dist.quantile(0.25) + dist.quantile(0.75)) < 1e-9;
    if (symmetric) {
        double anti = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            anti = std::max(anti, std::abs(sol.F[i] + sol.F[n - 1 - i]));
        detail::add_check(checks, all_pass, "antisymmetry", anti, 1e-6, anti <= 1e-6);
    }

    // bounded sides: the solution approaches but never crosses the bound
    if (std::isfinite(M))
        detail::add_check(checks, all_pass, "upper_bound_respected", M - sol.F.back(),
                          -slack, M - sol.F.back() >= -slack);
    if (std::isfinite(m))
        detail::add_check(checks, all_pass, "lower_bound_respected", sol.F.front() - m,
                          -slack, sol.F.front() - m >= -slack);

    // comparison envelopes bracket the solution (bounded supports only)
    if (run_envelopes && std::isfinite(m) && std::isfinite(M)) {
        EnvelopePair env = solve_envelopes(sol.dist, sol.market, cfg.grid, cfg.solver);
        double lo_margin = kInf, hi_margin = kInf;
        for (std::size_t i = 0; i < n; ++i) {
            lo_margin = std::min(lo_margin, sol.F[i] - env.lower[i]);
            hi_margin = std::min(hi_margin, env.upper[i] - sol.F[i]);
        }
        double margin = std::min(lo_margin, hi_margin);
        detail::add_check(checks, all_pass, "envelope_sandwich", margin, -slack,
                          env.status == SolveStatus::converged && margin >= -slack);
    }

    // tail behavior against theory
    njson asym = njson::array();
    for (Side side : {Side::upper, Side::lower}) {
        for (const ValidationEntry& e : validate(sol, side)) {
            asym.push_back(njson{{"quantity", e.quantity},
                                 {"side", detail::side_name(e.side)},
                                 {"regime", detail::regime_name(e.regime)},
                                 {"predicted", e.predicted},
                                 {"fitted", e.fitted},
                                 {"rel_error", e.rel_error},
                                 {"window", {e.window_lo, e.window_hi}},
                                 {"pass", e.ok}});
            all_pass = all_pass && e.ok;
        }
        IsRatioCheck rc = is_ratio_check(sol, side);
        if (rc.applicable) {
            bool ok = rc.rel_error <= 0.15;
            asym.push_back(njson{{"quantity", "shortfall_impact_ratio"},
                                 {"side", detail::side_name(side)},
                                 {"predicted", rc.predicted},
                                 {"fitted", rc.measured},
                                 {"rel_error", rc.rel_error},
                                 {"pass", ok}});
            all_pass = all_pass && ok;
        }
    }

    njson feas = njson::object();
    for (Side side : {Side::upper, Side::lower})
        feas[detail::side_name(side)] = predict(dist, N, side).feasible;

    return njson{{"checks", checks},
                 {"asymptotics", asym},
                 {"feasible", feas},
                 {"all_pass", all_pass}};
}

inline int run_validate(const RunConfig& cfg, bool strict, std::ostream& err) {
    RunResult rr = run_solve(cfg, strict, err, /*write_artifacts=*/true);
    if (rr.exit_code == 3) return 3;
    detail::ensure_dir(cfg.outputs.dir);

    const EquilibriumSolution* sol = nullptr;
    EquilibriumSolution sp_wrapped;
    if (rr.dealer)
        sol = &*rr.dealer;
    else if (rr.same_price) {
        sp_wrapped = as_equilibrium(*rr.same_price);
        sol = &sp_wrapped;
    }
    bool all_pass = false;
    njson report = validation_report(cfg, *sol, /*run_envelopes=*/true, all_pass);
    report["variant"] = variant_name(cfg.variant);
    if (rr.same_price) {
        report["same_price_status"] = status_name(rr.same_price->status);
        report["same_price_monotone"] = rr.same_price->monotone_ok;
        bool sp_ok = rr.same_price->status == SamePriceStatus::converged;
        all_pass = all_pass && sp_ok;
        report["all_pass"] = all_pass;
    }
    auto out = detail::open_out(cfg.outputs.dir + "/validation.json");
    out << report.dump(2) << "\n";
    if (rr.exit_code != 0) return rr.exit_code;
    return all_pass ? 0 : 2;
}

// ------------------------------------------------------------------ sweep

inline int run_sweep(const RunConfig& base, const std::string& axis,
                     const std::vector<std::string>& tokens, double ref_v, bool strict,
                     std::ostream& err) {
    if (axis != "N" && axis != "sigma" && axis != "scale_t")
        throw ConfigError("unknown sweep axis: " + axis);
    if (tokens.empty()) throw ConfigError("sweep needs at least one value");
    detail::ensure_dir(base.outputs.dir);
    auto out = detail::open_out(base.outputs.dir + "/summary.csv");
    out << "axis,value,status,iterations,spread,ref_v,profit_ref,fit_upper,fit_lower\n";

    int rc = 0;
    for (const std::string& tok : tokens) {
        double val = 0.0;
        try {
            val = std::stod(tok);
        } catch (const std::exception&) {
            throw ConfigError("bad sweep value: " + tok);
        }
        RunConfig cfg = base;
        cfg.outputs.dir = base.outputs.dir + "/" + axis + "_" + tok;
        if (axis == "N")
            cfg.market.n_insiders = int(val);
        else if (axis == "sigma")
            cfg.market.sigma = val;
        else
            cfg.distribution.params["scale"] = val;
        validate_config(cfg);

        RunResult rr = run_solve(cfg, strict, err, /*write_artifacts=*/true);
        if (rr.exit_code == 3) return 3;
        rc = std::max(rc, rr.exit_code);

        const EquilibriumSolution* sol = nullptr;
        EquilibriumSolution sp_wrapped;
        if (rr.dealer)
            sol = &*rr.dealer;
        else if (rr.same_price) {
            sp_wrapped = as_equilibrium(*rr.same_price);
            sol = &sp_wrapped;
        }
        std::string status = rr.dealer ? status_name(rr.dealer->status)
                                       : status_name(rr.same_price->status);
        double spread = kNan, profit = kNan, fit_up = kNan, fit_lo = kNan, rv = ref_v;
        if (sol->status == SolveStatus::converged) {
            OrderBook bk = rr.dealer_book ? *rr.dealer_book : build_book(*sol);
            spread = bk.best_ask - bk.best_bid;
            const SignalDistribution& d = *sol->dist;
            if (!std::isfinite(rv)) {
                rv = d.mean() + 0.5 * d.stdev();
                if (rv >= d.support_hi()) rv = 0.5 * (d.mean() + d.support_hi());
            }
            profit = aggregate_profit(*sol, bk, rv);
            auto first_fit = [&](Side s) {
                std::vector<ValidationEntry> es = validate(*sol, s);
                return es.empty() ? kNan : es.front().fitted;
            };
            fit_up = first_fit(Side::upper);
            fit_lo = first_fit(Side::lower);
        }
        out << axis << ',' << tok << ',' << status << ',' << sol->iterations << ','
            << fmt17(spread) << ',' << fmt17(rv) << ',' << fmt17(profit) << ','
            << fmt17(fit_up) << ',' << fmt17(fit_lo) << "\n";
    }
    return rc;
}

}  // namespace lobeq
