#include <catch2/catch_amalgamated.hpp>
#include <cstdlib>
#include <string>

#include "lobeq/config.hpp"
#include "lobeq/pipeline.hpp"

using namespace lobeq;
using Catch::Matchers::WithinRel;

TEST_CASE("full config document populates every section") {
    njson j = njson::parse(R"({
        "distribution": {"family": "student", "params": {"alpha": 3.5}, "shift": 0.25},
        "market": {"N": 4, "sigma": 2.0},
        "grid": {"tail_max_sigmas": 200.0, "hermite_nodes": 32},
        "solver": {"tol": 1e-6, "max_iter": 77, "damping": 0.5},
        "outputs": {"dir": "runs/x", "formats": ["json"]},
        "variant": "both"
    })");
    RunConfig cfg = parse_config(j);
    CHECK(cfg.distribution.family == "student");
    CHECK(cfg.distribution.params.at("alpha") == 3.5);
    CHECK(cfg.distribution.shift == 0.25);
    CHECK(cfg.market.n_insiders == 4);
    CHECK(cfg.market.sigma == 2.0);
    CHECK(cfg.grid.tail_max_sigmas == 200.0);
    CHECK(cfg.grid.hermite_nodes == 32);
    CHECK(cfg.grid.core_step_sigmas == 0.02);  // untouched default
    CHECK(cfg.solver.tol == 1e-6);
    CHECK(cfg.solver.max_iter == 77);
    CHECK(cfg.solver.damping == 0.5);
    CHECK(cfg.outputs.dir == "runs/x");
    CHECK(cfg.outputs.json);
    CHECK(!cfg.outputs.csv);
    CHECK(cfg.variant == Variant::both);

    // serialization round-trips through the parser
    RunConfig back = parse_config(config_to_json(cfg));
    CHECK(config_to_json(back) == config_to_json(cfg));
}

TEST_CASE("later documents override earlier ones field by field") {
    RunConfig cfg;
    apply_json(cfg, njson::parse(R"({"market": {"N": 3, "sigma": 0.5}})"));
    apply_json(cfg, njson::parse(R"({"market": {"sigma": 4.0}})"));
    CHECK(cfg.market.n_insiders == 3);  // survives the second document
    CHECK(cfg.market.sigma == 4.0);
    CHECK(cfg.distribution.family == "trinomial");  // untouched default
}

TEST_CASE("unknown keys and malformed values are rejected loudly") {
    CHECK_THROWS_AS(parse_config(njson::parse(R"({"markt": {}})")), ConfigError);
    CHECK_THROWS_AS(parse_config(njson::parse(R"({"market": {"n": 2}})")), ConfigError);
    CHECK_THROWS_AS(parse_config(njson::parse(R"({"market": {"N": 2.5}})")), ConfigError);
    CHECK_THROWS_AS(parse_config(njson::parse(R"({"market": {"sigma": "big"}})")), ConfigError);
    CHECK_THROWS_AS(parse_config(njson::parse(R"({"variant": "auction"})")), ConfigError);
    CHECK_THROWS_AS(parse_config(njson::parse(R"({"outputs": {"formats": ["xml"]}})")),
                    ConfigError);
    CHECK_THROWS_AS(parse_config(njson::parse(R"([1, 2])")), ConfigError);
}

TEST_CASE("semantic validation guards the solver inputs") {
    auto bad = [](const char* body) {
        CHECK_THROWS_AS(parse_config(njson::parse(body)), ConfigError);
    };
    bad(R"({"market": {"N": 0}})");
    bad(R"({"market": {"sigma": -1.0}})");
    bad(R"({"solver": {"tol": 0.0}})");
    bad(R"({"solver": {"max_iter": 0}})");
    bad(R"({"solver": {"damping": 1.0}})");
    bad(R"({"grid": {"tail_ratio": 1.0}})");
    bad(R"({"grid": {"tail_max_sigmas": 5.0}})");
    bad(R"({"grid": {"hermite_nodes": 2}})");
    bad(R"({"distribution": {"family": "laplaceish"}})");
}

TEST_CASE("missing config files surface as configuration errors") {
    CHECK_THROWS_AS(load_config("/nonexistent/definitely_missing.json"), ConfigError);
}

TEST_CASE("numeric formatting survives a text round trip at full precision") {
    for (double v : {0.1, 1.0 / 3.0, 1.3333331384912102, -2.5e-17, 6.02214076e23, 0.0}) {
        std::string s = fmt17(v);
        CHECK(std::strtod(s.c_str(), nullptr) == v);
    }
}
