#include <catch_amalgamated.hpp>

#include "wot/io.hpp"

using namespace wot;
using Catch::Approx;

TEST_CASE("measure JSON") {
    SECTION("round trip") {
        DiscreteMeasure mu(2, {{0.0, 1.0}, {2.0, -1.0}}, {0.3, 0.7});
        auto j = measure_to_json(mu);
        auto back = measure_from_json(j);
        REQUIRE(back.same_support(mu));
        REQUIRE(back.weight(0) == Approx(mu.weight(0)));
    }
    SECTION("weights omitted means uniform") {
        auto j = json::parse(R"({"dimension": 1, "points": [[0], [1], [2]]})");
        auto mu = measure_from_json(j);
        REQUIRE(mu.size() == 3);
        REQUIRE(mu.weight(1) == Approx(1.0 / 3.0));
    }
    SECTION("unknown fields rejected (fail closed)") {
        auto j = json::parse(R"({"dimension": 1, "points": [[0]], "wieghts": [1.0]})");
        REQUIRE_THROWS_AS(measure_from_json(j), InputError);
    }
    SECTION("schema must be 1 when present") {
        auto j = json::parse(R"({"schema": 2, "dimension": 1, "points": [[0]]})");
        REQUIRE_THROWS_AS(measure_from_json(j), InputError);
    }
    SECTION("parse errors carry line context") {
        try {
            parse_json_text("{\n  \"dimension\": 1,\n  \"points\": [[0],]\n}", "bad.json");
            FAIL("expected a parse error");
        } catch (const InputError& e) {
            REQUIRE(std::string(e.what()).find("bad.json:3") != std::string::npos);
        }
    }
}

TEST_CASE("cost JSON") {
    SECTION("all kinds round trip") {
        std::vector<CostFunction> costs = {
            CostFunction::quad_linear(1.5, 0.7, 3), CostFunction::power(2.0, 3.0, 2),
            CostFunction::radial_alpha(0.8, 1.1, 1), CostFunction::per_coord_quad_linear(0.9, 4, 2),
            CostFunction::per_coord_power_tail(1.0, 4.0, 4),
            CostFunction::separable_quad_linear(1.2, 0.5, 4)};
        Rng rng = make_rng(61);
        for (const auto& t : costs) {
            auto back = cost_from_json(cost_to_json(t));
            REQUIRE(back.kind == t.kind);
            for (int it = 0; it < 20; ++it) {
                Vec x = rng.uniform_vec(t.dim, -3.0, 3.0);
                REQUIRE(back.eval(x) == Approx(t.eval(x)).margin(1e-14));
            }
        }
    }
    SECTION("percoord params select the family") {
        auto j1 = json::parse(R"({"kind":"percoord","params":{"c":1.0},"dimension":2})");
        REQUIRE(cost_from_json(j1).kind == CostKind::PerCoordQuadLinear);
        auto j2 = json::parse(R"({"kind":"percoord","params":{"c":1.0,"r":4.0},"dimension":2})");
        REQUIRE(cost_from_json(j2).kind == CostKind::PerCoordPowerTail);
        auto j3 = json::parse(R"({"kind":"percoord","params":{"C":1.0,"D":2.0},"dimension":2})");
        REQUIRE(cost_from_json(j3).kind == CostKind::SeparableQuadLinear);
    }
    SECTION("unknown kind and stray params rejected") {
        auto j = json::parse(R"({"kind":"cubic","params":{},"dimension":1})");
        REQUIRE_THROWS_AS(cost_from_json(j), InputError);
        auto j2 = json::parse(R"({"kind":"power","params":{"c":1.0,"r":2.0,"x":3},"dimension":1})");
        REQUIRE_THROWS_AS(cost_from_json(j2), InputError);
    }
}

TEST_CASE("function JSON") {
    MaxAffineFunction f(2, {{1.0, -0.5}, {0.0, 0.0}}, {0.3, 0.0});
    auto back = function_from_json(function_to_json(f));
    REQUIRE(back.pieces() == 2);
    REQUIRE(back.eval({1.0, 1.0}) == Approx(f.eval({1.0, 1.0})));
    auto j = json::parse(R"({"pieces": []})");
    REQUIRE_THROWS_AS(function_from_json(j), InputError);
}

TEST_CASE("plan JSON schema") {
    auto mu = DiscreteMeasure::uniform(1, {{0.0}, {1.0}});
    auto nu = DiscreteMeasure::uniform(1, {{0.5}});
    auto plan = weak_ot(nu, mu, CostFunction::power(1.0, 2.0, 1));
    auto j = plan_to_json(plan);
    REQUIRE(j.contains("pi"));
    REQUIRE(j.contains("barycenters"));
    REQUIRE(j.contains("cost"));
    REQUIRE(j.contains("gap"));
    REQUIRE(j["pi"].size() == 2);
    REQUIRE(j["pi"][0].size() == 1);
}

TEST_CASE("file digest is stable") {
    std::string p = "/tmp/wot_digest_test.json";
    {
        std::ofstream out(p, std::ios::binary);
        out << "{\"dimension\":1}";
    }
    REQUIRE(file_digest(p) == file_digest(p));
}
