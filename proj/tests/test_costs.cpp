#include <catch_amalgamated.hpp>

#include "oracles.hpp"
#include "wot/cost.hpp"

using namespace wot;
using Catch::Approx;

TEST_CASE("quad-linear evaluation is branch exact") {
    auto t = CostFunction::quad_linear(1.0, 1.0, 2);
    REQUIRE(t.eval({0.0, 0.0}) == 0.0);
    // knot |x| = CD: both branches give CD^2/2
    REQUIRE(t.eval({1.0, 0.0}) == Approx(0.5));
    REQUIRE(t.radial_value(1.0 - 1e-12) == Approx(0.5).margin(1e-10));
    REQUIRE(t.eval({2.0, 0.0}) == Approx(1.5));
    REQUIRE_THROWS_AS(t.eval({1.0}), InputError);
}

TEST_CASE("radial alpha knot continuity: both branches equal C L^2") {
    for (auto [C, L] : std::vector<std::pair<double, double>>{{1.0, 1.0}, {0.4, 2.3}, {5.0, 0.7}}) {
        auto a = CostFunction::radial_alpha(C, L, 1);
        double knot = 2.0 * C * L;
        REQUIRE(a.radial_value(knot) == Approx(C * L * L).epsilon(1e-14));
        REQUIRE(knot * knot / (4.0 * C) == Approx(L * knot - C * L * L).epsilon(1e-14));
        REQUIRE(a.eval({0.0}) == 0.0);
    }
}

TEST_CASE("built-in costs are symmetric, zero at zero, midpoint convex") {
    Rng rng = make_rng(11);
    std::vector<CostFunction> costs = {
        CostFunction::quad_linear(0.8, 1.3, 3), CostFunction::power(2.0, 1.5, 3),
        CostFunction::radial_alpha(1.2, 0.9, 3), CostFunction::per_coord_power_tail(0.5, 3.0, 3),
        CostFunction::separable_quad_linear(1.1, 0.6, 3)};
    for (const auto& t : costs) {
        REQUIRE(t.eval(Vec(3, 0.0)) == Approx(0.0).margin(1e-14));
        for (int it = 0; it < 50; ++it) {
            Vec x = rng.uniform_vec(3, -4.0, 4.0);
            Vec y = rng.uniform_vec(3, -4.0, 4.0);
            REQUIRE(t.eval(x) == Approx(t.eval(scaled(x, -1.0))).margin(1e-12));
            double mid = t.eval(scaled(add(x, y), 0.5));
            REQUIRE(mid <= 0.5 * (t.eval(x) + t.eval(y)) + 1e-12);
        }
    }
    // the per-coordinate min-form is the one built-in that is not convex
    REQUIRE_FALSE(CostFunction::per_coord_quad_linear(1.0, 2).convex());
    REQUIRE(CostFunction::per_coord_quad_linear(1.0, 2).eval({0.5, 2.0}) ==
            Approx(0.25 + 2.0));
}

TEST_CASE("custom costs: convexity spot check and symmetry flag") {
    REQUIRE_THROWS_AS(
        CostFunction::custom([](const Vec& x) { return std::min(x[0] * x[0], std::abs(x[0])); }, 1,
                             /*convex=*/true, true),
        InputError);
    auto ok = CostFunction::custom([](const Vec& x) { return x[0] * x[0] * 0.5; }, 1, true, true);
    REQUIRE(ok.eval({2.0}) == Approx(2.0));
    auto asym = CostFunction::custom([](const Vec& x) { return x[0] * x[0]; }, 1, true, false);
    REQUIRE_THROWS_AS(dual_norm(asym, 1.0, {1.0}), InputError);
}

TEST_CASE("Legendre transforms match the grid-sup oracle") {
    SECTION("radial alpha closed form") {
        double C = 0.7, L = 1.4;
        auto a = CostFunction::radial_alpha(C, L, 1);
        REQUIRE(legendre_radial_alpha(C, L, 0.0) == 0.0);
        REQUIRE(legendre_radial_alpha(C, L, L) == Approx(C * L * L));
        REQUIRE(std::isinf(legendre_radial_alpha(C, L, 1.001 * L)));
        for (double s : {0.1, 0.5, 0.9, 0.99}) {
            double num = numeric_conjugate(a, s * L);
            REQUIRE(num == Approx(legendre_radial_alpha(C, L, s * L)).margin(1e-6));
        }
        REQUIRE(numeric_conjugate(a, 1.01 * L) > kDivergenceSentinel);
    }
    SECTION("numeric conjugate at s = L/2, C = 1, L = 1 equals 0.25") {
        auto a = CostFunction::radial_alpha(1.0, 1.0, 1);
        REQUIRE(numeric_conjugate(a, 0.5) == Approx(0.25).margin(1e-6));
    }
    SECTION("quad-linear conjugate") {
        double C = 1.0, D = 1.0;
        auto t = CostFunction::quad_linear(C, D, 1);
        REQUIRE(legendre_quadlinear(C, D, 0.0) == 0.0);
        REQUIRE(legendre_quadlinear(C, D, 1.0) == Approx(0.5));
        REQUIRE(std::isinf(legendre_quadlinear(C, D, 1.01)));
        for (double s : {0.2, 0.7, 0.99})
            REQUIRE(numeric_conjugate(t, s) == Approx(legendre_quadlinear(C, D, s)).margin(1e-6));
        REQUIRE(numeric_conjugate(t, 1.01) > kDivergenceSentinel);
    }
}

TEST_CASE("orlicz norm") {
    SECTION("zero vector") {
        auto t = CostFunction::power(1.0, 2.0, 2);
        REQUIRE(orlicz_norm(t, 1.0, {0.0, 0.0}) == 0.0);
    }
    SECTION("power closed form (c/p)^{1/r} |x|") {
        Rng rng = make_rng(5);
        for (int it = 0; it < 50; ++it) {
            double c = rng.uniform(0.2, 3.0), r = rng.uniform(1.0, 4.0), p = rng.uniform(0.1, 9.0);
            auto t = CostFunction::power(c, r, 3);
            Vec x = rng.uniform_vec(3, -2.0, 2.0);
            double expected = std::pow(c / p, 1.0 / r) * norm2(x);
            REQUIRE(orlicz_norm(t, p, x) == Approx(expected).epsilon(1e-9));
        }
    }
    SECTION("non-increasing in p") {
        Rng rng = make_rng(6);
        auto t = CostFunction::quad_linear(0.9, 1.1, 2);
        for (int it = 0; it < 30; ++it) {
            Vec x = rng.uniform_vec(2, -3.0, 3.0);
            double p1 = rng.uniform(0.1, 2.0), p2 = p1 + rng.uniform(0.1, 3.0);
            REQUIRE(orlicz_norm(t, p2, x) <= orlicz_norm(t, p1, x) + 1e-10);
        }
    }
}

TEST_CASE("dual norm: radial closed form of Example-6.6 type") {
    Rng rng = make_rng(7);
    for (int it = 0; it < 100; ++it) {
        double c = rng.uniform(0.2, 3.0), r = rng.uniform(1.0, 4.0), p = rng.uniform(0.1, 9.0);
        auto t = CostFunction::power(c, r, 4);
        Vec x = rng.uniform_vec(4, -2.0, 2.0);
        double expected = std::pow(c, -1.0 / r) * std::pow(p, 1.0 / r) * norm2(x);
        REQUIRE(dual_norm(t, p, x) == Approx(expected).margin(1e-6 * (1.0 + expected)));
    }
}

TEST_CASE("dual norm: separable exact solvers agree with a dense grid") {
    Rng rng = make_rng(8);
    SECTION("per-coordinate min form") {
        auto t = CostFunction::per_coord_quad_linear(0.7, 2);
        for (int it = 0; it < 12; ++it) {
            Vec x = rng.uniform_vec(2, -3.0, 3.0);
            double p = std::exp(rng.uniform(std::log(0.05), std::log(30.0)));
            double dn = dual_norm(t, p, x);
            double R = 0.7 * (p + std::sqrt(p)) * 1.2;
            double grid = oracles::dual_norm_grid_2d(t, p, x, R, 600);
            REQUIRE(dn >= grid - 1e-9);  // grid is feasible-only, so it can only undershoot
            REQUIRE(dn == Approx(grid).epsilon(2e-2));
        }
    }
    SECTION("per-coordinate quad-linear") {
        auto t = CostFunction::separable_quad_linear(0.8, 1.3, 2);
        for (int it = 0; it < 12; ++it) {
            Vec x = rng.uniform_vec(2, -2.0, 2.0);
            double p = std::exp(rng.uniform(std::log(0.1), std::log(20.0)));
            double dn = dual_norm(t, p, x);
            double R = (p / 1.3 + 0.8 * 1.3 * 1.3) * 1.2;
            double grid = oracles::dual_norm_grid_2d(t, p, x, R, 600);
            REQUIRE(dn >= grid - 1e-9);
            REQUIRE(dn == Approx(grid).epsilon(2e-2));
        }
    }
    SECTION("per-coordinate power tail") {
        auto t = CostFunction::per_coord_power_tail(1.0, 4.0, 2);
        for (int it = 0; it < 12; ++it) {
            Vec x = rng.uniform_vec(2, -2.0, 2.0);
            double p = std::exp(rng.uniform(std::log(0.1), std::log(20.0)));
            double dn = dual_norm(t, p, x);
            double R = std::pow(p, 0.25) * 1.3 + std::sqrt(p);
            double grid = oracles::dual_norm_grid_2d(t, p, x, R, 600);
            REQUIRE(dn >= grid - 1e-9);
            REQUIRE(dn == Approx(grid).epsilon(2e-2));
        }
    }
}

TEST_CASE("Example-6.7 sandwich with its block structure") {
    Rng rng = make_rng(9);
    // scalar blocks
    {
        double cc = 0.7;
        auto t = CostFunction::per_coord_quad_linear(cc, 6);
        for (int it = 0; it < 200; ++it) {
            Vec x = rng.uniform_vec(6, -3.0, 3.0);
            double p = std::exp(rng.uniform(std::log(0.05), std::log(40.0)));
            double dn = dual_norm(t, p, x);
            double mix = cc * (std::sqrt(p) * norm2(x) + p * max_abs(x));
            REQUIRE(dn <= mix + 1e-9);
            REQUIRE(mix <= 2.0 * dn + 1e-9);
        }
    }
    // 2-blocks of dimension 2: |x_i| are block norms
    {
        double cc = 1.3;
        auto t = CostFunction::per_coord_quad_linear(cc, 4, 2);
        for (int it = 0; it < 100; ++it) {
            Vec x = rng.uniform_vec(4, -2.0, 2.0);
            double p = std::exp(rng.uniform(std::log(0.1), std::log(20.0)));
            double b1 = std::hypot(x[0], x[1]), b2 = std::hypot(x[2], x[3]);
            double mix = cc * (std::sqrt(p) * norm2(x) + p * std::max(b1, b2));
            double dn = dual_norm(t, p, x);
            REQUIRE(dn <= mix + 1e-9);
            REQUIRE(mix <= 2.0 * dn + 1e-9);
        }
    }
}

TEST_CASE("rearranged dual-norm equivalence for r > 2") {
    auto t = CostFunction::per_coord_power_tail(1.0, 4.0, 8);
    SECTION("single nonzero coordinate, p = 1") {
        Vec x(8, 0.0);
        x[3] = 2.5;
        auto rep = dual_norm_rearranged(t, 1, x);
        // both sides reduce to a single-coordinate term
        REQUIRE(rep.rearranged == Approx(2.5).epsilon(1e-12));
        REQUIRE(rep.ratio > 0.25);
        REQUIRE(rep.ratio < 4.0);
    }
    SECTION("random x, r = 4, p = 2: ratio within [1/4, 4]") {
        Rng rng = make_rng(10);
        for (int it = 0; it < 100; ++it) {
            Vec x = rng.uniform_vec(8, -2.0, 2.0);
            auto rep = dual_norm_rearranged(t, 2, x);
            REQUIRE(rep.ratio >= 0.25);
            REQUIRE(rep.ratio <= 4.0);
        }
    }
    SECTION("both sides are 1-homogeneous") {
        Rng rng = make_rng(12);
        Vec x = rng.uniform_vec(8, -2.0, 2.0);
        auto r1 = dual_norm_rearranged(t, 2, x);
        auto r2 = dual_norm_rearranged(t, 2, scaled(x, 3.0));
        REQUIRE(r2.numeric == Approx(3.0 * r1.numeric).epsilon(1e-8));
        REQUIRE(r2.rearranged == Approx(3.0 * r1.rearranged).epsilon(1e-12));
    }
}

TEST_CASE("norm comparison |x|*_{tp} <= t |x|*_p") {
    Rng rng = make_rng(13);
    SECTION("t = 1 is equality") {
        auto t = CostFunction::power(1.0, 2.0, 2);
        Vec x = {1.0, -2.0};
        auto rep = norm_comparison_check(t, 0.8, 1.0, x);
        REQUIRE(rep.lhs == Approx(rep.rhs).epsilon(1e-12));
        REQUIRE(rep.holds);
    }
    SECTION("power cost closed form: sqrt(tp) <= t sqrt(p)") {
        auto t = CostFunction::power(1.0, 2.0, 2);
        for (int it = 0; it < 30; ++it) {
            Vec x = rng.uniform_vec(2, -2.0, 2.0);
            auto rep = norm_comparison_check(t, rng.uniform(0.1, 3.0), 4.0, x);
            REQUIRE(rep.holds);
            REQUIRE(rep.lhs == Approx(rep.rhs / 2.0).epsilon(1e-9));  // sqrt(4)/4 = 1/2
        }
    }
    SECTION("separable sweep") {
        auto t1 = CostFunction::per_coord_quad_linear(0.9, 3);
        auto t2 = CostFunction::separable_quad_linear(1.2, 0.8, 3);
        for (int it = 0; it < 60; ++it) {
            Vec x = rng.uniform_vec(3, -2.0, 2.0);
            double p = rng.uniform(0.1, 5.0), tt = rng.uniform(1.0, 8.0);
            REQUIRE(norm_comparison_check(t1, p, tt, x).holds);
            REQUIRE(norm_comparison_check(t2, p, tt, x).holds);
        }
    }
}

TEST_CASE("dual norm properties: homogeneity and duality consistency") {
    Rng rng = make_rng(14);
    std::vector<CostFunction> costs = {CostFunction::quad_linear(1.0, 1.0, 3),
                                       CostFunction::per_coord_quad_linear(0.8, 3),
                                       CostFunction::separable_quad_linear(0.7, 1.5, 3)};
    for (const auto& t : costs) {
        for (int it = 0; it < 25; ++it) {
            Vec x = rng.uniform_vec(3, -2.0, 2.0);
            double p = rng.uniform(0.2, 4.0);
            double dn = dual_norm(t, p, x);
            double a = rng.uniform(0.1, 5.0);
            REQUIRE(dual_norm(t, p, scaled(x, a)) == Approx(a * dn).epsilon(1e-8));
            REQUIRE(orlicz_norm(t, p, scaled(x, a)) ==
                    Approx(a * orlicz_norm(t, p, x)).epsilon(1e-8));
            // any feasible y must satisfy <x, y> <= |x|*
            for (int jt = 0; jt < 10; ++jt) {
                Vec dir = rng.uniform_vec(3, -1.0, 1.0);
                if (norm2(dir) == 0.0) continue;
                double r = sublevel_radius(t, p, dir) * rng.uniform01();
                Vec y = scaled(dir, r / norm2(dir));
                if (t.eval(y) <= p) REQUIRE(dot(x, y) <= dn + 1e-8);
            }
        }
    }
}

TEST_CASE("sublevel radius is positive, finite, monotone in the level") {
    Rng rng = make_rng(15);
    auto t = CostFunction::quad_linear(1.3, 0.7, 2);
    for (int it = 0; it < 30; ++it) {
        Vec d = rng.uniform_vec(2, -1.0, 1.0);
        if (norm2(d) < 1e-6) continue;
        double r1 = sublevel_radius(t, 0.5, d), r2 = sublevel_radius(t, 2.0, d);
        REQUIRE(r1 > 0.0);
        REQUIRE(std::isfinite(r2));
        REQUIRE(r2 >= r1);
    }
    SECTION("sublevel body membership at the directional radius") {
        SublevelSet ball(t, 1.5);
        for (int it = 0; it < 20; ++it) {
            Vec d = rng.uniform_vec(2, -1.0, 1.0);
            if (norm2(d) < 1e-6) continue;
            double r = ball.radius(d);
            Vec unit = scaled(d, 1.0 / norm2(d));
            REQUIRE(ball.contains(scaled(unit, 0.99 * r)));
            REQUIRE_FALSE(ball.contains(scaled(unit, 1.01 * r)));
        }
    }
}
