#include <catch_amalgamated.hpp>

#include "wot/hopflax.hpp"

using namespace wot;
using Catch::Approx;

TEST_CASE("max-affine evaluation, gradient length, floor") {
    MaxAffineFunction f(2, {{1.0, 0.0}, {0.0, -2.0}}, {0.0, 1.0});
    REQUIRE(f.eval({3.0, 0.0}) == Approx(3.0));
    REQUIRE(f.eval({0.0, 0.0}) == Approx(1.0));
    SECTION("gradient at a tie is the max active slope norm") {
        // pieces tie along x = 1 - 2y; at (1, 0): values 1 and 1
        REQUIRE(f.gradient_length({1.0, 0.0}) == Approx(2.0));
        REQUIRE(f.gradient_length({5.0, 0.0}) == Approx(1.0));
    }
    SECTION("lipschitz constant is the max slope norm") { REQUIRE(f.lipschitz() == Approx(2.0)); }
    SECTION("floor piece bounds the function below") {
        auto g = f.with_floor(-7.0);
        REQUIRE(g.pieces() == 3);
        REQUIRE(g.eval({-100.0, -100.0}) >= -7.0);
    }
    REQUIRE_THROWS_AS(MaxAffineFunction(1, {}, {}), InputError);
}

TEST_CASE("grid spec indexing round-trips") {
    GridSpec g({-1.0, 0.5}, 0.25, {5, 3});
    REQUIRE(g.total() == 15);
    for (std::size_t i = 0; i < g.total(); ++i) REQUIRE(g.flatten(g.unflatten(i)) == i);
    REQUIRE(g.node(0) == Vec{-1.0, 0.5});
    auto big = g.enlarged(0.5);
    REQUIRE(big.counts[0] >= g.counts[0] + 4);
}

TEST_CASE("inf convolution basics") {
    auto alpha = CostFunction::radial_alpha(1.0, 1.0, 1);
    SECTION("t <= 0 rejected") {
        MaxAffineFunction f(1, {{0.0}}, {3.0});
        REQUIRE_THROWS_AS(inf_convolution(f, alpha, 0.0, {0.0}), InputError);
    }
    SECTION("constants are fixed points") {
        MaxAffineFunction f(1, {{0.0}}, {3.0});
        for (double t : {0.3, 1.0, 2.5})
            for (double x : {-1.0, 0.0, 2.0})
                REQUIRE(inf_convolution(f, alpha, t, {x}) == Approx(3.0).margin(1e-9));
    }
    SECTION("f = |x| under radial alpha: Q_t f(0) = 0") {
        MaxAffineFunction f(1, {{1.0}, {-1.0}}, {0.0, 0.0});
        REQUIRE(inf_convolution(f, alpha, 0.7, {0.0}) == Approx(0.0).margin(1e-9));
    }
    SECTION("quadratic closed form under quadratic cost: Q_1(x^2) = x^2/2") {
        auto sq = CostFunction::power(1.0, 2.0, 1);
        auto fsq = [](const Vec& y) { return y[0] * y[0]; };
        for (double x : {-1.5, -0.3, 0.0, 0.7, 2.0})
            REQUIRE(inf_convolution(fsq, sq, 1.0, {x}, 20.0) ==
                    Approx(x * x / 2.0).margin(1e-6));
    }
    SECTION("linear f: Q_t f = f - t alpha*(|slope|)") {
        MaxAffineFunction f(1, {{0.6}}, {0.2});
        for (double t : {0.5, 1.0})
            for (double x : {-1.0, 0.4}) {
                double expected = 0.6 * x + 0.2 - t * legendre_radial_alpha(1.0, 1.0, 0.6);
                REQUIRE(inf_convolution(f, alpha, t, {x}) == Approx(expected).margin(1e-8));
            }
    }
    SECTION("grid-function route is first-order consistent") {
        MaxAffineFunction f(1, {{1.0}, {-1.0}}, {0.0, 0.0});
        GridFunction fg = GridFunction::sample(GridSpec::line(-3.0, 3.0, 1e-3),
                                               [&](const Vec& y) { return f.eval(y); });
        double exact = inf_convolution(f, alpha, 0.5, {0.3});
        REQUIRE(inf_convolution(fg, alpha, 0.5, {0.3}) == Approx(exact).margin(5e-3));
    }
}

TEST_CASE("Q_t f <= f and monotonicity in t") {
    auto alpha = CostFunction::radial_alpha(0.8, 1.2, 2);
    Rng rng = make_rng(31);
    for (int it = 0; it < 10; ++it) {
        auto f = MaxAffineFunction(
            2, {rng.uniform_vec(2, -1.0, 1.0), rng.uniform_vec(2, -1.0, 1.0), {0.0, 0.0}},
            {rng.uniform(-1, 1), rng.uniform(-1, 1), -2.0});
        Vec x = rng.uniform_vec(2, -1.5, 1.5);
        double q1 = inf_convolution(f, alpha, 0.5, x);
        double q2 = inf_convolution(f, alpha, 1.5, x);
        REQUIRE(q1 <= f.eval(x) + 1e-9);
        REQUIRE(q2 <= q1 + 1e-8);
    }
}

TEST_CASE("Q_t preserves convexity (midpoint test on computed values)") {
    auto alpha = CostFunction::radial_alpha(1.0, 1.0, 2);
    Rng rng = make_rng(32);
    MaxAffineFunction f(2, {{0.5, 0.2}, {-0.4, 0.6}, {0.1, -0.7}}, {0.0, 0.3, -0.2});
    for (int it = 0; it < 25; ++it) {
        Vec a = rng.uniform_vec(2, -1.0, 1.0), b = rng.uniform_vec(2, -1.0, 1.0);
        Vec mid = scaled(add(a, b), 0.5);
        double qa = inf_convolution(f, alpha, 1.0, a);
        double qb = inf_convolution(f, alpha, 1.0, b);
        double qm = inf_convolution(f, alpha, 1.0, mid);
        REQUIRE(qm <= 0.5 * (qa + qb) + 1e-8);
    }
}

TEST_CASE("localization: doubling the search radius never helps") {
    auto alpha = CostFunction::radial_alpha(1.0, 1.0, 1);
    MaxAffineFunction f(1, {{0.8}, {-0.6}}, {0.1, -0.2});
    Rng rng = make_rng(33);
    for (int it = 0; it < 10; ++it) {
        double t = rng.uniform(0.2, 1.5);
        double x = rng.uniform(-1.0, 1.0);
        double r = 2.0 * alpha.C * f.lipschitz() * t;
        double best_r = kInf, best_2r = kInf;
        const int n = 20000;
        for (int i = -n; i <= n; ++i) {
            double y = x + 2.0 * r * i / n;
            double v = f.eval({y}) + t * alpha.eval({(x - y) / t});
            if (std::abs(y - x) <= r) best_r = std::min(best_r, v);
            best_2r = std::min(best_2r, v);
        }
        REQUIRE(best_r - best_2r <= 1e-9);
        REQUIRE(inf_convolution(f, alpha, t, {x}) <= best_r + 1e-9);
    }
}

TEST_CASE("semigroup check") {
    auto alpha = CostFunction::radial_alpha(1.0, 1.0, 1);
    SECTION("constant f has zero defect") {
        MaxAffineFunction f(1, {{0.0}}, {1.0});
        auto rep = semigroup_check(f, alpha, 0.5, 0.5, GridSpec::line(-0.5, 0.5, 0.05));
        REQUIRE(rep.max_defect <= 1e-8);
        REQUIRE(rep.holds);
    }
    SECTION("quadratic family composes exactly on the continuous path") {
        auto sq = CostFunction::power(1.0, 2.0, 1);
        auto fsq = [](const Vec& y) { return y[0] * y[0]; };
        auto qs = [&](const Vec& y) { return inf_convolution(fsq, sq, 0.4, y, 20.0); };
        for (double x : {-0.8, 0.3, 1.1}) {
            double composed = inf_convolution(qs, sq, 0.6, {x}, 20.0);
            double direct = inf_convolution(fsq, sq, 1.0, {x}, 20.0);
            REQUIRE(composed == Approx(direct).margin(1e-7));
            REQUIRE(direct == Approx(x * x / 2.0).margin(1e-7));
        }
    }
    SECTION("2-piece family: defect <= 2 L h") {
        MaxAffineFunction f(1, {{-0.5}, {0.5}}, {0.0, 0.0});
        double h = 0.01;
        int n = static_cast<int>(std::round(1.0 / h));
        GridSpec report({h / 2.0 - (n / 2) * h}, h, {n});
        auto rep = semigroup_check(f, alpha, 0.5, 0.5, report);
        REQUIRE(rep.holds);
        REQUIRE(rep.max_defect <= 2.0 * f.lipschitz() * h + 1e-8);
    }
}

TEST_CASE("Hamilton-Jacobi residual") {
    auto alpha = CostFunction::radial_alpha(1.0, 1.0, 1);
    SECTION("constant f: zero residual") {
        MaxAffineFunction f(1, {{0.0}}, {2.0});
        std::vector<double> times = {0.4, 0.5, 0.6};
        auto rep = hj_residual(f, alpha, times, GridSpec::line(-0.5, 0.5, 0.1));
        REQUIRE(rep.max_abs_residual <= 1e-7);
        REQUIRE(rep.excluded_kink == 0);
    }
    SECTION("linear f with small slope: residual 0 analytically") {
        MaxAffineFunction f(1, {{0.4}}, {0.1});
        std::vector<double> times = {0.45, 0.5, 0.55};
        auto rep = hj_residual(f, alpha, times, GridSpec::line(-0.5, 0.5, 0.05));
        REQUIRE(rep.max_abs_residual <= 1e-7);
    }
    SECTION("2-piece f: residual <= 50 h away from excluded bands") {
        MaxAffineFunction f(1, {{-0.3}, {0.6}}, {0.0, 0.0});
        double h = 0.01, t0 = 0.5;
        std::vector<double> times = {t0 - h, t0, t0 + h};
        double xi = 2.0 * t0 * (-0.3);
        int n = static_cast<int>(std::round(0.4 / h));
        GridSpec space({xi + h / 2.0 - (n / 2) * h}, h, {n});
        auto rep = hj_residual(f, alpha, times, space);
        REQUIRE(rep.included > 0);
        REQUIRE(rep.max_abs_residual <= 50.0 * h);
    }
    SECTION("steep slopes hit the gradient guard") {
        MaxAffineFunction f(1, {{-1.0}, {1.0}}, {0.0, 0.0});
        std::vector<double> times = {0.09, 0.1, 0.11};
        auto rep = hj_residual(f, alpha, times, GridSpec::line(-1.0, 1.0, 0.01));
        REQUIRE(rep.excluded_gradient > 0);
    }
}

TEST_CASE("Lipschitz propagation and displacement bound") {
    auto alpha = CostFunction::radial_alpha(1.0, 1.0, 1);
    SECTION("constant f: both sides zero") {
        MaxAffineFunction f(1, {{0.0}}, {1.0});
        auto rep = lipschitz_and_displacement_check(f, alpha, 1.0, GridSpec::line(-1, 1, 0.05));
        REQUIRE(rep.max_displacement <= 1e-9);
        REQUIRE(rep.holds);
    }
    SECTION("f = L|x|: the displacement bound C L^2 t is sharp") {
        MaxAffineFunction f(1, {{1.0}, {-1.0}}, {0.0, 0.0});
        auto rep = lipschitz_and_displacement_check(f, alpha, 1.0, GridSpec::line(-3, 3, 0.01));
        REQUIRE(rep.holds);
        REQUIRE(rep.max_displacement == Approx(1.0).margin(1e-6));
        REQUIRE(inf_convolution(f, alpha, 1.0, {0.0}) == Approx(0.0).margin(1e-9));
    }
    SECTION("random sweep") {
        Rng rng = make_rng(34);
        for (int it = 0; it < 8; ++it) {
            double a1 = rng.uniform(0.1, 1.0), a2 = -rng.uniform(0.1, 1.0);
            MaxAffineFunction f(1, {{a1}, {a2}}, {rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5)});
            auto rep = lipschitz_and_displacement_check(f, alpha, rng.uniform(0.2, 1.5),
                                                        GridSpec::line(-2, 2, 0.02));
            REQUIRE(rep.holds);
        }
    }
}
