#pragma once

#include <cmath>

#include "wot/common.hpp"
#include "wot/cost.hpp"

namespace wot {

// C(lambda, c) = exp(c sqrt(2/lambda)) / (3 lambda) + 1 / (3 (sqrt(lambda/2) - c/2)^2),
// valid for 0 < c <= 0.5 sqrt(lambda).
inline double mls_convex_constant(double lambda, double c) {
    require(lambda > 0.0, "mls_convex_constant: lambda must be positive");
    require(c > 0.0 && c <= 0.5 * std::sqrt(lambda),
            "mls_convex_constant: need 0 < c <= 0.5 sqrt(lambda)");
    double a = std::sqrt(lambda / 2.0) - c / 2.0;
    return std::exp(c * std::sqrt(2.0 / lambda)) / (3.0 * lambda) + 1.0 / (3.0 * a * a);
}

inline double c1_constant(double lambda, double c) {
    require(lambda > 0.0 && c > 0.0 && c <= 0.5 * std::sqrt(lambda),
            "c1_constant: convex-branch range violated");
    double a = std::sqrt(lambda / 2.0) - c / 2.0;
    return 1.0 / (a * a);
}

inline double c2_constant(double lambda, double c) {
    require(lambda > 0.0 && c > 0.0 && c <= 0.5 * std::sqrt(lambda),
            "c2_constant: convex-branch range violated");
    return std::exp(c * std::sqrt(2.0 / lambda));
}

// D1 = e^{64Mc} + 16 * exp(-beta2 * 32Mc) / beta2 with beta2 = sqrt(lambda)/(32c) - 2,
// the exact value of e^{64Mc} + int_{32Mc}^inf 16 e^{(2 - sqrt(lambda)/(32c)) t} dt.
inline double concave_d1(double lambda, double c, double M) {
    double beta2 = std::sqrt(lambda) / (32.0 * c) - 2.0;
    require(beta2 > 0.0, "mls_concave_constant: divergent D1, need c < sqrt(lambda)/64");
    double T = 32.0 * M * c;
    return std::exp(2.0 * T) + 16.0 * std::exp(-beta2 * T) / beta2;
}

// D2 = (32M)^4 + 4 * int_{32M}^inf s^3 e^{-beta s} ds with beta = sqrt(lambda)/32,
// per unit gradient norm; the integral in incomplete-gamma closed form.
inline double concave_d2(double lambda, double M) {
    double beta = std::sqrt(lambda) / 32.0;
    double T = 32.0 * M;
    double tail = std::exp(-beta * T) *
                  (T * T * T / beta + 3.0 * T * T / (beta * beta) + 6.0 * T / (beta * beta * beta) +
                   6.0 / (beta * beta * beta * beta));
    return T * T * T * T + 4.0 * tail;
}

// (1/lambda + sqrt(D1 D2)/3) e^{c sqrt(2/lambda)} at the given radius M,
// valid for 0 < c < sqrt(lambda)/64, M >= 0.
inline double mls_concave_constant_raw(double lambda, double c, double M) {
    require(lambda > 0.0, "mls_concave_constant: lambda must be positive");
    require(c > 0.0 && c < std::sqrt(lambda) / 64.0,
            "mls_concave_constant: need 0 < c < sqrt(lambda)/64");
    require(M >= 0.0, "mls_concave_constant: M must be nonnegative");
    double d1 = concave_d1(lambda, c, M);
    double d2 = concave_d2(lambda, M);
    return (1.0 / lambda + std::sqrt(d1 * d2) / 3.0) * std::exp(c * std::sqrt(2.0 / lambda));
}

// Any radius M' >= M also satisfies the 3/4-quantile hypothesis, so the best
// admissible constant is the minimum of the raw form over [M, inf). This also
// makes the constant monotone in M (the raw form is not near M = 0, where the
// tail integrals still shrink with the cut).
inline double mls_concave_constant(double lambda, double c, double M) {
    require(M >= 0.0, "mls_concave_constant: M must be nonnegative");
    double at_m = mls_concave_constant_raw(lambda, c, M);
    double span = std::max(M, 1.0);
    int grow = 0;
    while (mls_concave_constant_raw(lambda, c, M + span) < 4.0 * at_m && grow < 200) {
        span *= 2.0;
        ++grow;
    }
    double best = at_m, best_m = M;
    const int grid_n = 256;
    for (int i = 0; i <= grid_n; ++i) {
        double m = M + span * i / grid_n;
        double v = mls_concave_constant_raw(lambda, c, m);
        if (v < best) {
            best = v;
            best_m = m;
        }
    }
    double lo = std::max(M, best_m - span / grid_n);
    double hi = best_m + span / grid_n;
    double m_star = golden_section_min(
        [&](double m) { return mls_concave_constant_raw(lambda, c, m); }, lo, hi, 1e-10 * (1.0 + hi));
    return std::min(best, mls_concave_constant_raw(lambda, c, std::max(m_star, M)));
}

// M = 2 sqrt(n / lambda) always satisfies P(|X - EX| <= M) >= 3/4 under the
// convex Poincare inequality.
inline double default_M(int n, double lambda) {
    require(n >= 1 && lambda > 0.0, "default_M: need n >= 1 and lambda > 0");
    return 2.0 * std::sqrt(static_cast<double>(n) / lambda);
}

enum class TransportBranch { Minus, Plus };

struct CostParams {
    double twoC = 0.0;  // the 2C of theta_{2C, c}
    double c = 0.0;
};

// Poincare constant -> parameters of the quadratic-linear transport cost:
// minus branch uses the convex MLS constant, plus branch the concave one.
inline CostParams transport_cost_params(double lambda, double c, TransportBranch branch,
                                        double M = -1.0) {
    CostParams p;
    p.c = c;
    if (branch == TransportBranch::Minus) {
        p.twoC = 2.0 * mls_convex_constant(lambda, c);
    } else {
        require(M >= 0.0, "transport_cost_params: plus branch requires M");
        p.twoC = 2.0 * mls_concave_constant(lambda, c, M);
    }
    return p;
}

inline CostFunction pipeline_cost(double lambda, double c, TransportBranch branch, int dim,
                                  double M = -1.0) {
    CostParams p = transport_cost_params(lambda, c, branch, M);
    return CostFunction::quad_linear(p.twoC, p.c, dim);
}

// transport inequality with theta_{C,D} implies the convex Poincare
// inequality with lambda = 1/C
inline double poincare_from_transport(double C) {
    require(C > 0.0, "poincare_from_transport: C must be positive");
    return 1.0 / C;
}

// the radial Hopf-Lax cost attached to an MLS constant C and slope cap L
inline CostFunction cost_from_mls(double C, double L, int dim) {
    require(C > 0.0 && L > 0.0, "cost_from_mls: C, L must be positive");
    return CostFunction::radial_alpha(C, L, dim);
}

// standard Gaussian tail P(Z > x)
inline double gaussian_tail(double x) { return 0.5 * std::erfc(x / std::sqrt(2.0)); }

// inverse of the Gaussian tail on (0, 1/2]; bisection bracket [0, 40], inputs
// below the bracket tail saturate at 40 (flagged by the caller if needed).
inline double gaussian_tail_inverse(double y) {
    require(y > 0.0 && y <= 0.5, "gaussian_tail_inverse: argument must lie in (0, 1/2]");
    if (y <= gaussian_tail(40.0)) return 40.0;
    double lo = 0.0, hi = 40.0;
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        if (gaussian_tail(mid) >= y)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

struct TensorizationResult {
    double lambda_prime = 0.0;
    double ratio = 0.0;       // lambda / lambda', the implied universal constant
    double argmax_r = 0.0;
};

// sqrt(lambda') = sup { PhiBarInv(8 exp(-sqrt(lambda) r / 2)) / r :
//                       r >= 2 log(16) / sqrt(lambda) },
// evaluated by a bracketing log-grid plus golden refinement. The sup formula
// is scale covariant (r -> r/sqrt(lambda)), so lambda/lambda' is universal.
inline TensorizationResult tensorization_lambda(double lambda) {
    require(lambda > 0.0, "tensorization_lambda: lambda must be positive");
    const double sl = std::sqrt(lambda);
    const double r0 = 2.0 * std::log(16.0) / sl;
    auto value = [&](double r) {
        double arg = 8.0 * std::exp(-sl * r / 2.0);
        if (arg >= 0.5) return 0.0;            // the left endpoint vanishes
        if (arg <= 1e-320) return 40.0 / r;    // inverse saturated at the bracket edge
        return gaussian_tail_inverse(arg) / r;
    };
    double best_r = r0;
    double best = 0.0;
    const int grid_n = 400;
    for (int i = 0; i <= grid_n; ++i) {
        double r = r0 * std::pow(2.0, 8.0 * i / grid_n);
        double v = value(r);
        if (v > best) {
            best = v;
            best_r = r;
        }
    }
    double lo = best_r / std::pow(2.0, 8.0 / grid_n);
    double hi = best_r * std::pow(2.0, 8.0 / grid_n);
    double rstar = golden_section_min([&](double r) { return -value(r); }, lo, hi, 1e-12 * best_r);
    double sup = std::max(best, value(rstar));
    TensorizationResult res;
    res.lambda_prime = sup * sup;
    res.ratio = lambda / res.lambda_prime;
    res.argmax_r = rstar;
    return res;
}

// density e^U perturbation: lambda * exp(inf U - sup U)
inline double perturbation_lambda(double lambda, double osc_U) {
    require(lambda > 0.0 && osc_U >= 0.0, "perturbation_lambda: bad arguments");
    return lambda * std::exp(-osc_U);
}

// mixture constant lambda' = (max{1/lambda1, 1/lambda0} + 2 T2(mu0, mu1))^{-1};
// independent of the mixture proportion p.
inline double mixture_lambda(double lambda0, double lambda1, double w2sq) {
    require(lambda0 > 0.0 && lambda1 > 0.0, "mixture_lambda: constants must be positive");
    require(w2sq >= 0.0, "mixture_lambda: transport cost must be nonnegative");
    return 1.0 / (std::max(1.0 / lambda1, 1.0 / lambda0) + 2.0 * w2sq);
}

}  // namespace wot
