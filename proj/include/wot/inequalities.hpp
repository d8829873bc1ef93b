#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "wot/common.hpp"
#include "wot/constants.hpp"
#include "wot/cost.hpp"
#include "wot/hopflax.hpp"
#include "wot/measure.hpp"

namespace wot {

// ---------------------------------------------------------------------------
// Convex Poincare constant estimation
// ---------------------------------------------------------------------------

// Var_mu f / E_mu |grad f|^2 for a max-affine f; 0 when the gradient vanishes
// on the whole support.
inline double poincare_ratio(const DiscreteMeasure& mu, const MaxAffineFunction& f) {
    // two-pass variance; the one-pass form cancels catastrophically and the
    // ratio search would happily optimize that noise
    double mean = 0.0, denom = 0.0;
    std::vector<double> vals(mu.size());
    for (std::size_t i = 0; i < mu.size(); ++i) {
        vals[i] = f.eval(mu.point(i));
        double g = f.gradient_length(mu.point(i));
        mean += mu.weight(i) * vals[i];
        denom += mu.weight(i) * g * g;
    }
    double var = 0.0;
    for (std::size_t i = 0; i < mu.size(); ++i) {
        double d = vals[i] - mean;
        var += mu.weight(i) * d * d;
    }
    if (denom <= 1e-300) return 0.0;
    return var / denom;
}

struct PoincareEstimate {
    double best_ratio = 0.0;   // lower bound on sup Var f / E|grad f|^2
    double lambda_hat = kInf;  // 1 / best_ratio, an upper bound on the best constant
    MaxAffineFunction witness;
    int restarts_used = 0;
};

namespace detail {

inline MaxAffineFunction params_to_maxaffine(int dim, int k, const std::vector<double>& params) {
    std::vector<Vec> slopes;
    std::vector<double> intercepts;
    for (int j = 0; j < k; ++j) {
        Vec a(static_cast<std::size_t>(dim));
        for (int d = 0; d < dim; ++d) a[static_cast<std::size_t>(d)] = params[static_cast<std::size_t>(j * (dim + 1) + d)];
        slopes.push_back(std::move(a));
        intercepts.push_back(params[static_cast<std::size_t>(j * (dim + 1) + dim)]);
    }
    return MaxAffineFunction(dim, std::move(slopes), std::move(intercepts));
}

// Pattern search with step halving; accepts only improvements. The sup may
// not be attained (tie configurations sit on a discontinuity), so each step
// level gets a bounded sweep budget with a 1e-9 relative stagnation stop.
inline double poincare_local_search(const DiscreteMeasure& mu, int k,
                                    std::vector<double>& params, double scale) {
    const int dim = mu.dimension();
    auto ratio_of = [&](const std::vector<double>& p) {
        return poincare_ratio(mu, params_to_maxaffine(dim, k, p));
    };
    double best = ratio_of(params);
    for (double step = 0.25 * scale; step > 1e-9 * scale; step *= 0.5) {
        for (int sweep = 0; sweep < 30; ++sweep) {
            double before = best;
            for (std::size_t d = 0; d < params.size(); ++d) {
                for (double sgn : {+1.0, -1.0}) {
                    std::vector<double> trial = params;
                    trial[d] += sgn * step;
                    double r = ratio_of(trial);
                    if (r > best + 1e-15) {
                        best = r;
                        params = trial;
                    }
                }
            }
            if (best - before <= 1e-9 * (1.0 + std::abs(before))) break;
        }
    }
    return best;
}

}  // namespace detail

// Maximizes Var f / E|grad f|^2 over k-piece max-affine functions by seeded
// multi-start pattern search. Returns a certified lower bound on the true sup
// (the witness evaluates to best_ratio), so lambda_hat = 1/best_ratio is an
// upper bound on the best Poincare constant.
inline PoincareEstimate estimate_convex_poincare(const DiscreteMeasure& mu, int k_pieces,
                                                 int restarts, std::uint64_t seed) {
    require(k_pieces >= 2, "estimate_convex_poincare: k_pieces must be >= 2");
    const int dim = mu.dimension();
    PoincareEstimate est;
    est.witness = MaxAffineFunction(dim, {Vec(static_cast<std::size_t>(dim), 0.0)}, {0.0});
    est.restarts_used = restarts;
    if (mu.size() < 2) return est;

    double spread = 0.0;
    Vec mean = mu.mean_point();
    for (std::size_t i = 0; i < mu.size(); ++i)
        spread = std::max(spread, norm2(sub(mu.point(i), mean)));
    const double scale = 1.0 + spread;

    std::vector<std::vector<double>> starts;
    // carrying the (k-1)-piece witness (padded with a duplicate piece) makes
    // best_ratio monotone in k_pieces by construction
    if (k_pieces > 2) {
        PoincareEstimate prev = estimate_convex_poincare(mu, k_pieces - 1, restarts, seed);
        std::vector<double> p;
        for (std::size_t j = 0; j < prev.witness.pieces(); ++j) {
            for (double a : prev.witness.slopes[j]) p.push_back(a);
            p.push_back(prev.witness.intercepts[j]);
        }
        for (double a : prev.witness.slopes.back()) p.push_back(a);
        p.push_back(prev.witness.intercepts.back());
        starts.push_back(std::move(p));
        est.best_ratio = prev.best_ratio;
        est.witness = prev.witness;
    }
    Rng rng = make_rng(seed);
    for (int rrt = 0; rrt < restarts; ++rrt) {
        Rng sub_rng = rng.fork(static_cast<std::uint64_t>(rrt));
        std::vector<double> p(static_cast<std::size_t>(k_pieces * (dim + 1)));
        for (int j = 0; j < k_pieces; ++j) {
            for (int d = 0; d < dim; ++d)
                p[static_cast<std::size_t>(j * (dim + 1) + d)] = sub_rng.uniform(-1.0, 1.0);
            p[static_cast<std::size_t>(j * (dim + 1) + dim)] = sub_rng.uniform(-scale, scale);
        }
        starts.push_back(std::move(p));
    }

    for (auto& p : starts) {
        double r = detail::poincare_local_search(mu, k_pieces, p, scale);
        if (r > est.best_ratio) {
            est.best_ratio = r;
            est.witness = detail::params_to_maxaffine(dim, k_pieces, p);
        }
    }
    est.lambda_hat = est.best_ratio > 0.0 ? 1.0 / est.best_ratio : kInf;
    return est;
}

// ---------------------------------------------------------------------------
// Dual transport-inequality checks (infimum-convolution functionals)
// ---------------------------------------------------------------------------

struct DualCheckReport {
    std::string id;
    double value = 0.0;  // the functional; the inequality is value <= 1
    double bound = 1.0;
    double slack = 0.0;  // bound - value
    bool violated = false;
};

namespace detail {

inline std::vector<double> q_values(const DiscreteMeasure& mu, const CostFunction& theta,
                                    const MaxAffineFunction& f, double t) {
    std::vector<double> q(mu.size());
    for (std::size_t i = 0; i < mu.size(); ++i) q[i] = inf_convolution(f, theta, t, mu.point(i));
    return q;
}

}  // namespace detail

// exp( int Q_1 f dmu ) * int e^{-f} dmu <= 1  (the T-bar-plus dual)
inline DualCheckReport check_dual_Tplus(const DiscreteMeasure& mu, const CostFunction& theta,
                                        const MaxAffineFunction& f, double tol = 1e-8) {
    DualCheckReport rep;
    rep.id = "dual-t+";
    auto q = detail::q_values(mu, theta, f, 1.0);
    double int_q = 0.0, int_emf = 0.0;
    for (std::size_t i = 0; i < mu.size(); ++i) {
        int_q += mu.weight(i) * q[i];
        int_emf += mu.weight(i) * std::exp(-f.eval(mu.point(i)));
    }
    rep.value = std::exp(int_q) * int_emf;
    rep.slack = rep.bound - rep.value;
    rep.violated = rep.value > rep.bound + tol;
    return rep;
}

// int exp(Q_1 f) dmu * exp( - int f dmu ) <= 1  (the T-bar-minus dual)
inline DualCheckReport check_dual_Tminus(const DiscreteMeasure& mu, const CostFunction& theta,
                                         const MaxAffineFunction& f, double tol = 1e-8) {
    DualCheckReport rep;
    rep.id = "dual-t-";
    auto q = detail::q_values(mu, theta, f, 1.0);
    double int_eq = 0.0, int_f = 0.0;
    for (std::size_t i = 0; i < mu.size(); ++i) {
        int_eq += mu.weight(i) * std::exp(q[i]);
        int_f += mu.weight(i) * f.eval(mu.point(i));
    }
    rep.value = int_eq * std::exp(-int_f);
    rep.slack = rep.bound - rep.value;
    rep.violated = rep.value > rep.bound + tol;
    return rep;
}

// int exp(Q_2 f) dmu * int e^{-f} dmu <= 1 (the t = 2 infimum-convolution form)
inline DualCheckReport check_inf_convolution_t2(const DiscreteMeasure& mu,
                                                const CostFunction& theta,
                                                const MaxAffineFunction& f, double tol = 1e-8) {
    DualCheckReport rep;
    rep.id = "ic2";
    auto q = detail::q_values(mu, theta, f, 2.0);
    double int_eq = 0.0, int_emf = 0.0;
    for (std::size_t i = 0; i < mu.size(); ++i) {
        int_eq += mu.weight(i) * std::exp(q[i]);
        int_emf += mu.weight(i) * std::exp(-f.eval(mu.point(i)));
    }
    rep.value = int_eq * int_emf;
    rep.slack = rep.bound - rep.value;
    rep.violated = rep.value > rep.bound + tol;
    return rep;
}

// ---------------------------------------------------------------------------
// Modified log-Sobolev checks
// ---------------------------------------------------------------------------

struct MlsReport {
    std::string id;
    double lhs = 0.0;      // entropy side
    double rhs = 0.0;      // constant * energy side
    double constant = 0.0;
    double empirical_ratio = 0.0;  // lhs / energy, the constant the data needs
    bool violated = false;
    bool lambda_certified_by_caller = true;  // the lambda hypothesis is the caller's
};

// Ent(e^f) <= C(lambda, c) E |grad f|^2 e^f for convex f with slopes <= c,
// c <= 0.5 sqrt(lambda).
inline MlsReport check_mls_convex(const DiscreteMeasure& mu, const MaxAffineFunction& f,
                                  double lambda, double c, double tol = 1e-8) {
    for (const auto& a : f.slopes)
        require(norm2(a) <= c + 1e-12, "check_mls_convex: piece slope exceeds the cap c");
    MlsReport rep;
    rep.id = "mls-convex";
    rep.constant = mls_convex_constant(lambda, c);
    double energy = 0.0;
    for (std::size_t i = 0; i < mu.size(); ++i) {
        double g = f.gradient_length(mu.point(i));
        energy += mu.weight(i) * g * g * std::exp(f.eval(mu.point(i)));
    }
    rep.lhs = entropy_functional(mu, [&](const Vec& x) { return std::exp(f.eval(x)); });
    rep.rhs = rep.constant * energy;
    rep.empirical_ratio = energy > 0.0 ? rep.lhs / energy : 0.0;
    rep.violated = rep.lhs > rep.rhs + tol;
    return rep;
}

// Ent(e^{-f}) <= C(lambda, c, M) E |grad f|^2 e^{-f} for convex f with slopes
// <= c < sqrt(lambda)/64. M < 0 requests the 3/4 quantile radius of mu.
inline MlsReport check_mls_concave(const DiscreteMeasure& mu, const MaxAffineFunction& f,
                                   double lambda, double c, double M = -1.0, double tol = 1e-8) {
    for (const auto& a : f.slopes)
        require(norm2(a) <= c + 1e-12, "check_mls_concave: piece slope exceeds the cap c");
    if (M < 0.0) M = quantile_radius(mu, 0.75);
    MlsReport rep;
    rep.id = "mls-concave";
    rep.constant = mls_concave_constant(lambda, c, M);
    double energy = 0.0;
    for (std::size_t i = 0; i < mu.size(); ++i) {
        double g = f.gradient_length(mu.point(i));
        energy += mu.weight(i) * g * g * std::exp(-f.eval(mu.point(i)));
    }
    rep.lhs = entropy_functional(mu, [&](const Vec& x) { return std::exp(-f.eval(x)); });
    rep.rhs = rep.constant * energy;
    rep.empirical_ratio = energy > 0.0 ? rep.lhs / energy : 0.0;
    rep.violated = rep.lhs > rep.rhs + tol;
    return rep;
}

// ---------------------------------------------------------------------------
// Closed-form tail/moment calculators. Out-of-range parameters yield an
// explicit not-applicable result, never a clamped number.
// ---------------------------------------------------------------------------

struct BoundValue {
    double value = 0.0;
    double threshold = 0.0;  // deviation level the bound applies at, when relevant
    bool applicable = true;
    std::string note;
};

inline BoundValue tail_upper(double lambda, double L, double t) {
    BoundValue b;
    if (lambda <= 0 || L <= 0 || t < 0) return {0, 0, false, "need lambda, L > 0 and t >= 0"};
    b.value = 8.0 * std::exp(-0.52 * std::sqrt(lambda) * t / L);
    return b;
}

inline BoundValue moment_upper(double lambda, double p, double grad_p_norm) {
    if (lambda <= 0 || p < 2 || grad_p_norm < 0)
        return {0, 0, false, "need lambda > 0, p >= 2, nonnegative gradient norm"};
    BoundValue b;
    b.value = p / std::sqrt(2.0 * lambda) * grad_p_norm;
    return b;
}

inline BoundValue lower_tail(double lambda, double M, double G, double t) {
    if (lambda <= 0 || M < 0 || G < 0) return {0, 0, false, "bad parameters"};
    if (!(t > 32.0 * M * G)) return {0, t, false, "bound requires t > 32 M E|grad f|"};
    BoundValue b;
    b.threshold = t;
    b.value = G > 0 ? 8.0 * std::exp(-t * std::sqrt(lambda) / (32.0 * G)) : 0.0;
    return b;
}

inline BoundValue enlargement(double muA, double r) {
    if (muA <= 0 || muA > 1 || r <= 0) return {0, 0, false, "need mu(A) in (0,1], r > 0"};
    BoundValue b;
    b.value = std::exp(-r) / muA;
    return b;
}

inline BoundValue lipschitz_conc(double p) {
    if (p < 0) return {0, 0, false, "need p >= 0"};
    BoundValue b;
    b.value = 4.0 * std::exp(-p);
    return b;
}

inline BoundValue selfnorm_moment(double p) {
    if (p < 1) return {0, 0, false, "need p >= 1"};
    BoundValue b;
    b.value = std::pow(3.0, 1.0 / p);
    return b;
}

inline BoundValue nonlip_lower(double p, double grad_dual_mean) {
    if (p < 0 || grad_dual_mean < 0) return {0, 0, false, "bad parameters"};
    BoundValue b;
    b.threshold = 16.0 * grad_dual_mean;
    b.value = 4.0 * std::exp(-p);
    return b;
}

inline BoundValue nonlip_lower_quantile(double p, double q, double Mpq) {
    if (p <= 0 || q <= 0.5 || q > 1.0 || Mpq < 0)
        return {0, 0, false, "need p > 0, q in (1/2, 1], Mpq >= 0"};
    BoundValue b;
    b.threshold = Mpq * (1.0 + std::log(8.0 / (2.0 * q - 1.0)));
    b.value = 4.0 * std::exp(-p);
    return b;
}

inline BoundValue lower_lp(double p, double grad_dual_mean) {
    if (p <= 0 || grad_dual_mean < 0) return {0, 0, false, "bad parameters"};
    BoundValue b;
    b.value = 48.0 * grad_dual_mean;
    return b;
}

inline BoundValue combined(double t, double p, const std::function<double(double)>& tail_of_dual_grad) {
    if (p < 1 || t < 0) return {0, 0, false, "need p >= 1, t >= 0"};
    BoundValue b;
    b.threshold = t;
    b.value = std::exp(-p) + tail_of_dual_grad(t / (3.0 * std::exp(1.0)));
    return b;
}

inline BoundValue moment_quantile(double p, double norm_p) {
    if (p < 1 || norm_p < 0) return {0, 0, false, "need p >= 1, norm >= 0"};
    BoundValue b;
    b.threshold = 3.0 * std::exp(2.0) * norm_p;
    b.value = 6.0 * std::exp(-p);
    return b;
}

// ---------------------------------------------------------------------------
// Concentration checks against the exact discrete law
// ---------------------------------------------------------------------------

struct ConcentrationCheck {
    std::string id;
    double lhs = 0.0;   // exact probability or moment
    double rhs = 0.0;   // paper bound
    bool vacuous = false;
    bool violated = false;
};

struct ConcentrationReport {
    std::vector<ConcentrationCheck> checks;
    int violations = 0;

    void add(ConcentrationCheck c) {
        if (c.violated) ++violations;
        checks.push_back(std::move(c));
    }
};

// Exact verification of the median-concentration bound and the three
// non-Lipschitz consequences on a discrete measure; probabilities are exact
// sums, moments exact weighted powers, 0/0 = 0.
inline ConcentrationReport empirical_concentration_check(const DiscreteMeasure& mu,
                                                         const MaxAffineFunction& f,
                                                         const CostFunction& theta, double p,
                                                         double tol = 1e-10) {
    require(p > 0.0, "empirical_concentration_check: p must be positive");
    ConcentrationReport rep;
    auto st = pushforward_stats(mu, [&](const Vec& x) { return f.eval(x); });
    const double med = st.median;

    std::vector<double> grad_dual(mu.size());
    for (std::size_t i = 0; i < mu.size(); ++i)
        grad_dual[i] = dual_norm(theta, p, f.active_slope(mu.point(i)));

    // Lipschitz bound: P(|f - Med f| > sup_x |grad f(x)|*) <= 4 e^{-p}
    {
        double sup_dual = 0.0;
        for (const auto& a : f.slopes) sup_dual = std::max(sup_dual, dual_norm(theta, p, a));
        double prob = 0.0;
        for (std::size_t i = 0; i < mu.size(); ++i)
            if (std::abs(st.values[i] - med) > sup_dual) prob += mu.weight(i);
        ConcentrationCheck c;
        c.id = "cor-lipschitz-median";
        c.lhs = prob;
        c.rhs = lipschitz_conc(p).value;
        c.vacuous = c.rhs >= 1.0;
        c.violated = c.lhs > c.rhs + tol;
        rep.add(std::move(c));
    }

    // self-normalized moment: || (f - Med)_+ / |grad f|* ||_p <= 3^{1/p}
    if (p >= 1.0) {
        double mom = 0.0;
        bool infinite = false;
        for (std::size_t i = 0; i < mu.size(); ++i) {
            double num = std::max(st.values[i] - med, 0.0);
            if (num <= 0.0) continue;
            if (grad_dual[i] <= 0.0) {
                infinite = true;
                break;
            }
            mom += mu.weight(i) * std::pow(num / grad_dual[i], p);
        }
        ConcentrationCheck c;
        c.id = "selfnorm-moment";
        c.lhs = infinite ? kInf : std::pow(mom, 1.0 / p);
        c.rhs = selfnorm_moment(p).value;
        c.violated = c.lhs > c.rhs + tol;
        rep.add(std::move(c));
    }

    // quantile lower tail: P(f < Med - M_{p,q}(1 + log(8/(2q-1)))) <= 4 e^{-p}
    {
        const double q = 0.75;
        // q-quantile of |grad f|* with the inf convention
        std::vector<std::size_t> idx(grad_dual.size());
        for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
        std::sort(idx.begin(), idx.end(),
                  [&](std::size_t a, std::size_t b) { return grad_dual[a] < grad_dual[b]; });
        double Mpq = grad_dual[idx.back()];
        double cum = 0.0;
        for (std::size_t r : idx) {
            cum += mu.weight(r);
            if (cum >= q - 1e-12) {
                Mpq = grad_dual[r];
                break;
            }
        }
        auto b = nonlip_lower_quantile(p, q, Mpq);
        double prob = 0.0;
        for (std::size_t i = 0; i < mu.size(); ++i)
            if (st.values[i] < med - b.threshold) prob += mu.weight(i);
        ConcentrationCheck c;
        c.id = "quantile-lower-tail";
        c.lhs = prob;
        c.rhs = b.value;
        c.vacuous = c.rhs >= 1.0;
        c.violated = c.lhs > c.rhs + tol;
        rep.add(std::move(c));
    }

    // lower moment: || (f - Med)_- ||_p <= 48 E |grad f|*
    {
        double mean_dual = 0.0;
        for (std::size_t i = 0; i < mu.size(); ++i) mean_dual += mu.weight(i) * grad_dual[i];
        double mom = 0.0;
        for (std::size_t i = 0; i < mu.size(); ++i)
            mom += mu.weight(i) * std::pow(std::max(med - st.values[i], 0.0), p);
        ConcentrationCheck c;
        c.id = "lower-moment";
        c.lhs = std::pow(mom, 1.0 / p);
        c.rhs = lower_lp(p, mean_dual).value;
        c.violated = c.lhs > c.rhs + tol;
        rep.add(std::move(c));
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Aggregated verification reporting
// ---------------------------------------------------------------------------

struct Violation {
    std::string what;
    double lhs = 0.0;
    double rhs = 0.0;
    std::uint64_t instance = 0;
};

struct VerificationReport {
    std::string id;
    int instances = 0;
    double worst_slack = kInf;  // min over instances of rhs - lhs
    std::vector<Violation> violations;

    void record(const std::string& what, double lhs, double rhs, double tol,
                std::uint64_t instance) {
        ++instances;
        worst_slack = std::min(worst_slack, rhs - lhs);
        if (lhs > rhs + tol) violations.push_back({what, lhs, rhs, instance});
    }

    bool ok() const { return violations.empty(); }

    void merge(const VerificationReport& other) {
        instances += other.instances;
        worst_slack = std::min(worst_slack, other.worst_slack);
        violations.insert(violations.end(), other.violations.begin(), other.violations.end());
    }
};

// ---------------------------------------------------------------------------
// Random instance generators for seeded sweeps
// ---------------------------------------------------------------------------

// max-affine with bounded slopes; bounded below via an added constant floor
// piece when requested
inline MaxAffineFunction random_max_affine(Rng& rng, int dim, int pieces, double slope_cap,
                                           bool add_floor) {
    std::vector<Vec> slopes;
    std::vector<double> intercepts;
    for (int j = 0; j < pieces; ++j) {
        Vec a = rng.uniform_vec(dim, -1.0, 1.0);
        double n = norm2(a);
        double target = slope_cap * rng.uniform01();
        if (n > 0.0) a = scaled(a, target / n);
        slopes.push_back(std::move(a));
        intercepts.push_back(rng.uniform(-1.0, 1.0));
    }
    MaxAffineFunction f(dim, std::move(slopes), std::move(intercepts));
    if (add_floor) {
        double floor_level = -2.0;
        for (double b : f.intercepts) floor_level = std::min(floor_level, b - 3.0 * slope_cap);
        return f.with_floor(floor_level);
    }
    return f;
}

// random measure supported on a subset of supp(mu); guarantees finite relative
// entropy with respect to mu
inline DiscreteMeasure random_measure_on_support(Rng& rng, const DiscreteMeasure& mu) {
    std::size_t m = mu.size();
    std::vector<Vec> pts;
    std::vector<double> w;
    std::vector<char> keep(m, 0);
    int kept = 0;
    for (std::size_t i = 0; i < m; ++i)
        if (rng.uniform01() < 0.8) {
            keep[i] = 1;
            ++kept;
        }
    if (kept == 0) {
        keep[static_cast<std::size_t>(rng.uniform_int(0, static_cast<int>(m) - 1))] = 1;
    }
    double total = 0.0;
    for (std::size_t i = 0; i < m; ++i)
        if (keep[i]) {
            double e = -std::log(std::max(rng.uniform01(), 1e-300));
            pts.push_back(mu.point(i));
            w.push_back(e);
            total += e;
        }
    for (double& x : w) x /= total;
    return DiscreteMeasure(mu.dimension(), std::move(pts), std::move(w));
}

}  // namespace wot
