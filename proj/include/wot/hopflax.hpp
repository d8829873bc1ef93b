#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "wot/common.hpp"
#include "wot/cost.hpp"

namespace wot {

// Convex function as a pointwise max of affine pieces. The gradient length at
// a tie is the max of active-piece slope norms (the limsup of eq-style
// difference quotients is attained along the steepest active piece).
struct MaxAffineFunction {
    int dim = 1;
    std::vector<Vec> slopes;
    std::vector<double> intercepts;

    MaxAffineFunction() = default;
    MaxAffineFunction(int d, std::vector<Vec> s, std::vector<double> b)
        : dim(d), slopes(std::move(s)), intercepts(std::move(b)) {
        require(!slopes.empty(), "max-affine: needs at least one piece");
        require(slopes.size() == intercepts.size(), "max-affine: slopes/intercepts mismatch");
        for (const auto& a : slopes)
            require(static_cast<int>(a.size()) == d && all_finite(a), "max-affine: bad slope");
    }

    std::size_t pieces() const { return slopes.size(); }

    double eval(const Vec& x) const {
        require(static_cast<int>(x.size()) == dim, "max-affine eval: dimension mismatch");
        double best = -kInf;
        for (std::size_t j = 0; j < slopes.size(); ++j)
            best = std::max(best, dot(slopes[j], x) + intercepts[j]);
        return best;
    }

    double operator()(const Vec& x) const { return eval(x); }

    double gradient_length(const Vec& x) const {
        double m = eval(x);
        double tol = 1e-12 * (1.0 + std::abs(m));
        double g = 0.0;
        for (std::size_t j = 0; j < slopes.size(); ++j)
            if (dot(slopes[j], x) + intercepts[j] >= m - tol) g = std::max(g, norm2(slopes[j]));
        return g;
    }

    // a subgradient at x: the steepest active piece's slope
    Vec active_slope(const Vec& x) const {
        double m = eval(x);
        double tol = 1e-12 * (1.0 + std::abs(m));
        std::size_t best = 0;
        double bestn = -1.0;
        for (std::size_t j = 0; j < slopes.size(); ++j)
            if (dot(slopes[j], x) + intercepts[j] >= m - tol && norm2(slopes[j]) > bestn) {
                bestn = norm2(slopes[j]);
                best = j;
            }
        return slopes[best];
    }

    double lipschitz() const {
        double L = 0.0;
        for (const auto& a : slopes) L = std::max(L, norm2(a));
        return L;
    }

    MaxAffineFunction shifted(double s) const {
        MaxAffineFunction g = *this;
        for (double& b : g.intercepts) b += s;
        return g;
    }

    // adds a constant piece, making the function bounded below by `level`
    MaxAffineFunction with_floor(double level) const {
        MaxAffineFunction g = *this;
        g.slopes.push_back(Vec(static_cast<std::size_t>(dim), 0.0));
        g.intercepts.push_back(level);
        return g;
    }
};

// Axis-aligned lattice, nodes at origin + h * index.
struct GridSpec {
    Vec origin;
    double h = 0.0;
    std::vector<int> counts;

    GridSpec() = default;
    GridSpec(Vec o, double spacing, std::vector<int> n)
        : origin(std::move(o)), h(spacing), counts(std::move(n)) {
        require(h > 0.0, "grid: spacing must be positive");
        require(!counts.empty() && counts.size() == origin.size(), "grid: bad extents");
        require(counts.size() <= 3, "grid: dimension > 3 unsupported");
        for (int c : counts) require(c >= 1, "grid: empty axis");
    }

    static GridSpec line(double lo, double hi, double spacing) {
        int n = static_cast<int>(std::floor((hi - lo) / spacing + 1e-9)) + 1;
        return GridSpec({lo}, spacing, {n});
    }

    int dim() const { return static_cast<int>(counts.size()); }

    std::size_t total() const {
        std::size_t t = 1;
        for (int c : counts) t *= static_cast<std::size_t>(c);
        return t;
    }

    std::vector<int> unflatten(std::size_t flat) const {
        std::vector<int> idx(counts.size());
        for (std::size_t d = 0; d < counts.size(); ++d) {
            idx[d] = static_cast<int>(flat % static_cast<std::size_t>(counts[d]));
            flat /= static_cast<std::size_t>(counts[d]);
        }
        return idx;
    }

    std::size_t flatten(const std::vector<int>& idx) const {
        std::size_t flat = 0, mult = 1;
        for (std::size_t d = 0; d < counts.size(); ++d) {
            flat += static_cast<std::size_t>(idx[d]) * mult;
            mult *= static_cast<std::size_t>(counts[d]);
        }
        return flat;
    }

    Vec node(std::size_t flat) const {
        auto idx = unflatten(flat);
        Vec x(origin);
        for (std::size_t d = 0; d < counts.size(); ++d) x[d] += h * idx[d];
        return x;
    }

    // grid enlarged by `margin` in every direction (node-aligned)
    GridSpec enlarged(double margin) const {
        int extra = static_cast<int>(std::ceil(margin / h)) + 1;
        GridSpec g = *this;
        for (std::size_t d = 0; d < counts.size(); ++d) {
            g.origin[d] -= extra * h;
            g.counts[d] += 2 * extra;
        }
        return g;
    }
};

struct GridFunction {
    GridSpec grid;
    std::vector<double> values;

    GridFunction() = default;
    GridFunction(GridSpec g, std::vector<double> v) : grid(std::move(g)), values(std::move(v)) {
        require(values.size() == grid.total(), "grid function: value count mismatch");
        for (double x : values) require(std::isfinite(x), "grid function: non-finite value");
    }

    static GridFunction sample(const GridSpec& g, const std::function<double(const Vec&)>& f) {
        std::vector<double> v(g.total());
        for (std::size_t i = 0; i < v.size(); ++i) v[i] = f(g.node(i));
        return GridFunction(g, std::move(v));
    }
};

namespace detail {

// 1D line minimization of a convex objective: bracket expansion from the
// start point, then golden section.
template <class F>
double line_min(F&& obj, double center, double step0, double tol) {
    double fc = obj(center);
    double step = std::max(step0, 16.0 * tol);
    double lo = center - step, hi = center + step;
    for (int it = 0; it < 80 && obj(lo) < fc - 1e-15; ++it) {
        step *= 2.0;
        lo = center - step;
    }
    step = std::max(step0, 16.0 * tol);
    for (int it = 0; it < 80 && obj(hi) < fc - 1e-15; ++it) {
        step *= 2.0;
        hi = center + step;
    }
    return golden_section_min(obj, lo, hi, tol);
}

}  // namespace detail

// Core minimizer for inf_y { f(y) + t theta((x-y)/t) } with convex f:
// golden-section line searches cycled over a direction set, multi-start.
// The direction set always contains the coordinate axes; callers add ridge
// directions when f has kinks that are not axis-aligned (coordinate descent
// alone can stall on an oblique max-affine ridge).
inline double inf_convolution_core(const std::function<double(const Vec&)>& f,
                                   const CostFunction& theta, double t, const Vec& x,
                                   std::vector<Vec> starts, double step_hint,
                                   std::vector<Vec> extra_directions = {}, double tol = 1e-9) {
    require(t > 0.0, "inf_convolution: t must be positive");
    require(static_cast<int>(x.size()) == theta.dim, "inf_convolution: dimension mismatch");
    auto obj = [&](const Vec& y) { return f(y) + t * theta.eval(scaled(sub(x, y), 1.0 / t)); };
    starts.push_back(x);

    std::vector<Vec> dirs;
    for (int d = 0; d < theta.dim; ++d) {
        Vec e(x.size(), 0.0);
        e[static_cast<std::size_t>(d)] = 1.0;
        dirs.push_back(std::move(e));
    }
    for (auto& d : extra_directions) {
        double n = norm2(d);
        if (n > 1e-12) dirs.push_back(scaled(d, 1.0 / n));
    }

    double best = kInf;
    const double line_tol = tol * 1e-2;
    for (const Vec& s0 : starts) {
        Vec y = s0;
        double val = obj(y);
        for (int pass = 0; pass < 200; ++pass) {
            double before = val;
            for (const Vec& d : dirs) {
                auto obj1 = [&](double s) {
                    Vec ytmp = y;
                    axpy(s, d, ytmp);
                    return obj(ytmp);
                };
                double s_star = detail::line_min(obj1, 0.0, std::max(step_hint, 1.0), line_tol);
                double v = obj1(s_star);
                if (v < val) {
                    val = v;
                    axpy(s_star, d, y);
                }
            }
            if (before - val <= tol * 1e-3 * (1.0 + std::abs(val))) break;
        }
        best = std::min(best, val);
    }
    return best;
}

namespace detail {

// displacement |y* - x| / t of the per-piece unconstrained minimizer: solve
// radial_slope(u) = min(|a|, slope cap)
inline double piece_pullback(const CostFunction& theta, double anorm) {
    switch (theta.kind) {
        case CostKind::RadialAlpha: return 2.0 * theta.C * std::min(anorm, theta.L);
        case CostKind::QuadLinear: return theta.C * std::min(anorm, theta.D);
        case CostKind::Power:
            if (theta.r == 1.0) return 0.0;
            return std::pow(anorm / (theta.c * theta.r), 1.0 / (theta.r - 1.0));
        default: return anorm;
    }
}

}  // namespace detail

// Search-radius step hint after the localization bound: for an L-Lipschitz f
// under the radial-alpha cost the minimizer lies within 2 C L t of x.
inline double localization_radius(const CostFunction& theta, double lip_f, double t) {
    switch (theta.kind) {
        case CostKind::RadialAlpha: return 2.0 * theta.C * std::min(lip_f, theta.L) * t;
        case CostKind::QuadLinear: return theta.C * std::min(lip_f, theta.D) * t;
        case CostKind::Power:
            return theta.r == 1.0 ? 1.0
                                  : t * std::pow(lip_f / (theta.c * theta.r),
                                                 1.0 / (theta.r - 1.0));
        default: return std::max(1.0, lip_f) * t;
    }
}

namespace detail {

// orthonormal basis of the hyperplane perpendicular to d (the directions a
// max-affine ridge {(a_j - a_k) . y = const} can run along)
inline std::vector<Vec> perp_basis(const Vec& d) {
    const std::size_t n = d.size();
    std::vector<Vec> basis;
    double dn = norm2(d);
    if (dn < 1e-12 || n == 1) return basis;
    Vec u = scaled(d, 1.0 / dn);
    for (std::size_t axis = 0; axis < n && basis.size() + 1 < n; ++axis) {
        Vec v(n, 0.0);
        v[axis] = 1.0;
        axpy(-dot(v, u), u, v);
        for (const Vec& b : basis) axpy(-dot(v, b), b, v);
        double vn = norm2(v);
        if (vn > 1e-8) basis.push_back(scaled(v, 1.0 / vn));
    }
    return basis;
}

}  // namespace detail

inline double inf_convolution(const MaxAffineFunction& f, const CostFunction& theta, double t,
                              const Vec& x, double tol = 1e-9) {
    require(f.dim == theta.dim, "inf_convolution: function/cost dimension mismatch");
    std::vector<Vec> starts;
    starts.reserve(f.pieces());
    for (std::size_t j = 0; j < f.pieces(); ++j) {
        double an = norm2(f.slopes[j]);
        Vec y = x;
        if (an > 0.0) axpy(-t * detail::piece_pullback(theta, an) / an, f.slopes[j], y);
        starts.push_back(std::move(y));
    }
    std::vector<Vec> ridge_dirs;
    if (f.dim > 1) {
        for (std::size_t j = 0; j < f.pieces(); ++j)
            for (std::size_t k = j + 1; k < f.pieces(); ++k) {
                Vec d = sub(f.slopes[j], f.slopes[k]);
                for (auto& b : detail::perp_basis(d)) ridge_dirs.push_back(std::move(b));
                ridge_dirs.push_back(std::move(d));
            }
    }
    double radius = localization_radius(theta, f.lipschitz(), t) * 1.1;
    auto feval = [&](const Vec& y) { return f.eval(y); };
    return inf_convolution_core(feval, theta, t, x, std::move(starts), std::max(radius, 1e-6),
                                std::move(ridge_dirs), tol);
}

// Exhaustive minimization over grid nodes; first-order consistent in h.
inline double inf_convolution(const GridFunction& f, const CostFunction& theta, double t,
                              const Vec& x) {
    require(t > 0.0, "inf_convolution: t must be positive");
    require(f.grid.dim() == theta.dim, "inf_convolution: grid/cost dimension mismatch");
    double best = kInf;
    for (std::size_t i = 0; i < f.values.size(); ++i) {
        Vec y = f.grid.node(i);
        best = std::min(best, f.values[i] + t * theta.eval(scaled(sub(x, y), 1.0 / t)));
    }
    return best;
}

// Convex callable entry point (used for inputs outside the max-affine class,
// e.g. smooth convex test functions); `radius` bounds the search around x.
inline double inf_convolution(const std::function<double(const Vec&)>& f,
                              const CostFunction& theta, double t, const Vec& x, double radius,
                              double tol = 1e-9) {
    return inf_convolution_core(f, theta, t, x, {}, std::max(radius, 1e-6), {}, tol);
}

// ---------------------------------------------------------------------------
// Verifiers (Hamilton-Jacobi facts for the radial-alpha cost)
// ---------------------------------------------------------------------------

struct SemigroupReport {
    double max_defect = 0.0;
    Vec argmax;
    double tolerance = 0.0;  // 2 L h + 1e-8
    bool holds = false;
};

// Composes two grid-based Hopf-Lax steps (Q_t after Q_s) and compares with the
// direct continuous evaluation of Q_{t+s} at every report node.
inline SemigroupReport semigroup_check(const MaxAffineFunction& f, const CostFunction& theta,
                                       double s, double t, const GridSpec& report) {
    require(s > 0.0 && t > 0.0, "semigroup_check: s, t must be positive");
    require(f.dim == report.dim() && f.dim == theta.dim, "semigroup_check: dimension mismatch");
    const double L = f.lipschitz();
    const double rs = localization_radius(theta, L, s) * 1.2 + 2.0 * report.h;
    const double rt = localization_radius(theta, L, t) * 1.2 + 2.0 * report.h;

    GridSpec mid = report.enlarged(rt);
    GridSpec base = mid.enlarged(rs);
    GridFunction fgrid = GridFunction::sample(base, [&](const Vec& z) { return f.eval(z); });

    // Q_s f on the mid grid, window-restricted exhaustive minimization
    std::vector<double> qs(mid.total());
    for (std::size_t yi = 0; yi < mid.total(); ++yi) {
        Vec y = mid.node(yi);
        double best = kInf;
        for (std::size_t zi = 0; zi < base.total(); ++zi) {
            Vec z = base.node(zi);
            bool inside = true;
            for (std::size_t d = 0; d < y.size(); ++d)
                if (std::abs(z[d] - y[d]) > rs) {
                    inside = false;
                    break;
                }
            if (!inside) continue;
            best = std::min(best, fgrid.values[zi] + s * theta.eval(scaled(sub(y, z), 1.0 / s)));
        }
        qs[yi] = best;
    }

    SemigroupReport rep;
    rep.tolerance = 2.0 * L * report.h + 1e-8;
    rep.argmax = report.node(0);
    for (std::size_t xi = 0; xi < report.total(); ++xi) {
        Vec x = report.node(xi);
        double composed = kInf;
        for (std::size_t yi = 0; yi < mid.total(); ++yi) {
            Vec y = mid.node(yi);
            bool inside = true;
            for (std::size_t d = 0; d < x.size(); ++d)
                if (std::abs(y[d] - x[d]) > rt) {
                    inside = false;
                    break;
                }
            if (!inside) continue;
            composed = std::min(composed, qs[yi] + t * theta.eval(scaled(sub(x, y), 1.0 / t)));
        }
        double direct = inf_convolution(f, theta, s + t, x);
        double defect = std::abs(composed - direct);
        if (defect > rep.max_defect) {
            rep.max_defect = defect;
            rep.argmax = x;
        }
    }
    rep.holds = rep.max_defect <= rep.tolerance;
    return rep;
}

struct HjResidualReport {
    double max_abs_residual = 0.0;
    double rms_residual = 0.0;
    int included = 0;
    int excluded_gradient = 0;  // |grad u| too close to the Legendre blow-up at L
    int excluded_kink = 0;      // second-difference kink detector fired
};

// Finite-difference residual of d/dt u + alpha*(|grad_x u|) = 0 on the product
// grid, u(t,x) = Q_t f(x). Nodes near the |grad| = L blow-up (guard 0.05 L)
// or flagged by the kink detector |second difference| > 10 h^2 are excluded
// and reported, not judged.
inline HjResidualReport hj_residual(const MaxAffineFunction& f, const CostFunction& alpha,
                                    const std::vector<double>& times, const GridSpec& space) {
    require(alpha.kind == CostKind::RadialAlpha, "hj_residual: cost must be radial alpha");
    require(times.size() >= 3, "hj_residual: need at least 3 time levels");
    for (double tv : times) require(tv > 0.0, "hj_residual: times must be positive");
    const double dt = times[1] - times[0];
    for (std::size_t l = 1; l < times.size(); ++l)
        require(std::abs(times[l] - times[l - 1] - dt) <= 1e-12, "hj_residual: uniform dt required");

    const std::size_t nt = times.size(), nx = space.total();
    std::vector<double> u(nt * nx);
    for (std::size_t l = 0; l < nt; ++l)
        for (std::size_t i = 0; i < nx; ++i)
            u[l * nx + i] = inf_convolution(f, alpha, times[l], space.node(i));

    HjResidualReport rep;
    const double guard = alpha.L - 0.05 * alpha.L;
    const double h = space.h;
    double sum_sq = 0.0;
    for (std::size_t l = 1; l + 1 < nt; ++l) {
        for (std::size_t i = 0; i < nx; ++i) {
            auto idx = space.unflatten(i);
            bool interior = true;
            for (std::size_t d = 0; d < idx.size(); ++d)
                if (idx[d] == 0 || idx[d] == space.counts[d] - 1) interior = false;
            if (!interior) continue;

            bool kink = false;
            double grad_sq = 0.0;
            for (std::size_t d = 0; d < idx.size(); ++d) {
                auto ip = idx, im = idx;
                ++ip[d];
                --im[d];
                double up = u[l * nx + space.flatten(ip)];
                double um = u[l * nx + space.flatten(im)];
                double uc = u[l * nx + i];
                double g = (up - um) / (2.0 * h);
                grad_sq += g * g;
                if (std::abs(up - 2.0 * uc + um) > 10.0 * h * h) kink = true;
            }
            double d2t = u[(l + 1) * nx + i] - 2.0 * u[l * nx + i] + u[(l - 1) * nx + i];
            if (std::abs(d2t) > 10.0 * dt * dt) kink = true;
            double gnorm = std::sqrt(grad_sq);
            if (gnorm > guard) {
                ++rep.excluded_gradient;
                continue;
            }
            if (kink) {
                ++rep.excluded_kink;
                continue;
            }
            double dudt = (u[(l + 1) * nx + i] - u[(l - 1) * nx + i]) / (2.0 * dt);
            double res = dudt + legendre_radial_alpha(alpha.C, alpha.L, gnorm);
            rep.max_abs_residual = std::max(rep.max_abs_residual, std::abs(res));
            sum_sq += res * res;
            ++rep.included;
        }
    }
    if (rep.included > 0) rep.rms_residual = std::sqrt(sum_sq / rep.included);
    return rep;
}

struct LipschitzDisplacementReport {
    double grid_lipschitz = 0.0;
    double lipschitz_bound = 0.0;
    double max_displacement = 0.0;
    double displacement_bound = 0.0;  // C L^2 t
    bool holds = false;
};

// (1) grid Lipschitz constant of Q_t f stays <= Lip(f) (+ solver slack);
// (2) max |Q_t f - f| <= C L^2 t.
inline LipschitzDisplacementReport lipschitz_and_displacement_check(const MaxAffineFunction& f,
                                                                    const CostFunction& alpha,
                                                                    double t,
                                                                    const GridSpec& grid) {
    require(alpha.kind == CostKind::RadialAlpha, "displacement check: cost must be radial alpha");
    const double L = f.lipschitz();
    require(L <= alpha.L + 1e-12, "displacement check: f must be L-Lipschitz for the cost's L");
    LipschitzDisplacementReport rep;
    std::vector<double> u(grid.total());
    for (std::size_t i = 0; i < grid.total(); ++i) {
        Vec x = grid.node(i);
        u[i] = inf_convolution(f, alpha, t, x);
        rep.max_displacement = std::max(rep.max_displacement, std::abs(u[i] - f.eval(x)));
    }
    for (std::size_t i = 0; i < grid.total(); ++i) {
        auto idx = grid.unflatten(i);
        for (std::size_t d = 0; d < idx.size(); ++d) {
            if (idx[d] + 1 >= grid.counts[d]) continue;
            auto ip = idx;
            ++ip[d];
            rep.grid_lipschitz =
                std::max(rep.grid_lipschitz, std::abs(u[grid.flatten(ip)] - u[i]) / grid.h);
        }
    }
    rep.lipschitz_bound = L + 1e-6;
    rep.displacement_bound = alpha.C * L * L * t + 1e-8;
    rep.holds = rep.grid_lipschitz <= rep.lipschitz_bound &&
                rep.max_displacement <= rep.displacement_bound;
    return rep;
}

}  // namespace wot
