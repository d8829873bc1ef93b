#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <string>
#include <vector>

#include "wot/common.hpp"

namespace wot {

enum class CostKind {
    QuadLinear,           // theta_{C,D}: |x|^2/(2C) for |x| <= CD, D|x| - CD^2/2 beyond
    Power,                // c |x|^r
    RadialAlpha,          // s^2/(4C) for |s| <= 2CL, L|s| - CL^2 beyond
    PerCoordQuadLinear,   // sum over blocks of min((|x_i|/c)^2, |x_i|/c)
    PerCoordPowerTail,    // sum over blocks of c*(|x_i|^2 if <=1 else |x_i|^r)
    SeparableQuadLinear,  // sum over blocks of theta_{C,D}(|x_i|)
    Custom,
};

class CostFunction {
public:
    CostKind kind = CostKind::Power;
    int dim = 1;
    int n_blocks = 1;  // per-coordinate kinds split the dimension into equal blocks
    double C = 1.0, D = 1.0, c = 1.0, r = 2.0, L = 1.0;
    std::function<double(const Vec&)> fn;  // Custom only
    bool custom_convex = false;
    bool custom_symmetric = false;

    static CostFunction quad_linear(double C_, double D_, int dim_) {
        require(C_ > 0 && D_ > 0 && dim_ >= 1, "quad_linear: C, D must be positive");
        CostFunction t;
        t.kind = CostKind::QuadLinear;
        t.C = C_;
        t.D = D_;
        t.dim = dim_;
        return t;
    }

    static CostFunction power(double c_, double r_, int dim_) {
        require(c_ > 0 && r_ >= 1 && dim_ >= 1, "power: need c > 0, r >= 1");
        CostFunction t;
        t.kind = CostKind::Power;
        t.c = c_;
        t.r = r_;
        t.dim = dim_;
        return t;
    }

    static CostFunction radial_alpha(double C_, double L_, int dim_) {
        require(C_ > 0 && L_ > 0 && dim_ >= 1, "radial_alpha: C, L must be positive");
        CostFunction t;
        t.kind = CostKind::RadialAlpha;
        t.C = C_;
        t.L = L_;
        t.dim = dim_;
        return t;
    }

    static CostFunction per_coord_quad_linear(double c_, int dim_, int blocks_ = 0) {
        require(c_ > 0 && dim_ >= 1, "per_coord_quad_linear: c must be positive");
        CostFunction t;
        t.kind = CostKind::PerCoordQuadLinear;
        t.c = c_;
        t.dim = dim_;
        t.n_blocks = blocks_ > 0 ? blocks_ : dim_;
        require(dim_ % t.n_blocks == 0, "per_coord_quad_linear: dimension not divisible into blocks");
        return t;
    }

    static CostFunction per_coord_power_tail(double c_, double r_, int dim_, int blocks_ = 0) {
        require(c_ > 0 && r_ >= 2 && dim_ >= 1, "per_coord_power_tail: need c > 0, r >= 2");
        CostFunction t;
        t.kind = CostKind::PerCoordPowerTail;
        t.c = c_;
        t.r = r_;
        t.dim = dim_;
        t.n_blocks = blocks_ > 0 ? blocks_ : dim_;
        require(dim_ % t.n_blocks == 0, "per_coord_power_tail: dimension not divisible into blocks");
        return t;
    }

    static CostFunction separable_quad_linear(double C_, double D_, int dim_, int blocks_ = 0) {
        require(C_ > 0 && D_ > 0 && dim_ >= 1, "separable_quad_linear: C, D must be positive");
        CostFunction t;
        t.kind = CostKind::SeparableQuadLinear;
        t.C = C_;
        t.D = D_;
        t.dim = dim_;
        t.n_blocks = blocks_ > 0 ? blocks_ : dim_;
        require(dim_ % t.n_blocks == 0, "separable_quad_linear: dimension not divisible into blocks");
        return t;
    }

    // Custom costs must declare convexity; declared-convex ones are spot-checked
    // on 100 random midpoints and rejected on failure.
    static CostFunction custom(std::function<double(const Vec&)> f, int dim_, bool convex,
                               bool symmetric) {
        CostFunction t;
        t.kind = CostKind::Custom;
        t.fn = std::move(f);
        t.dim = dim_;
        t.custom_convex = convex;
        t.custom_symmetric = symmetric;
        require(std::abs(t.fn(Vec(static_cast<std::size_t>(dim_), 0.0))) <= 1e-12,
                "custom cost: theta(0) must be 0");
        if (convex) {
            Rng rng = make_rng(20240517);
            for (int s = 0; s < 100; ++s) {
                Vec a = rng.uniform_vec(dim_, -10.0, 10.0);
                Vec b = rng.uniform_vec(dim_, -10.0, 10.0);
                Vec m = scaled(add(a, b), 0.5);
                double lhs = t.fn(m);
                double rhs = 0.5 * (t.fn(a) + t.fn(b));
                require(lhs <= rhs + 1e-12 * (1.0 + std::abs(rhs)),
                        "custom cost: declared convex but midpoint convexity fails");
            }
        }
        return t;
    }

    int dimension() const { return dim; }
    int block_size() const { return dim / n_blocks; }

    bool convex() const {
        switch (kind) {
            case CostKind::PerCoordQuadLinear: return false;  // min(s^2, s) has a concave knot
            case CostKind::Custom: return custom_convex;
            default: return true;
        }
    }

    bool symmetric() const { return kind == CostKind::Custom ? custom_symmetric : true; }

    bool radial() const {
        return kind == CostKind::QuadLinear || kind == CostKind::Power ||
               kind == CostKind::RadialAlpha;
    }

    bool separable() const {
        return kind == CostKind::PerCoordQuadLinear || kind == CostKind::PerCoordPowerTail ||
               kind == CostKind::SeparableQuadLinear;
    }

    // scalar profile of radial kinds, theta(x) = radial_value(|x|)
    double radial_value(double s) const {
        s = std::abs(s);
        switch (kind) {
            case CostKind::QuadLinear:
                return s <= C * D ? s * s / (2.0 * C) : D * s - C * D * D / 2.0;
            case CostKind::Power: return c * std::pow(s, r);
            case CostKind::RadialAlpha:
                return s <= 2.0 * C * L ? s * s / (4.0 * C) : L * s - C * L * L;
            default: throw InputError("radial_value: not a radial cost");
        }
    }

    // derivative of the radial profile (one-sided at 0); all radial kinds are C^1
    double radial_slope(double s) const {
        s = std::abs(s);
        switch (kind) {
            case CostKind::QuadLinear: return s <= C * D ? s / C : D;
            case CostKind::Power: return s == 0.0 && r < 2.0 ? (r == 1.0 ? c : 0.0) : c * r * std::pow(s, r - 1.0);
            case CostKind::RadialAlpha: return s <= 2.0 * C * L ? s / (2.0 * C) : L;
            default: throw InputError("radial_slope: not a radial cost");
        }
    }

    // per-block scalar profile of separable kinds
    double block_value(double s) const {
        s = std::abs(s);
        switch (kind) {
            case CostKind::PerCoordQuadLinear: {
                double u = s / c;
                return std::min(u * u, u);
            }
            case CostKind::PerCoordPowerTail: return c * (s <= 1.0 ? s * s : std::pow(s, r));
            case CostKind::SeparableQuadLinear:
                return s <= C * D ? s * s / (2.0 * C) : D * s - C * D * D / 2.0;
            default: throw InputError("block_value: not a separable cost");
        }
    }

    double eval(const Vec& x) const {
        require(static_cast<int>(x.size()) == dim, "cost eval: dimension mismatch");
        if (radial()) return radial_value(norm2(x));
        if (separable()) {
            const int bs = block_size();
            double total = 0.0;
            for (int b = 0; b < n_blocks; ++b) {
                double ss = 0.0;
                for (int j = 0; j < bs; ++j) {
                    double v = x[static_cast<std::size_t>(b * bs + j)];
                    ss += v * v;
                }
                total += block_value(std::sqrt(ss));
            }
            return total;
        }
        return fn(x);
    }

    double operator()(const Vec& x) const { return eval(x); }

    // Subgradient; radial kinds are C^1 so this is the gradient away from
    // kink-free issues. Used by the Frank-Wolfe linearization.
    Vec gradient(const Vec& x) const {
        require(static_cast<int>(x.size()) == dim, "cost gradient: dimension mismatch");
        Vec g(x.size(), 0.0);
        if (radial()) {
            double n = norm2(x);
            if (n == 0.0) return g;
            double sl = radial_slope(n);
            for (std::size_t i = 0; i < x.size(); ++i) g[i] = sl * x[i] / n;
            return g;
        }
        if (kind == CostKind::SeparableQuadLinear || kind == CostKind::PerCoordPowerTail) {
            const int bs = block_size();
            for (int b = 0; b < n_blocks; ++b) {
                double ss = 0.0;
                for (int j = 0; j < bs; ++j) {
                    double v = x[static_cast<std::size_t>(b * bs + j)];
                    ss += v * v;
                }
                double n = std::sqrt(ss);
                if (n == 0.0) continue;
                double sl;
                if (kind == CostKind::SeparableQuadLinear)
                    sl = n <= C * D ? n / C : D;
                else
                    sl = c * (n <= 1.0 ? 2.0 * n : r * std::pow(n, r - 1.0));
                for (int j = 0; j < bs; ++j) {
                    std::size_t ix = static_cast<std::size_t>(b * bs + j);
                    g[ix] = sl * x[ix] / n;
                }
            }
            return g;
        }
        if (kind == CostKind::Custom) {
            const double h = 1e-6;
            Vec xp = x, xm = x;
            for (std::size_t i = 0; i < x.size(); ++i) {
                xp[i] += h;
                xm[i] -= h;
                g[i] = (fn(xp) - fn(xm)) / (2.0 * h);
                xp[i] = x[i];
                xm[i] = x[i];
            }
            return g;
        }
        throw InputError("cost gradient: unsupported kind");
    }

    std::string kind_name() const {
        switch (kind) {
            case CostKind::QuadLinear: return "quadlinear";
            case CostKind::Power: return "power";
            case CostKind::RadialAlpha: return "radial_alpha";
            case CostKind::PerCoordQuadLinear: return "percoord(minform)";
            case CostKind::PerCoordPowerTail: return "percoord(powertail)";
            case CostKind::SeparableQuadLinear: return "percoord(quadlinear)";
            case CostKind::Custom: return "custom";
        }
        return "?";
    }
};

// ---------------------------------------------------------------------------
// Legendre transforms
// ---------------------------------------------------------------------------

// alpha*(s) for the radial cost of the MLS-to-transport step:
// C s^2 on [-L, L], +inf outside.
inline double legendre_radial_alpha(double C, double L, double s) {
    return std::abs(s) <= L ? C * s * s : kInf;
}

// theta*_{C,D}(y): C|y|^2/2 on |y| <= D, +inf outside.
inline double legendre_quadlinear(double C, double D, double ynorm) {
    ynorm = std::abs(ynorm);
    return ynorm <= D ? C * ynorm * ynorm / 2.0 : kInf;
}

// Numeric conjugate oracle: sup_u { s*u - phi(u) } for an even scalar profile
// phi, by multiplicative scan plus golden refinement. Values past the finite
// branch blow through kDivergenceSentinel instead of returning infinity.
inline double numeric_conjugate(const std::function<double(double)>& phi, double s) {
    const double sa = std::abs(s);
    double best = 0.0, ubest = 0.0;  // u = 0 is always a candidate (phi(0) = 0)
    double u = 1e-9;
    while (u <= 1e12) {
        double v = sa * u - phi(u);
        if (v > best) {
            best = v;
            ubest = u;
        }
        u *= 1.02;
    }
    if (best > 10.0 * kDivergenceSentinel) return best;
    double lo = ubest / 1.05, hi = ubest * 1.05;
    double um = golden_section_min([&](double uu) { return phi(uu) - sa * uu; }, lo, hi, 1e-13);
    return std::max(best, sa * um - phi(um));
}

inline double numeric_conjugate(const CostFunction& theta, double s) {
    return numeric_conjugate([&](double u) { return theta.radial_value(u); }, s);
}

// ---------------------------------------------------------------------------
// Sublevel radii and Orlicz norms
// ---------------------------------------------------------------------------

// sup { s >= 0 : theta(s * dir) <= level } along a unit direction.
inline double sublevel_radius(const CostFunction& theta, double level, Vec dir) {
    require(level > 0.0, "sublevel_radius: level must be positive");
    double n = norm2(dir);
    require(n > 0.0, "sublevel_radius: zero direction");
    for (double& v : dir) v /= n;
    auto val = [&](double s) { return theta.eval(scaled(dir, s)); };
    double hi = 1.0;
    int grow = 0;
    while (val(hi) <= level) {
        hi *= 2.0;
        if (++grow > 2000) throw InputError("sublevel_radius: cost does not blow up along ray");
    }
    double lo = hi / 2.0 > 1.0 ? hi / 2.0 : 0.0;
    return bisect_increasing([&](double s) { return val(s) - level; }, lo, hi, 200);
}

inline double sublevel_radius_scalar(const CostFunction& theta, double level) {
    Vec e(static_cast<std::size_t>(theta.dim), 0.0);
    e[0] = 1.0;
    return sublevel_radius(theta, level, e);
}

// The sublevel body B_theta(r) = { x : theta(x) < r }, seen through its
// directional radius map.
struct SublevelSet {
    CostFunction cost;
    double level = 1.0;

    SublevelSet(CostFunction c, double r) : cost(std::move(c)), level(r) {
        require(level > 0.0, "sublevel set: level must be positive");
    }

    double radius(const Vec& direction) const { return sublevel_radius(cost, level, direction); }

    bool contains(const Vec& x) const { return cost.eval(x) < level; }
};

// Orlicz norm |x|_{theta/p} = inf { a > 0 : theta(x/a) <= p }.
inline double orlicz_norm(const CostFunction& theta, double p, const Vec& x) {
    require(p > 0.0, "orlicz_norm: p must be positive");
    require(static_cast<int>(x.size()) == theta.dim, "orlicz_norm: dimension mismatch");
    if (norm2(x) == 0.0) return 0.0;
    auto g = [&](double a) { return theta.eval(scaled(x, 1.0 / a)); };
    double hi = 1.0;
    int grow = 0;
    while (g(hi) > p) {
        hi *= 2.0;
        if (++grow > 2000) throw InputError("orlicz_norm: no finite bracket");
    }
    double lo = hi;
    grow = 0;
    while (g(lo) <= p && lo > 1e-300) {
        lo /= 2.0;
        ++grow;
        if (grow > 2000) break;
    }
    // theta(x/a) is nonincreasing in a; find the crossing
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        if (g(mid) <= p)
            hi = mid;
        else
            lo = mid;
    }
    return 0.5 * (lo + hi);
}

// ---------------------------------------------------------------------------
// Dual norms |x|^*_{theta,p} = sup { <x,y> : theta(y) <= p }
// ---------------------------------------------------------------------------

struct DualNormResult {
    double value = 0.0;
    bool heuristic = false;
};

namespace detail {

// block Euclidean norms of x under the cost's block structure
inline std::vector<double> block_norms(const CostFunction& theta, const Vec& x) {
    const int bs = theta.block_size();
    std::vector<double> z(static_cast<std::size_t>(theta.n_blocks));
    for (int b = 0; b < theta.n_blocks; ++b) {
        double ss = 0.0;
        for (int j = 0; j < bs; ++j) {
            double v = x[static_cast<std::size_t>(b * bs + j)];
            ss += v * v;
        }
        z[static_cast<std::size_t>(b)] = std::sqrt(ss);
    }
    return z;
}

// max of sum z_i sqrt(b_i) over { sum b_i = budget, 0 <= b_i <= 1 } by
// water-filling: b_i = min(1, (z_i / 2m)^2) with a scalar level m.
inline double capped_sqrt_waterfill(const std::vector<double>& z, double budget) {
    double zmax = 0.0;
    int nonzero = 0;
    for (double v : z) {
        zmax = std::max(zmax, v);
        if (v > 0.0) ++nonzero;
    }
    if (zmax == 0.0 || budget <= 0.0) return 0.0;
    if (budget >= nonzero) {
        return std::accumulate(z.begin(), z.end(), 0.0);
    }
    auto alloc_total = [&](double m) {
        double t = 0.0;
        for (double v : z)
            if (v > 0.0) t += std::min(1.0, (v / (2.0 * m)) * (v / (2.0 * m)));
        return t;
    };
    double lo = zmax / (2.0 * std::sqrt(static_cast<double>(nonzero) * 4.0)) * 1e-8, hi = zmax;
    while (alloc_total(hi) > budget) hi *= 2.0;
    while (alloc_total(lo) < budget && lo > 1e-300) lo /= 2.0;
    for (int it = 0; it < 200; ++it) {
        double m = 0.5 * (lo + hi);
        if (alloc_total(m) >= budget)
            lo = m;
        else
            hi = m;
    }
    double m = 0.5 * (lo + hi);
    std::vector<double> b(z.size());
    double tot = 0.0;
    for (std::size_t i = 0; i < z.size(); ++i) {
        b[i] = z[i] > 0.0 ? std::min(1.0, (z[i] / (2.0 * m)) * (z[i] / (2.0 * m))) : 0.0;
        tot += b[i];
    }
    // rescale onto the budget so the reported value is feasible
    double scale = tot > 0.0 ? budget / tot : 0.0;
    double val = 0.0;
    for (std::size_t i = 0; i < z.size(); ++i) val += z[i] * std::sqrt(std::min(1.0, b[i] * scale));
    return val;
}

// Exact dual norm of the Example-6.7 cost sum_blocks min((|y_b|/c)^2, |y_b|/c).
// In allocation form the per-block gain is h(b) = sqrt(b) for b <= 1 and b
// beyond; at most one block sits on the linear branch (an argmax block).
inline double dual_norm_percoord_minform(const CostFunction& theta, double p, const Vec& x) {
    std::vector<double> z = block_norms(theta, x);
    const double cc = theta.c;
    double best = capped_sqrt_waterfill(z, p);
    if (p >= 1.0 && !z.empty()) {
        std::size_t k = 0;
        for (std::size_t i = 1; i < z.size(); ++i)
            if (z[i] > z[k]) k = i;
        if (z[k] > 0.0) {
            std::vector<double> rest;
            rest.reserve(z.size() - 1);
            for (std::size_t i = 0; i < z.size(); ++i)
                if (i != k) rest.push_back(z[i]);
            auto F = [&](double s) {
                return capped_sqrt_waterfill(rest, s) + z[k] * (p - s);
            };
            double smax = std::min(p - 1.0, static_cast<double>(rest.size()));
            double sstar = golden_section_min([&](double s) { return -F(s); }, 0.0, smax, 1e-12);
            best = std::max(best, std::max(F(sstar), F(0.0)));
        }
    }
    return cc * best;
}

// Exact dual norm of sum_blocks theta_{C,D}(|y_b|). The allocation gain
// Q(b) = sqrt(2Cb) for b <= CD^2/2, (b + CD^2/2)/D beyond is concave with a
// linear tail, so either a Euclidean water level binds or one argmax block
// absorbs the excess budget on the linear branch.
inline double dual_norm_separable_quadlinear(const CostFunction& theta, double p, const Vec& x) {
    std::vector<double> z = block_norms(theta, x);
    const double Cq = theta.C, Dq = theta.D;
    const double bknee = Cq * Dq * Dq / 2.0;
    double zmax = 0.0;
    std::size_t k = 0;
    for (std::size_t i = 0; i < z.size(); ++i)
        if (z[i] > zmax) zmax = z[i], k = i;
    if (zmax == 0.0) return 0.0;
    double z2 = 0.0;
    for (double v : z) z2 += v * v;
    // all-sqrt regime: b_i = C z_i^2 / (2 m^2), total = C z2 / (2 m^2) = p
    double m_unconstrained = std::sqrt(Cq * z2 / (2.0 * p));
    double m_min = zmax / Dq;
    if (m_unconstrained > m_min) {
        return Cq * z2 / m_unconstrained;  // sum z_i sqrt(2C b_i) = C z2 / m
    }
    // saturated: argmax block takes the linear branch
    double used = 0.0, val = 0.0;
    for (std::size_t i = 0; i < z.size(); ++i) {
        if (i == k) continue;
        double b = Cq * z[i] * z[i] / (2.0 * m_min * m_min);
        used += b;
        val += z[i] * std::sqrt(2.0 * Cq * b);
    }
    double bk = p - used;
    val += z[k] * (bk + bknee) / Dq;
    return val;
}

// Exact dual norm of sum_blocks c*(s^2 / s^r) power-tail costs (convex for
// r >= 2): concave allocation with gain Q(b) = sqrt(b/c) then (b/c)^{1/r}.
inline double dual_norm_percoord_powertail(const CostFunction& theta, double p, const Vec& x) {
    std::vector<double> z = block_norms(theta, x);
    const double cc = theta.c, rr = theta.r;
    double zmax = 0.0;
    for (double v : z) zmax = std::max(zmax, v);
    if (zmax == 0.0) return 0.0;
    auto alloc = [&](double m, double zi) {
        if (zi <= 0.0) return 0.0;
        if (m >= zi / (2.0 * cc)) {
            double b = zi * zi / (4.0 * m * m * cc);
            return b;
        }
        if (m > zi / (rr * cc)) return cc;
        return cc * std::pow(zi / (m * rr * cc), rr / (rr - 1.0));
    };
    auto total = [&](double m) {
        double t = 0.0;
        for (double v : z) t += alloc(m, v);
        return t;
    };
    double hi = zmax / (2.0 * cc);
    while (total(hi) > p) hi *= 2.0;
    double lo = hi;
    while (total(lo) < p && lo > 1e-300) lo /= 2.0;
    for (int it = 0; it < 200; ++it) {
        double m = 0.5 * (lo + hi);
        if (total(m) >= p)
            lo = m;
        else
            hi = m;
    }
    double m = 0.5 * (lo + hi);
    std::vector<double> b(z.size());
    double tot = 0.0;
    for (std::size_t i = 0; i < z.size(); ++i) tot += (b[i] = alloc(m, z[i]));
    double scale = tot > 0.0 ? p / tot : 0.0;
    double val = 0.0;
    for (std::size_t i = 0; i < z.size(); ++i) {
        double bi = b[i] * scale;
        double y = bi <= cc ? std::sqrt(bi / cc) : std::pow(bi / cc, 1.0 / rr);
        val += z[i] * y;
    }
    return val;
}

inline double dual_norm_custom_heuristic(const CostFunction& theta, double p, const Vec& x,
                                         std::uint64_t seed) {
    Rng rng = make_rng(seed);
    const int n = theta.dim;
    auto project = [&](Vec y) {
        // radial scaling onto {theta <= p}; valid since theta(0) = 0 and
        // sublevel sets are star-shaped for convex theta
        double v = theta.eval(y);
        if (v <= p) return y;
        double lo = 0.0, hi = 1.0;
        for (int it = 0; it < 100; ++it) {
            double mid = 0.5 * (lo + hi);
            if (theta.eval(scaled(y, mid)) <= p)
                lo = mid;
            else
                hi = mid;
        }
        return scaled(y, lo);
    };
    double best = 0.0;
    for (int start = 0; start < 16; ++start) {
        Vec dir = start == 0 ? x : rng.uniform_vec(n, -1.0, 1.0);
        double nn = norm2(dir);
        if (nn == 0.0) continue;
        Vec y = project(scaled(dir, sublevel_radius(theta, p, dir) / nn));
        double step = 1.0 + norm2(y);
        for (int it = 0; it < 200; ++it) {
            Vec ytry = y;
            axpy(step, x, ytry);
            ytry = project(ytry);
            if (dot(x, ytry) > dot(x, y) + 1e-15)
                y = ytry;
            else
                step *= 0.5;
            if (step < 1e-12) break;
        }
        best = std::max(best, dot(x, y));
    }
    return best;
}

}  // namespace detail

inline DualNormResult dual_norm_result(const CostFunction& theta, double p, const Vec& x,
                                       std::uint64_t seed = kDefaultSeed) {
    require(p > 0.0, "dual_norm: p must be positive");
    require(static_cast<int>(x.size()) == theta.dim, "dual_norm: dimension mismatch");
    require(theta.symmetric(), "dual_norm: cost must be symmetric");
    DualNormResult res;
    if (norm2(x) == 0.0) return res;
    switch (theta.kind) {
        case CostKind::QuadLinear:
        case CostKind::Power:
        case CostKind::RadialAlpha:
            res.value = norm2(x) * sublevel_radius_scalar(theta, p);
            return res;
        case CostKind::PerCoordQuadLinear:
            res.value = detail::dual_norm_percoord_minform(theta, p, x);
            return res;
        case CostKind::SeparableQuadLinear:
            res.value = detail::dual_norm_separable_quadlinear(theta, p, x);
            return res;
        case CostKind::PerCoordPowerTail:
            res.value = detail::dual_norm_percoord_powertail(theta, p, x);
            return res;
        case CostKind::Custom:
            res.value = detail::dual_norm_custom_heuristic(theta, p, x, seed);
            res.heuristic = true;
            return res;
    }
    return res;
}

inline double dual_norm(const CostFunction& theta, double p, const Vec& x) {
    return dual_norm_result(theta, p, x).value;
}

struct NormComparisonReport {
    double lhs = 0.0;  // |x|*_{tp}
    double rhs = 0.0;  // t |x|*_p
    bool holds = false;
};

// |x|*_{tp} <= t |x|*_p for t >= 1
inline NormComparisonReport norm_comparison_check(const CostFunction& theta, double p, double t,
                                                  const Vec& x) {
    require(t >= 1.0, "norm_comparison_check: t must be >= 1");
    NormComparisonReport rep;
    rep.lhs = dual_norm(theta, t * p, x);
    rep.rhs = t * dual_norm(theta, p, x);
    rep.holds = rep.lhs <= rep.rhs + 1e-9;
    return rep;
}

struct RearrangedDualReport {
    double numeric = 0.0;
    double rearranged = 0.0;
    double ratio = 0.0;  // numeric / rearranged
};

// Compares the numeric dual norm of the per-coordinate power-tail cost (r > 2)
// against p^{1/r} |(x*_i)_{i<=p}|_{r*} + sqrt(p) |(x*_i)_{i>p}|, where x* is
// the non-increasing rearrangement of |x_i|. The equivalence constant is
// recorded, not asserted.
inline RearrangedDualReport dual_norm_rearranged(const CostFunction& theta, int p, const Vec& x) {
    require(theta.kind == CostKind::PerCoordPowerTail && theta.r > 2.0,
            "dual_norm_rearranged: needs per-coordinate power-tail cost with r > 2");
    require(theta.block_size() == 1, "dual_norm_rearranged: scalar coordinates expected");
    require(p >= 1 && p <= theta.dim, "dual_norm_rearranged: p must be an integer in [1, n]");
    RearrangedDualReport rep;
    rep.numeric = dual_norm(theta, static_cast<double>(p), x);
    std::vector<double> a(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) a[i] = std::abs(x[i]);
    std::sort(a.begin(), a.end(), std::greater<double>());
    const double rstar = theta.r / (theta.r - 1.0);
    double head = 0.0;
    for (int i = 0; i < p; ++i) head += std::pow(a[static_cast<std::size_t>(i)], rstar);
    head = std::pow(head, 1.0 / rstar);
    double tail = 0.0;
    for (std::size_t i = static_cast<std::size_t>(p); i < a.size(); ++i) tail += a[i] * a[i];
    rep.rearranged = std::pow(static_cast<double>(p), 1.0 / theta.r) * head +
                     std::sqrt(static_cast<double>(p)) * std::sqrt(tail);
    rep.ratio = rep.rearranged > 0.0 ? rep.numeric / rep.rearranged : 0.0;
    return rep;
}

}  // namespace wot
