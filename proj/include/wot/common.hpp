#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace wot {

using Vec = std::vector<double>;

constexpr double kInf = std::numeric_limits<double>::infinity();

// Sentinel used only when comparing closed-form Legendre transforms against
// numeric conjugate oracles; never enters library arithmetic.
constexpr double kDivergenceSentinel = 1e6;

// Thrown on malformed or out-of-contract inputs (CLI exit code 2).
struct InputError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Thrown when a size/iteration guard trips (CLI exit code 3).
struct ResourceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline void require(bool cond, const std::string& msg) {
    if (!cond) throw InputError(msg);
}

// ---------------------------------------------------------------------------
// Small dense-vector helpers. Dimensions stay tiny (couplings, grids <= 3D),
// so plain std::vector<double> is the right carrier.
// ---------------------------------------------------------------------------

inline double dot(const Vec& a, const Vec& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double norm2(const Vec& a) { return std::sqrt(dot(a, a)); }

inline Vec sub(const Vec& a, const Vec& b) {
    Vec r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
    return r;
}

inline Vec add(const Vec& a, const Vec& b) {
    Vec r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
    return r;
}

inline Vec scaled(const Vec& a, double c) {
    Vec r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = c * a[i];
    return r;
}

inline void axpy(double c, const Vec& x, Vec& y) {
    for (std::size_t i = 0; i < x.size(); ++i) y[i] += c * x[i];
}

inline double max_abs(const Vec& a) {
    double m = 0.0;
    for (double v : a) m = std::max(m, std::abs(v));
    return m;
}

inline bool all_finite(const Vec& a) {
    for (double v : a)
        if (!std::isfinite(v)) return false;
    return true;
}

// ---------------------------------------------------------------------------
// Deterministic RNG. mt19937_64 with a hand-rolled uniform mapping so that
// streams do not depend on libstdc++'s distribution internals.
// ---------------------------------------------------------------------------

class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next_u64() { return gen_(); }

    double uniform01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    // inclusive bounds
    int uniform_int(int lo, int hi) {
        const int span = hi - lo + 1;
        int v = lo + static_cast<int>(uniform01() * span);
        return std::min(v, hi);
    }

    Vec uniform_vec(int n, double lo, double hi) {
        Vec v(static_cast<std::size_t>(n));
        for (double& x : v) x = uniform(lo, hi);
        return v;
    }

    // derive an independent stream for instance `idx` of a sweep
    Rng fork(std::uint64_t idx) const {
        std::uint64_t z = seed_mix_ + 0x9e3779b97f4a7c15ULL * (idx + 1);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return Rng(z ^ (z >> 31));
    }

    void note_seed(std::uint64_t s) { seed_mix_ = s; }

private:
    std::mt19937_64 gen_;
    std::uint64_t seed_mix_ = 0;
};

inline Rng make_rng(std::uint64_t seed) {
    Rng r(seed);
    r.note_seed(seed);
    return r;
}

constexpr std::uint64_t kDefaultSeed = 0xC0FFEE;

// ---------------------------------------------------------------------------
// 1D minimization: golden-section on [a, b]. Assumes unimodal (convex) input.
// ---------------------------------------------------------------------------

template <class F>
double golden_section_min(F&& f, double a, double b, double tol = 1e-12, int max_iter = 200) {
    static const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = b - invphi * (b - a);
    double x2 = a + invphi * (b - a);
    double f1 = f(x1), f2 = f(x2);
    for (int it = 0; it < max_iter && (b - a) > tol; ++it) {
        if (f1 <= f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - invphi * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + invphi * (b - a);
            f2 = f(x2);
        }
    }
    return 0.5 * (a + b);
}

// Root of a monotone nondecreasing g on [lo, hi] with g(lo) <= 0 <= g(hi).
template <class F>
double bisect_increasing(F&& g, double lo, double hi, int iters = 200) {
    for (int it = 0; it < iters; ++it) {
        double mid = 0.5 * (lo + hi);
        if (g(mid) <= 0.0)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace wot
