#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>
#include <vector>

#include "wot/common.hpp"

namespace wot {

// Finitely supported probability measure on R^n. Atoms are normalized at
// construction: zero-weight atoms dropped, duplicates merged (weights summed),
// support sorted lexicographically so equal measures have equal representation.
class DiscreteMeasure {
public:
    DiscreteMeasure(int dimension, std::vector<Vec> points, std::vector<double> weights)
        : dim_(dimension) {
        require(dimension >= 1, "measure: dimension must be >= 1");
        require(points.size() == weights.size(), "measure: points/weights length mismatch");
        require(!points.empty(), "measure: needs at least one atom");
        for (const auto& p : points) {
            require(static_cast<int>(p.size()) == dimension, "measure: point dimension mismatch");
            require(all_finite(p), "measure: non-finite point coordinate");
        }
        double total = 0.0;
        for (double w : weights) {
            require(std::isfinite(w) && w >= 0.0, "measure: weights must be nonnegative");
            total += w;
        }
        require(std::abs(total - 1.0) <= 1e-12, "measure: weights must sum to 1 within 1e-12");

        std::map<Vec, double> merged;
        for (std::size_t i = 0; i < points.size(); ++i) {
            if (weights[i] == 0.0) continue;
            merged[points[i]] += weights[i];
        }
        require(!merged.empty(), "measure: all atoms have zero weight");
        points_.reserve(merged.size());
        weights_.reserve(merged.size());
        for (auto& [p, w] : merged) {
            points_.push_back(p);
            weights_.push_back(w);
        }
    }

    static DiscreteMeasure uniform(int dimension, std::vector<Vec> points) {
        std::vector<double> w(points.size(), 1.0 / static_cast<double>(points.size()));
        return DiscreteMeasure(dimension, std::move(points), std::move(w));
    }

    static DiscreteMeasure dirac(Vec point) {
        int d = static_cast<int>(point.size());
        return DiscreteMeasure(d, {std::move(point)}, {1.0});
    }

    int dimension() const { return dim_; }
    std::size_t size() const { return points_.size(); }
    const Vec& point(std::size_t i) const { return points_[i]; }
    double weight(std::size_t i) const { return weights_[i]; }
    const std::vector<Vec>& points() const { return points_; }
    const std::vector<double>& weights() const { return weights_; }

    double mean_of(const std::function<double(const Vec&)>& f) const {
        double s = 0.0;
        for (std::size_t i = 0; i < size(); ++i) s += weights_[i] * f(points_[i]);
        return s;
    }

    Vec mean_point() const {
        Vec m(static_cast<std::size_t>(dim_), 0.0);
        for (std::size_t i = 0; i < size(); ++i) axpy(weights_[i], points_[i], m);
        return m;
    }

    bool same_support(const DiscreteMeasure& other, double tol = 1e-9) const {
        if (dim_ != other.dim_ || size() != other.size()) return false;
        for (std::size_t i = 0; i < size(); ++i)
            if (max_abs(sub(points_[i], other.points_[i])) > tol) return false;
        return true;
    }

private:
    int dim_;
    std::vector<Vec> points_;
    std::vector<double> weights_;
};

struct PushforwardStats {
    std::vector<double> values;
    double mean = 0.0;
    double variance = 0.0;
    double median = 0.0;
};

// Median of a finite law with the inf convention:
// Med = inf { t : P(Y <= t) >= 1/2 }. The 1e-12 slack absorbs cumsum roundoff
// on exact-half ties (e.g. Bernoulli(1/2)).
inline double weighted_median(std::vector<double> values, std::vector<double> weights) {
    std::vector<std::size_t> idx(values.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    double cum = 0.0;
    for (std::size_t r : idx) {
        cum += weights[r];
        if (cum >= 0.5 - 1e-12) return values[r];
    }
    return values[idx.back()];
}

inline PushforwardStats pushforward_stats(const DiscreteMeasure& mu,
                                          const std::function<double(const Vec&)>& f) {
    PushforwardStats st;
    st.values.reserve(mu.size());
    for (std::size_t i = 0; i < mu.size(); ++i) {
        double v = f(mu.point(i));
        require(std::isfinite(v), "pushforward: f not finite on support");
        st.values.push_back(v);
    }
    for (std::size_t i = 0; i < mu.size(); ++i) st.mean += mu.weight(i) * st.values[i];
    for (std::size_t i = 0; i < mu.size(); ++i) {
        double d = st.values[i] - st.mean;
        st.variance += mu.weight(i) * d * d;
    }
    st.median = weighted_median(st.values, mu.weights());
    return st;
}

// Relative entropy H(nu|mu) = sum nu_i log(nu_i / mu_j(i)); +inf when some
// nu-atom has no mu-atom within `match_tol` (coordinate-wise).
inline double relative_entropy(const DiscreteMeasure& nu, const DiscreteMeasure& mu,
                               double match_tol = 1e-9) {
    require(nu.dimension() == mu.dimension(), "relative_entropy: dimension mismatch");
    double h = 0.0;
    for (std::size_t i = 0; i < nu.size(); ++i) {
        double mu_w = -1.0;
        for (std::size_t j = 0; j < mu.size(); ++j) {
            if (max_abs(sub(nu.point(i), mu.point(j))) <= match_tol) {
                mu_w = mu.weight(j);
                break;
            }
        }
        if (mu_w <= 0.0) return kInf;
        h += nu.weight(i) * std::log(nu.weight(i) / mu_w);
    }
    return std::max(h, 0.0);
}

// Ent(g) = E g log g - (E g) log(E g), with 0 log 0 = 0.
inline double entropy_functional(const DiscreteMeasure& mu,
                                 const std::function<double(const Vec&)>& g) {
    double eg = 0.0, eglogg = 0.0;
    for (std::size_t i = 0; i < mu.size(); ++i) {
        double v = g(mu.point(i));
        require(v >= 0.0, "entropy_functional: g must be nonnegative on support");
        eg += mu.weight(i) * v;
        if (v > 0.0) eglogg += mu.weight(i) * v * std::log(v);
    }
    if (eg <= 0.0) return 0.0;
    return std::max(eglogg - eg * std::log(eg), 0.0);
}

struct MedianVarianceReport {
    double lhs = 0.0;  // E (f - Med f)^2
    double rhs = 0.0;  // 2 Var f
    bool holds = false;
};

inline MedianVarianceReport median_variance_check(const DiscreteMeasure& mu,
                                                  const std::function<double(const Vec&)>& f) {
    auto st = pushforward_stats(mu, f);
    MedianVarianceReport rep;
    for (std::size_t i = 0; i < mu.size(); ++i) {
        double d = st.values[i] - st.median;
        rep.lhs += mu.weight(i) * d * d;
    }
    rep.rhs = 2.0 * st.variance;
    rep.holds = rep.lhs <= rep.rhs * (1.0 + 1e-12) + 1e-15;
    return rep;
}

// Smallest M among {|x_i - EX|} with mu(|x - EX| <= M) >= q.
inline double quantile_radius(const DiscreteMeasure& mu, double q) {
    require(q > 0.0 && q < 1.0, "quantile_radius: q must lie in (0,1)");
    Vec m = mu.mean_point();
    std::vector<double> d(mu.size());
    for (std::size_t i = 0; i < mu.size(); ++i) d[i] = norm2(sub(mu.point(i), m));
    std::vector<std::size_t> idx(d.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return d[a] < d[b]; });
    double cum = 0.0;
    for (std::size_t r : idx) {
        cum += mu.weight(r);
        if (cum >= q - 1e-12) return d[r];
    }
    return d[idx.back()];
}

inline DiscreteMeasure product_measure(const DiscreteMeasure& mu1, const DiscreteMeasure& mu2) {
    std::vector<Vec> pts;
    std::vector<double> w;
    pts.reserve(mu1.size() * mu2.size());
    for (std::size_t i = 0; i < mu1.size(); ++i) {
        for (std::size_t j = 0; j < mu2.size(); ++j) {
            Vec p = mu1.point(i);
            p.insert(p.end(), mu2.point(j).begin(), mu2.point(j).end());
            pts.push_back(std::move(p));
            w.push_back(mu1.weight(i) * mu2.weight(j));
        }
    }
    return DiscreteMeasure(mu1.dimension() + mu2.dimension(), std::move(pts), std::move(w));
}

inline DiscreteMeasure product_power(const DiscreteMeasure& mu, int n) {
    require(n >= 1, "product_power: n must be >= 1");
    DiscreteMeasure out = mu;
    for (int i = 1; i < n; ++i) out = product_measure(out, mu);
    return out;
}

// mu_p = p*mu1 + (1-p)*mu0 with duplicate atoms merged.
inline DiscreteMeasure mixture(const DiscreteMeasure& mu0, const DiscreteMeasure& mu1, double p) {
    require(mu0.dimension() == mu1.dimension(), "mixture: dimension mismatch");
    require(p > 0.0 && p < 1.0, "mixture: p must lie in (0,1)");
    std::vector<Vec> pts;
    std::vector<double> w;
    for (std::size_t i = 0; i < mu1.size(); ++i) {
        pts.push_back(mu1.point(i));
        w.push_back(p * mu1.weight(i));
    }
    for (std::size_t i = 0; i < mu0.size(); ++i) {
        pts.push_back(mu0.point(i));
        w.push_back((1.0 - p) * mu0.weight(i));
    }
    return DiscreteMeasure(mu0.dimension(), std::move(pts), std::move(w));
}

}  // namespace wot
