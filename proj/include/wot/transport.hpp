#pragma once

#include <algorithm>
#include <cmath>
#include <queue>
#include <vector>

#include "wot/common.hpp"
#include "wot/cost.hpp"
#include "wot/measure.hpp"

namespace wot {

constexpr std::size_t kMaxLpCells = 10000;

// Nonnegative m x k matrix with prescribed marginals.
struct Coupling {
    DiscreteMeasure mu;  // rows
    DiscreteMeasure nu;  // columns
    std::vector<double> pi;  // row-major, mu.size() x nu.size()

    double entry(std::size_t i, std::size_t j) const { return pi[i * nu.size() + j]; }

    double marginal_residual() const {
        double worst = 0.0;
        for (std::size_t i = 0; i < mu.size(); ++i) {
            double s = 0.0;
            for (std::size_t j = 0; j < nu.size(); ++j) s += entry(i, j);
            worst = std::max(worst, std::abs(s - mu.weight(i)));
        }
        for (std::size_t j = 0; j < nu.size(); ++j) {
            double s = 0.0;
            for (std::size_t i = 0; i < mu.size(); ++i) s += entry(i, j);
            worst = std::max(worst, std::abs(s - nu.weight(j)));
        }
        return worst;
    }

    // conditional row p_{x_i}(j) = pi_ij / mu_i
    std::vector<double> conditional_row(std::size_t i) const {
        std::vector<double> p(nu.size());
        for (std::size_t j = 0; j < nu.size(); ++j) p[j] = entry(i, j) / mu.weight(i);
        return p;
    }

    // b_i = sum_j y_j p_{x_i}(j)
    Vec barycenter(std::size_t i) const {
        Vec b(static_cast<std::size_t>(nu.dimension()), 0.0);
        for (std::size_t j = 0; j < nu.size(); ++j) axpy(entry(i, j) / mu.weight(i), nu.point(j), b);
        return b;
    }

    std::vector<Vec> barycenters() const {
        std::vector<Vec> b(mu.size());
        for (std::size_t i = 0; i < mu.size(); ++i) b[i] = barycenter(i);
        return b;
    }
};

namespace detail {

// Transportation simplex on the bipartite structure. Northwest-corner start,
// potentials from the basis tree, Bland's rule for entering and leaving cells.
struct TransportLp {
    std::size_t m, k;
    std::vector<double> x;       // plan, row-major
    std::vector<double> u, v;    // potentials
    double cost = 0.0;
    double cs_residual = 0.0;    // complementary slackness / dual feasibility
    int iterations = 0;

    TransportLp(const std::vector<double>& supply, const std::vector<double>& demand,
                const std::vector<double>& c)
        : m(supply.size()), k(demand.size()), x(m * k, 0.0), u(m, 0.0), v(k, 0.0) {
        if (m * k > kMaxLpCells)
            throw ResourceError("standard_ot: instance exceeds the 10^4-cell guard");
        std::vector<char> basic(m * k, 0);

        // northwest corner; m + k - 1 basic cells including degenerate zeros
        {
            std::vector<double> a = supply, b = demand;
            std::size_t i = 0, j = 0;
            while (true) {
                double t = std::min(a[i], b[j]);
                x[i * k + j] = t;
                basic[i * k + j] = 1;
                a[i] -= t;
                b[j] -= t;
                if (i == m - 1 && j == k - 1) break;
                if (a[i] <= 1e-300 && i < m - 1)
                    ++i;
                else
                    ++j;
            }
        }

        double scale = 1.0;
        for (double ci : c) scale = std::max(scale, std::abs(ci));
        const double enter_tol = 1e-12 * scale;
        const int max_pivots = 200000;

        while (true) {
            solve_potentials(basic, c);
            // Bland: first cell (row-major) with negative reduced cost
            std::size_t ei = m, ej = k;
            for (std::size_t i = 0; i < m && ei == m; ++i)
                for (std::size_t j = 0; j < k; ++j) {
                    if (basic[i * k + j]) continue;
                    if (c[i * k + j] - u[i] - v[j] < -enter_tol) {
                        ei = i;
                        ej = j;
                        break;
                    }
                }
            if (ei == m) break;  // optimal
            pivot(basic, ei, ej);
            if (++iterations > max_pivots)
                throw ResourceError("standard_ot: pivot limit exceeded");
        }

        for (std::size_t t = 0; t < m * k; ++t) cost += x[t] * c[t];
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < k; ++j) {
                double rc = c[i * k + j] - u[i] - v[j];
                cs_residual = std::max(cs_residual, std::max(-rc, 0.0));
                cs_residual = std::max(cs_residual, std::abs(x[i * k + j] * rc));
            }
    }

private:
    // nodes 0..m-1 are rows, m..m+k-1 are columns
    void solve_potentials(const std::vector<char>& basic, const std::vector<double>& c) {
        std::vector<std::vector<std::size_t>> adj(m + k);
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < k; ++j)
                if (basic[i * k + j]) {
                    adj[i].push_back(m + j);
                    adj[m + j].push_back(i);
                }
        std::vector<char> seen(m + k, 0);
        std::queue<std::size_t> q;
        u[0] = 0.0;
        seen[0] = 1;
        q.push(0);
        while (!q.empty()) {
            std::size_t n = q.front();
            q.pop();
            for (std::size_t w : adj[n]) {
                if (seen[w]) continue;
                seen[w] = 1;
                if (n < m)
                    v[w - m] = c[n * k + (w - m)] - u[n];
                else
                    u[w] = c[w * k + (n - m)] - v[n - m];
                q.push(w);
            }
        }
    }

    void pivot(std::vector<char>& basic, std::size_t ei, std::size_t ej) {
        // path from column node ej back to row node ei through the basis tree
        std::vector<std::vector<std::size_t>> adj(m + k);
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < k; ++j)
                if (basic[i * k + j]) {
                    adj[i].push_back(m + j);
                    adj[m + j].push_back(i);
                }
        std::vector<std::size_t> parent(m + k, m + k);
        std::vector<char> seen(m + k, 0);
        std::queue<std::size_t> q;
        seen[ei] = 1;
        q.push(ei);
        while (!q.empty()) {
            std::size_t n = q.front();
            q.pop();
            if (n == m + ej) break;
            for (std::size_t w : adj[n])
                if (!seen[w]) {
                    seen[w] = 1;
                    parent[w] = n;
                    q.push(w);
                }
        }
        // cycle cells: entering (+), then alternating along the tree path
        std::vector<std::pair<std::size_t, int>> cycle;  // (cell index, sign)
        cycle.emplace_back(ei * k + ej, +1);
        std::size_t node = m + ej;
        int sign = -1;
        while (node != ei) {
            std::size_t par = parent[node];
            std::size_t cell = node < m ? node * k + (par - m) : par * k + (node - m);
            cycle.emplace_back(cell, sign);
            sign = -sign;
            node = par;
        }
        // Bland leaving rule: min ratio, smallest cell index among minimizers
        double delta = kInf;
        for (auto [cell, sg] : cycle)
            if (sg < 0) delta = std::min(delta, x[cell]);
        std::size_t leave = m * k;
        for (auto [cell, sg] : cycle)
            if (sg < 0 && x[cell] <= delta && leave == m * k) leave = cell;
        for (auto [cell, sg] : cycle) x[cell] = std::max(0.0, x[cell] + sg * delta);
        basic[leave] = 0;
        basic[ei * k + ej] = 1;
    }
};

}  // namespace detail

struct StandardOtResult {
    double cost = 0.0;
    Coupling coupling;
    double cs_residual = 0.0;
    int iterations = 0;
};

inline StandardOtResult standard_ot_matrix(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                                           const std::vector<double>& cost_matrix) {
    detail::TransportLp lp(mu.weights(), nu.weights(), cost_matrix);
    StandardOtResult res{lp.cost, Coupling{mu, nu, lp.x}, lp.cs_residual, lp.iterations};
    return res;
}

// T_theta(mu, nu) = min over couplings of sum pi_ij theta(x_i - y_j).
inline StandardOtResult standard_ot(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                                    const CostFunction& theta) {
    require(mu.dimension() == nu.dimension(), "standard_ot: dimension mismatch");
    require(theta.dim == mu.dimension(), "standard_ot: cost dimension mismatch");
    std::vector<double> c(mu.size() * nu.size());
    for (std::size_t i = 0; i < mu.size(); ++i)
        for (std::size_t j = 0; j < nu.size(); ++j)
            c[i * nu.size() + j] = theta.eval(sub(mu.point(i), nu.point(j)));
    return standard_ot_matrix(mu, nu, c);
}

inline double w2_squared(const DiscreteMeasure& mu0, const DiscreteMeasure& mu1) {
    CostFunction sq = CostFunction::power(1.0, 2.0, mu0.dimension());
    return standard_ot(mu0, mu1, sq).cost;
}

struct BarycentricPlan {
    Coupling coupling;
    std::vector<Vec> barycenters;
    double cost = 0.0;
    double gap = 0.0;  // Frank-Wolfe duality gap at termination
    int iterations = 0;
};

// Weak transport cost T-bar_theta(nu | mu): first marginal mu, conditional
// barycenters toward nu. Convex in pi (b_i affine, theta convex), solved by
// Frank-Wolfe whose linear oracle is a standard transport LP.
inline BarycentricPlan weak_ot(const DiscreteMeasure& nu_target, const DiscreteMeasure& mu_source,
                               const CostFunction& theta, double gap_tol = 1e-8,
                               int max_iter = 10000) {
    require(mu_source.dimension() == nu_target.dimension(), "weak_ot: dimension mismatch");
    require(theta.dim == mu_source.dimension(), "weak_ot: cost dimension mismatch");
    require(theta.convex(), "weak_ot: cost must be convex");
    const DiscreteMeasure& mu = mu_source;
    const DiscreteMeasure& nu = nu_target;
    const std::size_t m = mu.size(), k = nu.size();
    if (m * k > kMaxLpCells) throw ResourceError("weak_ot: instance exceeds the 10^4-cell guard");

    std::vector<double> pi(m * k);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < k; ++j) pi[i * k + j] = mu.weight(i) * nu.weight(j);

    auto barys = [&](const std::vector<double>& plan) {
        std::vector<Vec> b(m, Vec(static_cast<std::size_t>(mu.dimension()), 0.0));
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < k; ++j)
                axpy(plan[i * k + j] / mu.weight(i), nu.point(j), b[i]);
        return b;
    };
    auto objective = [&](const std::vector<Vec>& b) {
        double f = 0.0;
        for (std::size_t i = 0; i < m; ++i) f += mu.weight(i) * theta.eval(sub(mu.point(i), b[i]));
        return f;
    };

    std::vector<Vec> b = barys(pi);
    double fval = objective(b);
    double gap = kInf;
    int it = 0;
    for (; it < max_iter; ++it) {
        // grad_ij = -<grad theta(x_i - b_i), y_j>
        std::vector<Vec> gtheta(m);
        for (std::size_t i = 0; i < m; ++i) gtheta[i] = theta.gradient(sub(mu.point(i), b[i]));
        std::vector<double> lin(m * k);
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < k; ++j) lin[i * k + j] = -dot(gtheta[i], nu.point(j));
        detail::TransportLp lmo(mu.weights(), nu.weights(), lin);
        gap = 0.0;
        for (std::size_t t = 0; t < m * k; ++t) gap += lin[t] * (pi[t] - lmo.x[t]);
        if (gap <= gap_tol) break;

        std::vector<Vec> bs = barys(lmo.x);
        // exact line search on the segment: phi'(gamma) is nondecreasing
        std::vector<Vec> delta(m);
        for (std::size_t i = 0; i < m; ++i) delta[i] = sub(bs[i], b[i]);
        auto dphi = [&](double g) {
            double d = 0.0;
            for (std::size_t i = 0; i < m; ++i) {
                Vec z = sub(mu.point(i), b[i]);
                axpy(-g, delta[i], z);
                d -= mu.weight(i) * dot(theta.gradient(z), delta[i]);
            }
            return d;
        };
        double gamma = 1.0;
        if (dphi(1.0) > 0.0) {
            double lo = 0.0, hi = 1.0;
            for (int bs_it = 0; bs_it < 100; ++bs_it) {
                double mid = 0.5 * (lo + hi);
                if (dphi(mid) <= 0.0)
                    lo = mid;
                else
                    hi = mid;
            }
            gamma = 0.5 * (lo + hi);
        }
        for (std::size_t t = 0; t < m * k; ++t) pi[t] += gamma * (lmo.x[t] - pi[t]);
        b = barys(pi);
        double fnew = objective(b);
        fval = std::min(fval, fnew);
    }

    return BarycentricPlan{Coupling{mu, nu, pi}, b, objective(b), gap, it};
}

// Independent dense-grid oracle over the coupling polytope; test use only.
// Free entries are the top-left (m-1) x (k-1) block; the rest is forced by
// the marginals. Grid pass then coordinate refinement down to 1e-6.
inline double weak_ot_bruteforce(const DiscreteMeasure& nu_target,
                                 const DiscreteMeasure& mu_source, const CostFunction& theta) {
    const DiscreteMeasure& mu = mu_source;
    const DiscreteMeasure& nu = nu_target;
    const std::size_t m = mu.size(), k = nu.size();
    require(m <= 3 && k <= 3, "weak_ot_bruteforce: size guard (m, k <= 3)");

    const std::size_t fm = m - 1, fk = k - 1;
    const std::size_t nfree = fm * fk;

    auto complete = [&](const std::vector<double>& free_entries, std::vector<double>& pi) {
        // returns false if infeasible
        for (std::size_t i = 0; i < fm; ++i)
            for (std::size_t j = 0; j < fk; ++j) pi[i * k + j] = free_entries[i * fk + j];
        for (std::size_t i = 0; i < fm; ++i) {
            double s = 0.0;
            for (std::size_t j = 0; j < fk; ++j) s += pi[i * k + j];
            double rest = mu.weight(i) - s;
            if (rest < -1e-12) return false;
            pi[i * k + (k - 1)] = std::max(rest, 0.0);
        }
        for (std::size_t j = 0; j < k; ++j) {
            double s = 0.0;
            for (std::size_t i = 0; i < fm; ++i) s += pi[i * k + j];
            double rest = nu.weight(j) - s;
            if (rest < -1e-12) return false;
            if (j < k - 1) pi[(m - 1) * k + j] = std::max(rest, 0.0);
        }
        double s = 0.0;
        for (std::size_t j = 0; j < fk; ++j) s += pi[(m - 1) * k + j];
        double corner = mu.weight(m - 1) - s;
        if (corner < -1e-12) return false;
        pi[(m - 1) * k + (k - 1)] = std::max(corner, 0.0);
        return true;
    };

    std::vector<double> pi(m * k, 0.0);
    auto eval_free = [&](const std::vector<double>& fe) {
        if (!complete(fe, pi)) return kInf;
        double f = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            Vec b(static_cast<std::size_t>(mu.dimension()), 0.0);
            for (std::size_t j = 0; j < k; ++j) axpy(pi[i * k + j] / mu.weight(i), nu.point(j), b);
            f += mu.weight(i) * theta.eval(sub(mu.point(i), b));
        }
        return f;
    };

    std::vector<double> ub(nfree);
    for (std::size_t i = 0; i < fm; ++i)
        for (std::size_t j = 0; j < fk; ++j)
            ub[i * fk + j] = std::min(mu.weight(i), nu.weight(j));

    if (nfree == 0) return eval_free({});

    // dense pass: step ~1e-3 for <= 2 free dims, coarser lattice beyond
    std::size_t steps = nfree <= 2 ? 1000 : 24;
    std::vector<double> best_fe(nfree, 0.0);
    double best = kInf;
    std::vector<std::size_t> idx(nfree, 0);
    std::vector<double> fe(nfree);
    while (true) {
        for (std::size_t d = 0; d < nfree; ++d)
            fe[d] = ub[d] * static_cast<double>(idx[d]) / static_cast<double>(steps);
        double val = eval_free(fe);
        if (val < best) {
            best = val;
            best_fe = fe;
        }
        std::size_t d = 0;
        while (d < nfree && ++idx[d] > steps) {
            idx[d] = 0;
            ++d;
        }
        if (d == nfree) break;
    }

    // local refinement to 1e-6 resolution; paired moves cover the diagonal
    // facets of the polytope where single-coordinate steps stall
    double step = *std::max_element(ub.begin(), ub.end()) / static_cast<double>(steps);
    while (step > 1e-7) {
        bool improved = false;
        auto attempt = [&](const std::vector<double>& trial) {
            double val = eval_free(trial);
            if (val < best - 1e-15) {
                best = val;
                best_fe = trial;
                improved = true;
            }
        };
        for (std::size_t d = 0; d < nfree; ++d) {
            for (double sgn : {+1.0, -1.0}) {
                std::vector<double> trial = best_fe;
                trial[d] = std::clamp(trial[d] + sgn * step, 0.0, ub[d]);
                attempt(trial);
            }
        }
        for (std::size_t d1 = 0; d1 + 1 < nfree; ++d1)
            for (std::size_t d2 = d1 + 1; d2 < nfree; ++d2)
                for (double s1 : {+1.0, -1.0})
                    for (double s2 : {+1.0, -1.0}) {
                        std::vector<double> trial = best_fe;
                        trial[d1] = std::clamp(trial[d1] + s1 * step, 0.0, ub[d1]);
                        trial[d2] = std::clamp(trial[d2] + s2 * step, 0.0, ub[d2]);
                        attempt(trial);
                    }
        if (!improved) step *= 0.5;
    }
    return best;
}

struct TransportIneqReport {
    int checked = 0;
    int vacuous = 0;  // infinite-entropy targets
    int tplus_violations = 0;
    int tminus_violations = 0;
    double worst_plus_slack = kInf;   // min over instances of H - Tbar(nu|mu)
    double worst_minus_slack = kInf;  // min over instances of H - Tbar(mu|nu)
    double worst_ratio_plus = 0.0;    // max Tbar(nu|mu) / H
    double worst_ratio_minus = 0.0;
};

// For each nu: Tbar(nu|mu) <= H(nu|mu) (T+) and Tbar(mu|nu) <= H(nu|mu) (T-).
inline TransportIneqReport check_weak_transport_inequalities(
    const DiscreteMeasure& mu, const CostFunction& theta,
    const std::vector<DiscreteMeasure>& nu_family, double tol = 1e-8) {
    TransportIneqReport rep;
    for (const auto& nu : nu_family) {
        double h = relative_entropy(nu, mu);
        ++rep.checked;
        if (!std::isfinite(h)) {
            ++rep.vacuous;
            continue;
        }
        double tp = weak_ot(nu, mu, theta).cost;
        double tm = weak_ot(mu, nu, theta).cost;
        rep.worst_plus_slack = std::min(rep.worst_plus_slack, h - tp);
        rep.worst_minus_slack = std::min(rep.worst_minus_slack, h - tm);
        if (h > 0.0) {
            rep.worst_ratio_plus = std::max(rep.worst_ratio_plus, tp / h);
            rep.worst_ratio_minus = std::max(rep.worst_ratio_minus, tm / h);
        }
        if (tp > h + tol) ++rep.tplus_violations;
        if (tm > h + tol) ++rep.tminus_violations;
    }
    return rep;
}

}  // namespace wot
