// wot: file-driven computations, verification sweeps, constant pipelines.
//
// Exit codes: 0 success, 1 verification violations, 2 input error,
// 3 resource guard.

#include <atomic>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "wot/wot.hpp"

namespace {

constexpr const char* kVersion = "0.1.0";

using wot::json;

struct Ctx {
    std::uint64_t seed = wot::kDefaultSeed;
    std::string output;
    std::string format = "json";
    std::string plot_data;
    int jobs = 1;
    std::vector<std::string> tolerance_kv;
    std::map<std::string, double> tolerances;
    json inputs = json::object();

    double tol(const std::string& key, double fallback) const {
        auto it = tolerances.find(key);
        return it == tolerances.end() ? fallback : it->second;
    }

    void parse_tolerances() {
        for (const auto& kv : tolerance_kv) {
            auto eq = kv.find('=');
            wot::require(eq != std::string::npos, "--tolerance expects key=value: " + kv);
            tolerances[kv.substr(0, eq)] = std::stod(kv.substr(eq + 1));
        }
    }

    json load(const std::string& path) {
        json j = wot::load_json_file(path);
        inputs[path] = wot::file_digest(path);
        return j;
    }
};

void add_common(CLI::App* cmd, Ctx& ctx) {
    cmd->add_option("--seed", ctx.seed, "RNG seed (default 0xC0FFEE)");
    cmd->add_option("--output", ctx.output, "write the report to this path as well");
    cmd->add_option("--format", ctx.format, "json|csv")->check(CLI::IsMember({"json", "csv"}));
    cmd->add_option("--tolerance", ctx.tolerance_kv, "override a named tolerance, key=value");
    cmd->add_option("--jobs", ctx.jobs, "parallel workers for sweeps")->check(CLI::PositiveNumber);
    cmd->add_option("--plot-data", ctx.plot_data, "emit CSV curve data to this path");
}

void emit_csv(std::ostream& os, const json& j, const std::string& prefix) {
    if (j.is_object()) {
        for (auto it = j.begin(); it != j.end(); ++it)
            emit_csv(os, it.value(), prefix.empty() ? it.key() : prefix + "." + it.key());
    } else if (j.is_array()) {
        for (std::size_t i = 0; i < j.size(); ++i)
            emit_csv(os, j[i], prefix + "[" + std::to_string(i) + "]");
    } else {
        os << prefix << "," << j.dump() << "\n";
    }
}

int emit(const Ctx& ctx, const std::string& command, const json& results, bool violated) {
    json report;
    report["schema"] = 1;
    report["version"] = kVersion;
    report["command"] = command;
    report["seed"] = ctx.seed;
    report["inputs"] = ctx.inputs;
    report["results"] = results;
    std::ostringstream body;
    if (ctx.format == "json")
        body << report.dump(2) << "\n";
    else
        emit_csv(body, report, "");
    std::cout << body.str();
    if (!ctx.output.empty()) {
        std::ofstream out(ctx.output, std::ios::binary);
        wot::require(out.good(), "cannot open output file: " + ctx.output);
        out << body.str();
    }
    return violated ? 1 : 0;
}

// deterministic parallel sweep: results land by index, merged in order
template <class Fn>
void parallel_for(int n, int jobs, Fn&& fn) {
    if (jobs <= 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    for (int w = 0; w < jobs; ++w)
        pool.emplace_back([&] {
            for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
        });
    for (auto& t : pool) t.join();
}

wot::Vec parse_vec(const std::string& s) {
    wot::Vec v;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) v.push_back(std::stod(tok));
    wot::require(!v.empty(), "empty vector literal");
    return v;
}

json report_to_json(const wot::VerificationReport& rep) {
    json j;
    j["id"] = rep.id;
    j["instances"] = rep.instances;
    j["worst_slack"] = rep.worst_slack;
    j["violations"] = json::array();
    for (const auto& v : rep.violations)
        j["violations"].push_back(
            {{"what", v.what}, {"lhs", v.lhs}, {"rhs", v.rhs}, {"instance", v.instance}});
    return j;
}

json cost_params_json(const wot::CostParams& p) {
    return json{{"twoC", p.twoC}, {"c", p.c}};
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"numerical toolkit for weak transport costs, Hopf-Lax semigroups, and "
                 "convex-Poincare constants on discrete measures"};
    app.require_subcommand(1);
    Ctx ctx;

    std::string mu_path, nu_path, cost_path, fn_path, a_path, b_path, plan_path;
    double p_par = 1.0, t_par = 1.0, s_par = 1.0, lambda = 1.0, c_par = 0.1, M_par = -1.0;
    double lambda0 = 1.0, lambda1 = 1.0, w2sq = -1.0, osc = 0.0, level = 1.0, tpar2 = 0.0;
    int n_par = 0, pieces = 2, restarts = 64, sweep = 0, levels = 3;
    std::string x_lit, grid_lit, branch = "minus", bound_kind;

    // ---- entropy ----
    auto* c_ent = app.add_subcommand("entropy", "relative entropy H(nu|mu)");
    c_ent->add_option("--nu", nu_path)->required();
    c_ent->add_option("--mu", mu_path)->required();
    add_common(c_ent, ctx);

    // ---- ot ----
    auto* c_ot = app.add_subcommand("ot", "optimal transport costs");
    auto* c_ot_std = c_ot->add_subcommand("standard", "standard OT cost (exact LP)");
    auto* c_ot_weak = c_ot->add_subcommand("weak", "weak barycentric transport cost");
    for (auto* c : {c_ot_std, c_ot_weak}) {
        c->add_option("--from", mu_path, "source measure (outer integral)")->required();
        c->add_option("--to", nu_path, "target measure")->required();
        c->add_option("--cost", cost_path)->required();
        c->add_option("--plan", plan_path, "export the plan JSON to this path");
        add_common(c, ctx);
    }

    // ---- w2 ----
    auto* c_w2 = app.add_subcommand("w2", "squared Kantorovich W2 distance");
    c_w2->add_option("--a", a_path)->required();
    c_w2->add_option("--b", b_path)->required();
    add_common(c_w2, ctx);

    // ---- norm ----
    auto* c_norm = app.add_subcommand("norm", "Orlicz and dual norms");
    auto* c_norm_o = c_norm->add_subcommand("orlicz", "|x|_{theta/p}");
    auto* c_norm_d = c_norm->add_subcommand("dual", "|x|*_{theta,p}");
    for (auto* c : {c_norm_o, c_norm_d}) {
        c->add_option("--cost", cost_path)->required();
        c->add_option("--p", p_par)->required();
        c->add_option("--x", x_lit, "comma-separated coordinates")->required();
        add_common(c, ctx);
    }

    // ---- cost ----
    auto* c_cost = app.add_subcommand("cost", "cost evaluation and Legendre transforms");
    auto* c_cost_e = c_cost->add_subcommand("eval", "theta(x)");
    c_cost_e->add_option("--cost", cost_path)->required();
    c_cost_e->add_option("--x", x_lit)->required();
    add_common(c_cost_e, ctx);
    auto* c_cost_l = c_cost->add_subcommand("legendre", "closed-form conjugate + numeric cross-check");
    c_cost_l->add_option("--cost", cost_path)->required();
    c_cost_l->add_option("--s", s_par, "scalar argument")->required();
    add_common(c_cost_l, ctx);

    // ---- hopflax ----
    auto* c_hl = app.add_subcommand("hopflax", "infimum-convolution operator and verifiers");
    auto* c_hl_e = c_hl->add_subcommand("eval", "Q_t f(x)");
    c_hl_e->add_option("--function", fn_path)->required();
    c_hl_e->add_option("--cost", cost_path)->required();
    c_hl_e->add_option("--t", t_par)->required();
    c_hl_e->add_option("--x", x_lit)->required();
    add_common(c_hl_e, ctx);
    auto* c_hl_s = c_hl->add_subcommand("semigroup", "Q_t Q_s vs Q_{t+s} defect on a grid");
    c_hl_s->add_option("--function", fn_path)->required();
    c_hl_s->add_option("--cost", cost_path)->required();
    c_hl_s->add_option("--s", s_par)->required();
    c_hl_s->add_option("--t", t_par)->required();
    c_hl_s->add_option("--grid", grid_lit, "lo,hi,h (1D)")->required();
    add_common(c_hl_s, ctx);
    auto* c_hl_r = c_hl->add_subcommand("residual", "Hamilton-Jacobi residual statistics");
    c_hl_r->add_option("--function", fn_path)->required();
    c_hl_r->add_option("--cost", cost_path, "radial_alpha cost")->required();
    c_hl_r->add_option("--t0", t_par, "center of the time stencil")->required();
    c_hl_r->add_option("--grid", grid_lit, "lo,hi,h (1D)")->required();
    c_hl_r->add_option("--levels", levels, "time levels (odd, >= 3)");
    add_common(c_hl_r, ctx);

    // ---- poincare ----
    auto* c_poi = app.add_subcommand("poincare", "convex Poincare constant estimation");
    auto* c_poi_e = c_poi->add_subcommand("estimate", "maximize Var f / E|grad f|^2");
    c_poi_e->add_option("--measure", mu_path)->required();
    c_poi_e->add_option("--pieces", pieces);
    c_poi_e->add_option("--restarts", restarts);
    add_common(c_poi_e, ctx);

    // ---- verify ----
    auto* c_ver = app.add_subcommand("verify", "inequality verification (exit 1 on violation)");
    CLI::App* vsub[7];
    const char* vnames[7] = {"dual-t+", "dual-t-", "ic2", "mls-convex", "mls-concave",
                             "transport", "concentration"};
    for (int i = 0; i < 7; ++i) {
        vsub[i] = c_ver->add_subcommand(vnames[i]);
        vsub[i]->add_option("--measure", mu_path, "measure JSON (default: Bernoulli(1/2) on {0,1})");
        vsub[i]->add_option("--lambda", lambda, "certified Poincare constant")->required();
        vsub[i]->add_option("--c", c_par, "slope cap");
        vsub[i]->add_option("--M", M_par, "3/4-quantile radius (plus branch)");
        vsub[i]->add_option("--sweep", sweep, "number of seeded random instances");
        vsub[i]->add_option("--function", fn_path, "single max-affine test function");
        vsub[i]->add_option("--cost", cost_path, "explicit cost (otherwise pipeline)");
        vsub[i]->add_option("--p", p_par, "p for concentration checks");
        add_common(vsub[i], ctx);
    }

    // ---- constants ----
    auto* c_con = app.add_subcommand("constants", "closed-form constant calculators");
    auto* c_con_p = c_con->add_subcommand("pipeline", "full derived-constant map");
    c_con_p->add_option("--lambda", lambda)->required();
    c_con_p->add_option("--c", c_par)->required();
    c_con_p->add_option("--M", M_par);
    c_con_p->add_option("--n", n_par, "dimension for the default M = 2 sqrt(n/lambda)");
    add_common(c_con_p, ctx);
    auto* c_con_t = c_con->add_subcommand("tensorize", "product-measure constant");
    c_con_t->add_option("--lambda", lambda)->required();
    add_common(c_con_t, ctx);
    auto* c_con_m = c_con->add_subcommand("mixture", "two-component mixture constant");
    c_con_m->add_option("--lambda0", lambda0)->required();
    c_con_m->add_option("--lambda1", lambda1)->required();
    c_con_m->add_option("--w2sq", w2sq, "squared W2 distance (else give --a/--b)");
    c_con_m->add_option("--a", a_path);
    c_con_m->add_option("--b", b_path);
    add_common(c_con_m, ctx);
    auto* c_con_x = c_con->add_subcommand("perturb", "density-perturbation constant");
    c_con_x->add_option("--lambda", lambda)->required();
    c_con_x->add_option("--osc", osc, "sup U - inf U")->required();
    add_common(c_con_x, ctx);

    // ---- bounds ----
    auto* c_bnd = app.add_subcommand("bounds", "closed-form tail/moment calculators");
    c_bnd->add_option("kind", bound_kind,
                      "upper_tail|moment_upper|lower_tail|enlargement|lipschitz_conc|"
                      "selfnorm_moment|nonlip_lower|nonlip_lower_quantile|lower_lp|moment_quantile")
        ->required();
    c_bnd->add_option("--lambda", lambda);
    c_bnd->add_option("--L", level);
    c_bnd->add_option("--t", t_par);
    c_bnd->add_option("--p", p_par);
    c_bnd->add_option("--M", M_par);
    c_bnd->add_option("--G", tpar2, "E|grad f| or E|grad f|* as the formula requires");
    c_bnd->add_option("--q", s_par);
    c_bnd->add_option("--muA", w2sq);
    c_bnd->add_option("--r", osc);
    c_bnd->add_option("--norm-p", lambda0);
    c_bnd->add_option("--measure", mu_path, "measure for exact-tail plot data");
    c_bnd->add_option("--function", fn_path, "function for exact-tail plot data");
    add_common(c_bnd, ctx);

    CLI11_PARSE(app, argc, argv);

    try {
        ctx.parse_tolerances();
        using namespace wot;

        if (*c_ent) {
            auto nu = measure_from_json(ctx.load(nu_path));
            auto mu = measure_from_json(ctx.load(mu_path));
            double h = relative_entropy(nu, mu, ctx.tol("support_match", 1e-9));
            json res;
            res["relative_entropy"] = std::isfinite(h) ? json(h) : json("inf");
            return emit(ctx, "entropy", res, false);
        }

        if (*c_ot_std || *c_ot_weak) {
            auto mu = measure_from_json(ctx.load(mu_path));
            auto nu = measure_from_json(ctx.load(nu_path));
            auto theta = cost_from_json(ctx.load(cost_path));
            json res;
            if (*c_ot_std) {
                auto r = standard_ot(mu, nu, theta);
                res["cost"] = r.cost;
                res["cs_residual"] = r.cs_residual;
                res["marginal_residual"] = r.coupling.marginal_residual();
            } else {
                auto r = weak_ot(nu, mu, theta, ctx.tol("gap", 1e-8));
                res["cost"] = r.cost;
                res["gap"] = r.gap;
                res["iterations"] = r.iterations;
                res["marginal_residual"] = r.coupling.marginal_residual();
                if (!plan_path.empty()) {
                    std::ofstream out(plan_path);
                    out << plan_to_json(r).dump(2) << "\n";
                }
            }
            return emit(ctx, *c_ot_std ? "ot standard" : "ot weak", res, false);
        }

        if (*c_w2) {
            auto a = measure_from_json(ctx.load(a_path));
            auto b = measure_from_json(ctx.load(b_path));
            json res;
            res["w2_squared"] = w2_squared(a, b);
            return emit(ctx, "w2", res, false);
        }

        if (*c_norm_o || *c_norm_d) {
            auto theta = cost_from_json(ctx.load(cost_path));
            Vec x = parse_vec(x_lit);
            json res;
            if (*c_norm_o) {
                res["orlicz_norm"] = orlicz_norm(theta, p_par, x);
            } else {
                auto r = dual_norm_result(theta, p_par, x, ctx.seed);
                res["dual_norm"] = r.value;
                res["heuristic"] = r.heuristic;
            }
            return emit(ctx, *c_norm_o ? "norm orlicz" : "norm dual", res, false);
        }

        if (*c_cost_e) {
            auto theta = cost_from_json(ctx.load(cost_path));
            json res;
            res["value"] = theta.eval(parse_vec(x_lit));
            return emit(ctx, "cost eval", res, false);
        }

        if (*c_cost_l) {
            auto theta = cost_from_json(ctx.load(cost_path));
            json res;
            double closed;
            if (theta.kind == CostKind::RadialAlpha)
                closed = legendre_radial_alpha(theta.C, theta.L, s_par);
            else if (theta.kind == CostKind::QuadLinear)
                closed = legendre_quadlinear(theta.C, theta.D, s_par);
            else
                throw InputError("cost legendre: closed form available for quadlinear and radial_alpha");
            res["closed_form"] = std::isfinite(closed) ? json(closed) : json("inf");
            res["numeric_conjugate"] = numeric_conjugate(theta, s_par);
            res["divergence_sentinel"] = kDivergenceSentinel;
            return emit(ctx, "cost legendre", res, false);
        }

        if (*c_hl_e) {
            auto f = function_from_json(ctx.load(fn_path));
            auto theta = cost_from_json(ctx.load(cost_path));
            Vec x = parse_vec(x_lit);
            json res;
            res["value"] = inf_convolution(f, theta, t_par, x, ctx.tol("infconv", 1e-9));
            return emit(ctx, "hopflax eval", res, false);
        }

        if (*c_hl_s || *c_hl_r) {
            auto f = function_from_json(ctx.load(fn_path));
            auto theta = cost_from_json(ctx.load(cost_path));
            Vec g = parse_vec(grid_lit);
            require(g.size() == 3, "--grid expects lo,hi,h");
            GridSpec grid = GridSpec::line(g[0], g[1], g[2]);
            json res;
            if (*c_hl_s) {
                auto rep = semigroup_check(f, theta, s_par, t_par, grid);
                res["max_defect"] = rep.max_defect;
                res["tolerance"] = rep.tolerance;
                res["argmax"] = rep.argmax;
                res["holds"] = rep.holds;
                return emit(ctx, "hopflax semigroup", res, !rep.holds);
            }
            require(levels >= 3 && levels % 2 == 1, "--levels must be odd and >= 3");
            std::vector<double> times;
            for (int l = 0; l < levels; ++l)
                times.push_back(t_par + (l - levels / 2) * grid.h);
            auto rep = hj_residual(f, theta, times, grid);
            res["max_abs_residual"] = rep.max_abs_residual;
            res["rms_residual"] = rep.rms_residual;
            res["included"] = rep.included;
            res["excluded_gradient"] = rep.excluded_gradient;
            res["excluded_kink"] = rep.excluded_kink;
            return emit(ctx, "hopflax residual", res, false);
        }

        if (*c_poi_e) {
            auto mu = measure_from_json(ctx.load(mu_path));
            auto est = estimate_convex_poincare(mu, pieces, restarts, ctx.seed);
            json res;
            res["best_ratio"] = est.best_ratio;
            res["lambda_hat"] = est.lambda_hat;
            res["restarts_used"] = est.restarts_used;
            res["witness"] = function_to_json(est.witness);
            return emit(ctx, "poincare estimate", res, false);
        }

        if (c_ver->get_subcommands().size() == 1) {
            CLI::App* sel = c_ver->get_subcommands()[0];
            std::string kind = sel->get_name();
            DiscreteMeasure mu = mu_path.empty()
                                     ? DiscreteMeasure::uniform(1, {{0.0}, {1.0}})
                                     : measure_from_json(ctx.load(mu_path));
            const double dual_tol = ctx.tol("dual", 1e-8);
            VerificationReport rep;
            rep.id = kind;

            if (kind == "dual-t+" || kind == "dual-t-" || kind == "ic2") {
                CostFunction theta =
                    !cost_path.empty()
                        ? cost_from_json(ctx.load(cost_path))
                        : pipeline_cost(lambda, c_par,
                                        kind == "dual-t-" ? TransportBranch::Minus
                                                          : TransportBranch::Plus,
                                        mu.dimension(),
                                        M_par >= 0.0 ? M_par : quantile_radius(mu, 0.75));
                auto run_one = [&](const MaxAffineFunction& f) {
                    return kind == "dual-t+"  ? check_dual_Tplus(mu, theta, f, dual_tol)
                           : kind == "dual-t-" ? check_dual_Tminus(mu, theta, f, dual_tol)
                                               : check_inf_convolution_t2(mu, theta, f, dual_tol);
                };
                if (!fn_path.empty()) {
                    auto f = function_from_json(ctx.load(fn_path));
                    auto r = run_one(f);
                    rep.record(kind, r.value, r.bound, dual_tol, 0);
                } else {
                    int n = sweep > 0 ? sweep : 100;
                    std::vector<DualCheckReport> results(static_cast<std::size_t>(n));
                    Rng base = make_rng(ctx.seed);
                    parallel_for(n, ctx.jobs, [&](int i) {
                        Rng rng = base.fork(static_cast<std::uint64_t>(i));
                        auto f = random_max_affine(rng, mu.dimension(), 2 + i % 3,
                                                   0.9 * c_par, true);
                        results[static_cast<std::size_t>(i)] = run_one(f);
                    });
                    for (int i = 0; i < n; ++i)
                        rep.record(kind, results[static_cast<std::size_t>(i)].value, 1.0, dual_tol,
                                   static_cast<std::uint64_t>(i));
                }
            } else if (kind == "mls-convex" || kind == "mls-concave") {
                double M = M_par >= 0.0 ? M_par : quantile_radius(mu, 0.75);
                auto run_one = [&](const MaxAffineFunction& f) {
                    return kind == "mls-convex"
                               ? check_mls_convex(mu, f, lambda, c_par, ctx.tol("mls", 1e-8))
                               : check_mls_concave(mu, f, lambda, c_par, M, ctx.tol("mls", 1e-8));
                };
                int n = sweep > 0 ? sweep : 100;
                std::vector<MlsReport> results(static_cast<std::size_t>(n));
                Rng base = make_rng(ctx.seed);
                parallel_for(n, ctx.jobs, [&](int i) {
                    Rng rng = base.fork(static_cast<std::uint64_t>(i));
                    auto f = random_max_affine(rng, mu.dimension(), 2 + i % 3, c_par, false);
                    results[static_cast<std::size_t>(i)] = run_one(f);
                });
                for (int i = 0; i < n; ++i)
                    rep.record(kind, results[static_cast<std::size_t>(i)].lhs,
                               results[static_cast<std::size_t>(i)].rhs, ctx.tol("mls", 1e-8),
                               static_cast<std::uint64_t>(i));
            } else if (kind == "transport") {
                CostFunction theta =
                    !cost_path.empty()
                        ? cost_from_json(ctx.load(cost_path))
                        : pipeline_cost(lambda, c_par, TransportBranch::Plus, mu.dimension(),
                                        M_par >= 0.0 ? M_par : quantile_radius(mu, 0.75));
                int n = sweep > 0 ? sweep : 50;
                Rng base = make_rng(ctx.seed);
                std::vector<DiscreteMeasure> fam;
                for (int i = 0; i < n; ++i) {
                    Rng rng = base.fork(static_cast<std::uint64_t>(i));
                    fam.push_back(random_measure_on_support(rng, mu));
                }
                auto tr = check_weak_transport_inequalities(mu, theta, fam,
                                                            ctx.tol("transport", 1e-8));
                for (int i = 0; i < tr.checked; ++i) rep.instances++;
                rep.worst_slack = std::min(tr.worst_plus_slack, tr.worst_minus_slack);
                for (int v = 0; v < tr.tplus_violations; ++v)
                    rep.violations.push_back({"T+ violated", 0, 0, 0});
                for (int v = 0; v < tr.tminus_violations; ++v)
                    rep.violations.push_back({"T- violated", 0, 0, 0});
            } else {  // concentration
                CostFunction theta =
                    !cost_path.empty()
                        ? cost_from_json(ctx.load(cost_path))
                        : pipeline_cost(lambda, c_par, TransportBranch::Plus, mu.dimension(),
                                        M_par >= 0.0 ? M_par : quantile_radius(mu, 0.75));
                int n = sweep > 0 ? sweep : 100;
                std::vector<ConcentrationReport> results(static_cast<std::size_t>(n));
                Rng base = make_rng(ctx.seed);
                parallel_for(n, ctx.jobs, [&](int i) {
                    Rng rng = base.fork(static_cast<std::uint64_t>(i));
                    auto f = random_max_affine(rng, mu.dimension(), 2 + i % 3, 2.0, false);
                    results[static_cast<std::size_t>(i)] =
                        empirical_concentration_check(mu, f, theta, p_par);
                });
                for (int i = 0; i < n; ++i) {
                    for (const auto& chk : results[static_cast<std::size_t>(i)].checks)
                        rep.record(chk.id, chk.lhs, chk.rhs, ctx.tol("concentration", 1e-10),
                                   static_cast<std::uint64_t>(i));
                }
            }
            return emit(ctx, "verify " + kind, report_to_json(rep), !rep.ok());
        }

        if (*c_con_p) {
            json res;
            res["lambda"] = lambda;
            res["c"] = c_par;
            if (M_par < 0.0 && n_par > 0) M_par = default_M(n_par, lambda);
            res["C1"] = c1_constant(lambda, c_par);
            res["C2"] = c2_constant(lambda, c_par);
            if (c_par <= 0.5 * std::sqrt(lambda)) {
                res["C_mls_convex"] = mls_convex_constant(lambda, c_par);
                res["cost_minus"] =
                    cost_params_json(transport_cost_params(lambda, c_par, TransportBranch::Minus));
            } else {
                res["C_mls_convex"] = "not applicable";
            }
            if (M_par >= 0.0 && c_par < std::sqrt(lambda) / 64.0) {
                res["M"] = M_par;
                res["C_mls_concave"] = mls_concave_constant(lambda, c_par, M_par);
                res["cost_plus"] = cost_params_json(
                    transport_cost_params(lambda, c_par, TransportBranch::Plus, M_par));
            } else {
                res["C_mls_concave"] = "not applicable (needs c < sqrt(lambda)/64 and M)";
            }
            return emit(ctx, "constants pipeline", res, false);
        }

        if (*c_con_t) {
            auto r = tensorization_lambda(lambda);
            json res;
            res["lambda_prime"] = r.lambda_prime;
            res["ratio"] = r.ratio;
            res["argmax_r"] = r.argmax_r;
            return emit(ctx, "constants tensorize", res, false);
        }

        if (*c_con_m) {
            if (w2sq < 0.0) {
                require(!a_path.empty() && !b_path.empty(),
                        "constants mixture: give --w2sq or both --a and --b");
                auto a = measure_from_json(ctx.load(a_path));
                auto b = measure_from_json(ctx.load(b_path));
                w2sq = w2_squared(a, b);
            }
            json res;
            res["w2_squared"] = w2sq;
            res["lambda_prime"] = mixture_lambda(lambda0, lambda1, w2sq);
            return emit(ctx, "constants mixture", res, false);
        }

        if (*c_con_x) {
            json res;
            res["lambda_prime"] = perturbation_lambda(lambda, osc);
            return emit(ctx, "constants perturb", res, false);
        }

        if (*c_bnd) {
            json res;
            BoundValue b;
            if (bound_kind == "upper_tail")
                b = tail_upper(lambda, level, t_par);
            else if (bound_kind == "moment_upper")
                b = moment_upper(lambda, p_par, tpar2);
            else if (bound_kind == "lower_tail")
                b = lower_tail(lambda, M_par, tpar2, t_par);
            else if (bound_kind == "enlargement")
                b = enlargement(w2sq, osc);
            else if (bound_kind == "lipschitz_conc")
                b = lipschitz_conc(p_par);
            else if (bound_kind == "selfnorm_moment")
                b = selfnorm_moment(p_par);
            else if (bound_kind == "nonlip_lower")
                b = nonlip_lower(p_par, tpar2);
            else if (bound_kind == "nonlip_lower_quantile")
                b = nonlip_lower_quantile(p_par, s_par, M_par);
            else if (bound_kind == "lower_lp")
                b = lower_lp(p_par, tpar2);
            else if (bound_kind == "moment_quantile")
                b = moment_quantile(p_par, lambda0);
            else
                throw InputError("bounds: unknown kind \"" + bound_kind + "\"");
            res["kind"] = bound_kind;
            res["applicable"] = b.applicable;
            if (b.applicable) {
                res["value"] = b.value;
                if (b.threshold != 0.0) res["threshold"] = b.threshold;
            } else {
                res["reason"] = b.note;
            }
            if (!ctx.plot_data.empty() && bound_kind == "upper_tail") {
                std::ofstream csv(ctx.plot_data);
                require(csv.good(), "cannot open plot-data path");
                csv << "t,bound";
                bool exact = !mu_path.empty() && !fn_path.empty();
                DiscreteMeasure* mup = nullptr;
                DiscreteMeasure mu_store = DiscreteMeasure::uniform(1, {{0.0}, {1.0}});
                MaxAffineFunction f_store;
                PushforwardStats st;
                if (exact) {
                    mu_store = measure_from_json(ctx.load(mu_path));
                    f_store = function_from_json(ctx.load(fn_path));
                    mup = &mu_store;
                    st = pushforward_stats(mu_store, [&](const Vec& x) { return f_store.eval(x); });
                    csv << ",exact_upper_tail";
                }
                csv << "\n";
                for (int i = 0; i <= 100; ++i) {
                    double t = 5.0 * i / 100.0;
                    csv << t << "," << tail_upper(lambda, level, t).value;
                    if (exact) {
                        double prob = 0.0;
                        for (std::size_t k = 0; k < mup->size(); ++k)
                            if (st.values[k] >= st.median + t) prob += mup->weight(k);
                        csv << "," << prob;
                    }
                    csv << "\n";
                }
            }
            return emit(ctx, "bounds " + bound_kind, res, false);
        }

        throw wot::InputError("no subcommand selected");
    } catch (const wot::ResourceError& e) {
        std::cerr << "resource error: " << e.what() << "\n";
        return 3;
    } catch (const wot::InputError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
