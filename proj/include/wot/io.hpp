#pragma once

#include <fstream>
#include <set>
#include <sstream>
#include <string>

#include <json.hpp>

#include "wot/common.hpp"
#include "wot/cost.hpp"
#include "wot/hopflax.hpp"
#include "wot/measure.hpp"
#include "wot/transport.hpp"

namespace wot {

using nlohmann::json;

namespace detail {

// fail-closed: unknown fields are input errors, "schema" must be 1 if present
inline void check_keys(const json& j, const std::set<std::string>& allowed,
                       const std::string& what) {
    require(j.is_object(), what + ": expected a JSON object");
    for (auto it = j.begin(); it != j.end(); ++it)
        require(allowed.count(it.key()) > 0, what + ": unknown field \"" + it.key() + "\"");
    if (j.contains("schema"))
        require(j["schema"].is_number_integer() && j["schema"].get<int>() == 1,
                what + ": unsupported schema version");
}

inline Vec to_vec(const json& j, const std::string& what) {
    require(j.is_array(), what + ": expected an array of numbers");
    Vec v;
    v.reserve(j.size());
    for (const auto& x : j) {
        require(x.is_number(), what + ": expected a number");
        v.push_back(x.get<double>());
    }
    return v;
}

}  // namespace detail

// {"dimension": n, "points": [[...], ...], "weights": [...]} ; weights may be
// omitted for the uniform measure.
inline DiscreteMeasure measure_from_json(const json& j) {
    detail::check_keys(j, {"schema", "dimension", "points", "weights"}, "measure");
    require(j.contains("dimension") && j.contains("points"),
            "measure: \"dimension\" and \"points\" are required");
    int dim = j["dimension"].get<int>();
    std::vector<Vec> pts;
    for (const auto& p : j["points"]) pts.push_back(detail::to_vec(p, "measure point"));
    if (!j.contains("weights")) return DiscreteMeasure::uniform(dim, std::move(pts));
    std::vector<double> w = detail::to_vec(j["weights"], "measure weights");
    return DiscreteMeasure(dim, std::move(pts), std::move(w));
}

inline json measure_to_json(const DiscreteMeasure& mu) {
    json j;
    j["schema"] = 1;
    j["dimension"] = mu.dimension();
    j["points"] = json::array();
    for (const auto& p : mu.points()) j["points"].push_back(p);
    j["weights"] = mu.weights();
    return j;
}

// {"kind": "quadlinear"|"power"|"percoord"|"radial_alpha", "params": {...},
//  "dimension": n}. The "percoord" kind selects its per-coordinate family by
// params: {"c"} -> min-form, {"c","r"} -> power tail, {"C","D"} -> quad-linear.
inline CostFunction cost_from_json(const json& j) {
    detail::check_keys(j, {"schema", "kind", "params", "dimension"}, "cost");
    require(j.contains("kind") && j.contains("dimension"), "cost: \"kind\" and \"dimension\" required");
    std::string kind = j["kind"].get<std::string>();
    int dim = j["dimension"].get<int>();
    json params = j.value("params", json::object());
    require(params.is_object(), "cost: \"params\" must be an object");
    auto need = [&](const char* k) {
        require(params.contains(k), std::string("cost params: missing \"") + k + "\"");
        return params[k].get<double>();
    };
    if (kind == "quadlinear") {
        detail::check_keys(params, {"C", "D"}, "quadlinear params");
        return CostFunction::quad_linear(need("C"), need("D"), dim);
    }
    if (kind == "power") {
        detail::check_keys(params, {"c", "r"}, "power params");
        return CostFunction::power(need("c"), need("r"), dim);
    }
    if (kind == "radial_alpha") {
        detail::check_keys(params, {"C", "L"}, "radial_alpha params");
        return CostFunction::radial_alpha(need("C"), need("L"), dim);
    }
    if (kind == "percoord") {
        detail::check_keys(params, {"c", "r", "C", "D", "blocks"}, "percoord params");
        int blocks = params.contains("blocks") ? params["blocks"].get<int>() : 0;
        if (params.contains("C") || params.contains("D"))
            return CostFunction::separable_quad_linear(need("C"), need("D"), dim, blocks);
        if (params.contains("r"))
            return CostFunction::per_coord_power_tail(need("c"), need("r"), dim, blocks);
        return CostFunction::per_coord_quad_linear(need("c"), dim, blocks);
    }
    throw InputError("cost: unknown kind \"" + kind + "\"");
}

inline json cost_to_json(const CostFunction& t) {
    json j;
    j["schema"] = 1;
    j["dimension"] = t.dim;
    json p = json::object();
    switch (t.kind) {
        case CostKind::QuadLinear:
            j["kind"] = "quadlinear";
            p["C"] = t.C;
            p["D"] = t.D;
            break;
        case CostKind::Power:
            j["kind"] = "power";
            p["c"] = t.c;
            p["r"] = t.r;
            break;
        case CostKind::RadialAlpha:
            j["kind"] = "radial_alpha";
            p["C"] = t.C;
            p["L"] = t.L;
            break;
        case CostKind::PerCoordQuadLinear:
            j["kind"] = "percoord";
            p["c"] = t.c;
            p["blocks"] = t.n_blocks;
            break;
        case CostKind::PerCoordPowerTail:
            j["kind"] = "percoord";
            p["c"] = t.c;
            p["r"] = t.r;
            p["blocks"] = t.n_blocks;
            break;
        case CostKind::SeparableQuadLinear:
            j["kind"] = "percoord";
            p["C"] = t.C;
            p["D"] = t.D;
            p["blocks"] = t.n_blocks;
            break;
        case CostKind::Custom: throw InputError("cost: custom costs are not serializable");
    }
    j["params"] = p;
    return j;
}

// {"pieces": [{"slope": [...], "intercept": r}, ...]}
inline MaxAffineFunction function_from_json(const json& j) {
    detail::check_keys(j, {"schema", "pieces"}, "function");
    require(j.contains("pieces") && j["pieces"].is_array() && !j["pieces"].empty(),
            "function: nonempty \"pieces\" array required");
    std::vector<Vec> slopes;
    std::vector<double> intercepts;
    for (const auto& piece : j["pieces"]) {
        detail::check_keys(piece, {"slope", "intercept"}, "function piece");
        require(piece.contains("slope") && piece.contains("intercept"),
                "function piece: \"slope\" and \"intercept\" required");
        slopes.push_back(detail::to_vec(piece["slope"], "piece slope"));
        intercepts.push_back(piece["intercept"].get<double>());
    }
    int dim = static_cast<int>(slopes.front().size());
    return MaxAffineFunction(dim, std::move(slopes), std::move(intercepts));
}

inline json function_to_json(const MaxAffineFunction& f) {
    json j;
    j["schema"] = 1;
    j["pieces"] = json::array();
    for (std::size_t i = 0; i < f.pieces(); ++i)
        j["pieces"].push_back({{"slope", f.slopes[i]}, {"intercept", f.intercepts[i]}});
    return j;
}

// {"pi": [[...]], "barycenters": [[...]], "cost": r, "gap": g}
inline json plan_to_json(const BarycentricPlan& plan) {
    json j;
    j["schema"] = 1;
    json rows = json::array();
    for (std::size_t i = 0; i < plan.coupling.mu.size(); ++i) {
        json row = json::array();
        for (std::size_t jj = 0; jj < plan.coupling.nu.size(); ++jj)
            row.push_back(plan.coupling.entry(i, jj));
        rows.push_back(row);
    }
    j["pi"] = rows;
    j["barycenters"] = json::array();
    for (const auto& b : plan.barycenters) j["barycenters"].push_back(b);
    j["cost"] = plan.cost;
    j["gap"] = plan.gap;
    return j;
}

// Parse with line context on syntax errors.
inline json parse_json_text(const std::string& text, const std::string& origin) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        std::size_t line = 1, col = 1;
        for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
            if (text[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        std::ostringstream msg;
        msg << origin << ":" << line << ":" << col << ": " << e.what();
        throw InputError(msg.str());
    }
}

inline json load_json_file(const std::string& path) {
    std::ifstream in(path);
    require(in.good(), "cannot open file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_json_text(ss.str(), path);
}

// FNV-1a digest of raw file bytes, for report provenance.
inline std::string file_digest(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    require(in.good(), "cannot open file: " + path);
    std::uint64_t h = 1469598103934665603ULL;
    char ch;
    while (in.get(ch)) {
        h ^= static_cast<unsigned char>(ch);
        h *= 1099511628211ULL;
    }
    std::ostringstream os;
    os << std::hex << h;
    return os.str();
}

}  // namespace wot
