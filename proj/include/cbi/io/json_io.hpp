#pragma once

// JSON documents for constraints, objectives, observations, solver results,
// safety cases, audit reports, error decompositions and interval profiles.
// Readers throw ParseError for malformed or mis-shaped documents and leave
// value-range checks to the domain validators.

#include "cbi/constraints.hpp"
#include "cbi/error.hpp"
#include "cbi/gsn.hpp"
#include "cbi/measures.hpp"
#include "cbi/objective.hpp"
#include "cbi/operational.hpp"
#include "cbi/solver.hpp"
#include "cbi/verification.hpp"

#include "json.hpp"

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

namespace cbi::io {

using Json = nlohmann::ordered_json;

/// Parses JSON text; syntax errors report the byte offset.
[[nodiscard]] inline Json parse_json(const std::string& text, const std::string& source = "input")
{
    try {
        return Json::parse(text);
    } catch (const Json::parse_error& e) {
        throw ParseError(source + ": malformed JSON at byte " + std::to_string(e.byte) + ": " + e.what());
    }
}

namespace detail {

[[nodiscard]] inline const Json& field(const Json& obj, const char* name, const std::string& where)
{
    if (!obj.is_object()) {
        throw ParseError(where + ": expected a JSON object");
    }
    const auto it = obj.find(name);
    if (it == obj.end()) {
        throw ParseError(where + ": missing field '" + name + "'");
    }
    return *it;
}

[[nodiscard]] inline double number(const Json& obj, const char* name, const std::string& where)
{
    const Json& v = field(obj, name, where);
    if (!v.is_number()) {
        throw ParseError(where + ": field '" + name + "' must be a number");
    }
    return v.get<double>();
}

/// Non-negative integer; integral floats such as 1e6 are accepted.
[[nodiscard]] inline std::uint64_t count(const Json& obj, const char* name, const std::string& where)
{
    const Json& v = field(obj, name, where);
    if (v.is_number_unsigned()) {
        return v.get<std::uint64_t>();
    }
    if (v.is_number_float()) {
        const double d = v.get<double>();
        if (d >= 0.0 && d <= 1.8e19 && std::floor(d) == d) {
            return static_cast<std::uint64_t>(d);
        }
    }
    throw ParseError(where + ": field '" + name + "' must be a non-negative integer");
}

[[nodiscard]] inline std::string text(const Json& obj, const char* name, const std::string& where)
{
    const Json& v = field(obj, name, where);
    if (!v.is_string()) {
        throw ParseError(where + ": field '" + name + "' must be a string");
    }
    return v.get<std::string>();
}

/// `doc[key]` when the document wraps its payload, otherwise `doc` itself.
[[nodiscard]] inline const Json& unwrap(const Json& doc, const char* key)
{
    if (doc.is_object()) {
        const auto it = doc.find(key);
        if (it != doc.end()) {
            return *it;
        }
    }
    return doc;
}

[[nodiscard]] inline Json nullable(double v)
{
    return std::isfinite(v) ? Json(v) : Json(nullptr);
}

} // namespace detail

// ---- constraints -----------------------------------------------------------

[[nodiscard]] inline PartialPriorConstraint constraint_from_json(const Json& j, const std::string& where = "constraint")
{
    const std::string type = detail::text(j, "type", where);
    PartialPriorConstraint c;
    if (type == "mean_bound") {
        c = MeanBound{detail::number(j, "m", where)};
    } else if (type == "confidence_bound") {
        c = ConfidenceBound{detail::number(j, "epsilon", where), detail::number(j, "theta", where)};
    } else if (type == "perfection_confidence") {
        c = PerfectionConfidence{detail::number(j, "theta", where)};
    } else if (type == "prior_reliability") {
        c = PriorReliability{detail::count(j, "n0", where), detail::number(j, "gamma", where)};
    } else {
        throw ParseError(where + ": unknown constraint type '" + type + "'");
    }
    validate(c);
    return c;
}

[[nodiscard]] inline Json to_json(const PartialPriorConstraint& c)
{
    return std::visit(
        [](const auto& v) -> Json {
            using T = std::decay_t<decltype(v)>;
            Json j;
            if constexpr (std::is_same_v<T, MeanBound>) {
                j["type"] = "mean_bound";
                j["m"] = v.m;
            } else if constexpr (std::is_same_v<T, ConfidenceBound>) {
                j["type"] = "confidence_bound";
                j["epsilon"] = v.epsilon;
                j["theta"] = v.theta;
            } else if constexpr (std::is_same_v<T, PerfectionConfidence>) {
                j["type"] = "perfection_confidence";
                j["theta"] = v.theta;
            } else {
                j["type"] = "prior_reliability";
                j["n0"] = v.n0;
                j["gamma"] = v.gamma;
            }
            return j;
        },
        c);
}

/// Accepts a bare array, `{"constraints": [...]}`, or a single constraint object.
[[nodiscard]] inline std::vector<PartialPriorConstraint> constraints_from_json(const Json& doc)
{
    const Json& list = detail::unwrap(doc, "constraints");
    std::vector<PartialPriorConstraint> out;
    if (list.is_object() && list.contains("type")) {
        out.push_back(constraint_from_json(list));
        return out;
    }
    if (!list.is_array()) {
        throw ParseError("constraints: expected an array of constraint objects");
    }
    for (std::size_t i = 0; i < list.size(); ++i) {
        out.push_back(constraint_from_json(list[i], "constraints[" + std::to_string(i) + "]"));
    }
    return out;
}

[[nodiscard]] inline Json to_json(const std::vector<PartialPriorConstraint>& cs)
{
    Json arr = Json::array();
    for (const auto& c : cs) {
        arr.push_back(to_json(c));
    }
    return arr;
}

// ---- objective and observation --------------------------------------------

/// Accepts `{"type": ...}` or `{"objective": {"type": ...}}`.
[[nodiscard]] inline ObjectiveSpec objective_from_json(const Json& doc)
{
    const Json& j = detail::unwrap(doc, "objective");
    const std::string where = "objective";
    const std::string type = detail::text(j, "type", where);
    ObjectiveSpec o;
    if (type == "posterior_expected_pfd") {
        o = PosteriorExpectedPfd{};
    } else if (type == "posterior_confidence") {
        o = PosteriorConfidence{detail::number(j, "p_req", where)};
    } else if (type == "future_reliability") {
        o = FutureReliability{detail::count(j, "t", where)};
    } else {
        throw ParseError(where + ": unknown objective type '" + type + "'");
    }
    validate(o);
    return o;
}

[[nodiscard]] inline Json to_json(const ObjectiveSpec& o)
{
    return std::visit(
        [](const auto& v) -> Json {
            using T = std::decay_t<decltype(v)>;
            Json j;
            if constexpr (std::is_same_v<T, PosteriorExpectedPfd>) {
                j["type"] = "posterior_expected_pfd";
            } else if constexpr (std::is_same_v<T, PosteriorConfidence>) {
                j["type"] = "posterior_confidence";
                j["p_req"] = v.p_req;
            } else {
                j["type"] = "future_reliability";
                j["t"] = v.t;
            }
            return j;
        },
        o);
}

/// Accepts `{"n": .., "k": ..}` or `{"observation": {...}}`.
[[nodiscard]] inline Observation observation_from_json(const Json& doc)
{
    const Json& j = detail::unwrap(doc, "observation");
    Observation obs{detail::count(j, "n", "observation"), detail::count(j, "k", "observation")};
    validate(obs);
    return obs;
}

[[nodiscard]] inline Json to_json(const Observation& obs)
{
    return Json{{"n", obs.n}, {"k", obs.k}};
}

// ---- results ---------------------------------------------------------------

[[nodiscard]] inline Json to_json(const PriorDistribution& prior)
{
    return Json{{"support", prior.support()}, {"masses", prior.masses()}};
}

[[nodiscard]] inline Json to_json(const CbiResult& r, const std::vector<PartialPriorConstraint>& constraints)
{
    Json j;
    j["status"] = to_string(r.status);
    j["bound"] = detail::nullable(r.bound);
    j["objective"] = to_json(r.objective);
    j["observation"] = to_json(r.observation);
    j["grid_resolution"] = r.grid_resolution;
    j["witness"] = r.witness ? to_json(*r.witness) : Json(nullptr);
    if (r.status == SolverStatus::infeasible) {
        Json subset = Json::array();
        for (std::size_t i : r.unsatisfiable) {
            subset.push_back(Json{{"index", i}, {"constraint", to_json(constraints.at(i))}});
        }
        j["unsatisfiable"] = subset;
    }
    return j;
}

[[nodiscard]] inline Json to_json(const ConservatismReport& rep)
{
    Json j;
    j["trials"] = rep.trials;
    j["violations"] = rep.violations;
    j["worst_margin"] = detail::nullable(rep.worst_margin);
    j["bound"] = detail::nullable(rep.bound);
    j["solver_status"] = to_string(rep.solver_status);
    Json records = Json::array();
    for (const auto& r : rep.records) {
        Json rec;
        rec["trial"] = r.trial;
        rec["posterior"] = r.posterior ? Json(*r.posterior) : Json(nullptr);
        rec["margin"] = detail::nullable(r.margin);
        if (!r.error.empty()) {
            rec["error"] = r.error;
        }
        records.push_back(std::move(rec));
    }
    j["records"] = std::move(records);
    return j;
}

// ---- measures and coverage -------------------------------------------------

/// Each component is either a number or `{"value": x, "provenance": "..."}`.
[[nodiscard]] inline ErrorDecomposition decomposition_from_json(const Json& doc)
{
    const Json& j = detail::unwrap(doc, "decomposition");
    ErrorDecomposition d;
    auto read = [&](const char* name, double& value, std::string& provenance) {
        const Json& v = detail::field(j, name, "decomposition");
        if (v.is_number()) {
            value = v.get<double>();
        } else if (v.is_object()) {
            const std::string where = std::string("decomposition.") + name;
            value = detail::number(v, "value", where);
            if (v.contains("provenance")) {
                provenance = detail::text(v, "provenance", where);
            }
        } else {
            throw ParseError(std::string("decomposition: field '") + name + "' must be a number or object");
        }
    };
    read("bayes_error", d.bayes_error, d.bayes_provenance);
    read("approximation_error", d.approximation_error, d.approximation_provenance);
    read("estimation_error", d.estimation_error, d.estimation_provenance);
    return d;
}

/// `{"segments": [{"lo": .., "hi": .., "mass": ..}, ...]}`
[[nodiscard]] inline IntervalProfile interval_profile_from_json(const Json& doc)
{
    const Json& segs = detail::field(doc, "segments", "profile");
    if (!segs.is_array()) {
        throw ParseError("profile: 'segments' must be an array");
    }
    std::vector<DensitySegment> out;
    for (std::size_t i = 0; i < segs.size(); ++i) {
        const std::string where = "profile.segments[" + std::to_string(i) + "]";
        out.push_back({detail::number(segs[i], "lo", where), detail::number(segs[i], "hi", where),
                       detail::number(segs[i], "mass", where)});
    }
    return IntervalProfile(std::move(out));
}

// ---- safety cases ----------------------------------------------------------

[[nodiscard]] inline gsn::QuantClaim claim_from_json(const Json& j, const std::string& where)
{
    gsn::QuantClaim claim;
    claim.constraints = constraints_from_json(detail::field(j, "constraints", where));
    claim.objective = objective_from_json(detail::field(j, "objective", where));
    claim.threshold = detail::number(j, "threshold", where);
    const std::string cmp = j.contains("comparison") ? detail::text(j, "comparison", where) : ">=";
    if (cmp == ">=") {
        claim.comparison = gsn::Comparison::at_least;
    } else if (cmp == "<=") {
        claim.comparison = gsn::Comparison::at_most;
    } else {
        throw ParseError(where + ": comparison must be \">=\" or \"<=\"");
    }
    gsn::validate(claim);
    return claim;
}

[[nodiscard]] inline Json to_json(const gsn::QuantClaim& claim)
{
    return Json{{"constraints", to_json(claim.constraints)},
                {"objective", to_json(claim.objective)},
                {"threshold", claim.threshold},
                {"comparison", claim.comparison == gsn::Comparison::at_least ? ">=" : "<="}};
}

[[nodiscard]] inline gsn::SafetyCase safety_case_from_json(const Json& doc)
{
    gsn::SafetyCase sc;
    sc.set_root(detail::text(doc, "root", "safety case"));
    const Json& nodes = detail::field(doc, "nodes", "safety case");
    if (!nodes.is_array()) {
        throw ParseError("safety case: 'nodes' must be an array");
    }
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const Json& n = nodes[i];
        const std::string where = "nodes[" + std::to_string(i) + "]";
        gsn::GsnNode node;
        node.id = detail::text(n, "id", where);
        const std::string kind = detail::text(n, "kind", where);
        const auto k = gsn::parse_node_kind(kind);
        if (!k) {
            throw ParseError(where + ": unknown node kind '" + kind + "'");
        }
        node.kind = *k;
        if (n.contains("statement")) {
            node.statement = detail::text(n, "statement", where);
        }
        if (n.contains("undeveloped")) {
            const Json& u = n["undeveloped"];
            if (!u.is_boolean()) {
                throw ParseError(where + ": 'undeveloped' must be a boolean");
            }
            node.undeveloped = u.get<bool>();
        }
        if (n.contains("module_ref") && !n["module_ref"].is_null()) {
            node.module_ref = detail::text(n, "module_ref", where);
        }
        if (n.contains("claim") && !n["claim"].is_null()) {
            node.claim = claim_from_json(n["claim"], where + ".claim");
        }
        try {
            sc.add_node(std::move(node));
        } catch (const InvalidInput& e) {
            throw ParseError(where + ": " + e.what());
        }
    }
    auto edges = [&](const char* name, auto add) {
        if (!doc.contains(name)) {
            return;
        }
        const Json& list = doc[name];
        if (!list.is_array()) {
            throw ParseError(std::string("safety case: '") + name + "' must be an array");
        }
        for (std::size_t i = 0; i < list.size(); ++i) {
            const Json& e = list[i];
            if (!e.is_array() || e.size() != 2 || !e[0].is_string() || !e[1].is_string()) {
                throw ParseError(std::string(name) + "[" + std::to_string(i) + "]: expected [from, to]");
            }
            add(e[0].get<std::string>(), e[1].get<std::string>());
        }
    };
    edges("supported_by", [&](std::string a, std::string b) { sc.add_supported_by(std::move(a), std::move(b)); });
    edges("in_context_of", [&](std::string a, std::string b) { sc.add_in_context_of(std::move(a), std::move(b)); });
    return sc;
}

[[nodiscard]] inline Json to_json(const gsn::SafetyCase& sc)
{
    Json j;
    j["root"] = sc.root();
    Json nodes = Json::array();
    for (const auto& [id, node] : sc.nodes()) {
        Json n{{"id", id}, {"kind", gsn::to_string(node.kind)}, {"statement", node.statement}};
        if (node.undeveloped) {
            n["undeveloped"] = true;
        }
        if (node.module_ref) {
            n["module_ref"] = *node.module_ref;
        }
        if (node.claim) {
            n["claim"] = to_json(*node.claim);
        }
        nodes.push_back(std::move(n));
    }
    j["nodes"] = std::move(nodes);
    auto edges = [](const std::vector<gsn::Edge>& list) {
        Json arr = Json::array();
        for (const auto& [a, b] : list) {
            arr.push_back(Json::array({a, b}));
        }
        return arr;
    };
    j["supported_by"] = edges(sc.supported_by());
    j["in_context_of"] = edges(sc.in_context_of());
    return j;
}

[[nodiscard]] inline Json to_json(const std::vector<gsn::Violation>& violations)
{
    Json arr = Json::array();
    for (const auto& v : violations) {
        arr.push_back(Json{{"rule", gsn::to_string(v.rule)}, {"node", v.node}, {"message", v.message}});
    }
    return arr;
}

[[nodiscard]] inline Json to_json(const std::map<std::string, gsn::GoalEvaluation>& evaluation)
{
    Json j = Json::object();
    for (const auto& [id, ev] : evaluation) {
        Json e{{"status", gsn::to_string(ev.status)}};
        e["bound"] = ev.bound ? Json(*ev.bound) : Json(nullptr);
        if (ev.solver_status) {
            e["solver_status"] = to_string(*ev.solver_status);
        }
        e["detail"] = ev.detail;
        j[id] = std::move(e);
    }
    return j;
}

} // namespace cbi::io
