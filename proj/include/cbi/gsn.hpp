#pragma once

// Goal Structuring Notation safety cases: the node/edge model, structural
// well-formedness checks, mechanical evaluation of quantitative claims bound
// to goals, and Graphviz DOT export.

#include "cbi/constraints.hpp"
#include "cbi/error.hpp"
#include "cbi/grid.hpp"
#include "cbi/objective.hpp"
#include "cbi/solver.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace cbi::gsn {

enum class NodeKind { goal, strategy, solution, context, assumption, justification, away_goal };

[[nodiscard]] inline const char* to_string(NodeKind k)
{
    switch (k) {
    case NodeKind::goal:
        return "goal";
    case NodeKind::strategy:
        return "strategy";
    case NodeKind::solution:
        return "solution";
    case NodeKind::context:
        return "context";
    case NodeKind::assumption:
        return "assumption";
    case NodeKind::justification:
        return "justification";
    case NodeKind::away_goal:
        return "away-goal";
    }
    return "unknown";
}

/// Accepts the names produced by to_string, plus "away_goal".
[[nodiscard]] inline std::optional<NodeKind> parse_node_kind(const std::string& s)
{
    static const std::map<std::string, NodeKind> names{
        {"goal", NodeKind::goal},
        {"strategy", NodeKind::strategy},
        {"solution", NodeKind::solution},
        {"context", NodeKind::context},
        {"assumption", NodeKind::assumption},
        {"justification", NodeKind::justification},
        {"away-goal", NodeKind::away_goal},
        {"away_goal", NodeKind::away_goal},
    };
    const auto it = names.find(s);
    if (it == names.end()) {
        return std::nullopt;
    }
    return it->second;
}

/// Contexts, assumptions and justifications annotate; they never support.
[[nodiscard]] constexpr bool is_contextual(NodeKind k)
{
    return k == NodeKind::context || k == NodeKind::assumption || k == NodeKind::justification;
}

enum class Comparison { at_least, at_most };

/// "The conservative bound of `objective` is >= (or <=) `threshold`."
struct QuantClaim
{
    std::vector<PartialPriorConstraint> constraints;
    ObjectiveSpec objective = PosteriorConfidence{};
    double threshold = 0.0;
    Comparison comparison = Comparison::at_least;
};

inline void validate(const QuantClaim& claim)
{
    if (!detail::is_probability(claim.threshold)) {
        throw InvalidInput("claim threshold must lie in [0,1]");
    }
    validate(claim.objective);
    for (const auto& c : claim.constraints) {
        validate(c);
    }
}

struct GsnNode
{
    std::string id;
    NodeKind kind = NodeKind::goal;
    std::string statement;
    bool undeveloped = false;
    std::optional<std::string> module_ref;
    std::optional<QuantClaim> claim;
};

using Edge = std::pair<std::string, std::string>;

/// Nodes are keyed by id, so every traversal and export is independent of
/// insertion order. Edges may name missing nodes; validate() reports them.
class SafetyCase
{
public:
    void add_node(GsnNode node)
    {
        if (node.id.empty()) {
            throw InvalidInput("GSN node id must not be empty");
        }
        if (node.claim) {
            validate(*node.claim);
        }
        const std::string id = node.id;
        if (!nodes_.emplace(id, std::move(node)).second) {
            throw InvalidInput("duplicate GSN node id '" + id + "'");
        }
    }

    void add_supported_by(std::string from, std::string to) { supported_by_.emplace_back(std::move(from), std::move(to)); }
    void add_in_context_of(std::string from, std::string to) { in_context_of_.emplace_back(std::move(from), std::move(to)); }
    void set_root(std::string id) { root_ = std::move(id); }

    [[nodiscard]] const std::map<std::string, GsnNode>& nodes() const noexcept { return nodes_; }
    [[nodiscard]] const std::vector<Edge>& supported_by() const noexcept { return supported_by_; }
    [[nodiscard]] const std::vector<Edge>& in_context_of() const noexcept { return in_context_of_; }
    [[nodiscard]] const std::string& root() const noexcept { return root_; }

    [[nodiscard]] const GsnNode* find(const std::string& id) const
    {
        const auto it = nodes_.find(id);
        return it == nodes_.end() ? nullptr : &it->second;
    }

    /// supported_by targets of `id`, sorted and de-duplicated.
    [[nodiscard]] std::vector<std::string> children(const std::string& id) const
    {
        std::vector<std::string> out;
        for (const auto& [from, to] : supported_by_) {
            if (from == id) {
                out.push_back(to);
            }
        }
        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end()), out.end());
        return out;
    }

private:
    std::map<std::string, GsnNode> nodes_;
    std::vector<Edge> supported_by_;
    std::vector<Edge> in_context_of_;
    std::string root_;
};

enum class Rule {
    root_missing,
    root_not_goal,
    dangling_edge,
    unsupported_goal,
    strategy_support,
    strategy_leaf,
    solution_not_leaf,
    contextual_support,
    context_edge,
    away_goal_module,
    cycle,
    misplaced_attribute,
};

[[nodiscard]] inline const char* to_string(Rule r)
{
    switch (r) {
    case Rule::root_missing:
        return "root-missing";
    case Rule::root_not_goal:
        return "root-not-goal";
    case Rule::dangling_edge:
        return "dangling-edge";
    case Rule::unsupported_goal:
        return "unsupported-goal";
    case Rule::strategy_support:
        return "strategy-support";
    case Rule::strategy_leaf:
        return "strategy-leaf";
    case Rule::solution_not_leaf:
        return "solution-not-leaf";
    case Rule::contextual_support:
        return "contextual-support";
    case Rule::context_edge:
        return "context-edge";
    case Rule::away_goal_module:
        return "away-goal-module";
    case Rule::cycle:
        return "cycle";
    case Rule::misplaced_attribute:
        return "misplaced-attribute";
    }
    return "unknown";
}

struct Violation
{
    Rule rule = Rule::root_missing;
    std::string node;
    std::string message;

    [[nodiscard]] std::string text() const { return std::string(to_string(rule)) + " [" + node + "]: " + message; }
};

namespace detail {

[[nodiscard]] constexpr bool is_goal_like(NodeKind k)
{
    return k == NodeKind::goal || k == NodeKind::away_goal;
}

/// Nodes on a supported_by cycle, each reported once, found by iterative
/// three-colour DFS from every node in id order.
[[nodiscard]] inline std::vector<std::string> cycle_entries(const SafetyCase& sc)
{
    enum class Colour { white, grey, black };
    std::map<std::string, Colour> colour;
    for (const auto& [id, node] : sc.nodes()) {
        colour[id] = Colour::white;
    }
    std::set<std::string> reported;
    std::vector<std::string> out;
    for (const auto& [start, node] : sc.nodes()) {
        if (colour[start] != Colour::white) {
            continue;
        }
        std::vector<std::pair<std::string, std::size_t>> stack{{start, 0}};
        std::map<std::string, std::vector<std::string>> kids;
        colour[start] = Colour::grey;
        kids[start] = sc.children(start);
        while (!stack.empty()) {
            auto& [id, next] = stack.back();
            const auto& ch = kids[id];
            if (next == ch.size()) {
                colour[id] = Colour::black;
                stack.pop_back();
                continue;
            }
            const std::string child = ch[next++];
            const auto it = colour.find(child);
            if (it == colour.end()) {
                continue;
            }
            if (it->second == Colour::grey) {
                // Back edge: every node from `child` to the top of the stack
                // lies on the cycle.
                auto on_cycle = std::find_if(stack.begin(), stack.end(),
                                             [&](const auto& frame) { return frame.first == child; });
                for (; on_cycle != stack.end(); ++on_cycle) {
                    if (reported.insert(on_cycle->first).second) {
                        out.push_back(on_cycle->first);
                    }
                }
            } else if (it->second == Colour::white) {
                it->second = Colour::grey;
                kids[child] = sc.children(child);
                stack.emplace_back(child, 0);
            }
        }
    }
    return out;
}

[[nodiscard]] inline std::vector<Violation> validate_impl(const SafetyCase& sc, const std::set<std::string>* modules)
{
    std::vector<Violation> out;
    auto add = [&](Rule r, std::string node, std::string msg) { out.push_back({r, std::move(node), std::move(msg)}); };

    const GsnNode* root = sc.find(sc.root());
    if (root == nullptr) {
        add(Rule::root_missing, sc.root(), "root node does not exist");
    } else if (root->kind != NodeKind::goal) {
        add(Rule::root_not_goal, sc.root(), std::string("root is a ") + to_string(root->kind) + ", not a goal");
    }

    for (const auto& [from, to] : sc.supported_by()) {
        const GsnNode* a = sc.find(from);
        const GsnNode* b = sc.find(to);
        if (a == nullptr || b == nullptr) {
            add(Rule::dangling_edge, a == nullptr ? from : to, "supported_by edge " + from + " -> " + to +
                                                                   " references a missing node");
            continue;
        }
        if (is_contextual(a->kind) || is_contextual(b->kind)) {
            const GsnNode* ctx = is_contextual(b->kind) ? b : a;
            add(Rule::contextual_support, ctx->id, std::string(to_string(ctx->kind)) + " on supported_by edge " +
                                                       from + " -> " + to + "; use in_context_of");
        }
    }
    for (const auto& [from, to] : sc.in_context_of()) {
        const GsnNode* a = sc.find(from);
        const GsnNode* b = sc.find(to);
        if (a == nullptr || b == nullptr) {
            add(Rule::dangling_edge, a == nullptr ? from : to, "in_context_of edge " + from + " -> " + to +
                                                                   " references a missing node");
            continue;
        }
        if (!is_contextual(b->kind)) {
            add(Rule::context_edge, to, std::string("in_context_of target is a ") + to_string(b->kind));
        }
        if (a->kind != NodeKind::goal && a->kind != NodeKind::strategy) {
            add(Rule::context_edge, from, std::string("in_context_of source is a ") + to_string(a->kind));
        }
    }

    for (const auto& [id, node] : sc.nodes()) {
        std::vector<const GsnNode*> kids;
        for (const auto& c : sc.children(id)) {
            if (const GsnNode* k = sc.find(c)) {
                kids.push_back(k);
            }
        }
        switch (node.kind) {
        case NodeKind::goal: {
            const bool supported = std::any_of(kids.begin(), kids.end(), [](const GsnNode* k) {
                return k->kind == NodeKind::strategy || k->kind == NodeKind::solution;
            });
            if (!node.undeveloped && !supported) {
                add(Rule::unsupported_goal, id, "goal is neither undeveloped nor supported by a strategy or solution");
            }
            break;
        }
        case NodeKind::strategy:
            if (kids.empty() && sc.children(id).empty()) {
                add(Rule::strategy_leaf, id, "strategy supports nothing");
            }
            for (const GsnNode* k : kids) {
                if (!is_goal_like(k->kind) && !is_contextual(k->kind)) {
                    add(Rule::strategy_support, id, std::string("strategy supported by ") + to_string(k->kind) + " " +
                                                        k->id + "; only goals may support a strategy");
                }
            }
            break;
        case NodeKind::solution:
            if (!sc.children(id).empty()) {
                add(Rule::solution_not_leaf, id, "solution has supported_by children");
            }
            break;
        case NodeKind::away_goal:
            if (!node.module_ref || node.module_ref->empty()) {
                add(Rule::away_goal_module, id, "away-goal has no module reference");
            } else if (modules != nullptr && modules->count(*node.module_ref) == 0) {
                add(Rule::away_goal_module, id, "module '" + *node.module_ref + "' is not in the module registry");
            }
            break;
        case NodeKind::context:
        case NodeKind::assumption:
        case NodeKind::justification:
            break;
        }
        if (node.kind != NodeKind::goal && node.undeveloped) {
            add(Rule::misplaced_attribute, id, "only goals may be undeveloped");
        }
        if (node.kind != NodeKind::goal && node.claim) {
            add(Rule::misplaced_attribute, id, "only goals may carry a quantitative claim");
        }
        if (node.kind != NodeKind::away_goal && node.module_ref) {
            add(Rule::misplaced_attribute, id, "only away-goals may carry a module reference");
        }
    }

    for (const auto& id : cycle_entries(sc)) {
        add(Rule::cycle, id, "supported_by cycle through this node");
    }
    return out;
}

} // namespace detail

/// Structural well-formedness. Away-goal module references are resolved
/// against `modules`. An empty result means the case is well-formed.
[[nodiscard]] inline std::vector<Violation> validate(const SafetyCase& sc, const std::set<std::string>& modules = {})
{
    return detail::validate_impl(sc, &modules);
}

enum class GoalStatus { satisfied, unsatisfied, undeveloped, unevaluable };

[[nodiscard]] inline const char* to_string(GoalStatus s)
{
    switch (s) {
    case GoalStatus::satisfied:
        return "satisfied";
    case GoalStatus::unsatisfied:
        return "unsatisfied";
    case GoalStatus::undeveloped:
        return "undeveloped";
    case GoalStatus::unevaluable:
        return "unevaluable";
    }
    return "unknown";
}

struct GoalEvaluation
{
    GoalStatus status = GoalStatus::satisfied;
    /// Solver bound for goals carrying a claim.
    std::optional<double> bound;
    std::optional<SolverStatus> solver_status;
    std::string detail;
};

namespace detail {

/// Rank for conjunctive aggregation; the highest-ranked child status wins.
[[nodiscard]] constexpr int severity(GoalStatus s)
{
    switch (s) {
    case GoalStatus::satisfied:
        return 0;
    case GoalStatus::undeveloped:
        return 1;
    case GoalStatus::unevaluable:
        return 2;
    case GoalStatus::unsatisfied:
        return 3;
    }
    return 3;
}

[[nodiscard]] inline GoalEvaluation evaluate_claim(const QuantClaim& claim, const Observation& obs,
                                                   std::size_t resolution)
{
    GoalEvaluation ev;
    const auto grid = build_grid(claim.constraints, claim.objective, resolution);
    const auto r = solve(claim.constraints, obs, claim.objective, grid);
    ev.solver_status = r.status;
    if (r.status == SolverStatus::infeasible) {
        ev.status = GoalStatus::unevaluable;
        ev.detail = "unevaluable: infeasible";
        return ev;
    }
    ev.bound = r.bound;
    const bool holds = claim.comparison == Comparison::at_least ? r.bound >= claim.threshold
                                                                : r.bound <= claim.threshold;
    ev.status = holds ? GoalStatus::satisfied : GoalStatus::unsatisfied;
    std::ostringstream os;
    os.precision(17);
    os << describe(claim.objective) << " bound " << r.bound << (claim.comparison == Comparison::at_least ? " >= " : " <= ")
       << claim.threshold << (holds ? " holds" : " fails");
    ev.detail = os.str();
    return ev;
}

} // namespace detail

/// Status of every goal. A goal with a claim is decided by its solver bound;
/// an undeveloped goal reports undeveloped; any other goal or strategy
/// aggregates its supporting children conjunctively. Solutions and
/// away-goals count as satisfied, and contextual nodes are ignored.
/// Solver errors propagate with the goal id prefixed.
[[nodiscard]] inline std::map<std::string, GoalEvaluation> evaluate_case(const SafetyCase& sc, const Observation& obs,
                                                                         std::size_t resolution = kDefaultGridResolution)
{
    const auto violations = detail::validate_impl(sc, nullptr);
    if (!violations.empty()) {
        throw InvalidInput("safety case is not well-formed: " + violations.front().text());
    }
    validate(obs);

    std::map<std::string, GoalEvaluation> memo;
    std::function<GoalEvaluation(const std::string&)> eval = [&](const std::string& id) -> GoalEvaluation {
        if (const auto it = memo.find(id); it != memo.end()) {
            return it->second;
        }
        const GsnNode& node = *sc.find(id);
        GoalEvaluation ev;
        if (node.kind == NodeKind::goal && node.claim) {
            try {
                ev = detail::evaluate_claim(*node.claim, obs, resolution);
            } catch (const ZeroEvidenceError& e) {
                throw ZeroEvidenceError("goal " + id + ": " + e.what());
            } catch (const InvalidInput& e) {
                throw InvalidInput("goal " + id + ": " + e.what());
            } catch (const Error& e) {
                throw Error("goal " + id + ": " + e.what());
            }
        } else if (node.kind == NodeKind::goal && node.undeveloped) {
            ev.status = GoalStatus::undeveloped;
            ev.detail = "undeveloped";
        } else if (node.kind == NodeKind::goal || node.kind == NodeKind::strategy) {
            std::string worst_child;
            for (const auto& child : sc.children(id)) {
                if (is_contextual(sc.find(child)->kind)) {
                    continue;
                }
                const GoalStatus s = eval(child).status;
                if (detail::severity(s) > detail::severity(ev.status)) {
                    ev.status = s;
                    worst_child = child;
                }
            }
            ev.detail = worst_child.empty() ? "all supporting elements satisfied"
                                            : std::string(to_string(ev.status)) + " via " + worst_child;
        } else if (node.kind == NodeKind::away_goal) {
            ev.detail = "discharged in module " + node.module_ref.value_or("");
        } else {
            ev.detail = "evidence";
        }
        memo.emplace(id, ev);
        return ev;
    };

    std::map<std::string, GoalEvaluation> out;
    for (const auto& [id, node] : sc.nodes()) {
        if (node.kind == NodeKind::goal) {
            out.emplace(id, eval(id));
        }
    }
    return out;
}

namespace detail {

[[nodiscard]] inline std::string dot_escape(const std::string& s)
{
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        switch (c) {
        case '"':
            out += "\\\"";
            break;
        case '\\':
            out += "\\\\";
            break;
        case '\n':
            out += "\\n";
            break;
        case '\r':
            break;
        default:
            out += c;
        }
    }
    return out;
}

[[nodiscard]] inline const char* dot_shape(NodeKind k)
{
    switch (k) {
    case NodeKind::goal:
    case NodeKind::away_goal:
    case NodeKind::context:
        return "box";
    case NodeKind::strategy:
        return "parallelogram";
    case NodeKind::solution:
        return "circle";
    case NodeKind::assumption:
    case NodeKind::justification:
        return "ellipse";
    }
    return "box";
}

} // namespace detail

/// Graphviz DOT text. Nodes and edges are emitted in sorted order, so the
/// output depends only on the case contents.
[[nodiscard]] inline std::string export_dot(const SafetyCase& sc)
{
    std::ostringstream os;
    os << "digraph safety_case {\n";
    os << "  rankdir=TB;\n";
    os << "  node [fontname=\"Helvetica\"];\n";
    for (const auto& [id, node] : sc.nodes()) {
        std::string label = id;
        if (!node.statement.empty()) {
            label += "\n" + node.statement;
        }
        if (node.kind == NodeKind::away_goal && node.module_ref) {
            label += "\n[" + *node.module_ref + "]";
        }
        if (node.kind == NodeKind::assumption) {
            label += "\nA";
        } else if (node.kind == NodeKind::justification) {
            label += "\nJ";
        }
        os << "  \"" << detail::dot_escape(id) << "\" [shape=" << detail::dot_shape(node.kind);
        if (node.kind == NodeKind::context) {
            os << ", style=rounded";
        } else if (node.kind == NodeKind::away_goal) {
            os << ", style=dashed";
        } else if (node.kind == NodeKind::goal && node.undeveloped) {
            os << ", style=\"diagonals\"";
        }
        os << ", label=\"" << detail::dot_escape(label) << "\"];\n";
    }
    auto edges = [&](std::vector<Edge> list, const char* arrow) {
        std::sort(list.begin(), list.end());
        for (const auto& [from, to] : list) {
            os << "  \"" << detail::dot_escape(from) << "\" -> \"" << detail::dot_escape(to) << "\" [arrowhead=" << arrow
               << "];\n";
        }
    };
    edges(sc.supported_by(), "normal");
    edges(sc.in_context_of(), "empty");
    os << "}\n";
    return os.str();
}

} // namespace cbi::gsn
