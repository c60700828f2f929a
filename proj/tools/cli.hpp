#pragma once

// The `cbi` command line. All logic lives in run_cli so tests can drive it
// with in-memory streams.
//
// Exit codes: 0 success, 1 usage or parse error, 2 infeasible constraints,
// 3 validation failure (data invariants, GSN violations, unsatisfied goals,
// audit violations).

#include "cbi/cbi.hpp"
#include "cbi/io/csv.hpp"
#include "cbi/io/json_io.hpp"

#include "CLI11.hpp"

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iterator>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace cbi::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitInfeasible = 2;
inline constexpr int kExitValidation = 3;

namespace detail {

[[nodiscard]] inline std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ParseError("cannot open '" + path + "'");
    }
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

[[nodiscard]] inline io::Json read_json(const std::string& path)
{
    return io::parse_json(read_file(path), path);
}

template <typename F>
[[nodiscard]] auto read_csv(const std::string& path, F&& reader)
{
    std::istringstream in(read_file(path));
    try {
        return reader(in);
    } catch (const ParseError& e) {
        throw ParseError(path + ": " + e.what());
    }
}

/// Writes to `path`, or to `out` when the path is empty. Content is fully
/// formed before the file is opened, so failures never leave partial output.
inline void emit(const std::string& text, const std::string& path, std::ostream& out)
{
    if (path.empty()) {
        out << text;
        return;
    }
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) {
        throw ParseError("cannot write '" + path + "'");
    }
    f << text;
}

[[nodiscard]] inline std::string dump(const io::Json& j)
{
    return j.dump(2) + "\n";
}

struct Common
{
    std::string constraints;
    std::string observation;
    std::string objective;
    std::string log;
    std::size_t grid = kDefaultGridResolution;
    std::uint64_t seed = 1;
    std::string out;
};

[[nodiscard]] inline std::vector<PartialPriorConstraint> load_constraints(const Common& c)
{
    if (c.constraints.empty()) {
        throw ParseError("--constraints is required");
    }
    return io::constraints_from_json(read_json(c.constraints));
}

/// The objective comes from --objective, or from an "objective" key in the
/// constraints document.
[[nodiscard]] inline ObjectiveSpec load_objective(const Common& c)
{
    if (!c.objective.empty()) {
        return io::objective_from_json(read_json(c.objective));
    }
    if (!c.constraints.empty()) {
        const auto doc = read_json(c.constraints);
        if (doc.is_object() && doc.contains("objective")) {
            return io::objective_from_json(doc);
        }
    }
    throw ParseError("--objective is required");
}

/// The observation comes from --log (ingested), --observation, or an
/// "observation" key in the constraints document.
[[nodiscard]] inline Observation load_observation(const Common& c)
{
    if (!c.log.empty()) {
        return ingest(read_csv(c.log, [](std::istream& in) { return io::read_demand_log(in); }));
    }
    if (!c.observation.empty()) {
        return io::observation_from_json(read_json(c.observation));
    }
    if (!c.constraints.empty()) {
        const auto doc = read_json(c.constraints);
        if (doc.is_object() && doc.contains("observation")) {
            return io::observation_from_json(doc);
        }
    }
    throw ParseError("--observation or --log is required");
}

[[nodiscard]] inline std::set<std::string> split_list(const std::string& s)
{
    std::set<std::string> out;
    std::string cur;
    std::istringstream in(s);
    while (std::getline(in, cur, ',')) {
        if (!cur.empty()) {
            out.insert(cur);
        }
    }
    return out;
}

/// `points` log-spaced demand counts from n_min to n_max inclusive, rounded
/// and de-duplicated.
[[nodiscard]] inline std::vector<std::uint64_t> log_spaced(std::uint64_t n_min, std::uint64_t n_max, std::size_t points)
{
    if (n_min == 0 || n_max < n_min || points == 0) {
        throw InvalidInput("log-spaced range needs 0 < n-min <= n-max and at least one point");
    }
    std::vector<std::uint64_t> out;
    const double a = std::log10(static_cast<double>(n_min));
    const double b = std::log10(static_cast<double>(n_max));
    for (std::size_t i = 0; i < points; ++i) {
        const double f = points == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(points - 1);
        auto n = static_cast<std::uint64_t>(std::llround(std::pow(10.0, a + f * (b - a))));
        n = std::clamp(n, n_min, n_max);
        if (out.empty() || n > out.back()) {
            out.push_back(n);
        }
    }
    return out;
}

[[nodiscard]] inline std::string infeasible_message(const CbiResult& r,
                                                    const std::vector<PartialPriorConstraint>& constraints)
{
    FeasibilityReport rep;
    rep.unsatisfiable = r.unsatisfiable;
    return "infeasible: " + rep.message(constraints);
}

} // namespace detail

/// Runs the command line; `args` excludes the program name.
inline int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Conservative Bayesian reliability claims and safety-case tooling", "cbi"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all");

    detail::Common common;
    auto add_common = [&](CLI::App* sub, bool needs_obs) {
        sub->add_option("--constraints", common.constraints, "Constraint list (JSON)");
        sub->add_option("--objective", common.objective, "Objective (JSON)");
        if (needs_obs) {
            sub->add_option("--observation", common.observation, "Observation {n,k} (JSON)");
            sub->add_option("--log", common.log, "Demand log CSV, ingested in place of --observation");
        }
        sub->add_option("--grid", common.grid, "Grid resolution")->check(CLI::Range(2, 1000000));
        sub->add_option("--out", common.out, "Output path (default: standard output)");
    };

    auto* solve_cmd = app.add_subcommand("solve", "Conservative bound for one observation");
    add_common(solve_cmd, true);

    auto* curve_cmd = app.add_subcommand("curve", "Bound as a function of the demand count, as CSV n,bound");
    add_common(curve_cmd, false);
    std::vector<std::uint64_t> n_values;
    std::uint64_t n_min = 100;
    std::uint64_t n_max = 1000000;
    std::size_t n_points = 41;
    std::uint64_t curve_k = 0;
    curve_cmd->add_option("--n-values", n_values, "Explicit demand counts")->delimiter(',');
    curve_cmd->add_option("--n-min", n_min, "Smallest demand count (log-spaced mode)");
    curve_cmd->add_option("--n-max", n_max, "Largest demand count (log-spaced mode)");
    curve_cmd->add_option("--points", n_points, "Number of log-spaced demand counts");
    curve_cmd->add_option("--k", curve_k, "Failures at every point");

    auto* prior_cmd = app.add_subcommand("prior-from-verification", "Confidence-bound prior from verified coverage");
    std::string intervals_path;
    std::string cells_path;
    std::string profile_path;
    double theta = 0.0;
    std::string prior_out;
    prior_cmd->add_option("--profile", profile_path,
                          "Profile: JSON segments for --intervals (default uniform on [0,1]), CSV point_id,weight for --cells");
    prior_cmd->add_option("--theta", theta, "Trust in the verification")->required();
    prior_cmd->add_option("--out", prior_out, "Output path");
    auto* coverage_src = prior_cmd->add_option_group("coverage");
    coverage_src->add_option("--intervals", intervals_path, "Covered intervals CSV lo,hi");
    coverage_src->add_option("--cells", cells_path, "Covered cells CSV point_id,covered");
    coverage_src->require_option(1);

    auto* measure_cmd = app.add_subcommand("measure", "Empirical measures over a labelled dataset");
    std::string dataset_path;
    std::string kind = "pfd";
    std::string decomposition_path;
    std::string measure_out;
    auto* measure_src = measure_cmd->add_option_group("source");
    measure_src->add_option("--dataset", dataset_path, "Dataset CSV point_id,weight,disagree");
    measure_src->add_option("--decomposition", decomposition_path, "Error decomposition JSON");
    measure_src->require_option(1);
    measure_cmd->add_option("--kind", kind, "Measure for --dataset")->check(CLI::IsMember({"pfd", "interpretability"}));
    measure_cmd->add_option("--out", measure_out, "Output path");

    auto* gsn_cmd = app.add_subcommand("gsn", "Safety-case validation, rendering and evaluation");
    gsn_cmd->require_subcommand(1);
    std::string case_path;
    std::string modules;
    auto* gsn_validate = gsn_cmd->add_subcommand("validate", "Report structural violations");
    auto* gsn_render = gsn_cmd->add_subcommand("render", "Graphviz DOT export");
    auto* gsn_evaluate = gsn_cmd->add_subcommand("evaluate", "Evaluate quantitative goal claims");
    for (auto* sub : {gsn_validate, gsn_render, gsn_evaluate}) {
        sub->add_option("--case", case_path, "Safety case JSON")->required();
        sub->add_option("--out", common.out, "Output path");
    }
    gsn_validate->add_option("--modules", modules, "Comma-separated module registry for away-goals");
    gsn_evaluate->add_option("--observation", common.observation, "Observation {n,k} (JSON)");
    gsn_evaluate->add_option("--log", common.log, "Demand log CSV");
    gsn_evaluate->add_option("--grid", common.grid, "Grid resolution")->check(CLI::Range(2, 1000000));

    auto* sim_cmd = app.add_subcommand("simulate", "Bernoulli demand log as CSV index,outcome");
    double true_pfd = 0.0;
    std::uint64_t sim_n = 0;
    sim_cmd->add_option("--pfd", true_pfd, "True probability of failure on demand")->required();
    sim_cmd->add_option("--n", sim_n, "Number of demands")->required();
    sim_cmd->add_option("--seed", common.seed, "Random seed");
    sim_cmd->add_option("--out", common.out, "Output path");

    auto* audit_cmd = app.add_subcommand("audit", "Empirical conservatism audit against sampled priors");
    add_common(audit_cmd, true);
    std::uint64_t trials = 1000;
    double shift = 0.0;
    audit_cmd->add_option("--trials", trials, "Number of sampled priors");
    audit_cmd->add_option("--seed", common.seed, "Random seed");
    audit_cmd->add_option("--shift", shift, "Anti-conservative bound shift (test-power check)");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (solve_cmd->parsed()) {
            const auto constraints = detail::load_constraints(common);
            const auto objective = detail::load_objective(common);
            const auto obs = detail::load_observation(common);
            const auto grid = build_grid(constraints, objective, common.grid);
            const auto r = solve(constraints, obs, objective, grid);
            detail::emit(detail::dump(io::to_json(r, constraints)), common.out, out);
            if (r.status == SolverStatus::infeasible) {
                err << detail::infeasible_message(r, constraints) << '\n';
                return kExitInfeasible;
            }
            return kExitOk;
        }

        if (curve_cmd->parsed()) {
            const auto constraints = detail::load_constraints(common);
            const auto objective = detail::load_objective(common);
            auto ns = n_values.empty() ? detail::log_spaced(n_min, n_max, n_points) : n_values;
            const auto grid = build_grid(constraints, objective, common.grid);
            const auto feas = check_feasible(constraints, grid);
            if (!feas.feasible) {
                err << "infeasible: " << feas.message(constraints) << '\n';
                return kExitInfeasible;
            }
            const auto points = curve(constraints, objective, ns, curve_k, grid);
            std::ostringstream csv;
            io::write_curve(csv, points);
            detail::emit(csv.str(), common.out, out);
            return kExitOk;
        }

        if (prior_cmd->parsed()) {
            double epsilon = 0.0;
            if (!intervals_path.empty()) {
                IntervalCoverage cov;
                cov.covered = detail::read_csv(intervals_path, [](std::istream& in) { return io::read_intervals(in); });
                if (!profile_path.empty()) {
                    cov.profile = io::interval_profile_from_json(detail::read_json(profile_path));
                }
                epsilon = coverage_bound(cov);
            } else {
                if (profile_path.empty()) {
                    throw ParseError("--cells needs --profile (CSV point_id,weight)");
                }
                DiscreteCoverage cov;
                cov.cells = detail::read_csv(cells_path, [](std::istream& in) { return io::read_cells(in); });
                cov.profile = detail::read_csv(profile_path, [](std::istream& in) { return io::read_profile(in); });
                epsilon = coverage_bound(cov);
            }
            const auto c = prior_from_verification(epsilon, theta);
            io::Json j;
            j["epsilon"] = epsilon;
            j["theta"] = theta;
            j["constraints"] = io::to_json(std::vector<PartialPriorConstraint>{c});
            detail::emit(detail::dump(j), prior_out, out);
            return kExitOk;
        }

        if (measure_cmd->parsed()) {
            io::Json j;
            if (!dataset_path.empty()) {
                const auto data = detail::read_csv(dataset_path, [](std::istream& in) { return io::read_dataset(in); });
                j["kind"] = kind;
                j["value"] = kind == "pfd" ? empirical_pfd(data) : interpretability_measure(data);
                j["items"] = data.items().size();
            } else {
                const auto d = io::decomposition_from_json(detail::read_json(decomposition_path));
                j["bayes_error"] = d.bayes_error;
                j["approximation_error"] = d.approximation_error;
                j["estimation_error"] = d.estimation_error;
                j["total_error"] = total_error(d);
            }
            detail::emit(detail::dump(j), measure_out, out);
            return kExitOk;
        }

        if (gsn_cmd->parsed()) {
            const auto sc = io::safety_case_from_json(detail::read_json(case_path));
            if (gsn_validate->parsed()) {
                const auto violations = gsn::validate(sc, detail::split_list(modules));
                detail::emit(detail::dump(io::to_json(violations)), common.out, out);
                for (const auto& v : violations) {
                    err << v.text() << '\n';
                }
                return violations.empty() ? kExitOk : kExitValidation;
            }
            if (gsn_render->parsed()) {
                detail::emit(gsn::export_dot(sc), common.out, out);
                return kExitOk;
            }
            const auto obs = detail::load_observation(common);
            const auto evaluation = gsn::evaluate_case(sc, obs, common.grid);
            detail::emit(detail::dump(io::to_json(evaluation)), common.out, out);
            bool all_bound_satisfied = true;
            for (const auto& [id, ev] : evaluation) {
                if (sc.find(id)->claim && ev.status != gsn::GoalStatus::satisfied) {
                    all_bound_satisfied = false;
                }
            }
            return all_bound_satisfied ? kExitOk : kExitValidation;
        }

        if (sim_cmd->parsed()) {
            const auto log = simulate_demands(true_pfd, sim_n, common.seed);
            std::ostringstream csv;
            io::write_demand_log(csv, log);
            detail::emit(csv.str(), common.out, out);
            return kExitOk;
        }

        if (audit_cmd->parsed()) {
            const auto constraints = detail::load_constraints(common);
            const auto objective = detail::load_objective(common);
            const auto obs = detail::load_observation(common);
            AuditOptions opt;
            opt.grid_resolution = common.grid;
            opt.anti_conservative_shift = shift;
            const auto report = check_conservatism(constraints, obs, objective, trials, common.seed, opt);
            detail::emit(detail::dump(io::to_json(report)), common.out, out);
            return report.violations == 0 ? kExitOk : kExitValidation;
        }
    } catch (const InfeasibleConstraints& e) {
        err << "infeasible: " << e.what() << '\n';
        return kExitInfeasible;
    } catch (const InvalidDataset& e) {
        err << "invalid dataset: " << e.what() << '\n';
        return kExitValidation;
    } catch (const InvalidDecomposition& e) {
        err << "invalid decomposition: " << e.what() << '\n';
        return kExitValidation;
    } catch (const InvalidCoverage& e) {
        err << "invalid coverage: " << e.what() << '\n';
        return kExitValidation;
    } catch (const ParseError& e) {
        err << "parse error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const InvalidInput& e) {
        err << "invalid input: " << e.what() << '\n';
        return kExitUsage;
    } catch (const ZeroEvidenceError& e) {
        err << "zero evidence: " << e.what() << '\n';
        return kExitUsage;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    }
    return kExitUsage;
}

} // namespace cbi::cli
