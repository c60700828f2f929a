#include "cli.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace cbi;
using cli::run_cli;

namespace {

namespace fs = std::filesystem;

std::string fixture(const std::string& name)
{
    return std::string(CBI_FIXTURE_DIR) + "/" + name;
}

struct Run
{
    int code = -1;
    std::string out;
    std::string err;
};

Run run(const std::vector<std::string>& args)
{
    std::ostringstream out;
    std::ostringstream err;
    Run r;
    r.code = run_cli(args, out, err);
    r.out = out.str();
    r.err = err.str();
    return r;
}

/// A scratch directory removed when the test ends.
class CliTest : public ::testing::Test
{
protected:
    void SetUp() override
    {
        const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
        dir_ = fs::temp_directory_path() / (std::string("cbi_cli_") + info->name());
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }

    void TearDown() override { fs::remove_all(dir_); }

    [[nodiscard]] std::string path(const std::string& name) const { return (dir_ / name).string(); }

    std::string write(const std::string& name, const std::string& text) const
    {
        std::ofstream(path(name), std::ios::binary) << text;
        return path(name);
    }

    [[nodiscard]] static std::string read(const std::string& p)
    {
        std::ifstream in(p, std::ios::binary);
        std::ostringstream s;
        s << in.rdbuf();
        return s.str();
    }

private:
    fs::path dir_;
};

} // namespace

TEST_F(CliTest, SolveWritesJsonResult)
{
    const auto r = run({"solve", "--constraints", fixture("solve_cb.json"), "--grid", "100"});
    ASSERT_EQ(r.code, cli::kExitOk) << r.err;
    const auto j = io::parse_json(r.out);
    EXPECT_GT(j["bound"].get<double>(), 0.85);
    EXPECT_LT(j["bound"].get<double>(), 0.95);
    EXPECT_EQ(j["observation"]["n"], 10000);
}

TEST_F(CliTest, SolveWithSeparateDocumentsAndLog)
{
    const auto cs = write("cs.json", R"([{"type":"mean_bound","m":0.01}])");
    const auto obj = write("obj.json", R"({"type":"posterior_expected_pfd"})");
    const auto out = path("result.json");
    const auto r = run({"solve", "--constraints", cs, "--objective", obj, "--log", fixture("demand_log.csv"), "--grid",
                        "80", "--out", out});
    ASSERT_EQ(r.code, cli::kExitOk) << r.err;
    EXPECT_TRUE(r.out.empty());
    const auto j = io::parse_json(read(out));
    EXPECT_EQ(j["observation"]["n"], 4);
    EXPECT_EQ(j["observation"]["k"], 1);
}

TEST_F(CliTest, SolveInfeasibleExitsTwoWithSubset)
{
    const auto r = run({"solve", "--constraints", fixture("infeasible.json"), "--grid", "60"});
    EXPECT_EQ(r.code, cli::kExitInfeasible);
    EXPECT_EQ(io::parse_json(r.out)["unsatisfiable"].size(), 2U);
    EXPECT_NE(r.err.find("infeasible"), std::string::npos);
}

TEST_F(CliTest, UsageAndParseErrorsExitOne)
{
    EXPECT_EQ(run({}).code, cli::kExitUsage);
    EXPECT_EQ(run({"frobnicate"}).code, cli::kExitUsage);
    EXPECT_EQ(run({"solve"}).code, cli::kExitUsage);
    EXPECT_EQ(run({"solve", "--constraints", fixture("missing.json")}).code, cli::kExitUsage);
    const auto bad = write("bad.json", "{\"constraints\": [");
    const auto r = run({"solve", "--constraints", bad});
    EXPECT_EQ(r.code, cli::kExitUsage);
    EXPECT_NE(r.err.find("byte"), std::string::npos) << r.err;
    EXPECT_EQ(run({"solve", "--constraints", fixture("solve_cb.json"), "--grid", "1"}).code, cli::kExitUsage);
    EXPECT_EQ(run({"--help"}).code, cli::kExitOk);
}

TEST_F(CliTest, ZeroEvidenceExitsOne)
{
    const auto cs = write("pc.json", R"({"constraints":[{"type":"perfection_confidence","theta":1}],
        "objective":{"type":"posterior_expected_pfd"},"observation":{"n":10,"k":1}})");
    const auto r = run({"solve", "--constraints", cs, "--grid", "40"});
    EXPECT_EQ(r.code, cli::kExitUsage);
    EXPECT_NE(r.err.find("zero evidence"), std::string::npos) << r.err;
}

TEST_F(CliTest, CurveExplicitAndLogSpaced)
{
    const auto out = path("curve.csv");
    auto r = run({"curve", "--constraints", fixture("solve_cb.json"), "--n-values", "100,1000,10000", "--grid", "60",
                  "--out", out});
    ASSERT_EQ(r.code, cli::kExitOk) << r.err;
    std::istringstream csv(read(out));
    std::string line;
    std::getline(csv, line);
    EXPECT_EQ(line, "n,bound");
    double prev = 0.0;
    int rows = 0;
    while (std::getline(csv, line)) {
        const double b = std::stod(line.substr(line.find(',') + 1));
        EXPECT_GE(b, prev - 1e-9);
        prev = b;
        ++rows;
    }
    EXPECT_EQ(rows, 3);

    r = run({"curve", "--constraints", fixture("solve_cb.json"), "--n-min", "100", "--n-max", "1000", "--points", "5",
             "--grid", "60"});
    ASSERT_EQ(r.code, cli::kExitOk) << r.err;
    EXPECT_EQ(r.out.rfind("n,bound\n100,", 0), 0U) << r.out;
    EXPECT_NE(r.out.find("\n1000,"), std::string::npos) << r.out;
}

TEST_F(CliTest, CurveFailureLeavesNoOutputFile)
{
    const auto out = path("curve.csv");
    const auto r = run({"curve", "--constraints", fixture("infeasible.json"), "--n-values", "10,100", "--grid", "60",
                        "--out", out});
    EXPECT_EQ(r.code, cli::kExitInfeasible);
    EXPECT_FALSE(fs::exists(out));
    EXPECT_EQ(run({"curve", "--constraints", fixture("solve_cb.json"), "--n-min", "0", "--out", out}).code,
              cli::kExitUsage);
    EXPECT_FALSE(fs::exists(out));
}

TEST_F(CliTest, PriorFromVerificationIntervals)
{
    auto r = run({"prior-from-verification", "--intervals", fixture("coverage_ninety.csv"), "--theta", "0.9"});
    ASSERT_EQ(r.code, cli::kExitOk) << r.err;
    auto j = io::parse_json(r.out);
    EXPECT_NEAR(j["epsilon"].get<double>(), 0.1, 1e-12);
    const auto cs = io::constraints_from_json(j);
    ASSERT_EQ(cs.size(), 1U);
    EXPECT_EQ(std::get<ConfidenceBound>(cs[0]).theta, 0.9);

    r = run({"prior-from-verification", "--intervals", fixture("coverage_ninety.csv"), "--profile",
             fixture("profile_piecewise.json"), "--theta", "0.5"});
    ASSERT_EQ(r.code, cli::kExitOk) << r.err;
    // Uncovered [0.5, 0.6] carries 0.1 of the upper half's 0.25.
    EXPECT_NEAR(io::parse_json(r.out)["epsilon"].get<double>(), 0.05, 1e-12);
}

TEST_F(CliTest, PriorFromVerificationCells)
{
    const auto r = run({"prior-from-verification", "--cells", fixture("cells_abc.csv"), "--profile",
                        fixture("profile_abc.csv"), "--theta", "0.7"});
    ASSERT_EQ(r.code, cli::kExitOk) << r.err;
    EXPECT_NEAR(io::parse_json(r.out)["epsilon"].get<double>(), 0.2, 1e-12);
    EXPECT_EQ(run({"prior-from-verification", "--cells", fixture("cells_abc.csv"), "--theta", "0.7"}).code,
              cli::kExitUsage);
    EXPECT_EQ(run({"prior-from-verification", "--theta", "0.7"}).code, cli::kExitUsage);
    const auto bad = write("bad.csv", "lo,hi\n0.5,1.5\n");
    EXPECT_EQ(run({"prior-from-verification", "--intervals", bad, "--theta", "0.7"}).code, cli::kExitValidation);
}

TEST_F(CliTest, MeasureDatasetAndDecomposition)
{
    auto r = run({"measure", "--dataset", fixture("dataset_skewed.csv")});
    ASSERT_EQ(r.code, cli::kExitOk) << r.err;
    EXPECT_NEAR(io::parse_json(r.out)["value"].get<double>(), 0.7, 1e-12);
    r = run({"measure", "--dataset", fixture("dataset_tenths.csv"), "--kind", "interpretability"});
    ASSERT_EQ(r.code, cli::kExitOk) << r.err;
    EXPECT_EQ(io::parse_json(r.out)["kind"], "interpretability");
    r = run({"measure", "--decomposition", fixture("decomposition.json")});
    ASSERT_EQ(r.code, cli::kExitOk) << r.err;
    EXPECT_NEAR(io::parse_json(r.out)["total_error"].get<double>(), 0.035, 1e-15);
    EXPECT_EQ(run({"measure", "--dataset", fixture("dataset_skewed.csv"), "--kind", "accuracy"}).code, cli::kExitUsage);
    const auto bad = write("bad.csv", "point_id,weight,disagree\na,0.6,1\nb,0.6,0\n");
    EXPECT_EQ(run({"measure", "--dataset", bad}).code, cli::kExitValidation);
    const auto neg = write("neg.json", R"({"bayes_error":-0.1,"approximation_error":0,"estimation_error":0})");
    EXPECT_EQ(run({"measure", "--decomposition", neg}).code, cli::kExitValidation);
}

TEST_F(CliTest, GsnValidate)
{
    auto r = run({"gsn", "validate", "--case", fixture("fig2_case.json"), "--modules", "VerificationModule,Other"});
    EXPECT_EQ(r.code, cli::kExitOk) << r.err;
    EXPECT_EQ(io::parse_json(r.out).size(), 0U);
    r = run({"gsn", "validate", "--case", fixture("fig2_case.json")});
    EXPECT_EQ(r.code, cli::kExitValidation);
    EXPECT_NE(r.err.find("AG1"), std::string::npos) << r.err;
    r = run({"gsn", "validate", "--case", fixture("defective_case.json")});
    EXPECT_EQ(r.code, cli::kExitValidation);
    const auto j = io::parse_json(r.out);
    std::set<std::string> rules;
    for (const auto& v : j) {
        rules.insert(v["rule"].get<std::string>());
    }
    EXPECT_EQ(rules, (std::set<std::string>{"contextual-support", "cycle"}));
}

TEST_F(CliTest, GsnRenderIsByteIdentical)
{
    const auto a = path("a.dot");
    const auto b = path("b.dot");
    ASSERT_EQ(run({"gsn", "render", "--case", fixture("fig2_case.json"), "--out", a}).code, cli::kExitOk);
    ASSERT_EQ(run({"gsn", "render", "--case", fixture("fig2_case.json"), "--out", b}).code, cli::kExitOk);
    EXPECT_EQ(read(a), read(b));
    EXPECT_EQ(read(a).rfind("digraph", 0), 0U);
    EXPECT_EQ(run({"gsn", "render", "--case", fixture("fig2_case.json")}).out, read(a));
}

TEST_F(CliTest, GsnEvaluateExitReflectsClaims)
{
    const auto good = write("obs.json", R"({"n": 10000, "k": 0})");
    auto r = run({"gsn", "evaluate", "--case", fixture("fig2_case.json"), "--observation", good, "--grid", "100"});
    EXPECT_EQ(r.code, cli::kExitOk) << r.err;
    auto j = io::parse_json(r.out);
    EXPECT_EQ(j["G2"]["status"], "satisfied");
    EXPECT_EQ(j["G1"]["status"], "undeveloped");

    r = run({"gsn", "evaluate", "--case", fixture("fig2_case.json"), "--log", fixture("demand_log.csv"), "--grid",
             "100"});
    EXPECT_EQ(r.code, cli::kExitValidation);
    j = io::parse_json(r.out);
    EXPECT_EQ(j["G2"]["status"], "unsatisfied");
    EXPECT_EQ(j["G1"]["status"], "unsatisfied");
    EXPECT_EQ(run({"gsn", "evaluate", "--case", fixture("fig2_case.json")}).code, cli::kExitUsage);
}

TEST_F(CliTest, SimulateIsReproducibleAndIngestible)
{
    const auto a = run({"simulate", "--pfd", "0.2", "--n", "500", "--seed", "4"});
    const auto b = run({"simulate", "--pfd", "0.2", "--n", "500", "--seed", "4"});
    ASSERT_EQ(a.code, cli::kExitOk) << a.err;
    EXPECT_EQ(a.out, b.out);
    std::istringstream in(a.out);
    const auto obs = ingest(io::read_demand_log(in));
    EXPECT_EQ(obs.n, 500U);
    EXPECT_EQ(run({"simulate", "--pfd", "1.5", "--n", "5"}).code, cli::kExitUsage);
}

TEST_F(CliTest, AuditCleanAndMutated)
{
    const auto cs = write("cs.json", R"({"constraints":[{"type":"confidence_bound","epsilon":0.001,"theta":0.9}],
        "objective":{"type":"future_reliability","t":1000},"observation":{"n":5000,"k":0}})");
    auto r = run({"audit", "--constraints", cs, "--trials", "100", "--grid", "200", "--seed", "3"});
    ASSERT_EQ(r.code, cli::kExitOk) << r.err;
    auto j = io::parse_json(r.out);
    EXPECT_EQ(j["trials"], 100);
    EXPECT_EQ(j["violations"], 0);
    r = run({"audit", "--constraints", cs, "--trials", "100", "--grid", "200", "--seed", "3", "--shift", "0.01"});
    EXPECT_EQ(r.code, cli::kExitValidation);
    EXPECT_GT(io::parse_json(r.out)["violations"].get<int>(), 0);
    EXPECT_EQ(run({"audit", "--constraints", fixture("infeasible.json"), "--trials", "5", "--grid", "60"}).code,
              cli::kExitInfeasible);
}
