#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "cli/commands.hpp"

using namespace torsflow::cli;

namespace {

struct Outcome {
    int code = 0;
    std::string out, err;
};

Outcome run_cli(std::vector<std::string> args) {
    args.insert(args.begin(), "torsflow");
    std::ostringstream out, err;
    const int code = run(args, out, err);
    return {code, out.str(), err.str()};
}

std::string data(const std::string& file) { return std::string(TORSFLOW_DATA_DIR) + "/" + file; }

double text_total(const std::string& report, const std::string& key) {
    const auto at = report.rfind(key);
    EXPECT_NE(at, std::string::npos);
    return std::stod(report.substr(at + key.size()));
}

class ScopedEnv {
public:
    ScopedEnv(const char* value) { setenv("TORSFLOW_TOLERANCE", value, 1); }
    ~ScopedEnv() { unsetenv("TORSFLOW_TOLERANCE"); }
};

}  // namespace

TEST(Cli, ComputeKovalevskaya) {
    const Outcome r = run_cli({"compute", "--input", data("kovalevskaya.json")});
    ASSERT_EQ(r.code, kExitOk) << r.err;
    EXPECT_NEAR(text_total(r.out, "total torsion modulus: "), 4.0, 1e-9);
}

TEST(Cli, TextAndJsonAgree) {
    const Outcome text = run_cli({"compute", "--input", data("kovalevskaya.json"), "--mode", "full"});
    const Outcome json = run_cli({"compute", "--input", data("kovalevskaya.json"), "--mode", "full", "--format", "json"});
    ASSERT_EQ(json.code, kExitOk) << json.err;
    const auto doc = nlohmann::json::parse(json.out);
    EXPECT_NEAR(doc["total"]["modulus"].get<double>(), text_total(text.out, "total torsion modulus: "), 1e-11);
    EXPECT_EQ(doc["mode"], "full");
    EXPECT_TRUE(doc["acyclic"].get<bool>());
}

TEST(Cli, JsonIsReproducible) {
    const std::vector<std::string> args{"compute", "--input", data("torus_klein.json"), "--format", "json"};
    const Outcome a = run_cli(args), b = run_cli(args);
    ASSERT_EQ(a.code, kExitOk) << a.err;
    EXPECT_EQ(a.out, b.out);
}

TEST(Cli, FastModeOnNonAcyclicSaddlesIsRejected) {
    const Outcome r = run_cli({"compute", "--input", data("kovalevskaya.json"), "--mode", "fast"});
    EXPECT_EQ(r.code, kExitValidation);
    EXPECT_NE(r.err.find("FastPathUnavailable"), std::string::npos);
}

TEST(Cli, OracleLensAndRepresentation) {
    const Outcome r = run_cli({"oracle", "--lens", "2,1", "--rep", data("rep_minus_one.json")});
    ASSERT_EQ(r.code, kExitOk) << r.err;
    EXPECT_NEAR(text_total(r.out, "torsion modulus: "), 4.0, 1e-9);
    const Outcome t = run_cli({"oracle", "--lens", "2,1", "--rep", data("rep_trivial.json"), "--format", "json"});
    ASSERT_EQ(t.code, kExitOk) << t.err;
    EXPECT_EQ(nlohmann::json::parse(t.out)["dims"], nlohmann::json({1, 0, 0, 1}));
}

TEST(Cli, ExportRoundTrip) {
    const Outcome e = run_cli({"export", "--name", "torus"});
    ASSERT_EQ(e.code, kExitOk) << e.err;
    const std::string path = ::testing::TempDir() + "torsflow_torus.json";
    std::ofstream(path) << e.out;
    const Outcome o = run_cli({"oracle", "--cw", path, "--format", "json"});
    ASSERT_EQ(o.code, kExitOk) << o.err;
    EXPECT_EQ(nlohmann::json::parse(o.out)["dims"], nlohmann::json({1, 2, 1}));
    EXPECT_EQ(run_cli({"export", "--list"}).code, kExitOk);
}

TEST(Cli, ExitCodes) {
    EXPECT_EQ(run_cli({}).code, kExitValidation);
    EXPECT_EQ(run_cli({"--help"}).code, kExitOk);
    EXPECT_EQ(run_cli({"compute"}).code, kExitValidation);
    EXPECT_EQ(run_cli({"compute", "--input", data("missing.json")}).code, kExitParse);
    EXPECT_EQ(run_cli({"oracle", "--lens", "4,2"}).code, kExitValidation);
    EXPECT_EQ(run_cli({"compute", "--input", data("kovalevskaya.json"), "--tolerance", "0"}).code, kExitValidation);

    const std::string bad = ::testing::TempDir() + "torsflow_bad.json";
    std::ofstream(bad) << "{ not json";
    EXPECT_EQ(run_cli({"compute", "--input", bad}).code, kExitParse);
}

TEST(Cli, ToleranceFromEnvironment) {
    {
        ScopedEnv env("2");
        EXPECT_EQ(run_cli({"compute", "--input", data("kovalevskaya.json")}).code, kExitValidation);
        // the flag wins over the environment
        EXPECT_EQ(run_cli({"compute", "--input", data("kovalevskaya.json"), "--tolerance", "1e-9"}).code, kExitOk);
    }
    ScopedEnv env("1e-8");
    const Outcome r = run_cli({"compute", "--input", data("kovalevskaya.json"), "--format", "json"});
    ASSERT_EQ(r.code, kExitOk) << r.err;
    EXPECT_DOUBLE_EQ(nlohmann::json::parse(r.out)["tolerance"].get<double>(), 1e-8);
}
