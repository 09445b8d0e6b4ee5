#include <gtest/gtest.h>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <sys/wait.h>
#include <unistd.h>

#include "tempagent/cli.hpp"

using namespace tempagent;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

std::string temp_path(const std::string& stem) {
    return (std::filesystem::temp_directory_path() / ("tempagent_cli_" + stem + "_" + std::to_string(::getpid())))
        .string();
}

std::string slurp(const std::string& path) {
    std::ifstream f(path);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

// Runs the installed binary through the shell; `args` is already quoted.
Result run(const std::string& args, const std::string& stdin_text = "", const std::string& env = "") {
    const std::string in = temp_path("in"), out = temp_path("out"), err = temp_path("err");
    std::ofstream(in) << stdin_text;
    std::string cmd = env + " '" TEMPAGENT_CLI_PATH "' " + args + " <'" + in + "' >'" + out + "' 2>'" + err + "'";
    int status = std::system(cmd.c_str());
    Result r{WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(out), slurp(err)};
    std::remove(in.c_str());
    std::remove(out.c_str());
    std::remove(err.c_str());
    return r;
}

std::string model(const std::string& name) { return "'" TEMPAGENT_SHARE_DIR "/" + name + "'"; }

} // namespace

TEST(Cli, ParsePrintsCanonicalForm) {
    auto r = run("parse 'x1->x1'");
    EXPECT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("x1 -> x1\n"), std::string::npos);
    EXPECT_NE(r.out.find("size 3"), std::string::npos);
    auto j = Json::parse(run("parse --format json 'K1 x1 & N x2'").out);
    EXPECT_EQ(j["formula"], "K1 x1 & N x2");
    EXPECT_EQ(j["max_agent"], 1);
    EXPECT_EQ(parse(j["formula"].get<std::string>()), parse("K1 x1 & N x2"));
}

TEST(Cli, SyntaxErrorsExitTwo) {
    auto r = run("parse 'Unc x1 &'");
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("1:9"), std::string::npos) << r.err;
    EXPECT_EQ(run("parse").code, 2);
    EXPECT_EQ(run("frobnicate x1").code, 2);
    EXPECT_EQ(run("sat x1 --bounds 1,2").code, 2);
    EXPECT_EQ(run("sat x1 --format yaml").code, 2);
    EXPECT_EQ(run("nf 'x1 -> x1'").code, 2);
}

TEST(Cli, StdinAndFileInput) {
    auto r = run("parse -", "x1 &\n x2");
    EXPECT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("x1 & x2"), std::string::npos);
    const auto path = temp_path("formula");
    std::ofstream(path) << "Unc x1";
    EXPECT_NE(run("parse --file '" + path + "'").out.find("Unc x1"), std::string::npos);
    std::remove(path.c_str());
    EXPECT_EQ(run("parse --file /nonexistent/formula.txt").code, 3);
}

TEST(Cli, EvalSharedBlockUncertainty) {
    auto r = run("eval --model " + model("two_state_cluster.json") + " 'Unc x1' --format json");
    ASSERT_EQ(r.code, 0) << r.err;
    auto j = Json::parse(r.out);
    EXPECT_EQ(j["truth"], Json::parse(R"({"t0.a":true,"t0.b":true})"));
}

TEST(Cli, EvalTrueEverywhereOnEverySample) {
    for (const auto& entry : std::filesystem::directory_iterator(TEMPAGENT_SHARE_DIR)) {
        auto r = run("valid --model '" + entry.path().string() + "' true --format json");
        ASSERT_EQ(r.code, 0) << entry.path() << r.err;
        auto j = Json::parse(r.out);
        EXPECT_TRUE(j["valid"].get<bool>());
        for (const auto& [state, v] : j["truth"].items()) EXPECT_TRUE(v.get<bool>()) << state;
        // Cross-check the file against the library directly.
        Model m = load_model(entry.path().string());
        auto t = eval(m, parse("x1 | KnI x1"));
        auto cli = Json::parse(run("eval --model '" + entry.path().string() + "' 'x1 | KnI x1' --format json").out);
        EXPECT_EQ(cli["truth"], t.to_json());
    }
}

TEST(Cli, ModelErrorsExitThree) {
    EXPECT_EQ(run("eval --model /nonexistent/model.json x1").code, 3);
    const auto path = temp_path("badmodel");
    std::ofstream(path) << R"({"agents":1,"time_clusters":[{"states":["a"],"partitions":[[["a"]]]}],"valuation":{"x1":["t0.q"]}})";
    auto r = run("eval --model '" + path + "' x1");
    EXPECT_EQ(r.code, 3);
    EXPECT_NE(r.err.find("unknown state"), std::string::npos);
    std::remove(path.c_str());
    EXPECT_EQ(run("eval --model " + model("two_state_cluster.json") + " 'K2 x1'").code, 3);
    EXPECT_EQ(run("eval --model " + model("lasso_with_chain.json") + " 'D1 x1' --horizon 2").code, 3);
}

TEST(Cli, ValidReportsRefutationWithExitOne) {
    EXPECT_EQ(run("valid --model " + model("two_state_cluster.json") + " 'x1 -> K1 x1'").code, 1);
    EXPECT_EQ(run("valid --model " + model("two_state_cluster.json") + " 'K1 x1 -> x1'").code, 0);
}

TEST(Cli, TheoremUpToBounds) {
    auto r = run("theorem 'K1 x1 -> x1' --bounds 2,2,1,1");
    EXPECT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("no countermodel within bounds"), std::string::npos);
    auto c = run("theorem 'x1 -> K1 x1' --format json");
    EXPECT_EQ(c.code, 1);
    auto j = Json::parse(c.out);
    EXPECT_EQ(j["verdict"], "witness");
    EXPECT_EQ(j["state"], "t0.a");
    EXPECT_EQ(j["model"]["valuation"]["x1"], Json::parse(R"(["t0.a"])"));
}

TEST(Cli, SatWitnessFeedsBackIntoEval) {
    const auto path = temp_path("witness");
    auto r = run("sat 'Unc x1 & N x2' --bounds 2,2,0,1 --output '" + path + "' --format json");
    ASSERT_EQ(r.code, 0) << r.err;
    auto j = Json::parse(r.out);
    EXPECT_EQ(Json::parse(slurp(path)), j["model"]);
    auto e = Json::parse(run("eval --model '" + path + "' 'Unc x1 & N x2' --format json").out);
    EXPECT_TRUE(e["truth"][j["state"].get<std::string>()].get<bool>());
    std::remove(path.c_str());
    EXPECT_EQ(run("sat 'x1 & ~x1' --bounds 1,2,0,1").code, 1);
}

TEST(Cli, NormalForm) {
    auto r = run("nf 'x1->x1 |- x1' --format json");
    ASSERT_EQ(r.code, 0);
    auto j = Json::parse(r.out);
    EXPECT_GE(j["disjuncts"].size(), 1u);
    EXPECT_EQ(j["conclusion"], "x1");
    EXPECT_EQ(run("nf 'x1 Until x2 |- x2 Until x1' --cap 16").code, 4);
}

TEST(Cli, RuleCheck) {
    EXPECT_EQ(run("rule-check 'x1 |- x1' --bounds 2,2,0,1").code, 0);
    EXPECT_EQ(run("rule-check 'x1 -> x1 |- x1' --bounds 2,2,0,1").code, 1);
    EXPECT_EQ(run("rule-check 'x1 -> x1 |- x1' --rnf --bounds 2,2,0,1").code, 1);
    EXPECT_EQ(run("rule-check 'x1 |- K1 x1' --model " + model("two_state_cluster.json")).code, 0);
    EXPECT_EQ(run("rule-check 'x1 -> x1 |- x1' --model " + model("two_state_cluster.json")).code, 1);
}

TEST(Cli, CapExitsFour) {
    auto r = run("theorem 'K1 x1 -> x1' --cap 10");
    EXPECT_EQ(r.code, 4);
    EXPECT_NE(r.err.find("10"), std::string::npos);
    EXPECT_EQ(run("theorem 'K1 x1 -> x1'", "", "TEMPAGENT_CAP=10").code, 4);
    EXPECT_EQ(run("theorem 'K1 x1 -> x1'", "", "TEMPAGENT_CAP=ten").code, 2);
}

TEST(Cli, InProcessMatchesBinary) {
    std::istringstream in;
    std::ostringstream out, err;
    int code = cli::run_cli({"eval", "--model", TEMPAGENT_SHARE_DIR "/interaction.json", "KnI x1", "--format", "json"},
                            in, out, err);
    auto r = run("eval --model " + model("interaction.json") + " 'KnI x1' --format json");
    EXPECT_EQ(code, r.code);
    EXPECT_EQ(out.str(), r.out);
}

TEST(Cli, HelpExitsZero) {
    auto r = run("--help");
    EXPECT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("theorem"), std::string::npos);
}
