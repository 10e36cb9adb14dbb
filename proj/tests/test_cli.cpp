#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>

#include "cli.hpp"
#include "mtctrl/io.hpp"

using namespace mtctrl;
namespace fs = std::filesystem;

namespace {

struct Invocation {
    int code;
    std::string out;
    std::string err;
};

Invocation run(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

fs::path dir() {
    const fs::path d = fs::temp_directory_path() / "mtctrl_test_cli";
    fs::create_directories(d);
    return d;
}

std::string write(const std::string& name, const std::string& text) {
    const fs::path p = dir() / name;
    io::write_text(p, text);
    return p.string();
}

const char* kScalarPair = R"({"controller_dim": 1, "systems": [
  {"label": "a", "A": [[-1]], "B": [[1]], "C": [[1]]},
  {"label": "b", "A": [[-1]], "B": [[1]], "C": [[2]]}]})";

const char* kDistinct = R"({"systems": [
  {"A": [[-1]], "B": [[1]], "C": [[1]]},
  {"A": [[-2]], "B": [[1]], "C": [[3]]}]})";

const char* kExact = R"({"systems": [{"A": [[-1]], "B": [[1]], "C": [[0.5]]}]})";

std::string line_value(const std::string& text, const std::string& key) {
    const auto pos = text.find(key);
    if (pos == std::string::npos) return {};
    const auto end = text.find('\n', pos);
    return text.substr(pos + key.size(), end - pos - key.size());
}

}  // namespace

TEST(Cli, UsageErrors) {
    EXPECT_EQ(run({}).code, cli::InputError);
    EXPECT_EQ(run({"frobnicate"}).code, cli::InputError);
    EXPECT_EQ(run({"train"}).code, cli::InputError);
    const Invocation help = run({"--help"});
    EXPECT_EQ(help.code, cli::Ok);
    EXPECT_NE(help.out.find("Exit codes"), std::string::npos);
}

TEST(Cli, MalformedProblemNamesField) {
    const std::string p = write("bad.json", R"({"systems": [{"A": [[-1]], "B": [[1]]}]})");
    const Invocation r = run({"train", "--problem", p, "--dim", "1"});
    EXPECT_EQ(r.code, cli::InputError);
    EXPECT_NE(r.err.find("systems[0]"), std::string::npos) << r.err;
    EXPECT_NE(r.err.find("C"), std::string::npos) << r.err;
    EXPECT_EQ(run({"bounds", "--problem", (dir() / "missing.json").string()}).code, cli::InputError);
}

TEST(Cli, TrainWritesDeterministicResult) {
    const std::string p = write("pair.json", kScalarPair);
    const std::string o1 = (dir() / "r1.json").string(), o2 = (dir() / "r2.json").string();
    const Invocation a = run({"train", "--problem", p, "--seed", "3", "--max-iters", "50", "--out", o1});
    const Invocation b = run({"train", "--problem", p, "--seed", "3", "--max-iters", "50", "--out", o2});
    EXPECT_EQ(a.code, cli::Ok) << a.err;
    EXPECT_EQ(a.out, b.out);
    EXPECT_EQ(io::read_text(o1), io::read_text(o2));
    EXPECT_NE(a.out.find("final cost: "), std::string::npos);
    const io::ResultFile res = io::read_result(o1);
    EXPECT_EQ(res.vars.W.rows(), 1);
    EXPECT_EQ(res.config.seed, 3u);
    EXPECT_EQ(std::stod(line_value(a.out, "final cost: ")), res.cost_history.back());
}

TEST(Cli, TrainExactProblemConverges) {
    const std::string p = write("exact.json", kExact);
    const Invocation r = run({"train", "--problem", p, "--dim", "1", "--max-iters", "2000"});
    EXPECT_EQ(r.code, cli::Ok) << r.err;
    EXPECT_EQ(line_value(r.out, "status: "), "Converged");
    EXPECT_LE(std::stod(line_value(r.out, "final cost: ")), 1e-8);
    EXPECT_EQ(run({"train", "--problem", p}).code, cli::InputError);  // no dimension anywhere
}

TEST(Cli, GradcheckExitCodes) {
    const std::string p = write("pair.json", kScalarPair);
    const Invocation ok = run({"gradcheck", "--problem", p, "--seed", "2"});
    EXPECT_EQ(ok.code, cli::Ok) << ok.out;
    EXPECT_NE(ok.out.find("block,max_rel_error\nW,"), std::string::npos);
    const Invocation bad = run({"gradcheck", "--problem", p, "--seed", "2", "--perturb"});
    EXPECT_EQ(bad.code, cli::SelfTestFailure);
    EXPECT_NE(bad.out.find("FAILED"), std::string::npos);
}

TEST(Cli, BoundsReport) {
    const std::string p = write("pair.json", kScalarPair);
    const Invocation r = run({"bounds", "--problem", p});
    EXPECT_EQ(r.code, cli::Ok) << r.err;
    EXPECT_NEAR(std::stod(line_value(r.out, "lower_l1: ")), 0.482408, 1e-5);
    EXPECT_NEAR(std::stod(line_value(r.out, "lower_sup: ")), 0.5 * std::sqrt(2.0), 1e-12);
    // equal poles: the stacked system has order 1
    EXPECT_EQ(line_value(r.out, "R: "), "1");
    EXPECT_EQ(line_value(r.out, "upper_case: "), "R<=N");
    const Invocation wide = run({"bounds", "--problem", write("distinct.json", kDistinct), "--dim", "1"});
    EXPECT_EQ(line_value(wide.out, "R: "), "2");
    EXPECT_EQ(line_value(wide.out, "upper_case: "), "R>N");
    EXPECT_NE(run({"bounds", "--problem", p, "--dim", "3"}).out.find("not applicable"), std::string::npos);
}

TEST(Cli, SimulateClosedAndOpenLoop) {
    const std::string plants = dir().string();
    ASSERT_EQ(run({"bench", "plants", "--out", plants}).code, cli::Ok);
    const io::ProblemFile cat = io::read_problem(dir() / "plants.json");
    ASSERT_EQ(cat.systems.size(), 4u);
    EXPECT_EQ(cat.labels[0], "aircraft");
    const io::ProblemFile lqg = io::read_problem(dir() / "lqg_controllers.json");
    ASSERT_EQ(lqg.systems.size(), 4u);

    const std::string result = (dir() / "lqg_result.json").string();
    ASSERT_EQ(run({"train", "--problem", (dir() / "lqg_controllers.json").string(), "--max-iters", "20",
                   "--out", result})
                  .code,
              cli::Ok);
    const std::string csv = (dir() / "sim.csv").string();
    const Invocation cl = run({"simulate", "--result", result, "--task", "1", "--plant", (dir() / "plants.json").string(),
                        "--problem", (dir() / "lqg_controllers.json").string(), "--t-max", "1", "--out", csv});
    EXPECT_EQ(cl.code, cli::Ok) << cl.err;
    const io::CsvTable t = io::read_csv(csv);
    EXPECT_EQ(t.header, (std::vector<std::string>{"t", "y_desired_1", "y_neural_1"}));
    EXPECT_EQ(t.rows.size(), 101u);

    const Invocation ol = run({"simulate", "--result", result, "--open-loop", "--t-max", "0.5"});
    EXPECT_EQ(ol.code, cli::Ok) << ol.err;
    EXPECT_EQ(ol.out.rfind("t,y_linear_1,y_neural_1\n0,", 0), 0u) << ol.out.substr(0, 80);

    EXPECT_EQ(run({"simulate", "--result", result, "--open-loop", "--impulse"}).code, cli::InputError);
    EXPECT_EQ(run({"simulate", "--result", result}).code, cli::InputError);
}

TEST(Cli, BenchSweepFiles) {
    const fs::path out = dir() / "sweep";
    const Invocation r = run({"bench", "cost-vs-dim", "--trials", "1", "--iters", "3", "--out", out.string()});
    EXPECT_EQ(r.code, cli::Ok) << r.err;
    const io::CsvTable raw = io::read_csv(out / "cost_vs_dim.csv");
    EXPECT_EQ(raw.header, (std::vector<std::string>{"N", "trial", "seed", "final_cost"}));
    EXPECT_EQ(raw.rows.size(), 8u);
    const io::CsvTable sum = io::read_csv(out / "cost_vs_dim_summary.csv");
    EXPECT_EQ(sum.header, (std::vector<std::string>{"N", "min", "q1", "median", "q3", "max"}));
    EXPECT_EQ(sum.rows.size(), 8u);
}
