#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "wavegraph/cli.hpp"

using namespace wavegraph;
namespace fs = std::filesystem;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run run(std::vector<std::string> args) {
    args.insert(args.begin(), "wavegraph");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

fs::path source_dir() {
    const char* env = std::getenv("WAVEGRAPH_SOURCE_DIR");
    return env ? fs::path(env) : fs::current_path();
}

std::string config(const std::string& name) { return (source_dir() / "configs" / name).string(); }

class CliTest : public ::testing::Test {
  protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               ("wavegraph_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    std::string file(const std::string& name) const { return (dir_ / name).string(); }
    std::string write(const std::string& name, const std::string& text) const {
        std::ofstream(file(name)) << text;
        return file(name);
    }

    fs::path dir_;
};

} // namespace

TEST(Config, SamplesRoundTrip) {
    for (const auto& entry : fs::directory_iterator(source_dir() / "configs")) {
        if (entry.path().extension() != ".json") continue;
        const auto c = load_config(entry.path().string());
        const auto again = parse_config(serialize_config(c));
        EXPECT_TRUE(again == c) << entry.path();
        EXPECT_EQ(serialize_config(again), serialize_config(c));
    }
    const ExperimentConfig defaults;
    EXPECT_TRUE(parse_config(serialize_config(defaults)) == defaults);
}

TEST(Config, RejectsUnknownKeys) {
    auto kind = [](const std::string& text) {
        try {
            parse_config_text(text);
        } catch (const Error& e) {
            return e.kind();
        }
        return ErrorKind::invalid_argument;
    };
    EXPECT_EQ(kind(R"({"pp": 2})"), ErrorKind::parse_error);
    EXPECT_EQ(kind(R"({"graph": {"dimensoin": 2}})"), ErrorKind::parse_error);
    EXPECT_EQ(kind(R"({"simulation": {"u0": {"kind": "gaussian", "width": 2}}})"), ErrorKind::parse_error);
    EXPECT_EQ(kind(R"({"p": "two"})"), ErrorKind::parse_error);
    EXPECT_EQ(kind("{"), ErrorKind::parse_error);
    EXPECT_NO_THROW(parse_config_text(R"({"p": 3, "q": 2})"));
}

TEST_F(CliTest, GenLattice) {
    const auto r = run({"gen", "--lattice", "2", "--half-width", "10", "-o", file("g.txt")});
    EXPECT_EQ(r.code, 0);
    std::ifstream in(file("g.txt"));
    EXPECT_EQ(load_graph(in).vertex_count(), 441u);
}

TEST_F(CliTest, GenNeedsOneGenerator) {
    EXPECT_EQ(run({"gen"}).code, 2);
    EXPECT_EQ(run({"gen", "--lattice", "2", "--path", "4"}).code, 2);
}

TEST_F(CliTest, Validate) {
    ASSERT_EQ(run({"gen", "--tree", "2", "--depth", "3", "-o", file("t.txt")}).code, 0);
    const auto ok = run({"validate", file("t.txt")});
    EXPECT_EQ(ok.code, 0);
    EXPECT_TRUE(Json::parse(ok.out).is_object());

    const auto loop = write("loop.txt", "v 0 1\nv 1 1\ne 0 1 1\ne 1 1 2\n");
    const auto bad = run({"validate", loop});
    EXPECT_EQ(bad.code, 1);
    EXPECT_FALSE(bad.out.empty());

    EXPECT_EQ(run({"validate"}).code, 2);
}

TEST_F(CliTest, AssumptionsL2) {
    const auto r = run({"assumptions", "--lattice", "2", "--half-width", "40", "--metric", "l2", "--alpha", "1",
                        "--R0", "2"});
    EXPECT_EQ(r.code, 0);
    const auto doc = Json::parse(r.out);
    EXPECT_EQ(doc.at("metric"), "l2");
    EXPECT_TRUE(doc.at("calibration").is_object());
}

TEST_F(CliTest, AssumptionsL1Violates) {
    const auto r = run({"assumptions", "--lattice", "2", "--half-width", "40", "--metric", "l1", "--alpha", "1",
                        "--R0", "2"});
    EXPECT_EQ(r.code, 1);
}

TEST_F(CliTest, AssumptionsExplicitBound) {
    const auto args = std::vector<std::string>{"assumptions", "--lattice", "2", "--half-width", "40", "--metric",
                                               "l2",          "--alpha",   "1", "--R0",         "2",  "--C2"};
    auto strict = args;
    strict.push_back("1");
    EXPECT_EQ(run(strict).code, 1);
    auto loose = args;
    loose.push_back("1.05");
    EXPECT_EQ(run(loose).code, 0);
}

TEST_F(CliTest, AssumptionsMissingMetric) {
    EXPECT_EQ(run({"assumptions", "--lattice", "2", "--half-width", "10"}).code, 2);
}

TEST_F(CliTest, CriterionZ1) {
    const auto r = run({"criterion", "--config", config("z1_theorem1.json")});
    EXPECT_EQ(r.code, 0);
    const auto doc = Json::parse(r.out);
    EXPECT_EQ(doc.at("satisfied"), true);
    EXPECT_TRUE(doc.contains("initial_data"));
}

TEST_F(CliTest, CriterionTheorem2) {
    const auto r = run({"criterion", "--config", config("z2_theorem2.json")});
    const auto doc = Json::parse(r.out);
    EXPECT_TRUE(doc.contains("xdelta_norms"));
    EXPECT_EQ(r.code, doc.at("satisfied") == true ? 0 : 1);
}

TEST_F(CliTest, SweepFlipsOnZ3) {
    const auto r = run({"sweep", "--config", config("z3_sweep.json"), "--threads", "4"});
    ASSERT_EQ(r.code, 0);
    std::istringstream in(r.out);
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, sweep_csv_header);
    std::vector<std::string> verdicts;
    while (std::getline(in, line)) {
        std::vector<std::string> cols;
        std::stringstream ss(line);
        for (std::string col; std::getline(ss, col, ',');) cols.push_back(col);
        if (line.back() == ',') cols.emplace_back();
        ASSERT_EQ(cols.size(), 6u) << line;
        verdicts.push_back(cols[4]);
        EXPECT_EQ(cols[5], "");
    }
    EXPECT_EQ(verdicts, (std::vector<std::string>{"satisfied", "satisfied", "not_satisfied", "not_satisfied"}));
}

TEST_F(CliTest, SweepIsDeterministic) {
    const auto a = run({"sweep", "--config", config("z3_sweep.json"), "--threads", "1"});
    const auto b = run({"sweep", "--config", config("z3_sweep.json"), "--threads", "3"});
    EXPECT_EQ(a.out, b.out);
}

TEST_F(CliTest, SweepWithSimulation) {
    const auto cfg = write("s.json", R"({
      "graph": {"generator": "lattice", "dimension": 1, "half_width": 200},
      "R_grid": [8, 16, 32, 64],
      "simulation": {"u0": {"kind": "gaussian", "amplitude": 0.5}, "v0": {"kind": "gaussian", "amplitude": 0.5}, "T": 20},
      "sweep": {"p_values": [2, 3], "q_values": [2], "simulate": true}
    })");
    const auto r = run({"sweep", "--config", cfg, "-o", file("out.csv")});
    ASSERT_EQ(r.code, 0);
    std::ifstream in(file("out.csv"));
    std::string line;
    std::getline(in, line);
    int rows = 0;
    while (std::getline(in, line)) {
        ++rows;
        EXPECT_NE(line.substr(line.rfind(',') + 1), "");
    }
    EXPECT_EQ(rows, 2);
}

TEST_F(CliTest, Simulate) {
    const auto r = run({"simulate", "--config", config("z1_simulate.json"), "-o", file("traj.csv"), "--csv", "summary"});
    EXPECT_EQ(r.code, 0);
    const auto doc = Json::parse(r.out);
    EXPECT_EQ(doc.at("status"), "blowup");
    std::ifstream in(file("traj.csv"));
    std::string header;
    std::getline(in, header);
    EXPECT_EQ(header, "t,sup_u,sup_v");
}

TEST_F(CliTest, SimulateWarnsOnSmallTruncation) {
    const auto cfg = write("s.json", R"({
      "graph": {"generator": "lattice", "dimension": 1, "half_width": 10},
      "simulation": {"u0": {"kind": "gaussian", "amplitude": 0.01}, "T": 30}
    })");
    const auto r = run({"simulate", "--config", cfg});
    EXPECT_EQ(r.code, 0);
    EXPECT_NE(r.err.find("warning"), std::string::npos);
    EXPECT_EQ(Json::parse(r.out).at("warnings").size(), 1u);
}

TEST_F(CliTest, Weakcheck) {
    const auto r = run({"weakcheck", "--config", config("z1_weakcheck.json")});
    ASSERT_EQ(r.code, 0) << r.out;
    const auto doc = Json::parse(r.out);
    EXPECT_GE(doc.at("residual").get<double>(), -1e-9 * doc.at("rhs").get<double>());
}

TEST_F(CliTest, WeakcheckSupportTooLarge) {
    const auto r = run({"weakcheck", "--config", config("z1_weakcheck.json"), "--R", "40"});
    EXPECT_EQ(r.code, 1);
    EXPECT_EQ(Json::parse(r.out).at("error").at("kind"), "truncated_support");
}

TEST_F(CliTest, Lemma) {
    const auto cfg = write("l.json", R"({
      "graph": {"generator": "lattice", "dimension": 1, "half_width": 80},
      "lemma": {"family": "sec4", "R_grid": [8, 16], "s": 6}
    })");
    const auto r = run({"lemma", "--config", cfg});
    ASSERT_EQ(r.code, 0) << r.out;
    const auto doc = Json::parse(r.out);
    EXPECT_EQ(doc.at("family"), "sec4");
    EXPECT_EQ(doc.at("results").size(), 2u);
}

TEST_F(CliTest, ConfigErrorsExit2) {
    const auto bad = write("bad.json", R"({"graph": {"generator": "lattice", "dimensoin": 2}})");
    const auto r = run({"criterion", "--config", bad});
    EXPECT_EQ(r.code, 2);
    EXPECT_EQ(Json::parse(r.out).at("error").at("kind"), "parse_error");
    EXPECT_EQ(run({"criterion", "--config", file("missing.json")}).code, 2);
    EXPECT_EQ(run({"criterion"}).code, 2);
    EXPECT_EQ(run({"nosuchcommand"}).code, 2);
    EXPECT_EQ(run({"sweep", "--config", config("z3_sweep.json"), "--threads", "0"}).code, 2);
}

TEST_F(CliTest, RuntimeErrorsExit1) {
    const auto cfg = write("r.json", R"({
      "graph": {"generator": "lattice", "dimension": 2, "half_width": 10},
      "R_grid": [8, 16, 32, 64]
    })");
    const auto r = run({"criterion", "--config", cfg});
    EXPECT_EQ(r.code, 1);
    EXPECT_EQ(Json::parse(r.out).at("error").at("kind"), "truncation_too_small");
}

TEST_F(CliTest, HelpExits0) { EXPECT_EQ(run({"--help"}).code, 0); }
