#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "oblsynth/dwa.hpp"

namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out;
};

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::path(::testing::TempDir()) / ("oblsynth_cli_" + std::string(
                                                 ::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  std::string write(const std::string& name, const std::string& text) const {
    std::ofstream(path(name)) << text;
    return path(name);
  }

  std::string spec(const std::string& stem, const std::string& formula, const std::string& part) const {
    write(stem + ".part", part);
    return write(stem + ".spec", formula + "\n");
  }

  Result run(const std::string& args) const {
    std::string log = path("stdout.txt");
    std::string cmd = std::string(OBLSYNTH_CLI) + " " + args + " > " + log + " 2>&1";
    int status = std::system(cmd.c_str());
    std::ifstream in(log);
    std::stringstream ss;
    ss << in.rdbuf();
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, ss.str()};
  }

  static std::string read(const std::string& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

  fs::path dir_;
};

}  // namespace

TEST_F(Cli, TranslateTwoStateHoa) {
  std::string s = spec("last", "exists(F(a & X false))", ".inputs e\n.outputs a\n");
  Result r = run("translate " + s + " --out " + path("last.hoa"));
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("states: 2"), std::string::npos);
  std::string hoa = read(path("last.hoa"));
  EXPECT_NE(hoa.find("States: 2"), std::string::npos);
  EXPECT_NE(hoa.find("config {"), std::string::npos);

  // translating the exported automaton again gives the same automaton
  Result again = run("translate " + path("last.hoa") + " --out " + path("again.hoa"));
  EXPECT_EQ(again.code, 0) << again.out;
  EXPECT_TRUE(oblsynth::isomorphic(oblsynth::parse_hoa(hoa), oblsynth::parse_hoa(read(path("again.hoa")))));
}

TEST_F(Cli, FragmentViolationExitsTwo) {
  std::string s = spec("bad", "forallexists(F a)", ".inputs\n.outputs a\n");
  Result r = run("translate " + s);
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.out.find("obligation"), std::string::npos);
  EXPECT_FALSE(fs::exists(path("bad.hoa")));
}

TEST_F(Cli, ErrorCodes) {
  EXPECT_EQ(run("translate " + path("missing.spec")).code, 4);
  EXPECT_EQ(run("synth").code, 2);
  std::string s = spec("syn", "exists(F(a &", ".inputs\n.outputs a\n");
  EXPECT_EQ(run("synth " + s).code, 2);
  std::string p = spec("part", "exists(F b)", ".inputs\n.outputs a\n");
  EXPECT_EQ(run("synth " + p).code, 2);
  std::string big = spec("big", "exists(F(a & X X X X X X b))", ".inputs b\n.outputs a\n");
  EXPECT_EQ(run("translate " + big + " --max-dfa-states 2").code, 3);
}

TEST_F(Cli, SynthCounterRealizable) {
  Result inst = run("bench --families counter --sizes 1 --instances-only --out " + path("bench"));
  ASSERT_EQ(inst.code, 0) << inst.out;
  std::string s = path("bench/instances/counter_1.spec");
  Result r = run("synth " + s + " --out " + path("counter.strategy"));
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("REALIZABLE"), std::string::npos);
  EXPECT_NE(r.out.find("verified"), std::string::npos);
  std::string strat = read(path("counter.strategy"));
  EXPECT_EQ(strat.rfind(".strategy v1", 0), 0u) << strat.substr(0, 40);
  EXPECT_NE(strat.find("config {"), std::string::npos);

  Result v = run("verify " + path("counter.strategy") + " " + s);
  EXPECT_EQ(v.code, 0) << v.out;
}

TEST_F(Cli, SynthUnrealizableAgreesAcrossSolvers) {
  std::string s = spec("env", "exists(F(e & X false))", ".inputs e\n.outputs a\n");
  for (const char* solver : {"buchi", "cobuchi", "safereach", "scc", "explicit"}) {
    Result r = run("synth " + s + " --solver " + solver);
    EXPECT_EQ(r.code, 1) << solver << r.out;
    EXPECT_NE(r.out.find("UNREALIZABLE"), std::string::npos);
  }
  EXPECT_EQ(run("solve " + s + " --solver all").code, 1);
  std::string ok = spec("sys", "exists(F(a & X false))", ".inputs e\n.outputs a\n");
  for (const char* solver : {"buchi", "cobuchi", "safereach", "scc"}) EXPECT_EQ(run("synth " + ok + " --solver " + solver).code, 0);
}

TEST_F(Cli, OracleCheckIsDeterministicAndDetectsFaults) {
  const std::string args = "oracle-check --seed 9 --games 40 --formulas 30 --obligations 15 --max-states 16";
  Result a = run(args);
  Result b = run(args);
  EXPECT_EQ(a.code, 0) << a.out;
  EXPECT_EQ(a.out, b.out);
  Result f = run(args + " --fault flip-accepting");
  EXPECT_NE(f.code, 0);
  EXPECT_NE(f.out.find("mismatch"), std::string::npos);
}

TEST_F(Cli, BenchWritesArtifacts) {
  Result r = run("bench --families conjE_exists --sizes 1-2 --solvers safereach --min-modes incremental --out " +
              path("b"));
  EXPECT_EQ(r.code, 0) << r.out;
  for (const char* f : {"results.csv", "results.json", "plot.svg", "plot.csv"}) EXPECT_TRUE(fs::exists(path("b") + "/" + f)) << f;
  std::string csv = read(path("b/results.csv"));
  EXPECT_EQ(csv.substr(0, csv.find('\n')),
            "family,size,solver,min_mode,status,realizable,wall_ms,arena_bits,outer_iters,inner_iters,bdd_ops");
  EXPECT_NE(read(path("b/results.json")).find("run_config"), std::string::npos);
}
