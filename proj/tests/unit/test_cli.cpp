#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "epc/layout.hpp"
#include "epc/pipeline.hpp"
#include "epc/serialize.hpp"
#include "json.hpp"

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

const std::string kIris = std::string(EPC_DATA_DIR) + "/uci/iris.csv";

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("epc_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  int run(const std::string& args) {
    const std::string cmd = std::string(EPC_CLI) + " " + args + " >" + (dir_ / "stdout").string() +
                            " 2>" + (dir_ / "stderr").string();
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }
  std::string read(const std::string& name) const {
    std::ifstream in(dir_ / name);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

  fs::path dir_;
};

TEST_F(Cli, SynthCProjectsToHorizontalArrows) {
  ASSERT_EQ(run("synth C --out " + path("c.csv")), 0);
  ASSERT_EQ(run("project " + path("c.csv") + " --layout mirror --out " + path("c.json")), 0);
  const auto scene = json::parse(read("c.json"));
  ASSERT_EQ(scene.at("graphs").size(), 9u);
  for (const auto& g : scene.at("graphs")) {
    for (const auto& n : g.at("nodes")) EXPECT_NEAR(n[1].get<double>(), 0.0, 1e-9);
  }
  ASSERT_EQ(run("project " + path("c.csv") + " --layout mirror --out " + path("c.svg")), 0);
  const auto svg = read("c.svg");
  std::size_t lines = 0;
  for (auto at = svg.find("<polyline"); at != std::string::npos; at = svg.find("<polyline", at + 1)) ++lines;
  EXPECT_EQ(lines, 9u);
}

TEST_F(Cli, MineThenClassifyIris) {
  ASSERT_EQ(run("mine " + kIris + " --mode intersect --rect-w 0.2 --rect-h 0.2 --stride 0.05 --out " +
                path("r.json")),
            0);
  const auto rules = json::parse(read("r.json"));
  ASSERT_GE(rules.at("rules").size(), 1u);
  ASSERT_EQ(run("classify " + kIris + " --rules " + path("r.json") + " --out " + path("report.json")), 0);
  const auto rep = json::parse(read("report.json"));
  // totals follow from the per-rule rows
  double weighted = 0.0;
  std::size_t hits = 0;
  std::size_t correct = 0;
  for (const auto& r : rep.at("rules")) {
    hits += r.at("hits").get<std::size_t>();
    correct += r.at("correct").get<std::size_t>();
    weighted += r.at("precision_pct").get<double>() * r.at("hits").get<double>();
  }
  const auto& t = rep.at("totals");
  EXPECT_EQ(t.at("covered"), hits);
  EXPECT_EQ(t.at("correct"), correct);
  EXPECT_NEAR(t.at("weighted_precision_pct").get<double>(), weighted / hits, 1e-9);
  EXPECT_NEAR(t.at("recall_pct").get<double>(), 100.0 * hits / t.at("cases").get<double>(), 1e-9);
  // stdout when --out is omitted
  ASSERT_EQ(run("classify " + kIris + " --rules " + path("r.json")), 0);
  EXPECT_EQ(read("stdout"), read("report.json"));
}

TEST_F(Cli, OutputsAreDeterministic) {
  const std::string args = "mine " + kIris + " --mode point --rect-w 0.15 --rect-h 0.15 --stride 0.05 --out ";
  ASSERT_EQ(run(args + path("a.json")), 0);
  ASSERT_EQ(run(args + path("b.json")), 0);
  EXPECT_EQ(read("a.json"), read("b.json"));
}

TEST_F(Cli, OneVsRestRules) {
  ASSERT_EQ(run("mine " + kIris +
                " --mode point --rect-w 0.2 --rect-h 0.2 --stride 0.05 --one-vs-rest virginica --out " +
                path("r.json")),
            0);
  for (const auto& r : json::parse(read("r.json")).at("rules")) {
    const auto c = r.at("class").get<std::string>();
    EXPECT_TRUE(c == "virginica" || c == "not-virginica") << c;
  }
}

TEST_F(Cli, ExitCodes) {
  EXPECT_EQ(run(""), 1);
  EXPECT_EQ(run("mine " + kIris + " --mode sideways --rect-w 0.2 --rect-h 0.2 --stride 0.05 --out x"), 1);
  EXPECT_EQ(run("project " + kIris + " --out " + path("x.png")), 1);
  EXPECT_EQ(run("synth Q --out " + path("q.csv")), 1);
  EXPECT_EQ(run("project " + path("missing.csv") + " --out " + path("x.svg")), 2);
  std::ofstream(path("bad.csv")) << "a,b,class\n1,oops,x\n";
  EXPECT_EQ(run("project " + path("bad.csv") + " --out " + path("x.svg")), 2);
  EXPECT_EQ(run("reproduce iris --data-dir " + path("nowhere")), 2);
  EXPECT_EQ(run("reproduce iris --data-dir " + std::string(EPC_DATA_DIR) + "/uci"), 0);
  EXPECT_NE(read("stdout").find("PASS"), std::string::npos);
}

TEST_F(Cli, GeometryErrorExitCode) {
  // Alternating orientation cannot draw set B under the sequential layout:
  // the second pair's side ellipses miss each other.
  epc::RuleSet rs;
  rs.embedding.layout.orientation = epc::OrientationScheme::kAlternating;
  rs.fingerprint = epc::Layout(rs.embedding.layout, rs.embedding.ellipse).fingerprint();
  rs.columns = {"X1", "X2", "X3", "X4"};
  rs.stats.assign(4, epc::ColumnStats{0.0, 1.0});
  rs.classes = {"x1", "x2", "x3", "x4", "x5", "x6", "x7", "x8", "x9"};
  std::ofstream(path("r.json")) << epc::rule_set_to_json(rs);
  ASSERT_EQ(run("synth B --out " + path("b.csv")), 0);
  EXPECT_EQ(run("classify " + path("b.csv") + " --rules " + path("r.json")), 3);
  EXPECT_NE(read("stderr").find("geometry"), std::string::npos);
}

}  // namespace
