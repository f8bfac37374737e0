#include <sys/wait.h>

#include <array>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <string>

#include <gtest/gtest.h>
#include <json.hpp>

#include "carnot/errors.hpp"
#include "carnot/manifold_file.hpp"

namespace carnot {
namespace {

using json = nlohmann::json;

struct CliRun {
  int code = -1;
  std::string out;
};

CliRun run(const std::string& args) {
  std::string cmd = std::string(CARNOT_CLI_PATH) + " " + args + " 2>/dev/null";
  CliRun r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (pipe == nullptr) return r;
  std::array<char, 4096> buf;
  std::size_t got;
  while ((got = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), got);
  int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string data(const std::string& name) { return std::string(CARNOT_DATA_DIR) + "/" + name; }

json run_json(const std::string& command, const std::string& file, const std::string& extra = "") {
  CliRun r = run(command + " --input " + data(file) + " " + extra);
  EXPECT_NE(r.code, 2) << r.out;
  return json::parse(r.out);
}

TEST(ManifoldFile, DefaultsAndOverrides) {
  ManifoldFile f = parse_manifold_file(R"({"coords": ["x", "y"], "frames": [["1", "0"], ["0", "1"]],
                                          "horizontal_rank": 2})");
  EXPECT_EQ(f.seed, 42u);
  EXPECT_EQ(f.sample_count, 10);
  ASSERT_EQ(f.chart_box.size(), 2u);
  EXPECT_EQ(f.chart_box[0], std::make_pair(-1.0, 1.0));
  EXPECT_EQ(f.sample().size(), 10u);
  EXPECT_EQ(f.manifold.structure_class(), StructureClass::generic);

  ManifoldFile g = parse_manifold_file(R"({"coords": ["x", "y"], "frames": [["1", "0"], ["0", "1"]],
                                          "horizontal_rank": 2, "chart_box": [[0, 2], [3, 5]], "seed": 5,
                                          "sample_count": 4})");
  EXPECT_EQ(g.sample().size(), 4u);
  for (const auto& p : g.sample()) {
    EXPECT_TRUE(p[0] >= 0 && p[0] <= 2 && p[1] >= 3 && p[1] <= 5);
  }
  EXPECT_EQ(g.center(), (std::vector<double>{1.0, 4.0}));
}

TEST(ManifoldFile, ExpressionErrorsNameTheKey) {
  try {
    parse_manifold_file(R"({"coords": ["x", "y"], "frames": [["1", "0"], ["0", "x +"]], "horizontal_rank": 2})");
    FAIL() << "expected a parse error";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.offset(), 3u);
    EXPECT_NE(std::string(e.what()).find("frames[1][1]"), std::string::npos) << e.what();
  }
  EXPECT_THROW(parse_manifold_file(R"({"coords": ["x"], "frames": [["w"]], "horizontal_rank": 1})"), Error);
  EXPECT_THROW(parse_manifold_file("{\"coords\": [\"x\"], "), ParseError);
}

TEST(ManifoldFile, ValidationErrors) {
  EXPECT_THROW(parse_manifold_file(R"({"coords": ["x"], "frames": [["1"]], "horizontal_rank": 2})"), PreconditionError);
  EXPECT_THROW(parse_manifold_file(R"({"coords": ["x"], "frames": [["1"]]})"), PreconditionError);
  EXPECT_THROW(parse_manifold_file(R"({"coords": ["x"], "frames": [["1"]], "horizontal_rank": 1, "class": "x"})"),
               PreconditionError);
  EXPECT_THROW(parse_manifold_file(R"({"coords": ["x"], "frames": [["1"]], "horizontal_rank": 1,
                                      "chart_box": [[1, 0]]})"),
               PreconditionError);
}

TEST(Cli, AnalyzeHeisenberg) {
  json j = run_json("analyze", "heisenberg.json");
  EXPECT_EQ(j["growth"], json({2, 3}));
  EXPECT_TRUE(j["equiregular"].get<bool>());
  EXPECT_TRUE(j["symbol"]["constant"].get<bool>());
  EXPECT_EQ(j["symbol"]["lambda"], json({1.0}));
  EXPECT_EQ(j["seed"], 42);
}

TEST(Cli, AnalyzeWeightedHeisenberg) {
  json j = run_json("analyze", "heisenberg_1_2.json");
  EXPECT_EQ(j["growth"], json({4, 5}));
  ASSERT_EQ(j["symbol"]["lambda"].size(), 2u);
  EXPECT_NEAR(j["symbol"]["lambda"][1].get<double>(), 2.0, 1e-10);
  EXPECT_EQ(j["symbol"]["isometry_dim"], 2);
}

TEST(Cli, AnalyzeCartan) {
  json j = run_json("analyze", "cartan.json");
  EXPECT_EQ(j["growth"], json({2, 3, 5}));
  EXPECT_EQ(j["symbol"]["tag"], "cartan(2,3,5)");
  EXPECT_EQ(j["symbol"]["isometry_dim"], 1);
}

TEST(Cli, AnalyzeReportsRankJumps) {
  json j = run_json("analyze", "martinet.json");
  EXPECT_FALSE(j["equiregular"].get<bool>());
  ASSERT_EQ(j["rank_jumps"].size(), 1u);
  EXPECT_EQ(j["rank_jumps"][0]["growth"], json({2, 2, 3}));
  EXPECT_TRUE(j["symbol"]["constant"].is_null());
}

TEST(Cli, RankAboveDimensionIsAValidationError) {
  EXPECT_EQ(run("analyze --input " + data("bad_rank.json")).code, 2);
  EXPECT_EQ(run("analyze --input " + data("missing.json")).code, 2);
  EXPECT_EQ(run("analyze").code, 2);
  EXPECT_EQ(run("analyze --input " + data("heisenberg.json") + " --base-point x=0").code, 2);
}

TEST(Cli, ConnectionHeisenberg) {
  json j = run_json("connection", "heisenberg.json");
  EXPECT_EQ(j["w"], json({0.0, 0.0}));
  EXPECT_TRUE(j["morimoto"].get<bool>());
  EXPECT_TRUE(j["flat"].get<bool>());
  EXPECT_EQ(j["grading"].size(), 3u);
}

TEST(Cli, ConnectionCartan) {
  json j = run_json("connection", "cartan.json", "--base-point x1=0.3,x2=-0.2,x3=0.1,x4=0.5,x5=0");
  for (const json& m : j["mu"]) EXPECT_EQ(m.get<double>(), 0.0);
  EXPECT_TRUE(j["flat"].get<bool>());
  EXPECT_TRUE(j["christoffel"].empty());
}

TEST(Cli, ConnectionPerturbedContactIsNotFlat) {
  json j = run_json("connection", "conformal_heisenberg.json");
  EXPECT_TRUE(j["morimoto"].get<bool>());
  EXPECT_FALSE(j["flat"].get<bool>());
  EXPECT_GT(std::max(j["residuals"]["torsion"].get<double>(), j["residuals"]["curvature"].get<double>()), 1e-3);
  EXPECT_EQ(j["sample_table"].size(), 10u);
}

TEST(Cli, ConnectionNeedsASupportedClass) { EXPECT_EQ(run("connection --input " + data("engel.json")).code, 2); }

TEST(Cli, FlatExitCodes) {
  EXPECT_EQ(run("flat --input " + data("heisenberg.json")).code, 0);
  EXPECT_EQ(run("flat --input " + data("heisenberg_1_2.json")).code, 0);
  EXPECT_EQ(run("flat --input " + data("cartan.json")).code, 0);
  EXPECT_EQ(run("flat --input " + data("conformal_heisenberg.json")).code, 1);
  EXPECT_EQ(run("flat --input " + data("cartan_perturbed.json")).code, 1);
  EXPECT_EQ(run("flat --input " + data("euclidean.json")).code, 2);
  EXPECT_EQ(run("flat --input " + data("bad_rank.json")).code, 2);
}

std::vector<std::vector<double>> csv_rows(const std::string& text, std::string* header) {
  std::istringstream in(text);
  std::string line;
  std::getline(in, *header);
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    std::vector<double> row;
    std::istringstream cells(line);
    std::string cell;
    while (std::getline(cells, cell, ',')) row.push_back(std::stod(cell));
    rows.push_back(row);
  }
  return rows;
}

TEST(Cli, GeodesicEuclideanLine) {
  CliRun r = run("geodesic --input " + data("euclidean.json") + " --covector 0.6,0.8 --t-max 1 --step 0.1");
  ASSERT_EQ(r.code, 0);
  std::string header;
  auto rows = csv_rows(r.out, &header);
  EXPECT_EQ(header, "t,x,y,p1,p2,speed");
  ASSERT_EQ(rows.size(), 11u);
  for (const auto& row : rows) {
    EXPECT_NEAR(row[1], 0.6 * row[0], 1e-14);
    EXPECT_NEAR(row[2], 0.8 * row[0], 1e-14);
    EXPECT_NEAR(row[5], 1.0, 1e-14);
  }
}

TEST(Cli, GeodesicHeisenbergHasConstantSpeed) {
  // With p = (1, 0, c): x = sin(c t)/c, y = (1 - cos(c t))/c.
  CliRun r = run("geodesic --input " + data("heisenberg.json") + " --covector 1,0,2 --t-max 1 --step 0.01");
  ASSERT_EQ(r.code, 0);
  std::string header;
  auto rows = csv_rows(r.out, &header);
  ASSERT_EQ(rows.size(), 101u);
  for (const auto& row : rows) EXPECT_NEAR(row[7], 1.0, 1e-6);
  EXPECT_NEAR(rows.back()[1], std::sin(2.0) / 2, 1e-7);
  EXPECT_NEAR(rows.back()[2], (1 - std::cos(2.0)) / 2, 1e-7);
}

TEST(Cli, ReportsAreDeterministic) {
  for (const std::string& args : {std::string("analyze --input ") + data("heisenberg_1_2.json"),
                                  std::string("connection --input ") + data("cartan_perturbed.json"),
                                  std::string("flat --format text --seed 9 --input ") + data("conformal_heisenberg.json")}) {
    CliRun a = run(args), b = run(args);
    EXPECT_FALSE(a.out.empty());
    EXPECT_EQ(a.out, b.out) << args;
  }
}

TEST(Cli, SeedAndSampleOverridesAreEchoed) {
  json j = run_json("analyze", "heisenberg.json", "--seed 11 --samples 3");
  EXPECT_EQ(j["seed"], 11);
  EXPECT_EQ(j["samples"], 3);
  EXPECT_EQ(j["growth_at_samples"].size(), 3u);
}

TEST(Cli, TextFormat) {
  CliRun r = run("analyze --format text --input " + data("cartan.json"));
  ASSERT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("growth: [2,3,5]"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("symbol.tag: \"cartan(2,3,5)\""), std::string::npos) << r.out;
}

}  // namespace
}  // namespace carnot
