#include <gtest/gtest.h>

#include <json.hpp>

#include "linpbt/errors.hpp"
#include "linpbt/harness.hpp"

using namespace linpbt;

namespace {

MatrixReport sample(bool timing) {
  MatrixReport r;
  r.rows = {"none", "M2"};
  r.columns = {"dtx", "eq"};
  r.cells = {
      {"none", "dtx", false, "", timing ? 0.25 : 0, 248, 248},
      {"none", "eq", false, "", timing ? 1.5 : 0, 248, 248},
      {"M2", "dtx", true, "P = w := 0 - 1", timing ? 0.01 : 0, 20, 20},
      {"M2", "eq", true, "P = if x = x then {w := 0} else {w := 1}, S = \"quoted\"", timing ? 0.02 : 0, 21, 21},
  };
  return r;
}

}  // namespace

TEST(Matrix, CsvRoundTrip) {
  for (bool timing : {true, false}) {
    MatrixReport r = sample(timing);
    std::string csv = r.to_csv(timing);
    EXPECT_EQ(csv.substr(0, csv.find('\n')), "mutant,property,verdict,cex,seconds,generated,tested");
    EXPECT_EQ(MatrixReport::from_csv(csv), r) << csv;
  }
}

TEST(Matrix, CsvQuoting) {
  std::string csv = sample(false).to_csv(false);
  EXPECT_NE(csv.find("\"P = if x = x then {w := 0} else {w := 1}, S = \"\"quoted\"\"\""), std::string::npos) << csv;
  EXPECT_NE(csv.find("M2,dtx,found,P = w := 0 - 1,,20,20"), std::string::npos) << csv;
  EXPECT_THROW(MatrixReport::from_csv("bad header\n"), ParseError);
}

TEST(Matrix, Lookup) {
  MatrixReport r = sample(true);
  ASSERT_NE(r.find("M2", "eq"), nullptr);
  EXPECT_TRUE(r.find("M2", "eq")->killed);
  EXPECT_EQ(r.find("M3", "eq"), nullptr);
  EXPECT_EQ(r.kills("M2"), (std::vector<std::string>{"dtx", "eq"}));
  EXPECT_TRUE(r.kills("none").empty());
}

TEST(Matrix, TableAndJson) {
  MatrixReport r = sample(true);
  std::string table = r.to_table(true);
  EXPECT_NE(table.find("found"), std::string::npos);
  EXPECT_NE(table.find("w := 0 - 1"), std::string::npos);
  auto j = nlohmann::json::parse(r.to_json(true));
  ASSERT_TRUE(j.is_object());
  EXPECT_EQ(j["cells"].size(), 4u);
  EXPECT_EQ(j["cells"][2]["verdict"], "found");
  auto untimed = nlohmann::json::parse(r.to_json(false));
  EXPECT_FALSE(untimed["cells"][0].contains("seconds"));
}

TEST(Matrix, EmptyPropertySet) {
  Spec s = corpus::load_spec("imp_linear");
  MatrixOptions mo;
  MatrixReport r = run_matrix(s, mo);
  EXPECT_TRUE(r.columns.empty());
  EXPECT_TRUE(r.cells.empty());
  EXPECT_EQ(r.rows.size(), 10u);
}

TEST(Matrix, SmallRun) {
  Spec s = corpus::load_spec("imp_linear");
  MatrixOptions mo;
  mo.mutants = {"M2", "M8"};
  mo.properties = {"dtx", "srv"};
  MatrixReport r = run_matrix(s, mo);
  EXPECT_EQ(r.rows, (std::vector<std::string>{"none", "M2", "M8"}));
  EXPECT_EQ(r.kills("M2"), (std::vector<std::string>{"dtx"}));
  EXPECT_TRUE(r.kills("none").empty());
  EXPECT_TRUE(r.kills("M8").empty());
  EXPECT_EQ(r.find("M2", "dtx")->cex, "P = w := 0 - 1");
  MatrixOptions bad = mo;
  bad.mutants = {"M42"};
  EXPECT_THROW(run_matrix(s, bad), ConfigurationError);
  bad = mo;
  bad.properties = {"nope"};
  EXPECT_THROW(run_matrix(s, bad), ConfigurationError);
}

TEST(Matrix, ParallelMatchesSerial) {
  Spec s = corpus::load_spec("imp_linear");
  MatrixOptions mo;
  mo.mutants = {"M2", "M4", "M6"};
  mo.properties = {"dtx", "srv"};
  mo.threads = 1;
  std::string serial = run_matrix(s, mo).to_csv(false);
  mo.threads = 3;
  EXPECT_EQ(run_matrix(s, mo).to_csv(false), serial);
}

TEST(Bench, Budget) {
  EXPECT_EQ(coverage_budget(200, 3), 5400u);
  EXPECT_EQ(coverage_budget(0.5, 3), 14u);
}

TEST(Bench, SingleRow) {
  Spec lin = corpus::load_spec("imp_linear");
  Spec van = corpus::load_spec("imp_vanilla");
  BenchOptions bo;
  bo.from = 3;
  bo.to = 3;
  bo.repetitions = 1;
  auto rows = run_bench(lin, van, bo);
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0].bound, 3u);
  EXPECT_EQ(rows[0].linear_generated, 25u);
  EXPECT_EQ(rows[0].vanilla_generated, 25u);
  EXPECT_DOUBLE_EQ(rows[0].coverage, 1.0);
  std::string table = bench_table(rows);
  EXPECT_EQ(std::count(table.begin(), table.end(), '\n'), 2);
  bo.property = "dtx";
  EXPECT_THROW(run_bench(lin, van, bo), ConfigurationError);
}

TEST(Threads, ErrorsPropagate) {
  EXPECT_THROW(run_parallel(2, [] { throw ConfigurationError("boom"); }), ConfigurationError);
  std::atomic<int> n{0};
  run_parallel(4, [&] { ++n; });
  EXPECT_EQ(n.load(), 4);
}
