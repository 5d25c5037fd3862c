// Copyright 2026 The bnpnorm Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>
#include <string>

#include "bnpnorm/commands.hpp"

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("bnpnorm_commands_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

json read_report(const fs::path& dir) { return json::parse(slurp(dir / "report.json")); }

bnpnorm::RunManifest generated(const std::string& family, double a, std::uint64_t seed,
                               const fs::path& out) {
  bnpnorm::RunManifest mf;
  mf.generator = bnpnorm::GeneratorSpec{family, 2, 50, seed};
  mf.config.a = a;
  mf.config.seed = seed;
  mf.out_dir = out.string();
  return mf;
}

TEST(Manifest, ParsesAllFields) {
  const auto mf = bnpnorm::manifest_from_json(json::parse(R"({
    "generate": {"family": "t3", "m": 3, "n": 80, "seed": 9},
    "out": "results", "emit": ["qq", "densities"],
    "a": 15, "N": 300, "r1": 200, "r2": 100, "M": 40, "seed": 4, "threads": 2,
    "base": "normal:0,1"
  })"));
  ASSERT_TRUE(mf.generator.has_value());
  EXPECT_EQ(mf.generator->family, "t3");
  EXPECT_EQ(mf.generator->m, 3u);
  EXPECT_EQ(mf.generator->n, 80u);
  EXPECT_EQ(mf.generator->seed, 9u);
  EXPECT_EQ(mf.out_dir, "results");
  EXPECT_TRUE(mf.emit.qq);
  EXPECT_TRUE(mf.emit.densities);
  EXPECT_FALSE(mf.emit.distances);
  EXPECT_EQ(mf.config.a, 15.0);
  EXPECT_EQ(mf.config.N, 300u);
  EXPECT_EQ(mf.config.r1, 200u);
  EXPECT_EQ(mf.config.r2, 100u);
  EXPECT_EQ(mf.config.M, 40u);
  EXPECT_EQ(mf.config.i0, 2u);  // ceil(0.05 M)
  EXPECT_EQ(mf.config.threads, 2u);
  EXPECT_TRUE(mf.config.base.has_value());
  EXPECT_NO_THROW(mf.validate());
}

TEST(Manifest, RejectsBadManifests) {
  using bnpnorm::InvalidConfig;
  const auto parse = [](const char* text) { return bnpnorm::manifest_from_json(json::parse(text)); };
  EXPECT_THROW(parse(R"([1, 2])"), InvalidConfig);
  EXPECT_THROW(parse(R"({"alpha": 1})"), InvalidConfig);
  EXPECT_THROW(parse(R"({"a": "big"})"), InvalidConfig);
  EXPECT_THROW(parse(R"({"generate": {"family": "t3", "size": 3}})"), InvalidConfig);
  EXPECT_THROW(parse(R"({"emit": ["pictures"]})"), InvalidConfig);
  EXPECT_THROW(parse(R"({"M": 10, "i0": 10})").validate(), InvalidConfig);
  // no data source, then two
  EXPECT_THROW(parse(R"({"a": 1})").validate(), InvalidConfig);
  EXPECT_THROW(parse(R"({"input": "x.csv", "generate": {"family": "t3"}})").validate(),
               InvalidConfig);
}

TEST(Manifest, EmitAndLawParsing) {
  const auto all = bnpnorm::parse_emit("report, qq,densities,distances");
  EXPECT_TRUE(all.report && all.qq && all.densities && all.distances);
  const auto none = bnpnorm::parse_emit("");
  EXPECT_FALSE(none.qq || none.densities || none.distances);
  EXPECT_THROW((void)bnpnorm::parse_emit("qq,plots"), bnpnorm::InvalidConfig);

  EXPECT_EQ(bnpnorm::describe(bnpnorm::parse_law("normal")), "N(0,1)");
  EXPECT_EQ(bnpnorm::describe(bnpnorm::parse_law("normal:1,2")), "N(1,4)");
  EXPECT_EQ(bnpnorm::describe(bnpnorm::parse_law("chi2:3")), "chi2(3)");
  EXPECT_EQ(bnpnorm::describe(bnpnorm::parse_law("cauchy:0,2")), "C(0,2)");
  EXPECT_THROW((void)bnpnorm::parse_law("gamma:2"), bnpnorm::InvalidConfig);
  EXPECT_THROW((void)bnpnorm::parse_law("normal:0,-1"), bnpnorm::InvalidConfig);
  EXPECT_THROW((void)bnpnorm::parse_law("normal:0,1,2"), bnpnorm::InvalidConfig);
  EXPECT_THROW((void)bnpnorm::parse_law("t:x"), bnpnorm::InvalidConfig);
}

TEST(Verdict, MatchesSignOfRbMinusOne) {
  using bnpnorm::Verdict;
  EXPECT_EQ(bnpnorm::verdict_of(1.0000001), Verdict::favor_H0);
  EXPECT_EQ(bnpnorm::verdict_of(0.9999999), Verdict::against_H0);
  EXPECT_EQ(bnpnorm::verdict_of(1.0), Verdict::no_evidence);
  EXPECT_EQ(bnpnorm::strength_interpretation(7.0, 1.0), "strong evidence in favor of normality");
  EXPECT_EQ(bnpnorm::strength_interpretation(2.0, 0.2), "weak evidence in favor of normality");
  EXPECT_EQ(bnpnorm::strength_interpretation(0.0, 0.0), "strong evidence against normality");
  EXPECT_EQ(bnpnorm::strength_interpretation(0.5, 0.9), "weak evidence against normality");
  EXPECT_EQ(bnpnorm::strength_interpretation(1.0, 0.3), "no evidence either way");
}

TEST(Artifacts, QqColumnsAreMonotone) {
  bnpnorm::RngStream rng(81, 0);
  const auto data = bnpnorm::generate(bnpnorm::named_spec("t3", 3, 60), rng);
  const auto d = bnpnorm::squared_mahalanobis(data);
  std::ostringstream out;
  bnpnorm::write_qq(out, d, bnpnorm::DegreesOfFreedom(3));
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "index,squared_distance,chi2_quantile");
  double prev_d = -1.0;
  double prev_q = -1.0;
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    const auto x = bnpnorm::detail::split_fields(line);
    ASSERT_EQ(x.size(), 3u);
    const double dv = std::stod(std::string(x[1]));
    const double qv = std::stod(std::string(x[2]));
    EXPECT_GE(dv, prev_d);
    EXPECT_GT(qv, prev_q);
    prev_d = dv;
    prev_q = qv;
    ++rows;
  }
  EXPECT_EQ(rows, 60u);
  // first plotting position is (1 - 0.5) / n
  const double first_q = bnpnorm::chi2_quantile(0.5 / 60.0, bnpnorm::DegreesOfFreedom(3));
  std::istringstream again(out.str());
  std::getline(again, line);
  std::getline(again, line);
  EXPECT_EQ(std::string(bnpnorm::detail::split_fields(line)[2]), bnpnorm::format_double(first_q));
}

TEST(CmdTest, TwoPointFileGivesHalfDistances) {
  const auto dir = scratch("two_point");
  std::ofstream(dir / "data.csv") << "0\n2\n";
  bnpnorm::RunManifest mf;
  mf.input = (dir / "data.csv").string();
  mf.out_dir = dir.string();
  mf.emit.distances = true;
  mf.config.r1 = mf.config.r2 = 100;
  mf.config.N = 100;
  std::ostringstream err;
  ASSERT_EQ(bnpnorm::cmd_test(mf, err), bnpnorm::kExitOk) << err.str();
  const auto table = bnpnorm::parse_csv(slurp(dir / "distances.csv"));
  ASSERT_EQ(table.n(), 2u);
  EXPECT_EQ(table.values()(1, 0), 2.0);
  EXPECT_NEAR(table.values()(0, 1), 0.5, 1e-15);
  EXPECT_NEAR(table.values()(1, 1), 0.5, 1e-15);
  EXPECT_NE(err.str().find("warning:"), std::string::npos);
}

TEST(CmdTest, NormalDataFavorsNormality) {
  const auto dir = scratch("normal");
  std::ostringstream err;
  ASSERT_EQ(bnpnorm::cmd_test(generated("normal_A", 15.0, 1, dir), err), 0) << err.str();
  const auto r = read_report(dir);
  EXPECT_EQ(r["schema_version"], 1);
  EXPECT_EQ(r["n"], 50);
  EXPECT_EQ(r["m"], 2);
  EXPECT_EQ(r["verdict"], "favor_H0");
  EXPECT_EQ(r["strength"], 1.0);
  EXPECT_EQ(r["config"]["base"], "chi2(2)");
  EXPECT_EQ(r["rb_per_bin"].size(), 20u);
  EXPECT_EQ(r["quantile_grid"].size(), 21u);
  EXPECT_TRUE(r["warnings"].empty());
  EXPECT_FALSE(fs::exists(dir / "qq.csv"));
}

TEST(CmdTest, CauchyDataIsRejected) {
  const auto dir = scratch("pvii");
  std::ostringstream err;
  ASSERT_EQ(bnpnorm::cmd_test(generated("pvii_1", 10.0, 2, dir), err), 0) << err.str();
  const auto r = read_report(dir);
  EXPECT_EQ(r["verdict"], "against_H0");
  EXPECT_LT(r["rb_at_zero"].get<double>(), 0.1);
}

TEST(CmdTest, ReportIsByteIdenticalAcrossRunsAndThreads) {
  const auto one = scratch("det1");
  const auto two = scratch("det2");
  auto mf = generated("t3", 5.0, 3, one);
  mf.emit = bnpnorm::parse_emit("qq,densities,distances");
  mf.config.threads = 1;
  std::ostringstream err;
  ASSERT_EQ(bnpnorm::cmd_test(mf, err), 0);
  mf.out_dir = two.string();
  mf.config.threads = 0;
  ASSERT_EQ(bnpnorm::cmd_test(mf, err), 0);
  for (const char* f : {"report.json", "qq.csv", "densities.csv", "distances.csv"}) {
    EXPECT_EQ(slurp(one / f), slurp(two / f)) << f;
  }
  const auto densities = slurp(one / "densities.csv");
  EXPECT_EQ(densities.rfind("sample,replicate,distance\n", 0), 0u);
  EXPECT_NE(densities.find("prior,"), std::string::npos);
  EXPECT_NE(densities.find("posterior,"), std::string::npos);
}

TEST(CmdTest, LognormalReportCarriesParameterNote) {
  const auto dir = scratch("lognormal");
  auto mf = generated("lognormal_B", 5.0, 4, dir);
  mf.config.r1 = mf.config.r2 = 200;
  std::ostringstream err;
  ASSERT_EQ(bnpnorm::cmd_test(mf, err), 0);
  const auto w = read_report(dir)["warnings"];
  ASSERT_EQ(w.size(), 1u);
  EXPECT_NE(w[0].get<std::string>().find("underlying normal"), std::string::npos);
}

TEST(CmdTest, ExitCodes) {
  const auto dir = scratch("errors");
  std::ostringstream err;
  bnpnorm::RunManifest mf;
  mf.input = (dir / "missing.csv").string();
  mf.out_dir = dir.string();
  EXPECT_EQ(bnpnorm::cmd_test(mf, err), bnpnorm::kExitInputError);
  EXPECT_NE(err.str().find("EmptyInput: "), std::string::npos);

  std::ofstream(dir / "bad.csv") << "1,2\n3,x\n";
  mf.input = (dir / "bad.csv").string();
  EXPECT_EQ(bnpnorm::cmd_test(mf, err), bnpnorm::kExitInputError);
  EXPECT_NE(err.str().find("ParseError: line 2, column 2"), std::string::npos);

  std::ofstream(dir / "singular.csv") << "1,2\n2,4\n3,6\n4,8\n";
  mf.input = (dir / "singular.csv").string();
  EXPECT_EQ(bnpnorm::cmd_test(mf, err), bnpnorm::kExitNumerical);
  EXPECT_NE(err.str().find("SingularCovariance: "), std::string::npos);

  mf.config.a = -1.0;
  EXPECT_EQ(bnpnorm::cmd_test(mf, err), bnpnorm::kExitBadArguments);
  EXPECT_NE(err.str().find("InvalidConfig: "), std::string::npos);

  auto gen = generated("normal_A", 5.0, 1, dir);
  gen.out_dir = (dir / "missing.csv" / "sub").string();  // parent is not a directory
  std::ofstream(dir / "missing.csv") << "x";
  gen.config.r1 = gen.config.r2 = 50;
  EXPECT_EQ(bnpnorm::cmd_test(gen, err), bnpnorm::kExitBadArguments);
}

TEST(CmdGenerate, WritesHeaderedSample) {
  const auto dir = scratch("generate");
  std::ostringstream err;
  const bnpnorm::GeneratorSpec spec{"nmix", 3, 25, 7};
  ASSERT_EQ(bnpnorm::cmd_generate(spec, (dir / "s.csv").string(), err), 0);
  const auto text = slurp(dir / "s.csv");
  EXPECT_EQ(text.rfind("x1,x2,x3\n", 0), 0u);
  const auto back = bnpnorm::ingest_csv((dir / "s.csv").string());
  EXPECT_EQ(back.values(), bnpnorm::generate_data(spec).values());
  EXPECT_EQ(bnpnorm::cmd_generate({"nothing", 2, 10, 0}, (dir / "t.csv").string(), err),
            bnpnorm::kExitInputError);
}

std::vector<std::vector<std::string>> read_table(const fs::path& p) {
  std::ifstream in(p);
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> row;
    for (const auto f : bnpnorm::detail::split_fields(line)) row.emplace_back(f);
    rows.push_back(row);
  }
  return rows;
}

TEST(CmdSimulate, NormalCellsFavorNormality) {
  const auto dir = scratch("sim_normal");
  bnpnorm::SimulationGrid grid;
  grid.families = {"normal_A"};
  grid.dims = {2, 3};
  grid.concentrations = {1.0, 15.0};
  grid.replicates = 5;
  grid.out_dir = dir.string();
  std::ostringstream err;
  ASSERT_EQ(bnpnorm::cmd_simulate(grid, err), 0) << err.str();
  const auto rows = read_table(dir / "table.csv");
  ASSERT_EQ(rows.size(), 5u);
  EXPECT_EQ(rows[0][0], "family");
  for (std::size_t i = 1; i < rows.size(); ++i) {
    EXPECT_EQ(rows[i][5], "5");
    EXPECT_GT(std::stod(rows[i][6]), 1.0) << "row " << i;
    EXPECT_EQ(rows[i][9], "5") << "row " << i;  // every replicate above 1
    EXPECT_EQ(rows[i][11], "ok");
  }
}

TEST(CmdSimulate, MixtureCellRejects) {
  const auto dir = scratch("sim_nmix");
  bnpnorm::SimulationGrid grid;
  grid.families = {"nmix"};
  grid.dims = {2};
  grid.concentrations = {15.0};
  grid.replicates = 3;
  grid.out_dir = dir.string();
  std::ostringstream err;
  ASSERT_EQ(bnpnorm::cmd_simulate(grid, err), 0);
  const auto rows = read_table(dir / "table.csv");
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_LT(std::stod(rows[1][6]), 1.0);
}

TEST(CmdSimulate, EmptyGridAndBadGrid) {
  const auto dir = scratch("sim_empty");
  bnpnorm::SimulationGrid grid;
  grid.out_dir = dir.string();
  std::ostringstream err;
  ASSERT_EQ(bnpnorm::cmd_simulate(grid, err), 0);
  EXPECT_EQ(read_table(dir / "table.csv").size(), 1u);
  grid.families = {"gamma"};
  EXPECT_EQ(bnpnorm::cmd_simulate(grid, err), bnpnorm::kExitBadArguments);
}

TEST(CmdSimulate, CellSeedsAreStable) {
  static_assert(bnpnorm::cell_data_seed(0, "normal_A", 2, 0) !=
                bnpnorm::cell_data_seed(0, "normal_A", 2, 1));
  EXPECT_NE(bnpnorm::cell_data_seed(0, "normal_A", 2, 0),
            bnpnorm::cell_data_seed(0, "normal_A", 3, 0));
  EXPECT_NE(bnpnorm::cell_data_seed(0, "normal_A", 2, 0), bnpnorm::cell_data_seed(0, "t3", 2, 0));
}

}  // namespace
