// Copyright 2026 The Perturbench Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "perturbench/image_io.hpp"
#include "perturbench/report.hpp"
#include "perturbench/suite.hpp"
#include "test_support.hpp"

namespace perturbench {
namespace {

using testing::fixture;
using testing::ScratchDir;

struct Result {
  int code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

class Cli : public ::testing::Test {
 protected:
  Result run(const std::string& args, const std::string& env = "") {
    const auto out = dir_ / "stdout.txt";
    const auto err = dir_ / "stderr.txt";
    const std::string cmd = "cd '" + dir_.path().string() + "' && " + env + " '" + PERTURBENCH_CLI + "' " + args +
                            " > '" + out.string() + "' 2> '" + err.string() + "'";
    const int status = std::system(cmd.c_str());
    Result r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = slurp(out);
    r.err = slurp(err);
    return r;
  }

  std::filesystem::path path(const std::string& name) const { return dir_ / name; }

  ScratchDir dir_{"cli"};
};

TEST_F(Cli, GenerateWritesAllGroupsReproducibly) {
  ASSERT_EQ(run("generate --synthetic --n 20 --seed 42 --out s1").code, 0);
  ASSERT_EQ(run("generate --synthetic --n 20 --seed 42 --out s2 --threads 3").code, 0);
  const auto m1 = load_manifest(path("s1/manifest.json"));
  const auto m2 = load_manifest(path("s2/manifest.json"));
  ASSERT_EQ(m1.groups.size(), 69u);
  for (std::size_t g = 0; g < 69; ++g) EXPECT_EQ(m1.groups[g].digest, m2.groups[g].digest);
  EXPECT_EQ(slurp(path("s1/manifest.json")), slurp(path("s2/manifest.json")));
  EXPECT_EQ(m1.config.at("master_seed"), 42);
}

TEST_F(Cli, SeedFallsBackToEnvironment) {
  ASSERT_EQ(run("generate --synthetic --n 5 --seed 9 --out a").code, 0);
  ASSERT_EQ(run("generate --synthetic --n 5 --out b", "PERTURBENCH_SEED=9").code, 0);
  EXPECT_EQ(slurp(path("a/manifest.json")), slurp(path("b/manifest.json")));
  EXPECT_EQ(run("generate --synthetic --n 5 --out c", "PERTURBENCH_SEED=nine").code, 2);
}

TEST_F(Cli, UsageErrorsExitWithTwo) {
  EXPECT_EQ(run("generate --synthetic --n 0 --out s").code, 2);
  EXPECT_EQ(run("").code, 2);
  EXPECT_EQ(run("frobnicate").code, 2);
  EXPECT_EQ(run("generate --synthetic --n 5 --bogus --out s").code, 2);
  EXPECT_EQ(run("generate --n 5 --out s").code, 2);
  EXPECT_EQ(run("generate --synthetic --n 5").code, 2);
  EXPECT_EQ(run("analyze --format xml x.json").code, 2);
  EXPECT_EQ(run("--help").code, 0);
}

TEST_F(Cli, RuntimeErrorsExitWithOne) {
  const auto r = run("generate --synthetic --dataset-size 10 --n 20 --out s");
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("need 20"), std::string::npos) << r.err;
  EXPECT_EQ(run("verify --suite missing").code, 1);
  EXPECT_EQ(run("train --synthetic --training-group SP0.3 --out m.bin").code, 1);
}

TEST_F(Cli, TrainEvaluateIngestRoundTrip) {
  ASSERT_EQ(run("generate --synthetic --n 20 --seed 42 --offset 200 --out suite").code, 0);
  ASSERT_EQ(run("train --synthetic --n 200 --seed 42 --epochs 5 --out clean.bin").code, 0);
  ASSERT_EQ(run("train --synthetic --n 200 --seed 42 --epochs 5 --training-group SP0.1GA0.1 --out two.bin").code, 0);

  const auto e1 = run("evaluate --model clean.bin --suite suite --name Soft --out eval_clean --threads 4");
  ASSERT_EQ(e1.code, 0) << e1.err;
  // Corrupted-trained runs need the clean-trained reference.
  EXPECT_EQ(run("evaluate --model two.bin --suite suite --name Soft --out eval_two").code, 2);
  const auto e2 = run("evaluate --model two.bin --suite suite --name Soft --reference eval_clean/summary.json --out eval_two");
  ASSERT_EQ(e2.code, 0) << e2.err;

  const auto clean = load_report(path("eval_clean/summary.json"));
  const auto two = load_report(path("eval_two/summary.json"));
  ASSERT_EQ(two.summaries.size(), 1u);
  EXPECT_EQ(two.summaries[0].accuracies.size(), 69u);
  EXPECT_EQ(two.summaries[0].training_group, "SP0.1GA0.1");
  EXPECT_EQ(two.config.at("command"), "evaluate");
  EXPECT_EQ(two.config.at("model"), "two.bin");

  // Recompute the quadrant from the CSV alone.
  const auto records = ingest_predictions(path("eval_two/predictions.csv"));
  EXPECT_EQ(records.size(), 69u * 20u);
  const auto acc = accuracy_by_group(records);
  EXPECT_EQ(acc, two.summaries[0].accuracies);
  const AccuracyVector v(acc);
  EXPECT_EQ(two.summaries[0].quadrant,
            identify_group(mean_accuracy(v), cv_of_classifier(v), clean.summaries[0].reference()));

  ASSERT_EQ(run("ingest --predictions eval_two/predictions.csv --name Soft --training-group SP0.1GA0.1 "
                "--reference eval_clean/summary.json --out ingested.json")
                .code,
            0);
  const auto ingested = load_report(path("ingested.json")).summaries.at(0);
  EXPECT_EQ(ingested.accuracies, two.summaries[0].accuracies);
  EXPECT_EQ(ingested.quadrant, two.summaries[0].quadrant);
  EXPECT_EQ(ingested.cv, two.summaries[0].cv);

  // Same flags, same bytes.
  ASSERT_EQ(run("evaluate --model clean.bin --suite suite --name Soft --out eval_again").code, 0);
  EXPECT_EQ(slurp(path("eval_again/summary.json")), slurp(path("eval_clean/summary.json")));
  EXPECT_EQ(slurp(path("eval_again/predictions.csv")), slurp(path("eval_clean/predictions.csv")));
}

TEST_F(Cli, EvaluateReportsMismatchedDimensionsByGroup) {
  ASSERT_EQ(run("generate --synthetic --channels 1 --n 4 --out gray").code, 0);
  ASSERT_EQ(run("train --synthetic --n 30 --epochs 1 --out rgb.bin").code, 0);
  const auto r = run("evaluate --model rgb.bin --suite gray --out e");
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("group 1_clean"), std::string::npos) << r.err;
}

TEST_F(Cli, VerifyDetectsTampering) {
  ASSERT_EQ(run("generate --synthetic --n 6 --out s").code, 0);
  EXPECT_EQ(run("verify --suite s").code, 0);
  const auto target = path("s/20_GA0.1/2.png");
  auto img = load_png(target);
  img.bytes()[0] ^= 0x80;
  save_png(img, target);
  const auto r = run("verify --suite s");
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.out.find("MISMATCH 20_GA0.1"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("1 of 69"), std::string::npos) << r.out;
}

TEST_F(Cli, AnalyzeFixture) {
  const auto r = run("analyze '" + fixture("benchmark_runs.json").string() + "' --out analysis.json");
  ASSERT_EQ(r.code, 0) << r.err;
  const auto doc = nlohmann::json::parse(slurp(path("analysis.json")));
  const auto& cats = doc.at("aggregate").at("categories");
  EXPECT_NEAR(cats.at("CLEAN").at("mean_cv").get<double>(), 2.94, 0.01);
  EXPECT_NEAR(cats.at("SINGLE_FACTOR").at("mean_cv").get<double>(), 1.82, 0.01);
  EXPECT_NEAR(cats.at("TWO_FACTOR").at("mean_cv").get<double>(), 1.42, 0.01);
  EXPECT_NEAR(cats.at("CLEAN").at("mean_mean_accu").get<double>(), 88.31, 0.01);
  EXPECT_NEAR(doc.at("aggregate").at("cv_reduction_percent").get<double>(), 28.9, 0.2);
  EXPECT_NEAR(doc.at("correlations").at("cv_mean").at("spearman").get<double>(), 0.17987480891693225, 1e-12);
  EXPECT_EQ(doc.at("summaries").size(), 27u);
  EXPECT_EQ(doc.at("config").at("command"), "analyze");

  const auto csv = run("analyze --format csv '" + fixture("benchmark_runs.json").string() + "'");
  ASSERT_EQ(csv.code, 0);
  EXPECT_EQ(csv.out.rfind("label,training_category,cv,", 0), 0u);
  EXPECT_NE(csv.out.find("AlexNet(RL30),SINGLE_FACTOR,3.33,85.75"), std::string::npos) << csv.out;
}

TEST_F(Cli, AnalyzeSingleRunAndVersionMismatch) {
  auto doc = nlohmann::json::parse(slurp(fixture("benchmark_runs.json")));
  nlohmann::json one = doc;
  one["summaries"] = nlohmann::json::array({doc["summaries"][3]});
  std::ofstream(path("one.json")) << one.dump();
  ASSERT_EQ(run("analyze one.json --out a.json").code, 0);
  const auto agg = nlohmann::json::parse(slurp(path("a.json"))).at("aggregate").at("categories");
  const auto& row = doc["summaries"][3];
  EXPECT_EQ(agg.at("SINGLE_FACTOR").at("mean_cv"), row.at("cv"));
  EXPECT_EQ(agg.at("SINGLE_FACTOR").at("mean_mean_accu"), row.at("mean_accu"));
  EXPECT_EQ(agg.at("SINGLE_FACTOR").at("mean_min_accu"), row.at("min_accu"));
  EXPECT_EQ(agg.at("SINGLE_FACTOR").at("mean_max_accu"), row.at("max_accu"));
  EXPECT_TRUE(agg.at("CLEAN").is_null());

  one["spec_version"] = "2.0";
  std::ofstream(path("two.json")) << one.dump();
  const auto r = run("analyze '" + fixture("benchmark_runs.json").string() + "' two.json");
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("version"), std::string::npos) << r.err;
}

TEST_F(Cli, PlotFixture) {
  const std::string args = "plot '" + fixture("benchmark_runs.json").string() +
                           "' --classifier AlexNet --reference 'AlexNet(clean)' --title AlexNet --out ";
  const auto r = run(args + "a.svg");
  ASSERT_EQ(r.code, 0) << r.err;
  ASSERT_EQ(run(args + "b.svg").code, 0);
  EXPECT_EQ(slurp(path("a.svg")), slurp(path("b.svg")));
  EXPECT_EQ(slurp(path("a.svg")), slurp(fixture("alexnet_mcv.svg")));
  EXPECT_NE(r.out.find("AlexNet(SP0.1RL30): GROUP_I\n"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("AlexNet(RL30): GROUP_II\n"), std::string::npos) << r.out;

  const auto missing = run("plot '" + fixture("benchmark_runs.json").string() + "' --reference 'LeNet(clean)' --out c.svg");
  EXPECT_EQ(missing.code, 2);
  EXPECT_EQ(run("plot '" + fixture("benchmark_runs.json").string() + "' --out c.svg").code, 2);
}

}  // namespace
}  // namespace perturbench
