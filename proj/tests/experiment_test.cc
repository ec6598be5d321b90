// Copyright 2026 The advgrasp Authors
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

#include "advgrasp/experiment.h"

#include <filesystem>
#include <numeric>
#include <set>

#include "advgrasp/dataset.h"
#include "gtest/gtest.h"
#include "tiny_config.h"

namespace advgrasp {
namespace {

namespace fs = std::filesystem;

fs::path Scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / "advgrasp_experiment_test" / name;
  fs::remove_all(p);
  return p;
}

TEST(ExperimentTest, BaselineScheduleSpendsItsBudget) {
  const ExperimentConfig c = ExperimentConfig{};
  const std::vector<int> schedule = BaselineSchedule(c);
  EXPECT_EQ(static_cast<int>(schedule.size()), c.game.iterations);
  EXPECT_EQ(std::accumulate(schedule.begin(), schedule.end(), 0) + c.game.init_random_grasps,
            c.BaselineBudget());
}

TEST(ExperimentTest, TargetsTextRoundTrip) {
  std::vector<TrainingSample> s(3);
  s[0].target_value = 0.1 + 0.2;
  s[1].target_value = 1.0;
  s[2].target_value = 1.0 / 3.0;
  const std::vector<double> back = ParseTargets(FormatTargets(s));
  ASSERT_EQ(back.size(), 3u);
  for (int i = 0; i < 3; ++i) EXPECT_EQ(back[i], s[i].target_value);
}

class TinyRunTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    out_ = new fs::path(Scratch("full"));
    result_ = new ExperimentResult(RunExperiment(testing::TinyConfig(), *out_));
  }
  static void TearDownTestSuite() {
    fs::remove_all(out_->parent_path());
    delete out_;
    delete result_;
  }
  static fs::path* out_;
  static ExperimentResult* result_;
};

fs::path* TinyRunTest::out_ = nullptr;
ExperimentResult* TinyRunTest::result_ = nullptr;

TEST_F(TinyRunTest, WritesEveryArtifact) {
  ASSERT_TRUE(result_->complete);
  for (const char* f : {"results.txt", "results.csv", "success_vs_iteration.png",
                        "dislodge_vs_iteration.png", "config.json"}) {
    EXPECT_TRUE(fs::exists(*out_ / f)) << f;
  }
  const SeedResult& s = result_->seeds.at(0);
  for (const char* label : {"init", "baseline-1", "shake-0", "shake-1", "snatch-0"}) {
    EXPECT_NE(s.Column("low", label), nullptr) << label;
  }
  ASSERT_TRUE(s.probes.has_value());
  EXPECT_EQ(s.probes->trained_dislodge_rate.size(), 2u);
  EXPECT_EQ(s.probes->robustness_successes.size(), 2u);
}

TEST_F(TinyRunTest, RerunGivesIdenticalTables) {
  const fs::path again = Scratch("again");
  ASSERT_TRUE(RunExperiment(testing::TinyConfig(), again).complete);
  EXPECT_EQ(ReadFile(again / "results.txt"), ReadFile(*out_ / "results.txt"));
  EXPECT_EQ(ReadFile(again / "results.csv"), ReadFile(*out_ / "results.csv"));
}

TEST_F(TinyRunTest, InterruptedRunResumesToSameTables) {
  const fs::path partial = Scratch("partial");
  RunOptions options;
  options.resume = true;
  options.max_new_units = 2;
  int rounds = 0;
  while (!RunExperiment(testing::TinyConfig(), partial, options).complete) {
    ASSERT_LT(++rounds, 20);
  }
  EXPECT_GT(rounds, 1);
  EXPECT_EQ(ReadFile(partial / "results.txt"), ReadFile(*out_ / "results.txt"));
  EXPECT_EQ(ReadFile(partial / "results.csv"), ReadFile(*out_ / "results.csv"));
}

TEST_F(TinyRunTest, LoadedSeedMatchesRun) {
  const SeedResult loaded = LoadSeedResult(*out_, 1);
  const SeedResult& s = result_->seeds.at(0);
  for (const auto& [regime, columns] : s.eval) {
    ASSERT_EQ(loaded.eval.at(regime).size(), columns.size());
    for (std::size_t i = 0; i < columns.size(); ++i) {
      EXPECT_EQ(loaded.eval.at(regime)[i].label, columns[i].label);
      EXPECT_EQ(loaded.eval.at(regime)[i].column.successes(), columns[i].column.successes());
    }
  }
}

TEST_F(TinyRunTest, HeldOutObjectsNeverAppearInTraining) {
  const ExperimentConfig c = testing::TinyConfig();
  std::set<std::uint64_t> held_out;
  for (const ObjectShape& o : MakeObjectPool(c.objects.eval, c.objects.eval_seed)) {
    held_out.insert(o.seed);
  }
  int files = 0;
  for (const auto& entry : fs::recursive_directory_iterator(SeedDir(*out_, 1))) {
    if (entry.path().filename() != "dataset.jsonl") continue;
    ++files;
    for (const EpisodeRecord& r : LoadDataset(entry.path())) {
      ASSERT_EQ(held_out.count(r.object_seed), 0u) << entry.path();
    }
  }
  EXPECT_EQ(files, 1 + 2 + 2 + 1);
}

TEST_F(TinyRunTest, AttemptsEqualDatasetSizes) {
  const ExperimentConfig c = testing::TinyConfig();
  auto lines = [](const fs::path& p) { return static_cast<int>(LoadDataset(p).size()); };
  auto attempts = [](const fs::path& dir) {
    return MetricsFromJson(ReadFile(dir / "metrics.json")).attempts;
  };
  const fs::path init = InitDir(*out_, 1);
  EXPECT_EQ(attempts(init), lines(init / "dataset.jsonl"));
  int baseline = lines(init / "dataset.jsonl");
  int shake = baseline;
  for (int i = 0; i < c.game.iterations; ++i) {
    const fs::path b = IterationDir(*out_, 1, "baseline", i);
    const fs::path s = IterationDir(*out_, 1, "shake", i);
    EXPECT_EQ(attempts(b), lines(b / "dataset.jsonl"));
    EXPECT_EQ(attempts(s), lines(s / "dataset.jsonl"));
    baseline += lines(b / "dataset.jsonl");
    shake += lines(s / "dataset.jsonl");
  }
  EXPECT_EQ(baseline, c.BaselineBudget());
  EXPECT_EQ(shake, c.AdversarialBudget());
}

}  // namespace
}  // namespace advgrasp
