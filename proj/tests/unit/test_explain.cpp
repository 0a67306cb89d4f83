// Copyright 2026 The stancekit Authors
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

#include <random>
#include <sstream>

#include "oracles.hpp"
#include "stancekit/explain.hpp"

using namespace stancekit;

namespace {

struct Fixture {
  Matrix x;
  std::vector<int> y;
  FeatureManifest manifest;
  TrainedModel model;
};

// Columns: leak (equals the label), noise, weak signal, keyword noise.
const Fixture& fixture() {
  static const Fixture f = [] {
    Fixture f;
    std::mt19937_64 rng(17);
    std::normal_distribution<double> n01(0, 1);
    for (int i = 0; i < 200; ++i) {
      const int y = i % 2 ? 1 : -1;
      f.x.append_row(std::vector<double>{static_cast<double>(y), n01(rng), 0.3 * y + n01(rng), n01(rng)});
      f.y.push_back(y);
    }
    f.manifest.names = {"leak", "noise", "weak", "kw:noise"};
    f.model = train(ModelKind::logistic, f.x, f.y, f.manifest,
                    default_hyperparameters(ModelKind::logistic));
    return f;
  }();
  return f;
}

TEST(Importance, LeakLargeNoiseNearZero) {
  const auto& f = fixture();
  ImportanceOptions opt;
  opt.seed = 3;
  const auto r = permutation_importance(f.model, f.x, f.y, f.manifest, opt);
  EXPECT_EQ(r.baseline_f1, 1.0);
  // A shuffled leak column agrees with the label half the time.
  EXPECT_NEAR(r.features[0].importance, r.baseline_f1 - oracle::chance_f1(0.5, 0.5), 0.1);
  EXPECT_EQ(r.features[0].direction, Direction::pro_kremlin);
  EXPECT_LE(std::abs(r.features[1].importance), 0.02);
  EXPECT_LE(std::abs(r.features[3].importance), 0.02);
  EXPECT_EQ(rank_importance(r, 0).linguistic.front().name, "leak");
}

TEST(Importance, IdentityPermutationGivesExactZero) {
  const auto& f = fixture();
  ImportanceOptions opt;
  opt.force_identity = true;
  const auto r = permutation_importance(f.model, f.x, f.y, f.manifest, opt);
  for (const auto& fi : r.features) {
    EXPECT_EQ(fi.importance, 0.0) << fi.name;
    EXPECT_EQ(fi.std, 0.0) << fi.name;
  }
  // Ties keep manifest order.
  const auto ranked = rank_importance(r, 0);
  ASSERT_EQ(ranked.linguistic.size(), 3u);
  EXPECT_EQ(ranked.linguistic[0].name, "leak");
  EXPECT_EQ(ranked.linguistic[1].name, "noise");
  EXPECT_EQ(ranked.linguistic[2].name, "weak");
  ASSERT_EQ(ranked.keywords.size(), 1u);
}

TEST(Importance, IndependentOfWorkerCount) {
  const auto& f = fixture();
  ImportanceOptions a, b;
  a.seed = b.seed = 8;
  a.repeats = b.repeats = 5;
  b.jobs = 4;
  const auto ra = permutation_importance(f.model, f.x, f.y, f.manifest, a);
  const auto rb = permutation_importance(f.model, f.x, f.y, f.manifest, b);
  for (std::size_t i = 0; i < ra.features.size(); ++i) {
    EXPECT_EQ(ra.features[i].importance, rb.features[i].importance);
    EXPECT_EQ(ra.features[i].std, rb.features[i].std);
  }
}

TEST(Importance, ConstantColumnNoted) {
  auto f = fixture();
  for (std::size_t i = 0; i < f.x.rows(); ++i) f.x(i, 1) = 0.25;
  const auto r = permutation_importance(f.model, f.x, f.y, f.manifest, {});
  EXPECT_TRUE(r.features[1].constant);
  EXPECT_EQ(r.features[1].importance, 0.0);
}

TEST(Importance, TopKAndCsvInPoints) {
  ImportanceReport r;
  r.repeats = 1;
  for (int i = 0; i < 8; ++i) {
    FeatureImportance fi;
    fi.index = static_cast<std::size_t>(i);
    fi.name = i < 4 ? "f" + std::to_string(i) : "kw:k" + std::to_string(i);
    fi.group = i < 4 ? "surface" : "keyword";
    fi.importance = 0.01 * i;
    r.features.push_back(fi);
  }
  const auto ranked = rank_importance(r, 2);
  ASSERT_EQ(ranked.linguistic.size(), 2u);
  ASSERT_EQ(ranked.keywords.size(), 2u);
  EXPECT_EQ(ranked.linguistic[0].name, "f3");
  EXPECT_EQ(ranked.keywords[0].name, "kw:k7");
  std::ostringstream out;
  write_importance_csv(out, r, ranked);
  const std::string csv = out.str();
  // Keywords first, values in points.
  EXPECT_LT(csv.find("kw:k7"), csv.find("f3"));
  EXPECT_NE(csv.find("kw:k7,keyword,7"), std::string::npos);
}

}  // namespace
