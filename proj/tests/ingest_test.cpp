/*
 * Copyright 2026 The FairKM Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <cmath>
#include <map>

#include <gtest/gtest.h>

#include "fairkm/error.hpp"
#include "fairkm/ingest.hpp"
#include "fairkm/synthetic.hpp"

namespace fairkm::ingest {
namespace {

ColumnSpec col(std::string name, ColumnRole role, ColumnKind kind,
               double weight = 1.0) {
  return {std::move(name), role, kind, weight};
}

constexpr auto kN = ColumnRole::kNonsensitive;
constexpr auto kS = ColumnRole::kSensitive;
constexpr auto kNum = ColumnKind::kNumeric;
constexpr auto kCat = ColumnKind::kCategorical;

ErrorCode load_error(const csv::Table& t, const Schema& s,
                     const IngestOptions& o = {}) {
  try {
    load_table(t, s, o);
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "load_table did not throw";
  return ErrorCode::kInvalidArgument;
}

TEST(IngestTest, ZScoreUsesSampleStandardDeviation) {
  csv::Table t{{"x", "g"}, {{"1", "a"}, {"2", "b"}, {"3", "a"}}};
  Schema s{{col("x", kN, kNum), col("g", kS, kCat)}};
  const auto r = load_table(t, s);
  const auto& f = r.dataset.features;
  EXPECT_NEAR(f(0, 0) + f(1, 0) + f(2, 0), 0.0, 1e-15);
  double ss = 0.0;
  for (std::size_t i = 0; i < 3; ++i) ss += f(i, 0) * f(i, 0);
  EXPECT_NEAR(ss / 2.0, 1.0, 1e-15);
}

TEST(IngestTest, MinMaxAndNone) {
  csv::Table t{{"x", "g"}, {{"2", "a"}, {"4", "b"}, {"6", "a"}}};
  Schema s{{col("x", kN, kNum), col("g", kS, kCat)}};
  IngestOptions o;
  o.standardize = Standardization::kMinMax;
  auto r = load_table(t, s, o);
  EXPECT_DOUBLE_EQ(r.dataset.features(0, 0), 0.0);
  EXPECT_DOUBLE_EQ(r.dataset.features(1, 0), 0.5);
  EXPECT_DOUBLE_EQ(r.dataset.features(2, 0), 1.0);
  o.standardize = Standardization::kNone;
  r = load_table(t, s, o);
  EXPECT_DOUBLE_EQ(r.dataset.features(2, 0), 6.0);
}

TEST(IngestTest, ConstantColumnBecomesZeros) {
  csv::Table t{{"x", "g"}, {{"5", "a"}, {"5", "b"}}};
  Schema s{{col("x", kN, kNum), col("g", kS, kCat)}};
  const auto r = load_table(t, s);
  EXPECT_EQ(r.dataset.features(0, 0), 0.0);
  EXPECT_EQ(r.dataset.features(1, 0), 0.0);
}

TEST(IngestTest, CategoricalFeaturesAreOneHotInSortedOrder) {
  csv::Table t{{"colour", "g"}, {{"red", "a"}, {"blue", "b"}, {"green", "a"}}};
  Schema s{{col("colour", kN, kCat), col("g", kS, kCat)}};
  const auto r = load_table(t, s);
  ASSERT_EQ(r.dataset.dim(), 3u);
  EXPECT_EQ(r.report.columns[0].dictionary,
            (std::vector<std::string>{"blue", "green", "red"}));
  // red -> third coordinate
  EXPECT_EQ(r.dataset.features(0, 2), 1.0);
  EXPECT_EQ(r.dataset.features(0, 0), 0.0);
}

TEST(IngestTest, SensitiveAttributesAreEncoded) {
  csv::Table t{{"x", "race", "age"},
               {{"1", "w", "30"}, {"2", "b", "40"}, {"3", "w", "50"}}};
  Schema s{{col("x", kN, kNum), col("race", kS, kCat, 2.0),
            col("age", kS, kNum)}};
  const auto r = load_table(t, s);
  const auto& race = r.dataset.categorical.at(0);
  EXPECT_EQ(race.dictionary, (std::vector<std::string>{"b", "w"}));
  EXPECT_EQ(race.codes, (std::vector<std::uint32_t>{1, 0, 1}));
  EXPECT_DOUBLE_EQ(race.weight, 2.0);
  const auto& age = r.dataset.numeric.at(0);
  EXPECT_NEAR(age.mean, 0.0, 1e-15);
  EXPECT_NEAR(age.values[2], 1.0, 1e-15);
}

TEST(IngestTest, ExtraColumnsAreIgnoredAndCellsTrimmed) {
  csv::Table t{{"junk", "x", "g"}, {{"?", " 1 ", "a"}, {"?", "3", " b"}}};
  Schema s{{col("x", kN, kNum), col("g", kS, kCat)}};
  const auto r = load_table(t, s);
  EXPECT_EQ(r.dataset.dim(), 1u);
  EXPECT_EQ(r.dataset.categorical[0].dictionary,
            (std::vector<std::string>{"a", "b"}));
}

TEST(IngestTest, Errors) {
  Schema s{{col("x", kN, kNum), col("g", kS, kCat)}};
  EXPECT_EQ(load_error({{"x"}, {{"1"}}}, s), ErrorCode::kMissingColumn);
  EXPECT_EQ(load_error({{"x", "g"}, {{"one", "a"}}}, s),
            ErrorCode::kUnparseableNumeric);
  EXPECT_EQ(load_error({{"x", "g"}, {{"1", ""}}}, s), ErrorCode::kMissingCell);
  EXPECT_EQ(load_error({{"x", "g"}, {}}, s), ErrorCode::kEmptyDataset);
  // Sensitive columns are optional at load time (baseline-only data).
  Schema no_sensitive{{col("x", kN, kNum)}};
  EXPECT_NO_THROW(load_table({{"x"}, {{"1"}}}, no_sensitive));
}

TEST(IngestTest, MissingCellMessageNamesRowAndColumn) {
  Schema s{{col("x", kN, kNum), col("g", kS, kCat)}};
  try {
    load_table({{"x", "g"}, {{"1", "a"}, {"", "b"}}}, s);
    FAIL();
  } catch (const Error& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("row=2"), std::string::npos) << msg;
    EXPECT_NE(msg.find("col=x"), std::string::npos) << msg;
  }
}

TEST(IngestTest, KinematicsStandInMatchesTypeCounts) {
  const auto table = synthetic::kinematics_standin(2020);
  IngestOptions o;
  o.standardize = Standardization::kNone;
  const auto r = load_table(table, synthetic::kinematics_schema(), o);
  const auto& d = r.dataset;
  EXPECT_EQ(d.n_objects(), 161u);
  EXPECT_EQ(d.dim(), 100u);
  ASSERT_EQ(d.categorical.size(), 5u);
  for (std::size_t t = 0; t < 5; ++t) {
    EXPECT_EQ(d.categorical[t].domain_size(), 2u);
    // dictionary is {"no", "yes"}
    EXPECT_EQ(d.categorical[t].value_counts[1],
              static_cast<std::int64_t>(synthetic::kKinematicsTypeCounts[t]));
    EXPECT_NEAR(d.categorical[t].fractions[1] * 161.0,
                static_cast<double>(synthetic::kKinematicsTypeCounts[t]), 1e-9);
  }
}

csv::Table skewed_table(std::size_t a, std::size_t b) {
  csv::Table t{{"x", "g", "label"}, {}};
  for (std::size_t i = 0; i < a + b; ++i) {
    t.rows.push_back({std::to_string(i), i % 2 ? "m" : "f", i < a ? "A" : "B"});
  }
  return t;
}

Schema balance_schema() {
  return Schema{{col("x", kN, kNum), col("g", kS, kCat),
                 col("label", ColumnRole::kBalanceClass, kCat)}};
}

TEST(UndersampleTest, TwoToOneSkewKeepsMinClassPerClass) {
  IngestOptions o;
  o.undersample_balance = true;
  o.seed = 9;
  const auto r = load_table(skewed_table(200, 100), balance_schema(), o);
  EXPECT_EQ(r.report.rows_read, 300u);
  EXPECT_EQ(r.dataset.n_objects(), 200u);
  std::map<std::uint32_t, int> per_class;
  for (auto c : r.dataset.class_labels) ++per_class[c];
  EXPECT_EQ(per_class[0], 100);
  EXPECT_EQ(per_class[1], 100);
  // Source order is preserved.
  EXPECT_TRUE(std::is_sorted(r.dataset.source_rows.begin(),
                             r.dataset.source_rows.end()));
  // Same seed, same subset; different seed, (almost surely) different.
  const auto again = load_table(skewed_table(200, 100), balance_schema(), o);
  EXPECT_EQ(again.dataset.source_rows, r.dataset.source_rows);
  o.seed = 10;
  const auto other = load_table(skewed_table(200, 100), balance_schema(), o);
  EXPECT_NE(other.dataset.source_rows, r.dataset.source_rows);
}

TEST(UndersampleTest, MinClassSizeOne) {
  IngestOptions o;
  o.undersample_balance = true;
  const auto r = load_table(skewed_table(2, 1), balance_schema(), o);
  EXPECT_EQ(r.dataset.n_objects(), 2u);
}

TEST(UndersampleTest, SingleClassIsReturnedUnchangedWithWarning) {
  IngestOptions o;
  o.undersample_balance = true;
  const auto r = load_table(skewed_table(5, 0), balance_schema(), o);
  EXPECT_EQ(r.dataset.n_objects(), 5u);
  EXPECT_TRUE(r.report.single_class_warning);
}

TEST(UndersampleTest, RequiresBalanceColumn) {
  IngestOptions o;
  o.undersample_balance = true;
  Schema s{{col("x", kN, kNum), col("g", kS, kCat)}};
  EXPECT_EQ(load_error({{"x", "g"}, {{"1", "a"}}}, s, o),
            ErrorCode::kInvalidSchema);
}

TEST(IngestTest, EncodingReportJson) {
  csv::Table t{{"x", "g"}, {{"1", "a"}, {"2", "b"}}};
  Schema s{{col("x", kN, kNum), col("g", kS, kCat)}};
  const auto doc = load_table(t, s).report.to_json();
  EXPECT_EQ(doc["spec_version"], "1.0");
  EXPECT_EQ(doc["rows_kept"], 2);
}

}  // namespace
}  // namespace fairkm::ingest
