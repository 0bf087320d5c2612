// Copyright 2026 The synthaudit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <algorithm>
#include <fstream>
#include <numeric>
#include <random>
#include <set>

#include "synthaudit/ingest.hpp"
#include "test_util.hpp"

namespace synthaudit {
namespace {

using testing::data_dir;
using testing::random_table;
using testing::scratch_dir;

TEST(Ingest, AdultShape) {
  const Table t = load_table(data_dir() / "adult.csv");
  EXPECT_EQ(t.row_count(), 48842u);
  ASSERT_EQ(t.column_count(), 15u);
  int numeric = 0, categorical = 0;
  for (const auto& c : t.columns()) {
    numeric += c.kind() == ColumnKind::kNumeric;
    categorical += c.kind() == ColumnKind::kCategorical;
  }
  EXPECT_EQ(numeric, 6);
  EXPECT_EQ(categorical, 9);
  EXPECT_EQ(t.column(*t.find("capital-gain")).kind(), ColumnKind::kNumeric);
  EXPECT_EQ(t.column(*t.find("workclass")).kind(), ColumnKind::kCategorical);
  EXPECT_GT(t.column(*t.find("workclass")).missing_count(), 0u);
}

TEST(Ingest, HeaderOnly) {
  const Table t = parse_table("a,b,c\n");
  EXPECT_EQ(t.row_count(), 0u);
  ASSERT_EQ(t.column_count(), 3u);
  for (const auto& c : t.columns()) EXPECT_EQ(c.kind(), ColumnKind::kCategorical);
}

TEST(Ingest, MissingTokenInNumericColumn) {
  const Table t = parse_table("x\n1\n2\n?\n");
  ASSERT_EQ(t.row_count(), 3u);
  const Column& x = t.column(0);
  EXPECT_EQ(x.kind(), ColumnKind::kNumeric);
  EXPECT_EQ(x.missing_count(), 1u);
  EXPECT_TRUE(x.is_missing(2));
  EXPECT_EQ(x.number(1), 2.0);
}

TEST(Ingest, TypeInference) {
  const Table t = parse_table(
      "n,d,s,mixed,empty\n"
      "1.5,2020-01-02,a,1,\n"
      "-3,2020-01-03T04:05:06,b,x,\n"
      "1e3,,c,2,\n");
  EXPECT_EQ(t.column(0).kind(), ColumnKind::kNumeric);
  EXPECT_EQ(t.column(1).kind(), ColumnKind::kDatetime);
  EXPECT_EQ(t.column(2).kind(), ColumnKind::kCategorical);
  EXPECT_EQ(t.column(3).kind(), ColumnKind::kCategorical);
  EXPECT_EQ(t.column(4).kind(), ColumnKind::kCategorical);
  EXPECT_EQ(t.column(4).missing_count(), 3u);
  EXPECT_EQ(t.column(0).number(2), 1000.0);
  // 2020-01-02 is day 18263 of the Unix epoch.
  EXPECT_EQ(t.column(1).number(0), 18263.0 * 86400.0);
  EXPECT_EQ(t.column(1).number(1), 18264.0 * 86400.0 + 4 * 3600 + 5 * 60 + 6);
  EXPECT_TRUE(t.column(1).is_missing(2));
}

TEST(Ingest, DatetimeFormatting) {
  EXPECT_EQ(format_datetime(0.0), "1970-01-01T00:00:00");
  EXPECT_EQ(format_datetime(18264.0 * 86400.0 + 3723), "2020-01-03T01:02:03");
  EXPECT_EQ(format_datetime(-1.0), "1969-12-31T23:59:59");
}

TEST(Ingest, NonFiniteIsNotNumeric) {
  const Table t = parse_table("x\n1\ninf\n");
  EXPECT_EQ(t.column(0).kind(), ColumnKind::kCategorical);
}

TEST(Ingest, QuotedFields) {
  const Table t = parse_table("a,b\r\n\"x, y\",\"say \"\"hi\"\"\"\r\n\"multi\nline\",2\r\n");
  ASSERT_EQ(t.row_count(), 2u);
  EXPECT_EQ(t.column(0).category(0), "x, y");
  EXPECT_EQ(t.column(1).category(0), "say \"hi\"");
  EXPECT_EQ(t.column(0).category(1), "multi\nline");
}

TEST(Ingest, TrimsWhitespace) {
  const Table t = parse_table("a, b\n 1 , x\n2,  y\n");
  EXPECT_EQ(t.column(0).name(), "a");
  EXPECT_EQ(t.column(1).name(), "b");
  EXPECT_EQ(t.column(0).kind(), ColumnKind::kNumeric);
  EXPECT_EQ(t.column(1).category(0), "x");
}

TEST(Ingest, CustomDelimiterAndMissingTokens) {
  LoadOptions opts;
  opts.delimiter = ';';
  opts.missing_tokens = {"NA"};
  const Table t = parse_table("a;b\n1;NA\nNA;?\n", opts);
  EXPECT_EQ(t.column(0).kind(), ColumnKind::kNumeric);
  EXPECT_TRUE(t.column(0).is_missing(1));
  EXPECT_EQ(t.column(1).kind(), ColumnKind::kCategorical);
  EXPECT_TRUE(t.column(1).is_missing(0));
  EXPECT_EQ(t.column(1).category(1), "?");
}

TEST(Ingest, RaggedRowIsInputError) {
  EXPECT_THROW(parse_table("a,b\n1,2\n3\n"), InputError);
  EXPECT_THROW(parse_table("a,b\n1,2,3\n"), InputError);
}

TEST(Ingest, UnterminatedQuoteIsInputError) {
  EXPECT_THROW(parse_table("a\n\"open\n"), InputError);
}

TEST(Ingest, EmptyInputIsInputError) { EXPECT_THROW(parse_table(""), InputError); }

TEST(Ingest, DuplicateHeaderRejected) { EXPECT_THROW(parse_table("a,a\n1,2\n"), Error); }

TEST(Ingest, UnreadableFileIsInputError) {
  EXPECT_THROW(load_table(scratch_dir("unreadable") / "nope.csv"), InputError);
}

TEST(Ingest, SchemaOverride) {
  LoadOptions opts;
  opts.schema_override = {{"code", ColumnKind::kCategorical}};
  const Table t = parse_table("code,v\n01,1\n02,2\n", opts);
  EXPECT_EQ(t.column(0).kind(), ColumnKind::kCategorical);
  EXPECT_EQ(t.column(0).category(0), "01");
  EXPECT_EQ(t.column(1).kind(), ColumnKind::kNumeric);
}

TEST(Ingest, SchemaOverrideConflictIsSchemaError) {
  LoadOptions opts;
  opts.schema_override = {{"v", ColumnKind::kNumeric}};
  EXPECT_THROW(parse_table("v\n1\nabc\n", opts), SchemaError);
  opts.schema_override = {{"v", ColumnKind::kDatetime}};
  EXPECT_THROW(parse_table("v\n1\n", opts), SchemaError);
  opts.schema_override = {{"absent", ColumnKind::kNumeric}};
  EXPECT_THROW(parse_table("v\n1\n", opts), SchemaError);
}

TEST(Ingest, SchemaOverrideFromJson) {
  const auto s = parse_schema_override(R"({"a": "numeric", "b": "categorical", "c": "datetime"})");
  ASSERT_EQ(s.size(), 3u);
  EXPECT_EQ(s[0].kind, ColumnKind::kNumeric);
  EXPECT_EQ(s[2].kind, ColumnKind::kDatetime);
  EXPECT_THROW(parse_schema_override(R"({"a": "text"})"), Error);
  EXPECT_THROW(parse_schema_override("[1]"), InputError);
  EXPECT_THROW(parse_schema_override("{"), InputError);
}

TEST(Ingest, RoundTripPreservesValues) {
  std::mt19937_64 rng(11);
  const auto dir = scratch_dir("roundtrip");
  for (int trial = 0; trial < 20; ++trial) {
    const Table t = random_table(rng, {static_cast<std::size_t>(1 + trial * 7), 6, 0.1});
    // Awkward categorical text survives quoting.
    std::vector<std::optional<std::string>> odd;
    for (std::size_t r = 0; r < t.row_count(); ++r) {
      odd.emplace_back(r % 3 == 0 ? "a,\"b\"" : r % 3 == 1 ? "line\nbreak" : "007");
    }
    std::vector<Column> cols = t.columns();
    cols.push_back(Column::categorical_from_values("odd", odd));
    const Table original(std::move(cols));

    write_table(original, dir / "t.csv");
    LoadOptions opts;
    opts.schema_override = original.schema();
    const Table back = load_table(dir / "t.csv", opts);
    EXPECT_EQ(back, original) << "trial " << trial;
  }
}

TEST(Ingest, NumberFormattingRoundTrips) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1e9, 1e9);
  for (int i = 0; i < 1000; ++i) {
    const double x = u(rng) / 7.0;
    EXPECT_EQ(*parse_number(format_number(x)), x);
  }
}

TEST(Split, Sizes) {
  const auto [train, holdout] = split_indices(48842, 7);
  EXPECT_EQ(train.size(), 24421u);
  EXPECT_EQ(holdout.size(), 24421u);
  const auto [t5, h5] = split_indices(5, 7);
  EXPECT_EQ(t5.size(), 3u);
  EXPECT_EQ(h5.size(), 2u);
}

TEST(Split, PartitionsRows) {
  for (std::size_t n : {2u, 3u, 10u, 101u, 4096u}) {
    for (std::uint64_t seed : {0u, 1u, 99u}) {
      auto [train, holdout] = split_indices(n, seed);
      EXPECT_EQ(train.size(), (n + 1) / 2);
      std::vector<std::size_t> all = train;
      all.insert(all.end(), holdout.begin(), holdout.end());
      std::sort(all.begin(), all.end());
      std::vector<std::size_t> expected(n);
      std::iota(expected.begin(), expected.end(), std::size_t{0});
      EXPECT_EQ(all, expected) << "n=" << n << " seed=" << seed;
    }
  }
}

TEST(Split, DeterministicAndSeedSensitive) {
  EXPECT_EQ(split_indices(1000, 5), split_indices(1000, 5));
  EXPECT_NE(split_indices(1000, 5), split_indices(1000, 6));
}

TEST(Split, TableSplit) {
  const Table t = parse_table("x,y\n1,a\n2,b\n3,c\n4,d\n5,e\n");
  const auto [train, holdout] = split_train_holdout(t, 3);
  EXPECT_EQ(train.row_count(), 3u);
  EXPECT_EQ(holdout.row_count(), 2u);
  std::set<double> seen;
  for (const Table* part : {&train, &holdout}) {
    for (std::size_t r = 0; r < part->row_count(); ++r) seen.insert(part->column(0).number(r));
  }
  EXPECT_EQ(seen.size(), 5u);
  EXPECT_THROW(split_train_holdout(parse_table("x\n1\n"), 3), Error);
}

}  // namespace
}  // namespace synthaudit
