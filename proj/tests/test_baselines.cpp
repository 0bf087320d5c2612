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

#include <cmath>
#include <map>
#include <random>
#include <set>

#include "synthaudit/baselines.hpp"
#include "synthaudit/fidelity.hpp"
#include "test_util.hpp"

namespace synthaudit {
namespace {

using testing::random_table;

// Rows rendered as comparable tuples of printable cells.
std::vector<std::string> row_keys(const Table& t) {
  std::vector<std::string> keys(t.row_count());
  for (const auto& c : t.columns()) {
    for (std::size_t r = 0; r < t.row_count(); ++r) {
      keys[r] += '|';
      if (c.is_missing(r)) {
        keys[r] += "<na>";
      } else if (is_numeric_like(c.kind())) {
        keys[r] += std::to_string(c.number(r));
      } else {
        keys[r] += c.category(r);
      }
    }
  }
  return keys;
}

Table ten_column_table(std::size_t rows, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> v(0, 1'000'000);
  std::vector<Column> cols;
  for (int j = 0; j < 10; ++j) {
    std::vector<double> x(rows);
    for (auto& e : x) e = v(rng);
    cols.push_back(testing::numeric_column("x" + std::to_string(j), x));
  }
  return Table(std::move(cols));
}

TEST(Perturb, ZeroNoiseRowsAreVerbatim) {
  std::mt19937_64 rng(1);
  const Table t = random_table(rng, {300, 6, 0.1});
  const auto res = perturb_with_stats(t, {0.0, 1000, 5, 1});
  EXPECT_EQ(res.replaced_cells, 0u);
  ASSERT_EQ(res.table.row_count(), 1000u);
  const auto train_keys = row_keys(t);
  const std::set<std::string> train(train_keys.begin(), train_keys.end());
  for (const auto& k : row_keys(res.table)) EXPECT_TRUE(train.count(k));
}

TEST(Perturb, ZeroNoiseEqualsIdentity) {
  std::mt19937_64 rng(2);
  const Table t = random_table(rng, {500, 5, 0.05});
  EXPECT_EQ(perturb(t, {0.0, 9000, 77, 2}), copy_identity(t, 9000, 77));
}

TEST(Perturb, FullNoiseReplacesEveryCell) {
  const Table t = ten_column_table(2000, 3);
  const auto res = perturb_with_stats(t, {1.0, 3000, 8, 1});
  EXPECT_EQ(res.replaced_cells, 3000u * 10u);
  // Values differ from the bootstrap source row everywhere (distinct values).
  const Table source = copy_identity(t, 3000, 8);
  for (std::size_t j = 0; j < 10; ++j) {
    for (std::size_t r = 0; r < 3000; ++r) {
      EXPECT_NE(res.table.column(j).number(r), source.column(j).number(r));
    }
  }
}

TEST(Perturb, ReplacementRateWithinBinomialInterval) {
  const Table t = ten_column_table(10'000, 4);
  const auto res = perturb_with_stats(t, {0.3, 10'000, 21, 1});
  // Count changed cells against the no-noise control run on the same seed.
  const Table control = perturb(t, {0.0, 10'000, 21, 1});
  std::size_t changed = 0;
  for (std::size_t j = 0; j < 10; ++j) {
    for (std::size_t r = 0; r < 10'000; ++r) {
      changed += res.table.column(j).number(r) != control.column(j).number(r);
    }
  }
  const double cells = 100'000.0;
  const double half_width = 2.5758 * std::sqrt(0.3 * 0.7 / cells);
  EXPECT_NEAR(static_cast<double>(res.replaced_cells) / cells, 0.3, half_width);
  // A swap can draw an equal value from another row, never more changes.
  EXPECT_LE(changed, res.replaced_cells);
  EXPECT_NEAR(static_cast<double>(changed) / cells, 0.3, half_width);
}

TEST(Perturb, UnivariateMarginalsPreserved) {
  std::mt19937_64 rng(5);
  const Table t = random_table(rng, {5000, 6, 0.05});
  const int c = 10;
  const auto model = fit_discretizer(t, c);
  const auto dt = apply_discretizer(model, t);
  for (double p : {0.0, 0.1, 0.5, 0.9, 1.0}) {
    const std::size_t n_s = 20'000;
    const auto ds = apply_discretizer(model, perturb(t, {p, n_s, 6, 1}));
    const double envelope = 2.0 * std::sqrt(static_cast<double>(c) / static_cast<double>(n_s));
    for (std::size_t j = 0; j < dt.column_count(); ++j) {
      const MarginalSpec spec{{j}};
      EXPECT_LT(tvd(marginal(dt, spec), marginal(ds, spec)), envelope) << "p=" << p;
    }
  }
}

TEST(Perturb, Deterministic) {
  std::mt19937_64 rng(6);
  const Table t = random_table(rng, {700, 5, 0.05});
  EXPECT_EQ(perturb(t, {0.4, 10'000, 3, 1}), perturb(t, {0.4, 10'000, 3, 1}));
  EXPECT_EQ(perturb(t, {0.4, 10'000, 3, 1}), perturb(t, {0.4, 10'000, 3, 4}));
  EXPECT_FALSE(perturb(t, {0.4, 10'000, 3, 1}) == perturb(t, {0.4, 10'000, 4, 1}));
}

TEST(Perturb, Errors) {
  std::mt19937_64 rng(7);
  const Table t = random_table(rng, {10, 3, 0.0});
  EXPECT_THROW(perturb(t, {1.5, 10, 0, 1}), ArgumentError);
  EXPECT_THROW(perturb(t, {-0.1, 10, 0, 1}), ArgumentError);
  EXPECT_THROW(perturb(t.take(std::vector<std::size_t>{}), {0.1, 10, 0, 1}), ArgumentError);
}

TEST(Perturb, SingleRowCannotSwap) {
  const Table t({testing::numeric_column("x", {4.0})});
  const auto res = perturb_with_stats(t, {1.0, 5, 0, 1});
  EXPECT_EQ(res.table.row_count(), 5u);
  EXPECT_EQ(res.table.column(0).number(4), 4.0);
}

TEST(Independent, BreaksPerfectCorrelation) {
  std::vector<std::optional<std::string>> a(1000);
  for (std::size_t i = 0; i < a.size(); ++i) a[i] = i % 2 ? "1" : "0";
  const Table t({testing::categorical_column("a", a), testing::categorical_column("b", a)});
  const auto model = fit_discretizer(t, 10);
  const auto dt = apply_discretizer(model, t);
  const MarginalSpec both{{0, 1}};
  double prev_gap = 1.0;
  for (std::size_t n : {200u, 20'000u}) {
    const auto ds = apply_discretizer(model, sample_independent(t, n, 9));
    // Closed form: diagonal (1/2, 1/2) against the uniform product is 0.5.
    const double gap = std::abs(tvd(marginal(dt, both), marginal(ds, both)) - 0.5);
    EXPECT_LT(gap, 3.0 / std::sqrt(static_cast<double>(n)));
    if (n == 20'000u) {
      EXPECT_LT(gap, prev_gap + 1e-12);
    }
    prev_gap = gap;
  }
}

TEST(Independent, SingleColumnBehavesLikeBootstrap) {
  std::mt19937_64 rng(10);
  std::vector<double> x(2000);
  std::uniform_int_distribution<int> v(0, 30);
  for (auto& e : x) e = v(rng);
  const Table t({testing::numeric_column("x", x)});
  const auto model = fit_discretizer(t, 100);
  const auto dt = apply_discretizer(model, t);
  const MarginalSpec spec{{0}};
  const double ind = tvd(marginal(dt, spec),
                         marginal(apply_discretizer(model, sample_independent(t, 20'000, 1)), spec));
  const double boot = tvd(marginal(dt, spec),
                          marginal(apply_discretizer(model, copy_identity(t, 20'000, 1)), spec));
  const double envelope = 2.0 * std::sqrt(31.0 / 20'000.0);
  EXPECT_LT(ind, envelope);
  EXPECT_LT(boot, envelope);
}

TEST(Independent, EmptyRequestGivesEmptyTable) {
  std::mt19937_64 rng(11);
  const Table t = random_table(rng, {10, 3, 0.0});
  const Table s = sample_independent(t, 0, 1);
  EXPECT_EQ(s.row_count(), 0u);
  EXPECT_EQ(s.schema(), t.schema());
  EXPECT_EQ(copy_identity(t, 0, 1).row_count(), 0u);
}

TEST(Independent, DeterministicAcrossWorkers) {
  std::mt19937_64 rng(12);
  const Table t = random_table(rng, {300, 4, 0.05});
  EXPECT_EQ(sample_independent(t, 9000, 3, 1), sample_independent(t, 9000, 3, 4));
}

TEST(Identity, CopiesRows) {
  std::mt19937_64 rng(13);
  const Table t = random_table(rng, {300, 4, 0.05});
  const auto train_keys = row_keys(t);
  const std::set<std::string> train(train_keys.begin(), train_keys.end());
  for (const auto& k : row_keys(copy_identity(t, 1000, 2))) EXPECT_TRUE(train.count(k));
  EXPECT_THROW(copy_identity(t.take(std::vector<std::size_t>{}), 5, 1), ArgumentError);
}

}  // namespace
}  // namespace synthaudit
