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

#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "synthaudit/error.hpp"
#include "synthaudit/parallel.hpp"
#include "synthaudit/random.hpp"
#include "synthaudit/table.hpp"

namespace synthaudit {

struct PerturbationConfig {
  double noise_probability = 0.0;  // per-cell replacement probability p
  std::size_t output_rows = 50'000;
  std::uint64_t seed = 0;
  std::size_t workers = 0;  // does not affect the output
};

struct PerturbationResult {
  Table table;
  std::size_t replaced_cells = 0;
};

namespace detail {

// Output rows are generated in fixed-size blocks, each with its own
// substreams, so the result is the same for any worker count.
inline constexpr std::size_t kBlockRows = 4096;

enum : std::uint64_t {
  kSourceStream = 0xb007,
  kSwapStream = 0x5a17,
  kIndependentStream = 0x1d7d,
};

inline Table gather_columns(const Table& train,
                            const std::vector<std::vector<std::size_t>>& rows_by_column) {
  std::vector<Column> out;
  out.reserve(train.column_count());
  for (std::size_t j = 0; j < train.column_count(); ++j) {
    out.push_back(train.column(j).take(rows_by_column[j]));
  }
  return Table(std::move(out));
}

inline std::size_t block_count(std::size_t rows) {
  return (rows + kBlockRows - 1) / kBlockRows;
}

}  // namespace detail

// Bootstrap plus per-cell swapping: draws output_rows training rows with
// replacement, then each cell independently, with probability p, takes the
// same column's value from a uniformly drawn different training row.
inline PerturbationResult perturb_with_stats(const Table& train, const PerturbationConfig& cfg) {
  if (train.empty()) throw ArgumentError("cannot perturb an empty table");
  if (!(cfg.noise_probability >= 0.0 && cfg.noise_probability <= 1.0)) {
    throw ArgumentError("noise probability must be in [0, 1]");
  }
  const std::size_t n = train.row_count();
  const std::size_t m = train.column_count();
  const std::size_t rows = cfg.output_rows;
  std::vector<std::vector<std::size_t>> src(m, std::vector<std::size_t>(rows));
  const std::size_t blocks = detail::block_count(rows);
  std::vector<std::size_t> replaced(blocks, 0);

  parallel_for(blocks, cfg.workers, [&](std::size_t b0, std::size_t b1) {
    for (std::size_t b = b0; b < b1; ++b) {
      Rng source = make_rng(cfg.seed, detail::kSourceStream, b);
      Rng swap = make_rng(cfg.seed, detail::kSwapStream, b);
      const std::size_t end = std::min(rows, (b + 1) * detail::kBlockRows);
      for (std::size_t i = b * detail::kBlockRows; i < end; ++i) {
        const std::size_t row = uniform_index(source, n);
        for (std::size_t j = 0; j < m; ++j) {
          std::size_t donor = row;
          if (bernoulli(swap, cfg.noise_probability) && n > 1) {
            donor = uniform_index(swap, n - 1);
            if (donor >= row) ++donor;
            ++replaced[b];
          }
          src[j][i] = donor;
        }
      }
    }
  });

  PerturbationResult result{detail::gather_columns(train, src), 0};
  for (auto r : replaced) result.replaced_cells += r;
  return result;
}

inline Table perturb(const Table& train, const PerturbationConfig& cfg) {
  return perturb_with_stats(train, cfg).table;
}

// Each column sampled independently from its own training values: exact
// univariate marginals in expectation, no dependence between columns.
inline Table sample_independent(const Table& train, std::size_t rows, std::uint64_t seed,
                                std::size_t workers = 0) {
  if (train.empty()) throw ArgumentError("cannot sample from an empty table");
  const std::size_t n = train.row_count();
  const std::size_t m = train.column_count();
  std::vector<std::vector<std::size_t>> src(m, std::vector<std::size_t>(rows));
  parallel_for(detail::block_count(rows), workers, [&](std::size_t b0, std::size_t b1) {
    for (std::size_t b = b0; b < b1; ++b) {
      Rng rng = make_rng(seed, detail::kIndependentStream, b);
      const std::size_t end = std::min(rows, (b + 1) * detail::kBlockRows);
      for (std::size_t i = b * detail::kBlockRows; i < end; ++i) {
        for (std::size_t j = 0; j < m; ++j) src[j][i] = uniform_index(rng, n);
      }
    }
  });
  return detail::gather_columns(train, src);
}

// Memorizing "synthesizer": rows drawn with replacement, unmodified. Uses the
// same source stream as perturb, so it equals perturb with p = 0 for the same
// seed.
inline Table copy_identity(const Table& train, std::size_t rows, std::uint64_t seed) {
  if (train.empty()) throw ArgumentError("cannot copy an empty table");
  std::vector<std::size_t> src(rows);
  for (std::size_t b = 0; b < detail::block_count(rows); ++b) {
    Rng source = make_rng(seed, detail::kSourceStream, b);
    const std::size_t end = std::min(rows, (b + 1) * detail::kBlockRows);
    for (std::size_t i = b * detail::kBlockRows; i < end; ++i) {
      src[i] = uniform_index(source, train.row_count());
    }
  }
  return train.take(src);
}

}  // namespace synthaudit
