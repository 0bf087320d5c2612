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

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "synthaudit/discretize.hpp"
#include "synthaudit/error.hpp"
#include "synthaudit/parallel.hpp"
#include "synthaudit/random.hpp"
#include "synthaudit/table.hpp"

namespace synthaudit {

namespace detail {

inline void require_shared_encoding(const DiscretizedTable& synth,
                                    const DiscretizedTable& reference) {
  if (synth.provenance() != reference.provenance() ||
      synth.column_count() != reference.column_count()) {
    throw SchemaError(
        "distance between tables encoded by different discretization models");
  }
}

// Rows copied row-major into the narrowest code type, sorted, with equal rows
// collapsed. group[r] is the position of row r's distinct value.
template <typename Code>
struct DistinctRows {
  std::size_t width = 0;
  std::vector<Code> rows;            // distinct rows, sorted, row-major
  std::vector<std::size_t> group;    // input row -> distinct row

  std::size_t size() const { return width == 0 ? 0 : rows.size() / width; }
  const Code* row(std::size_t i) const { return rows.data() + i * width; }

  explicit DistinctRows(const DiscretizedTable& dt) : width(dt.column_count()) {
    const std::size_t n = dt.row_count();
    std::vector<Code> flat(n * width);
    for (std::size_t j = 0; j < width; ++j) {
      const auto codes = dt.codes(j);
      for (std::size_t r = 0; r < n; ++r) flat[r * width + j] = static_cast<Code>(codes[r]);
    }
    auto at = [&](std::size_t r) { return flat.data() + r * width; };
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return std::lexicographical_compare(at(a), at(a) + width, at(b), at(b) + width);
    });
    group.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      const Code* cur = at(order[i]);
      if (i == 0 || !std::equal(cur, cur + width, at(order[i - 1]))) {
        rows.insert(rows.end(), cur, cur + width);
      }
      group[order[i]] = size() - 1;
    }
  }

  bool contains(const Code* key) const {
    std::size_t lo = 0, hi = size();
    while (lo < hi) {
      const std::size_t mid = (lo + hi) / 2;
      if (std::lexicographical_compare(row(mid), row(mid) + width, key, key + width)) {
        lo = mid + 1;
      } else {
        hi = mid;
      }
    }
    return lo < size() && std::equal(key, key + width, row(lo));
  }
};

// Reference rows scanned in blocks: per block, distances to every reference
// row accumulate column by column (a loop the compiler vectorizes), then the
// block minimum is taken. The scan stops once distance 1 is reached; 0 is
// settled by the exact-match lookup beforehand.
template <typename Code, typename Dist>
std::vector<std::uint32_t> dcr_scan(const DiscretizedTable& synth,
                                    const DiscretizedTable& reference, std::size_t workers) {
  constexpr std::size_t kBlock = 2048;
  const std::size_t m = reference.column_count();
  const DistinctRows<Code> ref(reference);
  const DistinctRows<Code> syn(synth);
  const std::size_t n_ref = ref.size();

  std::vector<Code> columns(m * n_ref);
  for (std::size_t i = 0; i < n_ref; ++i) {
    for (std::size_t j = 0; j < m; ++j) columns[j * n_ref + i] = ref.row(i)[j];
  }

  std::vector<std::uint32_t> distinct_dcr(syn.size());
  parallel_for(syn.size(), workers, [&](std::size_t begin, std::size_t end) {
    std::vector<Dist> dist(kBlock);
    for (std::size_t s = begin; s < end; ++s) {
      const Code* row = syn.row(s);
      if (ref.contains(row)) {
        distinct_dcr[s] = 0;
        continue;
      }
      auto best = static_cast<std::uint32_t>(m);
      for (std::size_t start = 0; start < n_ref && best > 1; start += kBlock) {
        const std::size_t len = std::min(kBlock, n_ref - start);
        Dist* d = dist.data();
        std::fill(d, d + len, Dist{0});
        for (std::size_t j = 0; j < m; ++j) {
          const Code* col = columns.data() + j * n_ref + start;
          const Code v = row[j];
          for (std::size_t i = 0; i < len; ++i) d[i] = static_cast<Dist>(d[i] + (col[i] != v));
        }
        Dist block_min = d[0];
        for (std::size_t i = 1; i < len; ++i) block_min = std::min(block_min, d[i]);
        best = std::min<std::uint32_t>(best, block_min);
      }
      distinct_dcr[s] = best;
    }
  });

  std::vector<std::uint32_t> out(synth.row_count());
  for (std::size_t r = 0; r < out.size(); ++r) out[r] = distinct_dcr[syn.group[r]];
  return out;
}

template <typename Code>
std::vector<std::uint32_t> dcr_dispatch_dist(const DiscretizedTable& synth,
                                             const DiscretizedTable& reference,
                                             std::size_t workers) {
  if (reference.column_count() <= 255) {
    return dcr_scan<Code, std::uint8_t>(synth, reference, workers);
  }
  return dcr_scan<Code, std::uint32_t>(synth, reference, workers);
}

}  // namespace detail

// Hamming distance from every synthetic row to its closest reference row,
// i.e. the number of columns whose codes differ. Exact: no approximate
// neighbour search.
inline std::vector<std::uint32_t> dcr_all(const DiscretizedTable& synth,
                                          const DiscretizedTable& reference,
                                          std::size_t workers = 0) {
  detail::require_shared_encoding(synth, reference);
  if (reference.row_count() == 0) throw ArgumentError("reference table is empty");
  if (synth.row_count() == 0) return {};
  if (synth.column_count() == 0) return std::vector<std::uint32_t>(synth.row_count(), 0);
  std::uint32_t max_card = 1;
  for (auto c : reference.cardinalities()) max_card = std::max(max_card, c);
  if (max_card <= 256) return detail::dcr_dispatch_dist<std::uint8_t>(synth, reference, workers);
  if (max_card <= 65536) return detail::dcr_dispatch_dist<std::uint16_t>(synth, reference, workers);
  return detail::dcr_dispatch_dist<std::uint32_t>(synth, reference, workers);
}

// Synthetic rows with an exact (post-discretization) match in the reference.
// A diagnostic only; filtering such rows out would itself leak membership.
inline std::size_t identical_match_count(const DiscretizedTable& synth,
                                         const DiscretizedTable& reference,
                                         std::size_t workers = 0) {
  const auto d = dcr_all(synth, reference, workers);
  return static_cast<std::size_t>(std::count(d.begin(), d.end(), 0u));
}

struct PrivacyReport {
  std::vector<std::string> columns;
  int c_privacy = 0;
  std::optional<std::uint64_t> seed;
  std::size_t synth_rows = 0;
  std::size_t train_rows = 0;    // after size equalization
  std::size_t holdout_rows = 0;  // after size equalization
  std::size_t wins = 0;    // d_train < d_holdout
  std::size_t ties = 0;    // d_train == d_holdout
  std::size_t losses = 0;  // d_train > d_holdout
  double share_closer_to_train = 0.0;
  double mean_dcr_train = 0.0;
  double mean_dcr_holdout = 0.0;
  std::size_t identical_match_count_train = 0;
  std::size_t identical_match_count_holdout = 0;
  // Index = distance, 0..m.
  std::vector<std::size_t> dcr_histogram_train;
  std::vector<std::size_t> dcr_histogram_holdout;
  std::vector<std::string> warnings;
};

// Share of synthetic rows closer to train than to holdout, ties counting
// one half each.
inline double share_closer_to_train(std::span<const std::uint32_t> d_train,
                                    std::span<const std::uint32_t> d_holdout) {
  if (d_train.size() != d_holdout.size()) throw ArgumentError("DCR lists differ in length");
  if (d_train.empty()) throw ArgumentError("no synthetic rows");
  std::size_t wins = 0, ties = 0;
  for (std::size_t i = 0; i < d_train.size(); ++i) {
    wins += d_train[i] < d_holdout[i] ? 1 : 0;
    ties += d_train[i] == d_holdout[i] ? 1 : 0;
  }
  return static_cast<double>(2 * wins + ties) / static_cast<double>(2 * d_train.size());
}

// Summary statistics from per-row DCRs against train and holdout.
inline PrivacyReport summarize_dcr(std::span<const std::uint32_t> d_train,
                                   std::span<const std::uint32_t> d_holdout,
                                   std::size_t columns) {
  PrivacyReport r;
  r.synth_rows = d_train.size();
  r.share_closer_to_train = share_closer_to_train(d_train, d_holdout);
  r.dcr_histogram_train.assign(columns + 1, 0);
  r.dcr_histogram_holdout.assign(columns + 1, 0);
  double sum_t = 0.0, sum_h = 0.0;
  for (std::size_t i = 0; i < d_train.size(); ++i) {
    const auto t = d_train[i];
    const auto h = d_holdout[i];
    if (t < h) ++r.wins; else if (t == h) ++r.ties; else ++r.losses;
    ++r.dcr_histogram_train.at(t);
    ++r.dcr_histogram_holdout.at(h);
    sum_t += t;
    sum_h += h;
  }
  r.identical_match_count_train = r.dcr_histogram_train[0];
  r.identical_match_count_holdout = r.dcr_histogram_holdout[0];
  r.mean_dcr_train = sum_t / static_cast<double>(d_train.size());
  r.mean_dcr_holdout = sum_h / static_cast<double>(d_holdout.size());
  return r;
}

struct PrivacyOptions {
  std::uint64_t seed = 0;   // drives the size-equalizing subsample
  std::size_t workers = 0;  // 0 = hardware concurrency
};

// DCR share from already-encoded tables. Train and holdout must have equal
// row counts.
inline PrivacyReport privacy_from_encoded(const DiscretizedTable& train,
                                          const DiscretizedTable& holdout,
                                          const DiscretizedTable& synth,
                                          std::size_t workers = 0) {
  if (train.row_count() != holdout.row_count()) {
    throw ArgumentError("train and holdout must be equally sized");
  }
  if (synth.row_count() == 0) throw ArgumentError("synthetic table is empty");
  const auto d_train = dcr_all(synth, train, workers);
  const auto d_holdout = dcr_all(synth, holdout, workers);
  PrivacyReport r = summarize_dcr(d_train, d_holdout, synth.column_count());
  r.columns = synth.names();
  r.train_rows = train.row_count();
  r.holdout_rows = holdout.row_count();
  return r;
}

// Holdout-based privacy risk of a synthetic table. All tables are encoded at
// config.c_privacy with a model fitted on train. When train and holdout
// differ in size the larger one is subsampled (seeded) to the smaller.
inline PrivacyReport privacy_report(const Table& train, const Table& holdout,
                                    const Table& synth, const DiscretizationConfig& config,
                                    const PrivacyOptions& options = {}) {
  config.validate();
  if (train.empty()) throw ArgumentError("training table is empty");
  if (holdout.empty()) throw ArgumentError("holdout table is empty");
  if (synth.empty()) throw ArgumentError("synthetic table is empty");
  require_same_schema(train, holdout, "holdout table");
  require_same_schema(train, synth, "synthetic table");

  const auto model = fit_discretizer(train, config.c_privacy);
  auto et = apply_discretizer(model, train);
  auto eh = apply_discretizer(model, holdout);
  const auto es = apply_discretizer(model, synth);

  std::vector<std::string> warnings = model.warnings();
  if (et.row_count() != eh.row_count()) {
    const bool shrink_train = et.row_count() > eh.row_count();
    auto& larger = shrink_train ? et : eh;
    const std::size_t target = std::min(et.row_count(), eh.row_count());
    warnings.push_back(std::string(shrink_train ? "training" : "holdout") +
                       " table subsampled from " + std::to_string(larger.row_count()) +
                       " to " + std::to_string(target) + " rows to equalize sizes");
    std::vector<std::size_t> idx(larger.row_count());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    Rng rng = make_rng(options.seed, /*stream=*/0x5eb5);
    for (std::size_t i = 0; i < target; ++i) {
      std::swap(idx[i], idx[i + uniform_index(rng, idx.size() - i)]);
    }
    idx.resize(target);
    std::sort(idx.begin(), idx.end());
    larger = larger.take(idx);
  }

  PrivacyReport r = privacy_from_encoded(et, eh, es, options.workers);
  r.c_privacy = config.c_privacy;
  r.seed = options.seed;
  r.warnings = std::move(warnings);
  return r;
}

}  // namespace synthaudit
