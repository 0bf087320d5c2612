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
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "synthaudit/discretize.hpp"
#include "synthaudit/error.hpp"
#include "synthaudit/parallel.hpp"
#include "synthaudit/table.hpp"

namespace synthaudit {

// A k-way attribute combination: strictly increasing column indices.
struct MarginalSpec {
  std::vector<std::size_t> columns;

  std::size_t k() const { return columns.size(); }
  friend bool operator==(const MarginalSpec&, const MarginalSpec&) = default;
};

inline std::uint64_t binomial(std::uint64_t m, std::uint64_t k) {
  if (k > m) return 0;
  k = std::min(k, m - k);
  std::uint64_t result = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    result = result * (m - k + i) / i;
  }
  return result;
}

// All C(m, k) combinations in lexicographic order.
inline std::vector<MarginalSpec> enumerate_combinations(std::size_t m, std::size_t k) {
  if (k < 1 || k > m) {
    throw ArgumentError("combination depth k=" + std::to_string(k) +
                        " must be in [1, m=" + std::to_string(m) + "]");
  }
  std::vector<MarginalSpec> out;
  out.reserve(binomial(m, k));
  std::vector<std::size_t> idx(k);
  for (std::size_t i = 0; i < k; ++i) idx[i] = i;
  while (true) {
    out.push_back({idx});
    // Rightmost index that can still advance.
    std::size_t i = k;
    while (i > 0 && idx[i - 1] == m - k + (i - 1)) --i;
    if (i == 0) break;
    ++idx[i - 1];
    for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
  return out;
}

// Empirical joint distribution of the spec's columns. Cells absent from the
// map have frequency zero.
struct MarginalDistribution {
  MarginalSpec spec;
  std::map<std::vector<std::uint32_t>, double> cells;
};

namespace detail {

inline void check_spec(const DiscretizedTable& dt, const MarginalSpec& spec) {
  if (spec.columns.empty()) throw ArgumentError("marginal spec has no columns");
  for (std::size_t i = 0; i < spec.columns.size(); ++i) {
    if (spec.columns[i] >= dt.column_count()) {
      throw ArgumentError("marginal spec column index out of range");
    }
    if (i > 0 && spec.columns[i] <= spec.columns[i - 1]) {
      throw ArgumentError("marginal spec indices must be strictly increasing");
    }
  }
}

// Dense cell counting for up to this many cells; above it a hash map is used.
inline constexpr std::uint64_t kDenseCellLimit = std::uint64_t{1} << 22;

// Counts rows per cell, with cells addressed by a mixed-radix index over the
// spec's column cardinalities.
class CellCounter {
 public:
  CellCounter(std::span<const std::uint32_t> cardinalities, const MarginalSpec& spec)
      : columns_(spec.columns) {
    std::uint64_t stride = 1;
    strides_.resize(columns_.size());
    for (std::size_t i = columns_.size(); i-- > 0;) {
      strides_[i] = stride;
      if (__builtin_mul_overflow(stride, std::uint64_t{cardinalities[columns_[i]]},
                                 &stride)) {
        throw ArgumentError("marginal cell space exceeds 64-bit addressing");
      }
    }
    cells_ = stride;
    dense_ = cells_ <= kDenseCellLimit;
  }

  std::uint64_t cells() const { return cells_; }
  bool dense() const { return dense_; }

  void count(const DiscretizedTable& dt, std::vector<std::uint64_t>& dense,
             std::unordered_map<std::uint64_t, std::uint64_t>& sparse) const {
    const std::size_t n = dt.row_count();
    std::vector<std::uint64_t> keys(n, 0);
    for (std::size_t i = 0; i < columns_.size(); ++i) {
      const auto codes = dt.codes(columns_[i]);
      const std::uint64_t stride = strides_[i];
      for (std::size_t r = 0; r < n; ++r) keys[r] += codes[r] * stride;
    }
    if (dense_) {
      dense.assign(cells_, 0);
      for (auto key : keys) ++dense[key];
    } else {
      sparse.clear();
      for (auto key : keys) ++sparse[key];
    }
  }

 private:
  std::vector<std::size_t> columns_;
  std::vector<std::uint64_t> strides_;
  std::uint64_t cells_ = 1;
  bool dense_ = true;
};

// 0.5 * sum |a/na - b/nb| over the union of observed cells.
inline double tvd_dense(const std::vector<std::uint64_t>& a, double na,
                        const std::vector<std::uint64_t>& b, double nb) {
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == 0 && b[i] == 0) continue;
    sum += std::abs(static_cast<double>(a[i]) / na - static_cast<double>(b[i]) / nb);
  }
  return 0.5 * sum;
}

inline double tvd_sparse(const std::unordered_map<std::uint64_t, std::uint64_t>& a,
                         double na,
                         const std::unordered_map<std::uint64_t, std::uint64_t>& b,
                         double nb) {
  double sum = 0.0;
  for (const auto& [key, count] : a) {
    auto it = b.find(key);
    const double q = it == b.end() ? 0.0 : static_cast<double>(it->second) / nb;
    sum += std::abs(static_cast<double>(count) / na - q);
  }
  for (const auto& [key, count] : b) {
    if (!a.contains(key)) sum += static_cast<double>(count) / nb;
  }
  return 0.5 * sum;
}

inline void require_same_encoding(const DiscretizedTable& a, const DiscretizedTable& b) {
  if (a.provenance() != b.provenance() || a.column_count() != b.column_count()) {
    throw SchemaError("discretized tables come from different models");
  }
}

}  // namespace detail

// Relative frequency of every observed code tuple.
inline MarginalDistribution marginal(const DiscretizedTable& dt, const MarginalSpec& spec) {
  detail::check_spec(dt, spec);
  if (dt.row_count() == 0) throw ArgumentError("marginal of an empty table");
  std::map<std::vector<std::uint32_t>, std::uint64_t> counts;
  std::vector<std::uint32_t> key(spec.k());
  for (std::size_t r = 0; r < dt.row_count(); ++r) {
    for (std::size_t i = 0; i < spec.k(); ++i) key[i] = dt.code(r, spec.columns[i]);
    ++counts[key];
  }
  MarginalDistribution out{spec, {}};
  const auto n = static_cast<double>(dt.row_count());
  for (const auto& [cell, count] : counts) {
    out.cells.emplace(cell, static_cast<double>(count) / n);
  }
  return out;
}

// Total variation distance: half the L1 distance over the union of cells.
inline double tvd(const MarginalDistribution& p, const MarginalDistribution& q) {
  if (!(p.spec == q.spec)) throw SchemaError("tvd of marginals with different specs");
  double sum = 0.0;
  auto a = p.cells.begin();
  auto b = q.cells.begin();
  while (a != p.cells.end() || b != q.cells.end()) {
    if (b == q.cells.end() || (a != p.cells.end() && a->first < b->first)) {
      sum += a->second;
      ++a;
    } else if (a == p.cells.end() || b->first < a->first) {
      sum += b->second;
      ++b;
    } else {
      sum += std::abs(a->second - b->second);
      ++a;
      ++b;
    }
  }
  return 0.5 * sum;
}

struct InteractionTvd {
  std::vector<std::size_t> columns;
  double tvd_synth = 0.0;
  double tvd_holdout = 0.0;
};

struct DepthFidelity {
  int k = 0;
  int c = 0;
  double f_ts = 0.0;  // mean TVD(train, synth)
  double f_th = 0.0;  // mean TVD(train, holdout)
  std::optional<double> ratio;  // f_ts / f_th, absent when f_th == 0
  std::vector<InteractionTvd> interactions;
};

struct FidelityReport {
  std::vector<std::string> columns;
  DiscretizationConfig config;
  std::optional<std::uint64_t> seed;
  std::size_t train_rows = 0;
  std::size_t holdout_rows = 0;
  std::size_t synth_rows = 0;
  std::vector<DepthFidelity> depths;
  std::vector<std::string> warnings;

  const DepthFidelity* depth(int k) const {
    for (const auto& d : depths) {
      if (d.k == k) return &d;
    }
    return nullptr;
  }
};

struct FidelityOptions {
  std::size_t workers = 0;  // 0 = hardware concurrency
  std::optional<std::uint64_t> seed;  // echoed into the report
};

// TVD(train, synth) and TVD(train, holdout) for every spec, all three tables
// encoded by the same model.
inline std::vector<InteractionTvd> interaction_tvds(const DiscretizedTable& train,
                                                    const DiscretizedTable& holdout,
                                                    const DiscretizedTable& synth,
                                                    const std::vector<MarginalSpec>& specs,
                                                    std::size_t workers = 0) {
  detail::require_same_encoding(train, holdout);
  detail::require_same_encoding(train, synth);
  if (train.row_count() == 0 || holdout.row_count() == 0 || synth.row_count() == 0) {
    throw ArgumentError("fidelity needs non-empty train, holdout and synthetic tables");
  }
  std::vector<InteractionTvd> out(specs.size());
  const auto nt = static_cast<double>(train.row_count());
  const auto nh = static_cast<double>(holdout.row_count());
  const auto ns = static_cast<double>(synth.row_count());
  parallel_for(specs.size(), workers, [&](std::size_t begin, std::size_t end) {
    std::vector<std::uint64_t> dt, dh, ds;
    std::unordered_map<std::uint64_t, std::uint64_t> st, sh, ss;
    for (std::size_t i = begin; i < end; ++i) {
      detail::check_spec(train, specs[i]);
      const detail::CellCounter counter(train.cardinalities(), specs[i]);
      counter.count(train, dt, st);
      counter.count(holdout, dh, sh);
      counter.count(synth, ds, ss);
      out[i].columns = specs[i].columns;
      if (counter.dense()) {
        out[i].tvd_synth = detail::tvd_dense(dt, nt, ds, ns);
        out[i].tvd_holdout = detail::tvd_dense(dt, nt, dh, nh);
      } else {
        out[i].tvd_synth = detail::tvd_sparse(st, nt, ss, ns);
        out[i].tvd_holdout = detail::tvd_sparse(st, nt, sh, nh);
      }
    }
  });
  return out;
}

// Averaged k-way TVD fidelity of synth and holdout against train. Each depth
// is encoded with its own model fitted on train at config.for_depth(k).
inline FidelityReport fidelity_report(const Table& train, const Table& holdout,
                                      const Table& synth, const DiscretizationConfig& config,
                                      std::span<const int> depths,
                                      const FidelityOptions& options = {}) {
  config.validate();
  if (train.empty()) throw ArgumentError("training table is empty");
  if (holdout.empty()) throw ArgumentError("holdout table is empty");
  if (synth.empty()) throw ArgumentError("synthetic table is empty");
  if (depths.empty()) throw ArgumentError("no fidelity depths requested");
  require_same_schema(train, holdout, "holdout table");
  require_same_schema(train, synth, "synthetic table");

  FidelityReport report;
  for (const auto& c : train.columns()) report.columns.push_back(c.name());
  report.config = config;
  report.seed = options.seed;
  report.train_rows = train.row_count();
  report.holdout_rows = holdout.row_count();
  report.synth_rows = synth.row_count();

  std::vector<int> ks(depths.begin(), depths.end());
  std::sort(ks.begin(), ks.end());
  ks.erase(std::unique(ks.begin(), ks.end()), ks.end());
  for (int k : ks) {
    if (k < 1 || static_cast<std::size_t>(k) > train.column_count()) {
      throw ArgumentError("depth " + std::to_string(k) + " is outside [1, " +
                          std::to_string(train.column_count()) + "]");
    }
  }

  for (int k : ks) {
    const int c = config.for_depth(k);
    const auto model = fit_discretizer(train, c);
    for (const auto& w : model.warnings()) report.warnings.push_back(w);
    const auto dt = apply_discretizer(model, train);
    const auto dh = apply_discretizer(model, holdout);
    const auto ds = apply_discretizer(model, synth);
    const auto specs = enumerate_combinations(train.column_count(), static_cast<std::size_t>(k));

    DepthFidelity depth;
    depth.k = k;
    depth.c = c;
    depth.interactions = interaction_tvds(dt, dh, ds, specs, options.workers);
    double sum_s = 0.0;
    double sum_h = 0.0;
    for (const auto& it : depth.interactions) {
      sum_s += it.tvd_synth;
      sum_h += it.tvd_holdout;
    }
    const auto count = static_cast<double>(depth.interactions.size());
    depth.f_ts = sum_s / count;
    depth.f_th = sum_h / count;
    if (depth.f_th > 0.0) {
      depth.ratio = depth.f_ts / depth.f_th;
    } else {
      report.warnings.push_back("depth " + std::to_string(k) +
                                ": holdout TVD is zero, ratio omitted");
    }
    report.depths.push_back(std::move(depth));
  }
  return report;
}

}  // namespace synthaudit
