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
#include <filesystem>
#include <fstream>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <variant>
#include <vector>

#include "json.hpp"
#include "synthaudit/error.hpp"
#include "synthaudit/ingest.hpp"
#include "synthaudit/table.hpp"

namespace synthaudit {

// Cardinality bounds. The first three apply to 1-, 2- and 3-way marginals in
// the fidelity computation; depths above 3 reuse c_threeway. c_privacy is the
// granularity of the encoding used for distance-to-closest-record; it
// defaults to the per-attribute (univariate) resolution because coarser
// encodings turn most nearest-neighbour comparisons into ties.
struct DiscretizationConfig {
  int c_univariate = 100;
  int c_bivariate = 10;
  int c_threeway = 5;
  int c_privacy = 100;

  void validate() const {
    for (int c : {c_univariate, c_bivariate, c_threeway, c_privacy}) {
      if (c < 2) {
        throw ArgumentError("cardinality bounds must be >= 2, got " +
                            std::to_string(c));
      }
    }
  }

  int for_depth(int k) const {
    if (k <= 1) return c_univariate;
    if (k == 2) return c_bivariate;
    return c_threeway;
  }

  friend bool operator==(const DiscretizationConfig&,
                         const DiscretizationConfig&) = default;
};

// Interior cut points of a numeric column. Code j covers (edges[j-1], edges[j]]
// with the outer bins open towards -inf and +inf, so the code of x is the
// number of edges strictly below x.
struct QuantileBins {
  std::vector<double> edges;
};

// Categorical rule. kept[i] encodes to i. Code kept.size() is the lump group
// when has_lump_group is set, otherwise a reserved code for values never seen
// in training.
struct CategoryMap {
  std::vector<std::string> kept;
  std::vector<std::string> lumped;
  bool has_lump_group = false;
  // Training rows whose value fell into the lump group.
  std::size_t lump_mass = 0;
};

class ColumnRule {
 public:
  ColumnRule(ColumnSchema schema, std::variant<QuantileBins, CategoryMap> rule,
             bool has_missing_code)
      : schema_(std::move(schema)),
        rule_(std::move(rule)),
        has_missing_code_(has_missing_code) {
    if (const auto* map = std::get_if<CategoryMap>(&rule_)) {
      for (std::size_t i = 0; i < map->kept.size(); ++i) {
        lookup_.emplace(map->kept[i], static_cast<std::uint32_t>(i));
      }
    }
  }

  const ColumnSchema& schema() const { return schema_; }
  const std::variant<QuantileBins, CategoryMap>& rule() const { return rule_; }
  // True when the training column contained missing values.
  bool has_missing_code() const { return has_missing_code_; }

  // Codes used by non-missing values.
  std::uint32_t value_cardinality() const {
    if (const auto* bins = std::get_if<QuantileBins>(&rule_)) {
      return static_cast<std::uint32_t>(bins->edges.size() + 1);
    }
    return static_cast<std::uint32_t>(std::get<CategoryMap>(rule_).kept.size() + 1);
  }
  // Missing values always encode to the last code, so every encoded table
  // shares one code space even if only the synthetic data has gaps.
  std::uint32_t missing_code() const { return value_cardinality(); }
  std::uint32_t cardinality() const { return value_cardinality() + 1; }

  std::uint32_t encode_number(double x) const {
    const auto& edges = std::get<QuantileBins>(rule_).edges;
    return static_cast<std::uint32_t>(
        std::lower_bound(edges.begin(), edges.end(), x) - edges.begin());
  }

  // Unseen values go to the lump group or the reserved code; both are
  // kept.size().
  std::uint32_t encode_category(std::string_view value) const {
    auto it = lookup_.find(std::string(value));
    if (it != lookup_.end()) return it->second;
    return static_cast<std::uint32_t>(std::get<CategoryMap>(rule_).kept.size());
  }

 private:
  ColumnSchema schema_;
  std::variant<QuantileBins, CategoryMap> rule_;
  bool has_missing_code_ = false;
  std::unordered_map<std::string, std::uint32_t> lookup_;
};

namespace detail {

inline std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace detail

class DiscretizationModel {
 public:
  DiscretizationModel(int c, std::vector<ColumnRule> rules,
                      std::vector<std::string> warnings = {})
      : c_(c), rules_(std::move(rules)), warnings_(std::move(warnings)) {
    fingerprint_ = detail::fnv1a(to_json().dump());
  }

  int c() const { return c_; }
  const std::vector<ColumnRule>& rules() const { return rules_; }
  const std::vector<std::string>& warnings() const { return warnings_; }
  // Hash of the serialized rules; identifies encodings that share a code
  // space.
  std::uint64_t fingerprint() const { return fingerprint_; }

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json doc;
    doc["schema_version"] = 1;
    doc["c"] = c_;
    auto& cols = doc["columns"] = nlohmann::ordered_json::array();
    for (const auto& r : rules_) {
      nlohmann::ordered_json col;
      col["name"] = r.schema().name;
      col["kind"] = to_string(r.schema().kind);
      col["has_missing_code"] = r.has_missing_code();
      if (const auto* bins = std::get_if<QuantileBins>(&r.rule())) {
        col["rule"] = "quantile_bins";
        col["edges"] = bins->edges;
      } else {
        const auto& map = std::get<CategoryMap>(r.rule());
        col["rule"] = "category_map";
        col["kept"] = map.kept;
        col["has_lump_group"] = map.has_lump_group;
        col["lumped"] = map.lumped;
        col["lump_mass"] = map.lump_mass;
      }
      col["cardinality"] = r.cardinality();
      cols.push_back(std::move(col));
    }
    return doc;
  }

  static DiscretizationModel from_json(const nlohmann::json& doc) {
    try {
      std::vector<ColumnRule> rules;
      for (const auto& col : doc.at("columns")) {
        ColumnSchema schema{col.at("name").get<std::string>(),
                            parse_column_kind(col.at("kind").get<std::string>())};
        const bool missing = col.at("has_missing_code").get<bool>();
        const auto rule = col.at("rule").get<std::string>();
        if (rule == "quantile_bins") {
          rules.emplace_back(std::move(schema),
                             QuantileBins{col.at("edges").get<std::vector<double>>()},
                             missing);
        } else if (rule == "category_map") {
          CategoryMap map{col.at("kept").get<std::vector<std::string>>(),
                          col.at("lumped").get<std::vector<std::string>>(),
                          col.at("has_lump_group").get<bool>(),
                          col.at("lump_mass").get<std::size_t>()};
          rules.emplace_back(std::move(schema), std::move(map), missing);
        } else {
          throw InputError("unknown rule '" + rule + "'");
        }
      }
      return DiscretizationModel(doc.at("c").get<int>(), std::move(rules));
    } catch (const nlohmann::json::exception& e) {
      throw InputError(std::string("discretization model: ") + e.what());
    }
  }

  void save(const std::filesystem::path& path) const {
    std::ofstream out(path);
    if (!out) throw InputError("cannot write '" + path.string() + "'");
    out << to_json().dump(2) << '\n';
  }

  static DiscretizationModel load(const std::filesystem::path& path) {
    try {
      return from_json(nlohmann::json::parse(read_file(path)));
    } catch (const nlohmann::json::parse_error& e) {
      throw InputError(std::string("discretization model: ") + e.what());
    }
  }

 private:
  int c_;
  std::vector<ColumnRule> rules_;
  std::vector<std::string> warnings_;
  std::uint64_t fingerprint_ = 0;
};

// Rows encoded as small non-negative codes, column-major.
class DiscretizedTable {
 public:
  DiscretizedTable(std::vector<std::vector<std::uint32_t>> codes,
                   std::vector<std::uint32_t> cardinalities,
                   std::vector<std::string> names, std::uint64_t provenance,
                   std::size_t rows)
      : codes_(std::move(codes)),
        cardinalities_(std::move(cardinalities)),
        names_(std::move(names)),
        provenance_(provenance),
        rows_(rows) {
    if (codes_.size() != cardinalities_.size() || codes_.size() != names_.size()) {
      throw ArgumentError("discretized table: inconsistent column metadata");
    }
    for (std::size_t j = 0; j < codes_.size(); ++j) {
      if (codes_[j].size() != rows_) {
        throw ArgumentError("discretized table: ragged columns");
      }
      for (auto code : codes_[j]) {
        if (code >= cardinalities_[j]) {
          throw ArgumentError("discretized table: code out of range in column '" +
                              names_[j] + "'");
        }
      }
    }
  }

  std::size_t row_count() const { return rows_; }
  std::size_t column_count() const { return codes_.size(); }
  std::span<const std::uint32_t> codes(std::size_t column) const {
    return codes_.at(column);
  }
  std::uint32_t code(std::size_t row, std::size_t column) const {
    return codes_[column][row];
  }
  std::span<const std::uint32_t> cardinalities() const { return cardinalities_; }
  const std::vector<std::string>& names() const { return names_; }
  std::uint64_t provenance() const { return provenance_; }

  DiscretizedTable take(std::span<const std::size_t> rows) const {
    std::vector<std::vector<std::uint32_t>> out(codes_.size());
    for (std::size_t j = 0; j < codes_.size(); ++j) {
      out[j].reserve(rows.size());
      for (auto r : rows) out[j].push_back(codes_[j][r]);
    }
    return DiscretizedTable(std::move(out), cardinalities_, names_, provenance_,
                            rows.size());
  }

 private:
  std::vector<std::vector<std::uint32_t>> codes_;
  std::vector<std::uint32_t> cardinalities_;
  std::vector<std::string> names_;
  std::uint64_t provenance_;
  std::size_t rows_;
};

// Empirical quantiles at probabilities i/c (i = 1..c-1) with the lower
// convention, i.e. the sorted value at index floor(i * (n - 1) / c).
// Duplicates are merged and cut points at or above the maximum dropped, so
// no bin is empty on the fitting data.
inline std::vector<double> quantile_edges(std::vector<double> values, int c) {
  if (values.empty()) return {};
  std::sort(values.begin(), values.end());
  const auto n = static_cast<std::uint64_t>(values.size());
  const double max = values.back();
  std::vector<double> edges;
  for (std::uint64_t i = 1; i < static_cast<std::uint64_t>(c); ++i) {
    const double q = values[i * (n - 1) / static_cast<std::uint64_t>(c)];
    if (q >= max) break;
    if (edges.empty() || edges.back() != q) edges.push_back(q);
  }
  return edges;
}

// Keeps the most frequent values. With c_j distinct values and c_j >= c, the
// (c_j - c + 1) least frequent ones are lumped into one group, ties broken by
// value. Kept values are ordered by descending frequency, then by value.
inline CategoryMap fit_category_map(const Column& column, int c) {
  std::vector<std::size_t> counts(column.dictionary().size(), 0);
  for (auto id : column.category_ids()) {
    if (id != Column::kMissingId) ++counts[static_cast<std::size_t>(id)];
  }
  std::vector<std::pair<std::size_t, std::string_view>> observed;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (counts[i] > 0) observed.emplace_back(counts[i], column.dictionary()[i]);
  }
  std::sort(observed.begin(), observed.end());

  CategoryMap map;
  const std::size_t cj = observed.size();
  const auto cap = static_cast<std::size_t>(c);
  std::size_t lump = 0;
  if (cj >= cap) {
    lump = cj - cap + 1;
    map.has_lump_group = true;
  }
  for (std::size_t i = 0; i < lump; ++i) {
    map.lumped.emplace_back(observed[i].second);
    map.lump_mass += observed[i].first;
  }
  std::sort(map.lumped.begin(), map.lumped.end());
  std::vector<std::pair<std::size_t, std::string_view>> kept(
      observed.begin() + static_cast<std::ptrdiff_t>(lump), observed.end());
  std::stable_sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  });
  for (const auto& [count, value] : kept) map.kept.emplace_back(value);
  return map;
}

// Fits one rule per column on the training table.
inline DiscretizationModel fit_discretizer(const Table& train, int c) {
  if (c < 2) throw ArgumentError("cardinality bound c must be >= 2");
  if (train.empty()) throw ArgumentError("cannot fit a discretizer on an empty table");

  std::vector<ColumnRule> rules;
  std::vector<std::string> warnings;
  for (const auto& column : train.columns()) {
    const std::size_t missing = column.missing_count();
    if (missing == column.size()) {
      warnings.push_back("column '" + column.name() +
                         "' is entirely missing; it encodes to a single code");
    }
    if (is_numeric_like(column.kind())) {
      std::vector<double> values;
      values.reserve(column.size() - missing);
      for (std::size_t i = 0; i < column.size(); ++i) {
        if (!column.is_missing(i)) values.push_back(column.number(i));
      }
      rules.emplace_back(column.schema(), QuantileBins{quantile_edges(std::move(values), c)},
                         missing > 0);
    } else {
      rules.emplace_back(column.schema(), fit_category_map(column, c), missing > 0);
    }
  }
  return DiscretizationModel(c, std::move(rules), std::move(warnings));
}

// Encodes `t` with a fitted model. Columns are matched by name and emitted in
// the model's order.
inline DiscretizedTable apply_discretizer(const DiscretizationModel& model,
                                          const Table& t) {
  const auto& rules = model.rules();
  if (t.column_count() != rules.size()) {
    throw SchemaError("table has " + std::to_string(t.column_count()) +
                      " columns, model has " + std::to_string(rules.size()));
  }
  std::vector<std::vector<std::uint32_t>> codes(rules.size());
  std::vector<std::uint32_t> cards;
  std::vector<std::string> names;
  for (std::size_t j = 0; j < rules.size(); ++j) {
    const auto& rule = rules[j];
    auto idx = t.find(rule.schema().name);
    if (!idx) throw SchemaError("table is missing column '" + rule.schema().name + "'");
    const Column& column = t.column(*idx);
    if (column.kind() != rule.schema().kind) {
      throw SchemaError("column '" + column.name() + "' is " +
                        std::string(to_string(column.kind())) + ", model expects " +
                        std::string(to_string(rule.schema().kind)));
    }
    auto& out = codes[j];
    out.resize(t.row_count());
    const std::uint32_t missing_code = rule.missing_code();
    if (is_numeric_like(column.kind())) {
      for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = column.is_missing(i) ? missing_code : rule.encode_number(column.number(i));
      }
    } else {
      std::vector<std::uint32_t> by_id;
      by_id.reserve(column.dictionary().size());
      for (const auto& v : column.dictionary()) by_id.push_back(rule.encode_category(v));
      const auto ids = column.category_ids();
      for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = ids[i] == Column::kMissingId ? missing_code
                                              : by_id[static_cast<std::size_t>(ids[i])];
      }
    }
    cards.push_back(rule.cardinality());
    names.push_back(rule.schema().name);
  }
  return DiscretizedTable(std::move(codes), std::move(cards), std::move(names),
                          model.fingerprint(), t.row_count());
}

}  // namespace synthaudit
