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
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "synthaudit/error.hpp"

namespace synthaudit {

enum class ColumnKind { kNumeric, kCategorical, kDatetime };

inline std::string_view to_string(ColumnKind kind) {
  switch (kind) {
    case ColumnKind::kNumeric:
      return "numeric";
    case ColumnKind::kCategorical:
      return "categorical";
    case ColumnKind::kDatetime:
      return "datetime";
  }
  return "unknown";
}

inline ColumnKind parse_column_kind(std::string_view text) {
  if (text == "numeric") return ColumnKind::kNumeric;
  if (text == "categorical") return ColumnKind::kCategorical;
  if (text == "datetime") return ColumnKind::kDatetime;
  throw ArgumentError("unknown column kind '" + std::string(text) + "'");
}

// Numeric and datetime columns are both stored as doubles; datetimes hold
// seconds since the Unix epoch.
inline bool is_numeric_like(ColumnKind kind) {
  return kind == ColumnKind::kNumeric || kind == ColumnKind::kDatetime;
}

struct ColumnSchema {
  std::string name;
  ColumnKind kind = ColumnKind::kCategorical;

  friend bool operator==(const ColumnSchema&, const ColumnSchema&) = default;
};

// One column of a Table. Numeric-like columns hold doubles plus a missing
// mask; categorical columns are dictionary encoded, with id -1 for missing.
class Column {
 public:
  static constexpr std::int32_t kMissingId = -1;

  Column() = default;

  static Column numeric(ColumnSchema schema, std::vector<double> values,
                        std::vector<std::uint8_t> missing) {
    if (!is_numeric_like(schema.kind)) {
      throw ArgumentError("column '" + schema.name + "' is not numeric-like");
    }
    if (values.size() != missing.size()) {
      throw ArgumentError("column '" + schema.name +
                          "': value and missing mask lengths differ");
    }
    Column c;
    c.schema_ = std::move(schema);
    c.numbers_ = std::move(values);
    c.missing_ = std::move(missing);
    return c;
  }

  static Column categorical(std::string name,
                            std::vector<std::string> dictionary,
                            std::vector<std::int32_t> ids) {
    const auto dict_size = static_cast<std::int32_t>(dictionary.size());
    for (auto id : ids) {
      if (id < kMissingId || id >= dict_size) {
        throw ArgumentError("column '" + name + "': category id out of range");
      }
    }
    Column c;
    c.schema_ = {std::move(name), ColumnKind::kCategorical};
    c.dictionary_ = std::move(dictionary);
    c.ids_ = std::move(ids);
    return c;
  }

  // Builds a categorical column from raw strings; std::nullopt is missing.
  static Column categorical_from_values(
      std::string name, std::span<const std::optional<std::string>> values) {
    std::vector<std::string> dictionary;
    std::unordered_map<std::string, std::int32_t> lookup;
    std::vector<std::int32_t> ids;
    ids.reserve(values.size());
    for (const auto& v : values) {
      if (!v) {
        ids.push_back(kMissingId);
        continue;
      }
      auto [it, inserted] =
          lookup.try_emplace(*v, static_cast<std::int32_t>(dictionary.size()));
      if (inserted) dictionary.push_back(*v);
      ids.push_back(it->second);
    }
    return categorical(std::move(name), std::move(dictionary), std::move(ids));
  }

  const ColumnSchema& schema() const { return schema_; }
  const std::string& name() const { return schema_.name; }
  ColumnKind kind() const { return schema_.kind; }

  std::size_t size() const {
    return is_numeric_like(schema_.kind) ? numbers_.size() : ids_.size();
  }

  bool is_missing(std::size_t row) const {
    return is_numeric_like(schema_.kind) ? missing_[row] != 0
                                         : ids_[row] == kMissingId;
  }

  std::size_t missing_count() const {
    std::size_t n = 0;
    for (std::size_t i = 0; i < size(); ++i) n += is_missing(i) ? 1 : 0;
    return n;
  }

  // Numeric-like columns only. Unspecified for missing entries.
  double number(std::size_t row) const { return numbers_[row]; }
  std::span<const double> numbers() const { return numbers_; }

  // Categorical columns only.
  std::int32_t category_id(std::size_t row) const { return ids_[row]; }
  std::string_view category(std::size_t row) const {
    return dictionary_[static_cast<std::size_t>(ids_[row])];
  }
  const std::vector<std::string>& dictionary() const { return dictionary_; }
  std::span<const std::int32_t> category_ids() const { return ids_; }

  // Rows gathered by index; indices may repeat.
  Column take(std::span<const std::size_t> rows) const {
    Column out;
    out.schema_ = schema_;
    if (is_numeric_like(schema_.kind)) {
      out.numbers_.reserve(rows.size());
      out.missing_.reserve(rows.size());
      for (auto r : rows) {
        out.numbers_.push_back(numbers_[r]);
        out.missing_.push_back(missing_[r]);
      }
    } else {
      out.dictionary_ = dictionary_;
      out.ids_.reserve(rows.size());
      for (auto r : rows) out.ids_.push_back(ids_[r]);
    }
    return out;
  }

  // Logical equality: same schema, same missing pattern, same values.
  // Dictionary order does not matter.
  friend bool operator==(const Column& a, const Column& b) {
    if (a.schema_ != b.schema_ || a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (a.is_missing(i) != b.is_missing(i)) return false;
      if (a.is_missing(i)) continue;
      if (is_numeric_like(a.kind())) {
        if (a.numbers_[i] != b.numbers_[i]) return false;
      } else if (a.category(i) != b.category(i)) {
        return false;
      }
    }
    return true;
  }

 private:
  ColumnSchema schema_;
  std::vector<double> numbers_;
  std::vector<std::uint8_t> missing_;
  std::vector<std::string> dictionary_;
  std::vector<std::int32_t> ids_;
};

class Table {
 public:
  Table() = default;

  explicit Table(std::vector<Column> columns) : columns_(std::move(columns)) {
    std::unordered_set<std::string_view> names;
    for (const auto& c : columns_) {
      if (!names.insert(c.name()).second) {
        throw SchemaError("duplicate column name '" + c.name() + "'");
      }
    }
    if (!columns_.empty()) {
      row_count_ = columns_.front().size();
      for (const auto& c : columns_) {
        if (c.size() != row_count_) {
          throw SchemaError("column '" + c.name() + "' has " +
                            std::to_string(c.size()) + " rows, expected " +
                            std::to_string(row_count_));
        }
      }
    }
  }

  std::size_t row_count() const { return row_count_; }
  std::size_t column_count() const { return columns_.size(); }
  bool empty() const { return row_count_ == 0; }

  const Column& column(std::size_t i) const { return columns_.at(i); }
  const std::vector<Column>& columns() const { return columns_; }

  std::vector<ColumnSchema> schema() const {
    std::vector<ColumnSchema> out;
    out.reserve(columns_.size());
    for (const auto& c : columns_) out.push_back(c.schema());
    return out;
  }

  std::optional<std::size_t> find(std::string_view name) const {
    for (std::size_t i = 0; i < columns_.size(); ++i) {
      if (columns_[i].name() == name) return i;
    }
    return std::nullopt;
  }

  Table take(std::span<const std::size_t> rows) const {
    std::vector<Column> out;
    out.reserve(columns_.size());
    for (const auto& c : columns_) out.push_back(c.take(rows));
    Table t(std::move(out));
    t.row_count_ = rows.size();
    return t;
  }

  friend bool operator==(const Table& a, const Table& b) {
    return a.row_count_ == b.row_count_ && a.columns_ == b.columns_;
  }

 private:
  std::vector<Column> columns_;
  std::size_t row_count_ = 0;
};

// Throws SchemaError unless `other` has exactly the columns of `reference`
// (same names and kinds, any order). `what` names the table in the message.
inline void require_same_schema(const Table& reference, const Table& other,
                                std::string_view what) {
  for (const auto& c : reference.columns()) {
    auto idx = other.find(c.name());
    if (!idx) {
      throw SchemaError(std::string(what) + " is missing column '" + c.name() +
                        "'");
    }
    if (other.column(*idx).kind() != c.kind()) {
      throw SchemaError(std::string(what) + " column '" + c.name() +
                        "' is " + std::string(to_string(other.column(*idx).kind())) +
                        ", expected " + std::string(to_string(c.kind())));
    }
  }
  for (const auto& c : other.columns()) {
    if (!reference.find(c.name())) {
      throw SchemaError(std::string(what) + " has unexpected column '" + c.name() +
                        "'");
    }
  }
}

}  // namespace synthaudit
