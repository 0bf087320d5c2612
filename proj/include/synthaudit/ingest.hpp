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
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <utility>
#include <vector>

#include "json.hpp"
#include "synthaudit/error.hpp"
#include "synthaudit/random.hpp"
#include "synthaudit/table.hpp"

namespace synthaudit {

struct LoadOptions {
  char delimiter = ',';
  // Field values (after trimming) that denote a missing entry. The UCI
  // benchmark files use "?".
  std::vector<std::string> missing_tokens{"", "?"};
  // strftime-style formats tried in order when inferring datetime columns.
  std::vector<std::string> datetime_formats{"%Y-%m-%d", "%Y-%m-%dT%H:%M:%S",
                                            "%Y-%m-%d %H:%M:%S"};
  // Strip spaces and tabs around unquoted fields.
  bool trim_whitespace = true;
  // Declared kinds for some or all columns; the rest are inferred.
  std::vector<ColumnSchema> schema_override;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t");
  return s.substr(first, last - first + 1);
}

struct Field {
  std::string text;
  bool quoted = false;
};

// RFC 4180 style reader: quoted fields may contain delimiters, doubled quotes
// and newlines. Returns one vector of fields per record; blank lines are
// skipped.
inline std::vector<std::vector<Field>> parse_records(std::string_view text,
                                                     char delimiter,
                                                     bool trim_ws) {
  std::vector<std::vector<Field>> records;
  std::vector<Field> record;
  Field field;
  bool in_quotes = false;
  bool field_started = false;
  std::size_t line = 1;

  auto finish_field = [&] {
    if (!field.quoted && trim_ws) field.text = std::string(trim(field.text));
    record.push_back(std::move(field));
    field = Field{};
    field_started = false;
  };
  auto finish_record = [&] {
    finish_field();
    const bool blank = record.size() == 1 && !record[0].quoted &&
                       record[0].text.empty();
    if (!blank) records.push_back(std::move(record));
    record.clear();
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    const char ch = text[i];
    if (in_quotes) {
      if (ch == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.text.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        if (ch == '\n') ++line;
        field.text.push_back(ch);
      }
      continue;
    }
    if (ch == '"' && (!field_started || trim(field.text).empty())) {
      field.text.clear();
      field.quoted = true;
      field_started = true;
      in_quotes = true;
    } else if (ch == delimiter) {
      finish_field();
    } else if (ch == '\n' || ch == '\r') {
      if (ch == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
      finish_record();
      ++line;
    } else if (field.quoted) {
      if (ch != ' ' && ch != '\t') {
        throw InputError("line " + std::to_string(line) +
                         ": unexpected character after closing quote");
      }
    } else {
      field.text.push_back(ch);
      field_started = true;
    }
  }
  if (in_quotes) throw InputError("unterminated quoted field at end of input");
  if (field_started || !field.text.empty() || !record.empty()) finish_record();
  return records;
}

// Days since 1970-01-01 for a proleptic Gregorian date.
inline std::optional<std::int64_t> days_from_civil(int y, unsigned m,
                                                   unsigned d) {
  const std::chrono::year_month_day ymd{std::chrono::year{y},
                                        std::chrono::month{m},
                                        std::chrono::day{d}};
  if (!ymd.ok()) return std::nullopt;
  return std::chrono::sys_days{ymd}.time_since_epoch().count();
}

}  // namespace detail

// Finite decimal number, whole token consumed. "nan" and "inf" do not count.
inline std::optional<double> parse_number(std::string_view s) {
  if (s.empty()) return std::nullopt;
  double value = 0;
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, value);
  if (ec != std::errc{} || ptr != end || !std::isfinite(value)) {
    return std::nullopt;
  }
  return value;
}

// Seconds since the Unix epoch (UTC), or nullopt if no format matches the
// whole token.
inline std::optional<double> parse_datetime(
    std::string_view s, const std::vector<std::string>& formats) {
  if (s.empty()) return std::nullopt;
  const std::string text(s);
  for (const auto& fmt : formats) {
    std::tm tm{};
    std::istringstream in(text);
    in.imbue(std::locale::classic());
    in >> std::get_time(&tm, fmt.c_str());
    if (in.fail()) continue;
    if (in.peek() != std::char_traits<char>::eof()) continue;
    auto days = detail::days_from_civil(tm.tm_year + 1900,
                                        static_cast<unsigned>(tm.tm_mon + 1),
                                        static_cast<unsigned>(tm.tm_mday));
    if (!days) continue;
    return static_cast<double>(*days) * 86400.0 + tm.tm_hour * 3600.0 +
           tm.tm_min * 60.0 + tm.tm_sec;
  }
  return std::nullopt;
}

// ISO-8601 "YYYY-MM-DDTHH:MM:SS" for whole-second epoch values.
inline std::string format_datetime(double epoch_seconds) {
  const auto total = static_cast<std::int64_t>(std::floor(epoch_seconds));
  auto days = total / 86400;
  auto secs = total % 86400;
  if (secs < 0) {
    secs += 86400;
    days -= 1;
  }
  const std::chrono::year_month_day ymd{
      std::chrono::sys_days{std::chrono::days{days}}};
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%04d-%02u-%02uT%02lld:%02lld:%02lld",
                static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()),
                static_cast<unsigned>(ymd.day()),
                static_cast<long long>(secs / 3600),
                static_cast<long long>((secs / 60) % 60),
                static_cast<long long>(secs % 60));
  return buf;
}

// Shortest decimal text that parses back to the same double.
inline std::string format_number(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

// Parses delimited text with a header row into a typed Table.
//
// Inference (per column, over non-missing values): numeric if every value is
// a finite number, else datetime if every value matches one of the datetime
// formats, else categorical. A single non-conforming value demotes the
// column. Columns with no non-missing values are categorical.
inline Table parse_table(std::string_view text, const LoadOptions& options = {}) {
  auto records = detail::parse_records(text, options.delimiter,
                                       options.trim_whitespace);
  if (records.empty()) throw InputError("input has no header row");

  const auto& header = records.front();
  const std::size_t m = header.size();
  const std::size_t n = records.size() - 1;
  for (std::size_t r = 1; r < records.size(); ++r) {
    if (records[r].size() != m) {
      throw InputError("record " + std::to_string(r) + " has " +
                       std::to_string(records[r].size()) + " fields, header has " +
                       std::to_string(m));
    }
  }

  std::vector<std::optional<ColumnKind>> declared(m);
  for (const auto& o : options.schema_override) {
    auto it = std::find_if(header.begin(), header.end(),
                           [&](const detail::Field& f) { return f.text == o.name; });
    if (it == header.end()) {
      throw SchemaError("missing column '" + o.name + "' named in the schema");
    }
    declared[static_cast<std::size_t>(it - header.begin())] = o.kind;
  }

  auto is_missing_token = [&](const std::string& s) {
    return std::find(options.missing_tokens.begin(), options.missing_tokens.end(),
                     s) != options.missing_tokens.end();
  };

  std::vector<Column> columns;
  columns.reserve(m);
  for (std::size_t j = 0; j < m; ++j) {
    const std::string& name = header[j].text;
    std::vector<std::uint8_t> missing(n, 0);
    std::size_t present = 0;
    for (std::size_t r = 0; r < n; ++r) {
      if (is_missing_token(records[r + 1][j].text)) {
        missing[r] = 1;
      } else {
        ++present;
      }
    }

    auto try_numeric = [&](auto&& parse) -> std::optional<std::vector<double>> {
      std::vector<double> values(n, 0.0);
      for (std::size_t r = 0; r < n; ++r) {
        if (missing[r]) continue;
        auto v = parse(records[r + 1][j].text);
        if (!v) return std::nullopt;
        values[r] = *v;
      }
      return values;
    };
    auto as_number = [](const std::string& s) { return parse_number(s); };
    auto as_datetime = [&](const std::string& s) {
      return parse_datetime(s, options.datetime_formats);
    };

    std::optional<ColumnKind> kind = declared[j];
    std::optional<std::vector<double>> values;
    if (kind == ColumnKind::kNumeric || kind == ColumnKind::kDatetime) {
      values = *kind == ColumnKind::kNumeric ? try_numeric(as_number)
                                             : try_numeric(as_datetime);
      if (!values) {
        throw SchemaError("column '" + name + "' is declared " +
                          std::string(to_string(*kind)) +
                          " but contains unparseable values");
      }
    } else if (!kind && present > 0) {
      if ((values = try_numeric(as_number))) {
        kind = ColumnKind::kNumeric;
      } else if ((values = try_numeric(as_datetime))) {
        kind = ColumnKind::kDatetime;
      }
    }

    if (values) {
      columns.push_back(Column::numeric({name, *kind}, std::move(*values),
                                        std::move(missing)));
    } else {
      std::vector<std::optional<std::string>> raw(n);
      for (std::size_t r = 0; r < n; ++r) {
        if (!missing[r]) raw[r] = std::move(records[r + 1][j].text);
      }
      columns.push_back(Column::categorical_from_values(name, raw));
    }
  }
  Table t(std::move(columns));
  return t;
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw InputError("error reading '" + path.string() + "'");
  return buf.str();
}

inline Table load_table(const std::filesystem::path& path,
                        const LoadOptions& options = {}) {
  return parse_table(read_file(path), options);
}

namespace detail {

inline std::string quote_if_needed(std::string_view s, char delimiter) {
  const bool needs = s.find_first_of(std::string{delimiter, '"', '\n', '\r'}) !=
                         std::string_view::npos ||
                     (!s.empty() && (s.front() == ' ' || s.front() == '\t' ||
                                     s.back() == ' ' || s.back() == '\t'));
  if (!needs) return std::string(s);
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out.push_back('"');
    out.push_back(ch);
  }
  out.push_back('"');
  return out;
}

}  // namespace detail

// Delimited text with a header row. Missing entries are written as empty
// fields, numbers in shortest round-trip form, datetimes as ISO-8601.
inline std::string format_table(const Table& t, char delimiter = ',') {
  std::string out;
  for (std::size_t j = 0; j < t.column_count(); ++j) {
    if (j) out.push_back(delimiter);
    out += detail::quote_if_needed(t.column(j).name(), delimiter);
  }
  out.push_back('\n');
  for (std::size_t r = 0; r < t.row_count(); ++r) {
    for (std::size_t j = 0; j < t.column_count(); ++j) {
      if (j) out.push_back(delimiter);
      const Column& c = t.column(j);
      if (c.is_missing(r)) continue;
      switch (c.kind()) {
        case ColumnKind::kNumeric:
          out += format_number(c.number(r));
          break;
        case ColumnKind::kDatetime:
          out += format_datetime(c.number(r));
          break;
        case ColumnKind::kCategorical:
          out += detail::quote_if_needed(c.category(r), delimiter);
          break;
      }
    }
    out.push_back('\n');
  }
  return out;
}

inline void write_table(const Table& t, const std::filesystem::path& path,
                        char delimiter = ',') {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write '" + path.string() + "'");
  out << format_table(t, delimiter);
  if (!out) throw InputError("error writing '" + path.string() + "'");
}

// Schema override file: a JSON object mapping column name to kind, e.g.
//   {"age": "numeric", "signup": "datetime", "zip": "categorical"}
inline std::vector<ColumnSchema> parse_schema_override(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("schema override: ") + e.what());
  }
  if (!doc.is_object()) throw InputError("schema override must be a JSON object");
  std::vector<ColumnSchema> out;
  for (const auto& [name, kind] : doc.items()) {
    if (!kind.is_string()) {
      throw InputError("schema override: kind for '" + name + "' must be a string");
    }
    out.push_back({name, parse_column_kind(kind.get<std::string>())});
  }
  return out;
}

inline std::vector<ColumnSchema> load_schema_override(
    const std::filesystem::path& path) {
  return parse_schema_override(read_file(path));
}

// Row indices of a seeded random half split. The training half gets the
// extra row when the count is odd; both lists are ascending.
inline std::pair<std::vector<std::size_t>, std::vector<std::size_t>>
split_indices(std::size_t rows, std::uint64_t seed) {
  std::vector<std::size_t> perm(rows);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  Rng rng = make_rng(seed, /*stream=*/0x5b17);
  for (std::size_t i = rows; i > 1; --i) {
    std::swap(perm[i - 1], perm[uniform_index(rng, i)]);
  }
  const std::size_t train_rows = rows - rows / 2;
  std::vector<std::size_t> train(perm.begin(), perm.begin() + train_rows);
  std::vector<std::size_t> holdout(perm.begin() + train_rows, perm.end());
  std::sort(train.begin(), train.end());
  std::sort(holdout.begin(), holdout.end());
  return {std::move(train), std::move(holdout)};
}

inline std::pair<Table, Table> split_train_holdout(const Table& t,
                                                   std::uint64_t seed) {
  if (t.row_count() < 2) {
    throw ArgumentError("split needs at least 2 rows, got " +
                        std::to_string(t.row_count()));
  }
  auto [train, holdout] = split_indices(t.row_count(), seed);
  return {t.take(train), t.take(holdout)};
}

}  // namespace synthaudit
