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

#include <filesystem>
#include <fstream>
#include <optional>
#include <string>

#include "json.hpp"
#include "synthaudit/error.hpp"
#include "synthaudit/fidelity.hpp"
#include "synthaudit/ingest.hpp"
#include "synthaudit/privacy.hpp"

// JSON and CSV forms of the reports. The layout is documented in
// docs/report-format.md; bump kReportSchemaVersion on any breaking change.

namespace synthaudit {

inline constexpr int kReportSchemaVersion = 1;

using Json = nlohmann::ordered_json;

namespace detail {

template <typename T>
Json optional_json(const std::optional<T>& v) {
  return v ? Json(*v) : Json(nullptr);
}

template <typename T>
std::optional<T> optional_from(const nlohmann::json& j) {
  if (j.is_null()) return std::nullopt;
  return j.get<T>();
}

inline void check_header(const nlohmann::json& doc, std::string_view kind) {
  if (doc.at("report").get<std::string>() != kind) {
    throw InputError("expected a " + std::string(kind) + " report");
  }
  const int version = doc.at("schema_version").get<int>();
  if (version != kReportSchemaVersion) {
    throw InputError("unsupported report schema version " + std::to_string(version));
  }
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw InputError("error writing '" + path.string() + "'");
}

}  // namespace detail

inline Json config_to_json(const DiscretizationConfig& c) {
  return Json{{"c_univariate", c.c_univariate},
              {"c_bivariate", c.c_bivariate},
              {"c_threeway", c.c_threeway},
              {"c_privacy", c.c_privacy}};
}

inline DiscretizationConfig config_from_json(const nlohmann::json& j,
                                             DiscretizationConfig c = {}) {
  c.c_univariate = j.value("c_univariate", c.c_univariate);
  c.c_bivariate = j.value("c_bivariate", c.c_bivariate);
  c.c_threeway = j.value("c_threeway", c.c_threeway);
  c.c_privacy = j.value("c_privacy", c.c_privacy);
  return c;
}

inline Json to_json(const FidelityReport& r) {
  Json doc;
  doc["schema_version"] = kReportSchemaVersion;
  doc["report"] = "fidelity";
  doc["columns"] = r.columns;
  doc["config"] = config_to_json(r.config);
  doc["seed"] = detail::optional_json(r.seed);
  doc["rows"] = Json{{"train", r.train_rows},
                     {"holdout", r.holdout_rows},
                     {"synthetic", r.synth_rows}};
  auto& depths = doc["depths"] = Json::array();
  for (const auto& d : r.depths) {
    Json dj;
    dj["k"] = d.k;
    dj["c"] = d.c;
    dj["interactions"] = d.interactions.size();
    dj["f_ts"] = d.f_ts;
    dj["f_th"] = d.f_th;
    dj["ratio"] = detail::optional_json(d.ratio);
    auto& tvds = dj["tvd"] = Json::array();
    for (const auto& it : d.interactions) {
      tvds.push_back(Json{{"columns", it.columns},
                          {"synthetic", it.tvd_synth},
                          {"holdout", it.tvd_holdout}});
    }
    depths.push_back(std::move(dj));
  }
  doc["warnings"] = r.warnings;
  return doc;
}

inline FidelityReport fidelity_from_json(const nlohmann::json& doc) {
  try {
    detail::check_header(doc, "fidelity");
    FidelityReport r;
    r.columns = doc.at("columns").get<std::vector<std::string>>();
    r.config = config_from_json(doc.at("config"));
    r.seed = detail::optional_from<std::uint64_t>(doc.at("seed"));
    r.train_rows = doc.at("rows").at("train").get<std::size_t>();
    r.holdout_rows = doc.at("rows").at("holdout").get<std::size_t>();
    r.synth_rows = doc.at("rows").at("synthetic").get<std::size_t>();
    for (const auto& dj : doc.at("depths")) {
      DepthFidelity d;
      d.k = dj.at("k").get<int>();
      d.c = dj.at("c").get<int>();
      d.f_ts = dj.at("f_ts").get<double>();
      d.f_th = dj.at("f_th").get<double>();
      d.ratio = detail::optional_from<double>(dj.at("ratio"));
      for (const auto& t : dj.at("tvd")) {
        d.interactions.push_back({t.at("columns").get<std::vector<std::size_t>>(),
                                  t.at("synthetic").get<double>(),
                                  t.at("holdout").get<double>()});
      }
      r.depths.push_back(std::move(d));
    }
    r.warnings = doc.at("warnings").get<std::vector<std::string>>();
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("fidelity report: ") + e.what());
  }
}

inline Json to_json(const PrivacyReport& r) {
  Json doc;
  doc["schema_version"] = kReportSchemaVersion;
  doc["report"] = "privacy";
  doc["columns"] = r.columns;
  doc["c_privacy"] = r.c_privacy;
  doc["seed"] = detail::optional_json(r.seed);
  doc["rows"] = Json{{"train", r.train_rows},
                     {"holdout", r.holdout_rows},
                     {"synthetic", r.synth_rows}};
  doc["share_closer_to_train"] = r.share_closer_to_train;
  doc["wins"] = r.wins;
  doc["ties"] = r.ties;
  doc["losses"] = r.losses;
  doc["mean_dcr_train"] = r.mean_dcr_train;
  doc["mean_dcr_holdout"] = r.mean_dcr_holdout;
  doc["identical_match_count_train"] = r.identical_match_count_train;
  doc["identical_match_count_holdout"] = r.identical_match_count_holdout;
  doc["dcr_histogram"] = Json{{"train", r.dcr_histogram_train},
                              {"holdout", r.dcr_histogram_holdout}};
  doc["warnings"] = r.warnings;
  return doc;
}

inline PrivacyReport privacy_from_json(const nlohmann::json& doc) {
  try {
    detail::check_header(doc, "privacy");
    PrivacyReport r;
    r.columns = doc.at("columns").get<std::vector<std::string>>();
    r.c_privacy = doc.at("c_privacy").get<int>();
    r.seed = detail::optional_from<std::uint64_t>(doc.at("seed"));
    r.train_rows = doc.at("rows").at("train").get<std::size_t>();
    r.holdout_rows = doc.at("rows").at("holdout").get<std::size_t>();
    r.synth_rows = doc.at("rows").at("synthetic").get<std::size_t>();
    r.share_closer_to_train = doc.at("share_closer_to_train").get<double>();
    r.wins = doc.at("wins").get<std::size_t>();
    r.ties = doc.at("ties").get<std::size_t>();
    r.losses = doc.at("losses").get<std::size_t>();
    r.mean_dcr_train = doc.at("mean_dcr_train").get<double>();
    r.mean_dcr_holdout = doc.at("mean_dcr_holdout").get<double>();
    r.identical_match_count_train = doc.at("identical_match_count_train").get<std::size_t>();
    r.identical_match_count_holdout =
        doc.at("identical_match_count_holdout").get<std::size_t>();
    r.dcr_histogram_train = doc.at("dcr_histogram").at("train").get<std::vector<std::size_t>>();
    r.dcr_histogram_holdout =
        doc.at("dcr_histogram").at("holdout").get<std::vector<std::size_t>>();
    r.warnings = doc.at("warnings").get<std::vector<std::string>>();
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("privacy report: ") + e.what());
  }
}

// depth,columns,tvd_synthetic,tvd_holdout with column names joined by '|'.
inline std::string tvd_csv(const FidelityReport& r) {
  std::string out = "depth,columns,tvd_synthetic,tvd_holdout\n";
  for (const auto& d : r.depths) {
    for (const auto& it : d.interactions) {
      std::string names;
      for (std::size_t i = 0; i < it.columns.size(); ++i) {
        if (i) names.push_back('|');
        names += r.columns.at(it.columns[i]);
      }
      out += std::to_string(d.k) + ',' + detail::quote_if_needed(names, ',') + ',' +
             format_number(it.tvd_synth) + ',' + format_number(it.tvd_holdout) + '\n';
    }
  }
  return out;
}

inline std::string dcr_histogram_csv(const PrivacyReport& r) {
  std::string out = "distance,count_train,count_holdout\n";
  for (std::size_t d = 0; d < r.dcr_histogram_train.size(); ++d) {
    out += std::to_string(d) + ',' + std::to_string(r.dcr_histogram_train[d]) + ',' +
           std::to_string(r.dcr_histogram_holdout[d]) + '\n';
  }
  return out;
}

inline void write_json(const std::filesystem::path& path, const Json& doc) {
  detail::write_text(path, doc.dump(2) + "\n");
}

inline nlohmann::json read_json(const std::filesystem::path& path) {
  try {
    return nlohmann::json::parse(read_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError("'" + path.string() + "': " + e.what());
  }
}

}  // namespace synthaudit
