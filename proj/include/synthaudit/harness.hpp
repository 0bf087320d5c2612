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

#include <atomic>
#include <chrono>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"
#include "synthaudit/baselines.hpp"
#include "synthaudit/error.hpp"
#include "synthaudit/fidelity.hpp"
#include "synthaudit/ingest.hpp"
#include "synthaudit/privacy.hpp"
#include "synthaudit/report_io.hpp"
#include "synthaudit/table.hpp"

namespace synthaudit {

inline constexpr const char* kToolVersion = "0.1.0";

enum class CandidateKind { kExternal, kPerturb, kIndependent, kIdentity, kHoldout };

inline std::string_view to_string(CandidateKind kind) {
  switch (kind) {
    case CandidateKind::kExternal:
      return "external";
    case CandidateKind::kPerturb:
      return "perturb";
    case CandidateKind::kIndependent:
      return "independent";
    case CandidateKind::kIdentity:
      return "identity";
    case CandidateKind::kHoldout:
      return "holdout";
  }
  return "unknown";
}

struct CandidateSpec {
  std::string name;
  CandidateKind kind = CandidateKind::kExternal;
  std::filesystem::path path;  // external only
  double noise = 0.0;          // perturb only
  std::size_t rows = 50'000;   // generated baselines
  std::uint64_t seed = 0;      // generated baselines and the holdout control
};

struct RunConfig {
  std::filesystem::path dataset;
  std::optional<std::filesystem::path> schema;
  LoadOptions load;
  std::uint64_t split_seed = 0;
  std::vector<int> depths{1, 2, 3};
  DiscretizationConfig discretization;
  std::uint64_t privacy_seed = 0;
  std::vector<CandidateSpec> candidates;
  std::filesystem::path output_dir;
  std::size_t workers = 0;            // per-candidate module parallelism
  std::size_t candidate_workers = 1;  // candidates evaluated concurrently
  bool write_synthetic = false;

  void validate() const {
    if (dataset.empty()) throw ArgumentError("config: dataset path is required");
    if (output_dir.empty()) throw ArgumentError("config: output_dir is required");
    if (candidates.empty()) throw ArgumentError("config: at least one candidate is required");
    if (depths.empty()) throw ArgumentError("config: depths must not be empty");
    for (int k : depths) {
      if (k < 1) throw ArgumentError("config: depths must be >= 1");
    }
    discretization.validate();
    std::set<std::string> names;
    for (const auto& c : candidates) {
      if (c.name.empty()) throw ArgumentError("config: candidate without a name");
      if (!names.insert(c.name).second) {
        throw ArgumentError("config: duplicate candidate name '" + c.name + "'");
      }
      if (c.kind == CandidateKind::kExternal && c.path.empty()) {
        throw ArgumentError("config: external candidate '" + c.name + "' needs a path");
      }
      if (c.kind == CandidateKind::kPerturb && !(c.noise >= 0.0 && c.noise <= 1.0)) {
        throw ArgumentError("config: candidate '" + c.name + "' noise must be in [0, 1]");
      }
    }
  }
};

namespace detail {

inline std::string safe_name(std::string name) {
  for (char& ch : name) {
    const bool ok = (ch >= 'a' && ch <= 'z') || (ch >= 'A' && ch <= 'Z') ||
                    (ch >= '0' && ch <= '9') || ch == '-' || ch == '_' || ch == '.';
    if (!ok) ch = '_';
  }
  if (name.empty() || name == "." || name == "..") name = "_" + name;
  return name;
}

inline std::filesystem::path resolve(const std::filesystem::path& base,
                                     const std::filesystem::path& p) {
  return p.is_absolute() || base.empty() ? p : base / p;
}

}  // namespace detail

// Reads a run config. Relative paths are resolved against base_dir (the
// directory holding the config file).
inline RunConfig run_config_from_json(const nlohmann::json& doc,
                                      const std::filesystem::path& base_dir = {}) {
  RunConfig cfg;
  try {
    cfg.dataset = detail::resolve(base_dir, doc.at("dataset").get<std::string>());
    if (doc.contains("schema") && !doc["schema"].is_null()) {
      cfg.schema = detail::resolve(base_dir, doc["schema"].get<std::string>());
    }
    const auto delim = doc.value("delimiter", std::string(","));
    if (delim.size() != 1) throw ArgumentError("config: delimiter must be one character");
    cfg.load.delimiter = delim[0];
    cfg.load.missing_tokens = doc.value("missing_tokens", cfg.load.missing_tokens);
    cfg.load.datetime_formats = doc.value("datetime_formats", cfg.load.datetime_formats);
    cfg.split_seed = doc.value("split_seed", cfg.split_seed);
    cfg.depths = doc.value("depths", cfg.depths);
    if (doc.contains("discretization")) {
      cfg.discretization = config_from_json(doc["discretization"]);
    }
    cfg.privacy_seed = doc.value("privacy_seed", cfg.privacy_seed);
    cfg.workers = doc.value("workers", cfg.workers);
    cfg.candidate_workers = doc.value("candidate_workers", cfg.candidate_workers);
    cfg.write_synthetic = doc.value("write_synthetic", cfg.write_synthetic);
    cfg.output_dir = detail::resolve(base_dir, doc.at("output_dir").get<std::string>());
    for (const auto& cj : doc.at("candidates")) {
      CandidateSpec c;
      const auto kind = cj.at("kind").get<std::string>();
      if (kind == "external") {
        c.kind = CandidateKind::kExternal;
        c.path = detail::resolve(base_dir, cj.at("path").get<std::string>());
      } else if (kind == "baseline") {
        const auto baseline = cj.at("baseline").get<std::string>();
        if (baseline == "perturb") {
          c.kind = CandidateKind::kPerturb;
          c.noise = cj.at("noise").get<double>();
        } else if (baseline == "independent") {
          c.kind = CandidateKind::kIndependent;
        } else if (baseline == "identity") {
          c.kind = CandidateKind::kIdentity;
        } else {
          throw ArgumentError("config: unknown baseline '" + baseline + "'");
        }
      } else if (kind == "holdout") {
        c.kind = CandidateKind::kHoldout;
      } else {
        throw ArgumentError("config: unknown candidate kind '" + kind + "'");
      }
      c.rows = cj.value("rows", c.rows);
      c.seed = cj.value("seed", c.seed);
      if (cj.contains("name")) {
        c.name = cj["name"].get<std::string>();
      } else if (c.kind == CandidateKind::kExternal) {
        c.name = c.path.stem().string();
      } else if (c.kind == CandidateKind::kPerturb) {
        c.name = "perturb-" + format_number(c.noise);
      } else {
        c.name = std::string(to_string(c.kind));
      }
      cfg.candidates.push_back(std::move(c));
    }
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("config: ") + e.what());
  }
  return cfg;
}

inline RunConfig load_run_config(const std::filesystem::path& path) {
  return run_config_from_json(read_json(path), path.parent_path());
}

struct Evaluation {
  FidelityReport fidelity;
  PrivacyReport privacy;
};

struct EvaluateOptions {
  std::vector<int> depths{1, 2, 3};
  DiscretizationConfig discretization;
  std::uint64_t privacy_seed = 0;
  std::size_t workers = 0;
};

// Fidelity and privacy of one synthetic table.
inline Evaluation evaluate(const Table& train, const Table& holdout, const Table& synth,
                           const EvaluateOptions& options) {
  Evaluation ev;
  ev.fidelity = fidelity_report(train, holdout, synth, options.discretization, options.depths,
                                {options.workers, std::nullopt});
  ev.privacy = privacy_report(train, holdout, synth, options.discretization,
                              {options.privacy_seed, options.workers});
  return ev;
}

// The holdout fed back as a synthetic candidate. Fidelity compares H itself
// (ratio 1 by construction). For privacy H is split again (seeded): one
// half plays the synthetic set, the other half the holdout, and train is
// subsampled to match. The synthetic half is then exchangeable with both
// references, so the expected share is exactly 0.5.
inline Evaluation evaluate_holdout_control(const Table& train, const Table& holdout,
                                           std::uint64_t seed,
                                           const EvaluateOptions& options) {
  Evaluation ev;
  ev.fidelity = fidelity_report(train, holdout, holdout, options.discretization, options.depths,
                                {options.workers, seed});
  auto [reference, synthetic] = split_train_holdout(holdout, seed);
  ev.privacy = privacy_report(train, reference, synthetic, options.discretization,
                              {options.privacy_seed, options.workers});
  ev.privacy.seed = seed;
  return ev;
}

struct CandidateResult {
  std::string name;
  CandidateKind kind = CandidateKind::kExternal;
  std::string status = "pending";  // "ok" or "failed"
  std::string error;
  nlohmann::ordered_json parameters;
  // Paths relative to the manifest directory.
  std::string fidelity_report;
  std::string privacy_report;
  std::string tvd_csv;
  std::string dcr_csv;
  std::string synthetic_table;
  std::map<std::string, double> timings_ms;
};

struct RunManifest {
  std::filesystem::path directory;
  std::string tool_version = kToolVersion;
  nlohmann::ordered_json dataset;
  nlohmann::ordered_json seeds;
  nlohmann::ordered_json config;
  std::vector<CandidateResult> candidates;
  std::map<std::string, double> timings_ms;

  bool all_succeeded() const {
    for (const auto& c : candidates) {
      if (c.status != "ok") return false;
    }
    return !candidates.empty();
  }

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json doc;
    doc["schema_version"] = kReportSchemaVersion;
    doc["report"] = "manifest";
    doc["tool_version"] = tool_version;
    doc["dataset"] = dataset;
    doc["seeds"] = seeds;
    doc["config"] = config;
    auto& cands = doc["candidates"] = nlohmann::ordered_json::array();
    for (const auto& c : candidates) {
      nlohmann::ordered_json cj;
      cj["name"] = c.name;
      cj["kind"] = to_string(c.kind);
      cj["status"] = c.status;
      cj["error"] = c.error.empty() ? nlohmann::ordered_json(nullptr)
                                    : nlohmann::ordered_json(c.error);
      cj["parameters"] = c.parameters;
      auto path_or_null = [](const std::string& p) {
        return p.empty() ? nlohmann::ordered_json(nullptr) : nlohmann::ordered_json(p);
      };
      cj["fidelity_report"] = path_or_null(c.fidelity_report);
      cj["privacy_report"] = path_or_null(c.privacy_report);
      cj["tvd_csv"] = path_or_null(c.tvd_csv);
      cj["dcr_histogram_csv"] = path_or_null(c.dcr_csv);
      cj["synthetic_table"] = path_or_null(c.synthetic_table);
      cj["timings_ms"] = c.timings_ms;
      cands.push_back(std::move(cj));
    }
    doc["timings_ms"] = timings_ms;
    return doc;
  }

  static RunManifest from_json(const nlohmann::json& doc, std::filesystem::path directory) {
    try {
      if (doc.at("report").get<std::string>() != "manifest") {
        throw InputError("not a run manifest");
      }
      RunManifest m;
      m.directory = std::move(directory);
      m.tool_version = doc.at("tool_version").get<std::string>();
      m.dataset = doc.at("dataset");
      m.seeds = doc.at("seeds");
      m.config = doc.at("config");
      auto str_or_empty = [](const nlohmann::json& j) {
        return j.is_null() ? std::string() : j.get<std::string>();
      };
      for (const auto& cj : doc.at("candidates")) {
        CandidateResult c;
        c.name = cj.at("name").get<std::string>();
        const auto kind = cj.at("kind").get<std::string>();
        for (auto k : {CandidateKind::kExternal, CandidateKind::kPerturb,
                       CandidateKind::kIndependent, CandidateKind::kIdentity,
                       CandidateKind::kHoldout}) {
          if (to_string(k) == kind) c.kind = k;
        }
        c.status = cj.at("status").get<std::string>();
        c.error = str_or_empty(cj.at("error"));
        c.parameters = cj.at("parameters");
        c.fidelity_report = str_or_empty(cj.at("fidelity_report"));
        c.privacy_report = str_or_empty(cj.at("privacy_report"));
        c.tvd_csv = str_or_empty(cj.at("tvd_csv"));
        c.dcr_csv = str_or_empty(cj.at("dcr_histogram_csv"));
        c.synthetic_table = str_or_empty(cj.at("synthetic_table"));
        c.timings_ms = cj.at("timings_ms").get<std::map<std::string, double>>();
        m.candidates.push_back(std::move(c));
      }
      m.timings_ms = doc.at("timings_ms").get<std::map<std::string, double>>();
      return m;
    } catch (const nlohmann::json::exception& e) {
      throw InputError(std::string("manifest: ") + e.what());
    }
  }

  static RunManifest load(const std::filesystem::path& path) {
    return from_json(read_json(path), path.parent_path());
  }
};

namespace detail {

class Stopwatch {
 public:
  double lap_ms() {
    const auto now = std::chrono::steady_clock::now();
    const double ms = std::chrono::duration<double, std::milli>(now - last_).count();
    last_ = now;
    return ms;
  }

 private:
  std::chrono::steady_clock::time_point last_ = std::chrono::steady_clock::now();
};

inline nlohmann::ordered_json candidate_parameters(const CandidateSpec& c) {
  nlohmann::ordered_json p;
  switch (c.kind) {
    case CandidateKind::kExternal:
      p["path"] = c.path.string();
      break;
    case CandidateKind::kPerturb:
      p["noise"] = c.noise;
      [[fallthrough]];
    case CandidateKind::kIndependent:
    case CandidateKind::kIdentity:
      p["rows"] = c.rows;
      p["seed"] = c.seed;
      break;
    case CandidateKind::kHoldout:
      p["seed"] = c.seed;
      break;
  }
  return p;
}

inline Table generate_candidate(const CandidateSpec& c, const Table& train,
                                const Table& dataset, const RunConfig& cfg) {
  switch (c.kind) {
    case CandidateKind::kExternal: {
      LoadOptions opts = cfg.load;
      opts.schema_override = dataset.schema();
      try {
        Table synth = load_table(c.path, opts);
        require_same_schema(dataset, synth, "candidate table");
        return synth;
      } catch (const Error& e) {
        throw SchemaError("candidate '" + c.name + "': " + e.what());
      }
    }
    case CandidateKind::kPerturb:
      return perturb(train, {c.noise, c.rows, c.seed, cfg.workers});
    case CandidateKind::kIndependent:
      return sample_independent(train, c.rows, c.seed, cfg.workers);
    case CandidateKind::kIdentity:
      return copy_identity(train, c.rows, c.seed);
    case CandidateKind::kHoldout:
      break;
  }
  throw ArgumentError("candidate kind has no generated table");
}

inline void run_candidate(const CandidateSpec& spec, const Table& dataset, const Table& train,
                          const Table& holdout, const RunConfig& cfg, CandidateResult& out) {
  out.name = spec.name;
  out.kind = spec.kind;
  out.parameters = candidate_parameters(spec);
  try {
    Stopwatch clock;
    const std::string dir = safe_name(spec.name);
    std::filesystem::create_directories(cfg.output_dir / dir);
    const EvaluateOptions options{cfg.depths, cfg.discretization, cfg.privacy_seed, cfg.workers};

    Evaluation ev;
    if (spec.kind == CandidateKind::kHoldout) {
      ev = evaluate_holdout_control(train, holdout, spec.seed, options);
      out.timings_ms["evaluate"] = clock.lap_ms();
    } else {
      const Table synth = generate_candidate(spec, train, dataset, cfg);
      out.timings_ms["generate"] = clock.lap_ms();
      if (cfg.write_synthetic) {
        out.synthetic_table = dir + "/synthetic.csv";
        write_table(synth, cfg.output_dir / out.synthetic_table, cfg.load.delimiter);
      }
      ev.fidelity = fidelity_report(train, holdout, synth, cfg.discretization, cfg.depths,
                                    {cfg.workers, spec.seed});
      out.timings_ms["fidelity"] = clock.lap_ms();
      ev.privacy = privacy_report(train, holdout, synth, cfg.discretization,
                                  {cfg.privacy_seed, cfg.workers});
      out.timings_ms["privacy"] = clock.lap_ms();
    }

    out.fidelity_report = dir + "/fidelity.json";
    out.privacy_report = dir + "/privacy.json";
    out.tvd_csv = dir + "/tvd.csv";
    out.dcr_csv = dir + "/dcr_histogram.csv";
    write_json(cfg.output_dir / out.fidelity_report, to_json(ev.fidelity));
    write_json(cfg.output_dir / out.privacy_report, to_json(ev.privacy));
    detail::write_text(cfg.output_dir / out.tvd_csv, tvd_csv(ev.fidelity));
    detail::write_text(cfg.output_dir / out.dcr_csv, dcr_histogram_csv(ev.privacy));
    out.timings_ms["write"] = clock.lap_ms();
    out.status = "ok";
  } catch (const std::exception& e) {
    out.status = "failed";
    out.error = e.what();
    out.fidelity_report.clear();
    out.privacy_report.clear();
    out.tvd_csv.clear();
    out.dcr_csv.clear();
  }
}

}  // namespace detail

// Split, evaluate every candidate, write reports and manifest.json into
// cfg.output_dir. A failing candidate is recorded and does not stop the
// others; if every candidate fails the manifest is still written and Error
// is thrown.
inline RunManifest run_benchmark(const RunConfig& cfg) {
  cfg.validate();
  std::filesystem::create_directories(cfg.output_dir);

  RunManifest manifest;
  manifest.directory = cfg.output_dir;
  detail::Stopwatch clock;

  LoadOptions load = cfg.load;
  if (cfg.schema) load.schema_override = load_schema_override(*cfg.schema);
  const Table dataset = load_table(cfg.dataset, load);
  manifest.timings_ms["load"] = clock.lap_ms();
  const auto [train, holdout] = split_train_holdout(dataset, cfg.split_seed);
  manifest.timings_ms["split"] = clock.lap_ms();

  auto& ds = manifest.dataset;
  ds["path"] = cfg.dataset.filename().string();
  ds["rows"] = dataset.row_count();
  ds["columns"] = dataset.column_count();
  auto& kinds = ds["kinds"] = nlohmann::ordered_json::object();
  for (const auto& c : dataset.columns()) kinds[c.name()] = to_string(c.kind());
  ds["train_rows"] = train.row_count();
  ds["holdout_rows"] = holdout.row_count();

  manifest.seeds["split"] = cfg.split_seed;
  manifest.seeds["privacy"] = cfg.privacy_seed;
  auto& cand_seeds = manifest.seeds["candidates"] = nlohmann::ordered_json::object();
  for (const auto& c : cfg.candidates) {
    if (c.kind != CandidateKind::kExternal) cand_seeds[c.name] = c.seed;
  }
  manifest.config["depths"] = cfg.depths;
  manifest.config["discretization"] = config_to_json(cfg.discretization);
  manifest.config["missing_tokens"] = cfg.load.missing_tokens;

  manifest.candidates.resize(cfg.candidates.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < cfg.candidates.size(); i = next++) {
      detail::run_candidate(cfg.candidates[i], dataset, train, holdout, cfg,
                            manifest.candidates[i]);
    }
  };
  const std::size_t pool = std::max<std::size_t>(
      1, std::min(cfg.candidate_workers, cfg.candidates.size()));
  if (pool == 1) {
    worker();
  } else {
    std::vector<std::jthread> threads;
    for (std::size_t t = 0; t < pool; ++t) threads.emplace_back(worker);
  }
  manifest.timings_ms["candidates"] = clock.lap_ms();

  write_json(cfg.output_dir / "manifest.json", manifest.to_json());
  bool any_ok = false;
  for (const auto& c : manifest.candidates) any_ok = any_ok || c.status == "ok";
  if (!any_ok) throw Error("all candidates failed; see manifest.json");
  return manifest;
}

struct TradeoffPoint {
  std::string label;
  double fidelity_ratio = 0.0;         // F3(T,S) / F3(T,H)
  double share_closer_to_train = 0.0;
  bool reference = false;              // the holdout annotation row
};

// One point per successful candidate plus the holdout reference annotation
// (ratio 1, share 0.5).
inline std::vector<TradeoffPoint> tradeoff_points(const RunManifest& manifest) {
  std::vector<TradeoffPoint> points;
  for (const auto& c : manifest.candidates) {
    if (c.status != "ok") continue;
    const auto fid = fidelity_from_json(read_json(manifest.directory / c.fidelity_report));
    const auto priv = privacy_from_json(read_json(manifest.directory / c.privacy_report));
    const DepthFidelity* d3 = fid.depth(3);
    if (!d3) throw Error("candidate '" + c.name + "' has no three-way fidelity");
    if (!d3->ratio) {
      throw Error("candidate '" + c.name + "': three-way holdout TVD is zero, no ratio");
    }
    points.push_back({c.name, *d3->ratio, priv.share_closer_to_train, false});
  }
  points.push_back({"holdout (reference)", 1.0, 0.5, true});
  return points;
}

inline std::string tradeoff_csv(const std::vector<TradeoffPoint>& points) {
  std::string out = "label,fidelity_ratio,share_closer_to_train,kind\n";
  for (const auto& p : points) {
    out += detail::quote_if_needed(p.label, ',') + ',' + format_number(p.fidelity_ratio) + ',' +
           format_number(p.share_closer_to_train) + ',' +
           (p.reference ? "reference" : "candidate") + '\n';
  }
  return out;
}

inline Json tradeoff_json(const std::vector<TradeoffPoint>& points) {
  Json doc;
  doc["schema_version"] = kReportSchemaVersion;
  doc["report"] = "tradeoff";
  auto& arr = doc["points"] = Json::array();
  for (const auto& p : points) {
    arr.push_back(Json{{"label", p.label},
                       {"fidelity_ratio", p.fidelity_ratio},
                       {"share_closer_to_train", p.share_closer_to_train},
                       {"kind", p.reference ? "reference" : "candidate"}});
  }
  return doc;
}

}  // namespace synthaudit
