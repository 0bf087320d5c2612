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

// Command-line front end: split, baseline, evaluate, benchmark, tradeoff.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "synthaudit/synthaudit.hpp"

namespace fs = std::filesystem;
using namespace synthaudit;

namespace {

struct LoadFlags {
  std::string delimiter = ",";
  std::vector<std::string> missing_tokens{"", "?"};
  std::string schema;

  void add(CLI::App* app) {
    app->add_option("--delimiter", delimiter, "Field delimiter")->capture_default_str();
    app->add_option("--missing", missing_tokens, "Tokens read as missing");
    app->add_option("--schema", schema, "JSON schema override (column -> kind)");
  }

  LoadOptions options() const {
    if (delimiter.size() != 1) throw ArgumentError("--delimiter must be one character");
    LoadOptions o;
    o.delimiter = delimiter[0];
    o.missing_tokens = missing_tokens;
    if (!schema.empty()) o.schema_override = load_schema_override(schema);
    return o;
  }
};

struct MetricFlags {
  std::vector<int> depths{1, 2, 3};
  DiscretizationConfig disc;
  std::size_t workers = 0;
  std::uint64_t privacy_seed = 0;

  void add(CLI::App* app) {
    app->add_option("--depths", depths, "Marginal depths")->delimiter(',');
    app->add_option("--c-univariate", disc.c_univariate)->capture_default_str();
    app->add_option("--c-bivariate", disc.c_bivariate)->capture_default_str();
    app->add_option("--c-threeway", disc.c_threeway)->capture_default_str();
    app->add_option("--c-privacy", disc.c_privacy)->capture_default_str();
    app->add_option("--workers", workers, "Worker threads (0 = all cores)");
    app->add_option("--privacy-seed", privacy_seed, "Seed for size-equalizing subsamples");
  }
};

void print_summary(const std::string& name, const Evaluation& ev) {
  std::cout << name << '\n';
  for (const auto& d : ev.fidelity.depths) {
    std::cout << "  F" << d.k << " (c=" << d.c << ", " << d.interactions.size()
              << " interactions): synthetic " << d.f_ts << ", holdout " << d.f_th;
    if (d.ratio) std::cout << ", ratio " << *d.ratio;
    std::cout << '\n';
  }
  const auto& p = ev.privacy;
  std::cout << "  share closer to train " << p.share_closer_to_train << ", mean DCR train "
            << p.mean_dcr_train << ", holdout " << p.mean_dcr_holdout
            << ", identical matches " << p.identical_match_count_train << '\n';
  for (const auto& w : ev.fidelity.warnings) std::cerr << "warning: " << w << '\n';
  for (const auto& w : ev.privacy.warnings) std::cerr << "warning: " << w << '\n';
}

void write_evaluation(const fs::path& dir, const Evaluation& ev) {
  fs::create_directories(dir);
  write_json(dir / "fidelity.json", to_json(ev.fidelity));
  write_json(dir / "privacy.json", to_json(ev.privacy));
  detail::write_text(dir / "tvd.csv", tvd_csv(ev.fidelity));
  detail::write_text(dir / "dcr_histogram.csv", dcr_histogram_csv(ev.privacy));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Holdout-based fidelity and privacy audit for synthetic tabular data"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);

  // split
  auto* split = app.add_subcommand("split", "Randomly split a dataset into training and holdout halves");
  std::string split_input, split_train = "train.csv", split_holdout = "holdout.csv";
  std::uint64_t split_seed = 0;
  LoadFlags split_load;
  split->add_option("dataset", split_input)->required();
  split->add_option("--seed", split_seed)->capture_default_str();
  split->add_option("--train", split_train, "Output path for the training half")->capture_default_str();
  split->add_option("--holdout", split_holdout, "Output path for the holdout half")->capture_default_str();
  split_load.add(split);

  // baseline
  auto* baseline = app.add_subcommand("baseline", "Generate a baseline synthetic table from training data");
  std::string bl_kind = "perturb", bl_train, bl_out;
  double bl_noise = 0.0;
  std::size_t bl_rows = 50'000;
  std::uint64_t bl_seed = 0;
  LoadFlags bl_load;
  baseline->add_option("--kind", bl_kind)
      ->check(CLI::IsMember({"perturb", "independent", "identity"}))
      ->capture_default_str();
  baseline->add_option("--train", bl_train)->required();
  baseline->add_option("--out", bl_out)->required();
  baseline->add_option("--noise", bl_noise, "Per-cell swap probability (perturb)")
      ->check(CLI::Range(0.0, 1.0));
  baseline->add_option("--rows", bl_rows)->capture_default_str();
  baseline->add_option("--seed", bl_seed)->capture_default_str();
  bl_load.add(baseline);

  // evaluate
  auto* evaluate_cmd = app.add_subcommand("evaluate", "Evaluate one synthetic table");
  std::string ev_train, ev_holdout, ev_synth, ev_out;
  LoadFlags ev_load;
  MetricFlags ev_metrics;
  evaluate_cmd->add_option("--train", ev_train)->required();
  evaluate_cmd->add_option("--holdout", ev_holdout)->required();
  evaluate_cmd->add_option("--synthetic", ev_synth)->required();
  evaluate_cmd->add_option("--out", ev_out, "Directory for the report files");
  ev_load.add(evaluate_cmd);
  ev_metrics.add(evaluate_cmd);

  // benchmark
  auto* bench = app.add_subcommand("benchmark", "Run a full benchmark from a JSON config");
  std::string bench_config, bench_out;
  std::size_t bench_workers = 0, bench_candidate_workers = 0;
  bench->add_option("config", bench_config)->required()->check(CLI::ExistingFile);
  bench->add_option("--out", bench_out, "Override the config's output_dir");
  bench->add_option("--workers", bench_workers, "Override per-candidate worker threads");
  bench->add_option("--candidate-workers", bench_candidate_workers,
                    "Override candidates evaluated concurrently");

  // tradeoff
  auto* tradeoff = app.add_subcommand("tradeoff", "Emit privacy/fidelity trade-off points from a manifest");
  std::string to_manifest, to_format = "csv", to_out;
  tradeoff->add_option("manifest", to_manifest)->required()->check(CLI::ExistingFile);
  tradeoff->add_option("--format", to_format)->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
  tradeoff->add_option("--out", to_out, "Output file (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*split) {
      const Table t = load_table(split_input, split_load.options());
      auto [train, holdout] = split_train_holdout(t, split_seed);
      const char delim = split_load.options().delimiter;
      write_table(train, split_train, delim);
      write_table(holdout, split_holdout, delim);
      std::cout << "train " << train.row_count() << " rows -> " << split_train << "\nholdout "
                << holdout.row_count() << " rows -> " << split_holdout << '\n';
      return EXIT_SUCCESS;
    }
    if (*baseline) {
      const auto opts = bl_load.options();
      const Table train = load_table(bl_train, opts);
      Table out;
      if (bl_kind == "perturb") {
        out = perturb(train, {bl_noise, bl_rows, bl_seed, 0});
      } else if (bl_kind == "independent") {
        out = sample_independent(train, bl_rows, bl_seed);
      } else {
        out = copy_identity(train, bl_rows, bl_seed);
      }
      write_table(out, bl_out, opts.delimiter);
      std::cout << bl_kind << ": " << out.row_count() << " rows -> " << bl_out << '\n';
      return EXIT_SUCCESS;
    }
    if (*evaluate_cmd) {
      LoadOptions opts = ev_load.options();
      const Table train = load_table(ev_train, opts);
      // Holdout and synthetic tables are read with the training schema.
      opts.schema_override = train.schema();
      const Table holdout = load_table(ev_holdout, opts);
      const Table synth = load_table(ev_synth, opts);
      const EvaluateOptions eo{ev_metrics.depths, ev_metrics.disc, ev_metrics.privacy_seed,
                               ev_metrics.workers};
      const Evaluation ev = evaluate(train, holdout, synth, eo);
      print_summary(fs::path(ev_synth).filename().string(), ev);
      if (!ev_out.empty()) write_evaluation(ev_out, ev);
      return EXIT_SUCCESS;
    }
    if (*bench) {
      RunConfig cfg = load_run_config(bench_config);
      if (!bench_out.empty()) cfg.output_dir = bench_out;
      if (bench_workers) cfg.workers = bench_workers;
      if (bench_candidate_workers) cfg.candidate_workers = bench_candidate_workers;
      const RunManifest manifest = run_benchmark(cfg);
      for (const auto& c : manifest.candidates) {
        std::cout << c.name << ": " << c.status;
        if (!c.error.empty()) std::cout << " (" << c.error << ")";
        std::cout << '\n';
      }
      std::cout << "manifest: " << (cfg.output_dir / "manifest.json").string() << '\n';
      return manifest.all_succeeded() ? EXIT_SUCCESS : EXIT_FAILURE;
    }
    if (*tradeoff) {
      const auto points = tradeoff_points(RunManifest::load(to_manifest));
      const std::string text =
          to_format == "csv" ? tradeoff_csv(points) : tradeoff_json(points).dump(2) + "\n";
      if (to_out.empty()) {
        std::cout << text;
      } else {
        detail::write_text(to_out, text);
      }
      return EXIT_SUCCESS;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return EXIT_FAILURE;
  }
  return EXIT_FAILURE;
}
