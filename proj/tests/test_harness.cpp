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

#include <fstream>
#include <random>

#include "synthaudit/synthaudit.hpp"
#include "test_util.hpp"

namespace synthaudit {
namespace {

namespace fs = std::filesystem;
using testing::random_table;
using testing::scratch_dir;

std::string slurp(const fs::path& p) { return read_file(p); }

// Small mixed-kind dataset on disk plus an external candidate derived from it.
struct Fixture {
  fs::path dir;
  fs::path dataset;
  fs::path good_external;
  fs::path bad_external;
};

Fixture make_fixture(const std::string& name) {
  Fixture f;
  f.dir = scratch_dir(name);
  std::mt19937_64 rng(42);
  const Table data = random_table(rng, {600, 5, 0.05});
  f.dataset = f.dir / "data.csv";
  write_table(data, f.dataset);

  LoadOptions opts;
  const Table loaded = load_table(f.dataset, opts);
  const Table synth = perturb(loaded, {0.5, 400, 3, 1});
  f.good_external = f.dir / "good.csv";
  write_table(synth, f.good_external);
  std::vector<Column> cols(synth.columns().begin(), synth.columns().end() - 1);
  f.bad_external = f.dir / "bad.csv";
  write_table(Table(std::move(cols)), f.bad_external);
  return f;
}

RunConfig base_config(const Fixture& f, const std::string& out) {
  nlohmann::json doc = {
      {"dataset", f.dataset.filename().string()},
      {"split_seed", 3},
      {"privacy_seed", 5},
      {"output_dir", out},
      {"candidates",
       {{{"kind", "baseline"}, {"baseline", "perturb"}, {"noise", 0.3}, {"rows", 800},
         {"seed", 1}},
        {{"kind", "baseline"}, {"baseline", "independent"}, {"rows", 800}, {"seed", 1}},
        {{"kind", "baseline"}, {"baseline", "identity"}, {"rows", 800}, {"seed", 1}},
        {{"kind", "holdout"}, {"seed", 2}},
        {{"kind", "external"}, {"path", "good.csv"}},
        {{"kind", "external"}, {"path", "bad.csv"}}}}};
  return run_config_from_json(doc, f.dir);
}

TEST(Config, ParsesCandidatesAndResolvesPaths) {
  const Fixture f = make_fixture("config");
  const RunConfig cfg = base_config(f, "out");
  EXPECT_EQ(cfg.dataset, f.dir / "data.csv");
  EXPECT_EQ(cfg.output_dir, f.dir / "out");
  ASSERT_EQ(cfg.candidates.size(), 6u);
  EXPECT_EQ(cfg.candidates[0].name, "perturb-0.3");
  EXPECT_EQ(cfg.candidates[0].kind, CandidateKind::kPerturb);
  EXPECT_EQ(cfg.candidates[0].rows, 800u);
  EXPECT_EQ(cfg.candidates[1].name, "independent");
  EXPECT_EQ(cfg.candidates[3].kind, CandidateKind::kHoldout);
  EXPECT_EQ(cfg.candidates[4].name, "good");
  EXPECT_EQ(cfg.candidates[4].path, f.dir / "good.csv");
  EXPECT_EQ(cfg.depths, (std::vector<int>{1, 2, 3}));
  EXPECT_EQ(cfg.discretization.c_privacy, 100);
  EXPECT_NO_THROW(cfg.validate());
}

TEST(Config, ValidationErrors) {
  const Fixture f = make_fixture("config_errors");
  RunConfig cfg = base_config(f, "out");
  RunConfig none = cfg;
  none.candidates.clear();
  EXPECT_THROW(none.validate(), ArgumentError);
  RunConfig dup = cfg;
  dup.candidates[1].name = dup.candidates[0].name;
  EXPECT_THROW(dup.validate(), ArgumentError);
  RunConfig noisy = cfg;
  noisy.candidates[0].noise = 1.5;
  EXPECT_THROW(noisy.validate(), ArgumentError);
  RunConfig no_depth = cfg;
  no_depth.depths.clear();
  EXPECT_THROW(no_depth.validate(), ArgumentError);
  EXPECT_THROW(run_config_from_json(nlohmann::json{{"dataset", "x.csv"}}), InputError);
  EXPECT_THROW(run_config_from_json(nlohmann::json{
                   {"dataset", "x.csv"},
                   {"output_dir", "o"},
                   {"candidates", {{{"kind", "magic"}}}}}),
               ArgumentError);
  EXPECT_THROW(run_benchmark(none), ArgumentError);
}

TEST(Config, ShippedAdultConfig) {
  const RunConfig cfg =
      load_run_config(fs::path(SYNTHAUDIT_DATA_DIR).parent_path() / "configs/adult_benchmark.json");
  EXPECT_NO_THROW(cfg.validate());
  ASSERT_EQ(cfg.candidates.size(), 11u);
  int perturb_count = 0;
  for (const auto& c : cfg.candidates) {
    perturb_count += c.kind == CandidateKind::kPerturb;
    if (c.kind != CandidateKind::kExternal) {
      EXPECT_EQ(c.rows, 50'000u);
    }
  }
  EXPECT_EQ(perturb_count, 9);
  EXPECT_TRUE(fs::exists(cfg.dataset));
}

TEST(Benchmark, IsolatesFailingCandidate) {
  const Fixture f = make_fixture("isolation");
  const RunConfig cfg = base_config(f, "out");
  const RunManifest m = run_benchmark(cfg);
  ASSERT_EQ(m.candidates.size(), 6u);
  EXPECT_FALSE(m.all_succeeded());
  for (const auto& c : m.candidates) {
    if (c.name == "bad") {
      EXPECT_EQ(c.status, "failed");
      EXPECT_NE(c.error.find("candidate 'bad'"), std::string::npos) << c.error;
      EXPECT_NE(c.error.find("missing column 'c4'"), std::string::npos) << c.error;
      EXPECT_TRUE(c.fidelity_report.empty());
      continue;
    }
    EXPECT_EQ(c.status, "ok") << c.name << ": " << c.error;
    for (const auto& p : {c.fidelity_report, c.privacy_report, c.tvd_csv, c.dcr_csv}) {
      EXPECT_TRUE(fs::exists(cfg.output_dir / p)) << p;
    }
    const auto fid = fidelity_from_json(read_json(cfg.output_dir / c.fidelity_report));
    EXPECT_EQ(fid.depths.size(), 3u);
    EXPECT_EQ(fid.depth(3)->interactions.size(), 10u);
  }

  const RunManifest loaded = RunManifest::load(cfg.output_dir / "manifest.json");
  EXPECT_EQ(loaded.candidates.size(), 6u);
  EXPECT_EQ(nlohmann::json(loaded.to_json()), nlohmann::json(m.to_json()));
  EXPECT_EQ(loaded.dataset["rows"], 600);
  EXPECT_EQ(loaded.dataset["train_rows"], 300);
  EXPECT_EQ(loaded.seeds["split"], 3);
}

TEST(Benchmark, Reproducible) {
  const Fixture f = make_fixture("repro");
  RunConfig a = base_config(f, "a");
  RunConfig b = base_config(f, "b");
  b.candidate_workers = 3;
  b.workers = 2;
  const RunManifest ma = run_benchmark(a);
  run_benchmark(b);
  for (const auto& c : ma.candidates) {
    if (c.status != "ok") continue;
    for (const auto& p : {c.fidelity_report, c.privacy_report, c.tvd_csv, c.dcr_csv}) {
      EXPECT_EQ(slurp(a.output_dir / p), slurp(b.output_dir / p)) << p;
    }
  }
}

TEST(Benchmark, AllFailedThrowsButWritesManifest) {
  const Fixture f = make_fixture("all_failed");
  RunConfig cfg = base_config(f, "out");
  cfg.candidates = {cfg.candidates.back()};
  EXPECT_THROW(run_benchmark(cfg), Error);
  const RunManifest m = RunManifest::load(cfg.output_dir / "manifest.json");
  ASSERT_EQ(m.candidates.size(), 1u);
  EXPECT_EQ(m.candidates[0].status, "failed");
}

TEST(Benchmark, WritesSyntheticTablesOnRequest) {
  const Fixture f = make_fixture("write_synth");
  RunConfig cfg = base_config(f, "out");
  cfg.candidates.resize(1);
  cfg.write_synthetic = true;
  const RunManifest m = run_benchmark(cfg);
  const fs::path table = cfg.output_dir / m.candidates[0].synthetic_table;
  LoadOptions opts;
  EXPECT_EQ(load_table(table, opts).row_count(), 800u);
}

TEST(Tradeoff, Points) {
  const Fixture f = make_fixture("tradeoff");
  const RunConfig cfg = base_config(f, "out");
  const RunManifest m = run_benchmark(cfg);
  const auto points = tradeoff_points(m);
  // Five successful candidates plus the reference annotation.
  ASSERT_EQ(points.size(), 6u);
  EXPECT_TRUE(points.back().reference);
  EXPECT_EQ(points.back().fidelity_ratio, 1.0);
  EXPECT_EQ(points.back().share_closer_to_train, 0.5);
  for (const auto& p : points) {
    if (p.label == "identity") {
      EXPECT_GT(p.share_closer_to_train, 0.9);
    }
    if (p.label == "holdout") {
      EXPECT_EQ(p.fidelity_ratio, 1.0);
      EXPECT_NEAR(p.share_closer_to_train, 0.5, 0.15);
    }
  }
  const std::string csv = tradeoff_csv(points);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "label,fidelity_ratio,share_closer_to_train,kind");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 7);
  EXPECT_EQ(tradeoff_json(points)["points"].size(), 6u);
}

TEST(Tradeoff, RequiresThreeWayDepth) {
  const Fixture f = make_fixture("tradeoff_depth");
  RunConfig cfg = base_config(f, "out");
  cfg.depths = {1, 2};
  EXPECT_THROW(tradeoff_points(run_benchmark(cfg)), Error);
}

TEST(Reports, JsonRoundTrip) {
  std::mt19937_64 rng(9);
  const Table t = random_table(rng, {200, 4, 0.05});
  const Table h = testing::random_like(rng, t, 200);
  const Table s = testing::random_like(rng, t, 150);
  const auto ev = evaluate(t, h, s, {});
  const auto fid = to_json(ev.fidelity);
  EXPECT_EQ(to_json(fidelity_from_json(nlohmann::json::parse(fid.dump()))), fid);
  const auto priv = to_json(ev.privacy);
  EXPECT_EQ(to_json(privacy_from_json(nlohmann::json::parse(priv.dump()))), priv);
  EXPECT_EQ(fid["report"], "fidelity");
  EXPECT_EQ(priv["report"], "privacy");
  EXPECT_THROW(fidelity_from_json(nlohmann::json::parse(priv.dump())), InputError);

  const std::string tvd = tvd_csv(ev.fidelity);
  EXPECT_EQ(tvd.substr(0, tvd.find('\n')), "depth,columns,tvd_synthetic,tvd_holdout");
  EXPECT_EQ(std::count(tvd.begin(), tvd.end(), '\n'), 1 + 4 + 6 + 4);
  const std::string dcr = dcr_histogram_csv(ev.privacy);
  EXPECT_EQ(std::count(dcr.begin(), dcr.end(), '\n'), 1 + 5);
}

TEST(HoldoutControl, RatioIsExactlyOne) {
  std::mt19937_64 rng(10);
  const Table data = random_table(rng, {1000, 5, 0.05});
  const auto [t, h] = split_train_holdout(data, 1);
  const auto ev = evaluate_holdout_control(t, h, 4, {});
  for (const auto& d : ev.fidelity.depths) EXPECT_EQ(*d.ratio, 1.0);
  EXPECT_EQ(ev.privacy.synth_rows, 250u);
  EXPECT_EQ(ev.privacy.train_rows, 250u);
  EXPECT_EQ(ev.privacy.holdout_rows, 250u);
}

}  // namespace
}  // namespace synthaudit
