// Copyright 2026 The mmscore Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "mmscore/dataset_io.hpp"
#include "mmscore/rng.hpp"
#include "mmscore/report.hpp"
#include "mmscore/scoring.hpp"
#include "mmscore/toybench.hpp"
#include "test_helpers.hpp"

using namespace mmscore;
using namespace mmscore::testing;
using nlohmann::json;

namespace {

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("mmscore_test_" + name);
}

RunConfig small_run(const std::string& tag) {
  RegimeSpec spec;
  spec.regime = Regime::kDominantRedundant;
  spec.n_samples = 120;
  spec.seed = 3;
  const Dataset dataset = generate(spec);
  const auto path = temp_file(tag + ".jsonl");
  save_dataset(dataset, path.string());

  RunConfig config;
  config.dataset_path = path.string();
  config.toy_model = "centroid";
  config.seed = 5;
  config.repeats = 4;
  return config;
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path);
  REQUIRE(in);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("run_scoring emits consistent json, csv, and table") {
  RunConfig config = small_run("report_basic");
  config.out_json = temp_file("report_basic.json").string();
  config.out_csv = temp_file("report_basic.csv").string();
  const ScoringOutcome outcome = run_scoring(config);

  // Structure: 2 contribution entries, 1 cooperation pair, 6 perceptual cells.
  CHECK(outcome.report.shapley_marginal.size() == 2);
  CHECK(outcome.report.cooperation.size() == 1);
  CHECK(outcome.report.cooperation.count("t+v") == 1);
  int cells = 0;
  for (const auto& [modality, by_mode] : outcome.report.perceptual) {
    (void)modality;
    cells += static_cast<int>(by_mode.size());
  }
  CHECK(cells == 6);
  CHECK_NOTHROW(check_report_consistency(outcome.report));

  // Every CSV value must equal the corresponding JSON value exactly.
  const json doc = json::parse(slurp(config.out_json));
  std::istringstream csv(slurp(config.out_csv));
  std::string line;
  std::getline(csv, line);
  CHECK(line == "model,metric,modality_or_coalition,mean,std");
  int csv_rows = 0;
  while (std::getline(csv, line)) {
    std::stringstream row(line);
    std::string model, metric, target, mean_text, std_text;
    std::getline(row, model, ',');
    std::getline(row, metric, ',');
    std::getline(row, target, ',');
    std::getline(row, mean_text, ',');
    std::getline(row, std_text, ',');
    const double mean = std::strtod(mean_text.c_str(), nullptr);
    ++csv_rows;
    if (metric == "accuracy") {
      CHECK(mean == doc["accuracy_full"].get<double>());
    } else if (metric == "utility") {
      CHECK(mean == doc["utilities"][target].get<double>());
    } else if (metric == "shapley_points") {
      CHECK(mean == doc["shapley_marginal"][target]["points"].get<double>());
    } else if (metric == "shapley_phi") {
      CHECK(mean == doc["shapley_marginal"][target]["phi"].get<double>());
    } else if (metric == "cooperation_raw_points") {
      CHECK(mean == doc["cooperation"][target]["raw_points"].get<double>());
    } else if (metric == "cooperation_normalized_points") {
      CHECK(mean == doc["cooperation"][target]["normalized_points"].get<double>());
    } else if (metric.rfind("perceptual_", 0) == 0) {
      const std::string mode = metric.substr(std::string("perceptual_").size());
      CHECK(mean == doc["perceptual"][target][mode]["mean"].get<double>());
      CHECK(std::strtod(std_text.c_str(), nullptr) ==
            doc["perceptual"][target][mode]["std"].get<double>());
    }
  }
  CHECK(csv_rows >= 14);

  // Reproducibility is part of the report contract.
  CHECK(doc["seed"].get<std::uint64_t>() == 5);
  CHECK(doc["config_hash"].get<std::string>().size() == 16);
  CHECK(doc["tool"]["version"].get<std::string>() == "0.1.0");
  CHECK(doc["dataset_id"].get<std::string>() == "dominant-redundant-n120-k2-s3");

  // Human table carries the headline columns.
  const std::string table = report_to_table(outcome.report, outcome.schema);
  for (const char* needle : {"Acc.", "S_t", "S_v", "C_t+v", "P_t", "Pin_t", "Pout_t"}) {
    CHECK(table.find(needle) != std::string::npos);
  }
}

TEST_CASE("three modalities get every pair plus the full set by default") {
  Dataset dataset;
  dataset.schema = make_schema({{"x", 1}, {"y", 1}, {"z", 1}});
  dataset.id = "three";
  Rng rng(99);
  for (int i = 0; i < 60; ++i) {
    Sample s;
    s.label = static_cast<int>(rng.bounded(2));
    s.features["x"] = {static_cast<double>(s.label) + 0.1 * rng.gaussian()};
    s.features["y"] = {rng.gaussian()};
    s.features["z"] = {static_cast<double>(s.label) - 0.1 * rng.gaussian()};
    dataset.samples.push_back(std::move(s));
  }
  const auto path = temp_file("three.jsonl");
  save_dataset(dataset, path.string());

  RunConfig config;
  config.dataset_path = path.string();
  config.toy_model = "centroid";
  config.seed = 9;
  config.repeats = 2;
  const ScoringOutcome outcome = run_scoring(config);
  CHECK(outcome.report.utilities.size() == 8);
  CHECK(outcome.report.shapley_marginal.size() == 3);
  REQUIRE(outcome.report.cooperation.size() == 4);
  for (const char* key : {"x+y", "x+z", "y+z", "x+y+z"}) {
    CHECK(outcome.report.cooperation.count(key) == 1);
  }
  CHECK_NOTHROW(check_report_consistency(outcome.report));
}

TEST_CASE("library-level scoring runs are byte-identical") {
  RunConfig config = small_run("report_determinism");
  config.out_json = temp_file("determinism_a.json").string();
  run_scoring(config);
  const std::string first = slurp(config.out_json);
  config.out_json = temp_file("determinism_b.json").string();
  run_scoring(config);
  CHECK(first == slurp(config.out_json));
}

TEST_CASE("run_scoring validates its configuration") {
  RunConfig config = small_run("report_config");
  SUBCASE("both evaluator kinds set") {
    config.evaluator_command = "whatever";
    CHECK_THROWS_AS(run_scoring(config), ContractError);
  }
  SUBCASE("neither evaluator kind set") {
    config.toy_model.clear();
    CHECK_THROWS_AS(run_scoring(config), ContractError);
  }
  SUBCASE("unknown cooperation set") {
    config.cooperation_sets = {"t+zzz"};
    CHECK_THROWS_AS(run_scoring(config), Error);
  }
  SUBCASE("cooperation sets need two modalities") {
    config.cooperation_sets = {"t"};
    CHECK_THROWS_AS(run_scoring(config), Error);
  }
  SUBCASE("single-modality datasets are rejected at score time") {
    Dataset solo;
    solo.schema = make_schema({{"only", 1}});
    solo.id = "solo";
    Sample s;
    s.label = 0;
    s.features["only"] = {0.5};
    solo.samples = {s, s};
    const auto path = temp_file("solo.jsonl");
    save_dataset(solo, path.string());
    config.dataset_path = path.string();
    CHECK_THROWS_WITH_AS(run_scoring(config), doctest::Contains("single modality"),
                         ContractError);
  }
}

TEST_CASE("consistency checker catches broken reports") {
  ScoreReport report;
  report.accuracy_full = 0.8;
  report.v_empty = 0.5;
  report.shapley_marginal["a"] = {0.2, 100.0 * 0.2 / 0.8};
  report.shapley_marginal["b"] = {0.1, 100.0 * 0.1 / 0.8};
  CHECK_NOTHROW(check_report_consistency(report));

  SUBCASE("efficiency breakage") {
    report.shapley_marginal["b"].points += 1.0;
    CHECK_THROWS_AS(check_report_consistency(report), ValidationError);
  }
  SUBCASE("nonpositive accuracy with scores present") {
    report.accuracy_full = 0.0;
    CHECK_THROWS_AS(check_report_consistency(report), ValidationError);
  }
  SUBCASE("single-repeat cells cannot carry dispersion") {
    report.perceptual["a"]["uniform"] = PerceptualCell{1.0, 0.5, 1, 0, false, ""};
    CHECK_THROWS_AS(check_report_consistency(report), ValidationError);
  }
}
