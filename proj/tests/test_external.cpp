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

#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "mmscore/dataset_io.hpp"
#include "mmscore/external.hpp"
#include "mmscore/scoring.hpp"
#include "mmscore/toybench.hpp"
#include "test_helpers.hpp"

using namespace mmscore;
using namespace mmscore::testing;
using nlohmann::json;

namespace {

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("mmscore_ext_" + name);
}

std::string write_regime_dataset(const std::string& tag, int n = 80) {
  RegimeSpec spec;
  spec.regime = Regime::kDominantRedundant;
  spec.n_samples = n;
  spec.seed = 19;
  const auto path = temp_file(tag + ".jsonl");
  save_dataset(generate(spec), path.string());
  return path.string();
}

}  // namespace

TEST_CASE("split_command_line") {
  CHECK(split_command_line("a b c") == std::vector<std::string>{"a", "b", "c"});
  CHECK(split_command_line("a 'b c'") == std::vector<std::string>{"a", "b c"});
  CHECK(split_command_line("a \"b 'x' c\"") == std::vector<std::string>{"a", "b 'x' c"});
  CHECK(split_command_line("  spaced   out  ") == std::vector<std::string>{"spaced", "out"});
  CHECK(split_command_line("empty ''") == std::vector<std::string>{"empty", ""});
  CHECK_THROWS_AS(split_command_line("broken 'quote"), ContractError);
}

TEST_CASE("serve_protocol answers hello and predict requests") {
  const ModalitySchema schema = make_schema({{"x", 1}, {"y", 1}});
  std::stringstream in;
  in << R"({"type":"hello","version":1,"schema":[{"id":"x","dim":1},{"id":"y","dim":1}],)"
     << R"("num_classes":2})" << "\n";
  in << R"({"type":"predict","request_id":9,"coalition":["x","y"],)"
     << R"("samples":[{"features":{"x":[0.5],"y":[1.5]}},{"features":{"x":[2.5],"y":[0.0]}}]})"
     << "\n";
  std::stringstream out;
  serve_protocol(in, out, schema, [](const Dataset& batch) {
    std::vector<int> predictions;
    for (const Sample& s : batch.samples) {
      predictions.push_back(s.features.at("x")[0] > 1.0 ? 1 : 0);
    }
    return predictions;
  });
  std::string line;
  std::getline(out, line);
  CHECK(json::parse(line)["type"] == "ready");
  std::getline(out, line);
  const json reply = json::parse(line);
  CHECK(reply["type"] == "predictions");
  CHECK(reply["request_id"] == 9);
  CHECK(reply["labels"] == json::array({0, 1}));
}

TEST_CASE("serve_protocol enforces the handshake") {
  const ModalitySchema schema = make_schema({{"x", 1}, {"y", 1}});
  std::stringstream in;
  in << R"({"type":"predict","request_id":1,"samples":[]})" << "\n";
  std::stringstream out;
  CHECK_THROWS_AS(serve_protocol(in, out, schema, [](const Dataset&) {
    return std::vector<int>{};
  }),
                  ProtocolError);
}

TEST_CASE("external evaluator round-trips a real scoring run") {
  const std::string dataset_path = write_regime_dataset("roundtrip");

  RunConfig in_process;
  in_process.dataset_path = dataset_path;
  in_process.toy_model = "centroid";
  in_process.seed = 23;
  in_process.repeats = 3;
  const ScoringOutcome expected = run_scoring(in_process);

  RunConfig external = in_process;
  external.toy_model.clear();
  external.evaluator_command =
      std::string(MMSCORE_BIN) + " protocol-echo --model centroid --train " + dataset_path;
  const ScoringOutcome actual = run_scoring(external);

  CHECK(actual.report.utilities == expected.report.utilities);
  CHECK(actual.report.accuracy_full == expected.report.accuracy_full);
  for (const auto& [id, score] : expected.report.shapley_marginal) {
    CHECK(actual.report.shapley_marginal.at(id).points == score.points);
  }
  for (const auto& [key, score] : expected.report.cooperation) {
    CHECK(actual.report.cooperation.at(key).raw_points == score.raw_points);
  }
  for (const auto& [id, by_mode] : expected.report.perceptual) {
    for (const auto& [mode, cell] : by_mode) {
      CHECK(actual.report.perceptual.at(id).at(mode).mean == cell.mean);
      CHECK(actual.report.perceptual.at(id).at(mode).stddev == cell.stddev);
    }
  }
}

TEST_CASE("wrong prediction arity is a protocol error") {
  const std::string dataset_path = write_regime_dataset("truncate");
  const Dataset dataset = load_dataset(dataset_path);
  const std::string command = std::string(MMSCORE_BIN) +
                              " protocol-echo --model majority --defect truncate --train " +
                              dataset_path;
  const ExternalEvaluator evaluator(split_command_line(command), dataset.schema);
  CHECK_THROWS_WITH_AS(evaluator.predict(dataset, CoalitionMask::full(dataset.schema)),
                       doctest::Contains("predictions for"), ProtocolError);
}

TEST_CASE("impure children are detected on repeated identical requests") {
  const std::string dataset_path = write_regime_dataset("impure");
  const Dataset dataset = load_dataset(dataset_path);
  const std::string command = std::string(MMSCORE_BIN) +
                              " protocol-echo --model majority --defect impure --train " +
                              dataset_path;
  const ExternalEvaluator evaluator(split_command_line(command), dataset.schema);
  const CoalitionMask full = CoalitionMask::full(dataset.schema);
  const std::vector<int> first = evaluator.predict(dataset, full);
  CHECK(evaluator.purity_violations() == 0);
  const std::vector<int> second = evaluator.predict(dataset, full);
  CHECK(first != second);
  CHECK(evaluator.purity_violations() == 1);

  // A pure child passes the same probe.
  const std::string clean_command =
      std::string(MMSCORE_BIN) + " protocol-echo --model majority --train " + dataset_path;
  const ExternalEvaluator clean(split_command_line(clean_command), dataset.schema);
  CHECK(clean.predict(dataset, full) == clean.predict(dataset, full));
  CHECK(clean.purity_violations() == 0);
}

TEST_CASE("timeouts kill the child and surface as protocol errors") {
  const ModalitySchema schema = make_schema({{"x", 1}, {"y", 1}});
  ExternalEvaluatorOptions options;
  options.timeout_seconds = 0.3;
  CHECK_THROWS_WITH_AS(ExternalEvaluator({"sleep", "60"}, schema, options),
                       doctest::Contains("no response"), ProtocolError);
}

TEST_CASE("spawn failures are reported immediately") {
  const ModalitySchema schema = make_schema({{"x", 1}, {"y", 1}});
  CHECK_THROWS_AS(ExternalEvaluator({"/nonexistent/evaluator-binary"}, schema), Error);
}

TEST_CASE("a failing stage still flushes a partial report") {
  const std::string dataset_path = write_regime_dataset("partial");
  RunConfig config;
  config.dataset_path = dataset_path;
  config.evaluator_command = std::string(MMSCORE_BIN) +
                             " protocol-echo --model majority --defect truncate --train " +
                             dataset_path;
  config.seed = 2;
  config.out_json = temp_file("partial.json").string();
  CHECK_THROWS_AS(run_scoring(config), Error);

  std::ifstream in(config.out_json);
  REQUIRE(in);
  const json doc = json::parse(in);
  CHECK(doc["partial"] == true);
  REQUIRE(doc["warnings"].size() >= 1);
  CHECK(doc["warnings"][0].get<std::string>().find("utility-table") != std::string::npos);
}
