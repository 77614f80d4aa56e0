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

#include <cstdlib>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mmscore/dataset_io.hpp"
#include "mmscore/external.hpp"
#include "mmscore/masking.hpp"
#include "mmscore/scoring.hpp"
#include "mmscore/selftest.hpp"
#include "mmscore/toybench.hpp"
#include "mmscore/version.hpp"

namespace {

using namespace mmscore;

std::vector<double> parse_double_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string token;
  while (std::getline(ss, token, ',')) {
    out.push_back(std::stod(token));
  }
  return out;
}

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string token;
  while (std::getline(ss, token, ',')) {
    out.push_back(std::stoi(token));
  }
  return out;
}

int resolve_workers() {
  const char* env = std::getenv("MMSCORE_WORKERS");
  if (env == nullptr) {
    return 1;
  }
  const int workers = std::atoi(env);
  return workers >= 1 ? workers : 1;
}

int cmd_generate(const std::string& regime, int n, int classes, const std::string& dims,
                 const std::string& balance, double noise, std::uint64_t seed, double xor_bias,
                 const std::string& id, const std::string& out_path) {
  RegimeSpec spec;
  spec.regime = regime_from_name(regime);
  spec.n_samples = n;
  spec.n_classes = classes;
  if (!dims.empty()) {
    spec.dims = parse_int_list(dims);
  }
  if (!balance.empty()) {
    spec.class_balance = parse_double_list(balance);
  }
  spec.noise = noise;
  spec.seed = seed;
  spec.xor_bias = xor_bias;
  spec.dataset_id = id;
  const Dataset dataset = generate(spec);
  save_dataset(dataset, out_path);
  std::cout << "wrote " << dataset.size() << " samples (" << dataset.schema.size()
            << " modalities, " << dataset.schema.num_classes() << " classes) to " << out_path
            << "\n";
  return 0;
}

int cmd_score(RunConfig config) {
  config.workers = resolve_workers();
  const ScoringOutcome outcome = run_scoring(config);
  std::cout << report_to_table(outcome.report, outcome.schema);
  for (const std::string& warning : outcome.report.warnings) {
    std::cout << "warning: " << warning << "\n";
  }
  if (!config.out_json.empty()) {
    std::cout << "report: " << config.out_json << "\n";
  }
  if (!config.out_csv.empty()) {
    std::cout << "csv: " << config.out_csv << "\n";
  }
  return 0;
}

int cmd_protocol_echo(const std::string& model, const std::string& train_path,
                      const std::string& defect) {
  const Dataset train = load_dataset(train_path);
  const ToyEvaluator evaluator(toy_model_from_name(model), train);
  const CoalitionMask full = CoalitionMask::full(train.schema);
  long request_count = 0;
  auto predict = [&](const Dataset& batch) {
    std::vector<int> predictions = evaluator.predict(batch, full);
    ++request_count;
    if (defect == "truncate" && !predictions.empty()) {
      predictions.pop_back();
    } else if (defect == "impure" && request_count % 2 == 0 && !predictions.empty()) {
      predictions[0] = (predictions[0] + 1) % train.schema.num_classes();
    }
    return predictions;
  };
  serve_protocol(std::cin, std::cout, train.schema, predict);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Modality contribution and cooperation scores for multi-modal classifiers"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  // generate
  auto* generate = app.add_subcommand("generate", "Generate a synthetic multi-modal dataset");
  std::string regime;
  int gen_n = 2000;
  int gen_classes = 2;
  std::string gen_dims;
  std::string gen_balance;
  double gen_noise = 0.25;
  std::uint64_t gen_seed = 0;
  double gen_xor_bias = 0.0;
  std::string gen_id;
  std::string gen_out;
  generate->add_option("--regime", regime, "Regime name")
      ->required()
      ->check(CLI::IsMember({"dominant-redundant", "correlated-complementary",
                             "indispensable-xor"}));
  generate->add_option("--n", gen_n, "Number of samples")->check(CLI::PositiveNumber);
  generate->add_option("--classes", gen_classes, "Number of classes")->check(CLI::Range(2, 64));
  generate->add_option("--dims", gen_dims, "Per-modality dims, comma separated (e.g. 8,4)");
  generate->add_option("--balance", gen_balance, "Class probabilities, comma separated");
  generate->add_option("--noise", gen_noise, "Std of the additive feature noise");
  generate->add_option("--seed", gen_seed, "Generator seed");
  generate->add_option("--xor-bias", gen_xor_bias,
                       "XOR regime: label leakage into the second modality, in [0,1]");
  generate->add_option("--id", gen_id, "Dataset id (defaults to a derived one)");
  generate->add_option("--out", gen_out, "Output dataset file")->required();

  // score
  auto* score = app.add_subcommand("score", "Score a dataset with an evaluator");
  RunConfig config;
  std::string coalitions;
  score->add_option("--dataset", config.dataset_path, "Dataset file to score")->required();
  auto* model_opt =
      score->add_option("--model", config.toy_model, "Built-in model")
          ->check(CLI::IsMember({"majority", "centroid", "additive", "interaction"}));
  auto* cmd_opt = score->add_option("--evaluator-cmd", config.evaluator_command,
                                    "External evaluator command line (wire protocol v1)");
  model_opt->excludes(cmd_opt);
  score->add_option("--train", config.train_path,
                    "Training dataset for built-in models (defaults to --dataset)");
  score->add_option("--seed", config.seed, "Seed for permutation repeats");
  score->add_option("--repeats", config.repeats, "Permutation repeats per perceptual cell")
      ->check(CLI::PositiveNumber);
  score->add_option("--cap", config.coalition_cap, "Max modalities for exhaustive enumeration");
  score->add_option("--coalitions", coalitions,
                    "Cooperation sets as coalition keys, comma separated (default: all pairs "
                    "plus the full set)");
  score->add_option("--out-json", config.out_json, "Structured report output path");
  score->add_option("--out-csv", config.out_csv, "Flat CSV output path");
  score->add_option("--fill-value", config.fill_value, "Baseline fill for absent modalities");
  score->add_option("--eval-timeout", config.eval_timeout_seconds,
                    "Seconds to wait per external evaluation");

  // selftest
  auto* selftest = app.add_subcommand("selftest", "Run the built-in verification battery");

  // protocol-echo
  auto* echo = app.add_subcommand(
      "protocol-echo", "Serve a built-in model over the evaluator wire protocol (stdin/stdout)");
  std::string echo_model;
  std::string echo_train;
  std::string echo_defect = "none";
  echo->add_option("--model", echo_model, "Built-in model to serve")
      ->required()
      ->check(CLI::IsMember({"majority", "centroid", "additive", "interaction"}));
  echo->add_option("--train", echo_train, "Training dataset file")->required();
  echo->add_option("--defect", echo_defect, "Deliberate protocol defect, for conformance tests")
      ->check(CLI::IsMember({"none", "truncate", "impure"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      return app.exit(e);  // --help / --version
    }
    app.exit(e);
    return 2;
  }

  try {
    if (generate->parsed()) {
      return cmd_generate(regime, gen_n, gen_classes, gen_dims, gen_balance, gen_noise, gen_seed,
                          gen_xor_bias, gen_id, gen_out);
    }
    if (score->parsed()) {
      if (config.toy_model.empty() && config.evaluator_command.empty()) {
        std::cerr << "score: one of --model / --evaluator-cmd is required\n";
        return 2;
      }
      if (!coalitions.empty()) {
        std::stringstream ss(coalitions);
        std::string token;
        while (std::getline(ss, token, ',')) {
          config.cooperation_sets.push_back(token);
        }
      }
      return cmd_score(std::move(config));
    }
    if (selftest->parsed()) {
      return run_selftest(std::cout) == 0 ? 0 : 1;
    }
    if (echo->parsed()) {
      return cmd_protocol_echo(echo_model, echo_train, echo_defect);
    }
  } catch (const ContractError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
