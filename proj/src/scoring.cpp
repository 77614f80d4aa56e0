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

#include "mmscore/scoring.hpp"

#include <fstream>
#include <memory>

#include <nlohmann/json.hpp>

#include "mmscore/dataset_io.hpp"
#include "mmscore/external.hpp"
#include "mmscore/perceptual.hpp"
#include "mmscore/rng.hpp"
#include "mmscore/shapley.hpp"
#include "mmscore/toybench.hpp"
#include "mmscore/version.hpp"

namespace mmscore {

using nlohmann::ordered_json;

std::string config_canonical_json(const RunConfig& config) {
  ordered_json doc;
  doc["dataset_path"] = config.dataset_path;
  doc["train_path"] = config.train_path;
  doc["toy_model"] = config.toy_model;
  doc["evaluator_command"] = config.evaluator_command;
  doc["seed"] = config.seed;
  doc["repeats"] = config.repeats;
  doc["coalition_cap"] = config.coalition_cap;
  doc["cooperation_sets"] = config.cooperation_sets;
  doc["fill_value"] = config.fill_value;
  doc["eval_timeout_seconds"] = config.eval_timeout_seconds;
  return doc.dump();
}

namespace {

char to_hex(std::uint64_t nibble) {
  return "0123456789abcdef"[nibble & 0xf];
}

std::string hash_hex(const std::string& text) {
  const std::uint64_t h = fnv1a(text);
  std::string out(16, '0');
  for (int i = 0; i < 16; ++i) {
    out[static_cast<std::size_t>(15 - i)] = to_hex(h >> (4 * i));
  }
  return out;
}

std::vector<std::string> default_cooperation_keys(const ModalitySchema& schema) {
  std::vector<std::string> keys;
  const std::vector<std::string> ids = schema.ids();
  for (std::size_t i = 0; i < ids.size(); ++i) {
    for (std::size_t j = i + 1; j < ids.size(); ++j) {
      keys.push_back(coalition_key(CoalitionMask({ids[i], ids[j]}), schema));
    }
  }
  if (ids.size() > 2) {
    keys.push_back(coalition_key(CoalitionMask::full(schema), schema));
  }
  return keys;
}

void write_outputs(const RunConfig& config, const ScoreReport& report,
                   const ModalitySchema& schema) {
  if (!config.out_json.empty()) {
    std::ofstream out(config.out_json);
    if (!out) {
      throw Error("cannot open '" + config.out_json + "' for writing");
    }
    out << report_to_json(report, schema).dump(2) << '\n';
  }
  if (!config.out_csv.empty()) {
    std::ofstream out(config.out_csv);
    if (!out) {
      throw Error("cannot open '" + config.out_csv + "' for writing");
    }
    out << report_to_csv(report, schema);
  }
}

}  // namespace

ScoringOutcome run_scoring(const RunConfig& config) {
  if (config.toy_model.empty() == config.evaluator_command.empty()) {
    throw ContractError("scoring: configure exactly one of toy_model / evaluator_command");
  }
  if (config.repeats < 1) {
    throw ContractError("scoring: repeats must be >= 1");
  }

  const Dataset dataset = load_dataset(config.dataset_path);
  if (dataset.schema.size() < 2) {
    throw ContractError(
        "scoring: dataset has a single modality; contribution scores need at least 2");
  }

  ScoringOutcome outcome;
  outcome.schema = dataset.schema;
  ScoreReport& report = outcome.report;
  report.tool_version = kVersion;
  report.seed = config.seed;
  report.config_hash = hash_hex(config_canonical_json(config));
  report.dataset_id = dataset.id;
  report.metadata["n_samples"] = std::to_string(dataset.size());
  report.metadata["num_classes"] = std::to_string(dataset.schema.num_classes());
  report.metadata["repeats"] = std::to_string(config.repeats);
  report.metadata["workers"] = std::to_string(config.workers);

  std::unique_ptr<Evaluator> evaluator;
  const ExternalEvaluator* external = nullptr;
  if (!config.toy_model.empty()) {
    const ToyModelKind kind = toy_model_from_name(config.toy_model);
    const Dataset train =
        config.train_path.empty() || config.train_path == config.dataset_path
            ? dataset
            : load_dataset(config.train_path);
    if (!(train.schema == dataset.schema)) {
      throw ContractError("scoring: train and evaluation schemas differ");
    }
    evaluator = std::make_unique<ToyEvaluator>(kind, train);
  } else {
    ExternalEvaluatorOptions ext_options;
    ext_options.timeout_seconds = config.eval_timeout_seconds;
    auto ext = std::make_unique<ExternalEvaluator>(split_command_line(config.evaluator_command),
                                                   dataset.schema, ext_options);
    external = ext.get();
    evaluator = std::move(ext);
  }
  report.evaluator = evaluator->name();

  auto fail_stage = [&](const std::string& stage, const std::exception& e) -> ScoringOutcome {
    report.partial = true;
    report.warnings.push_back("stage '" + stage + "' failed: " + e.what());
    write_outputs(config, report, dataset.schema);
    throw Error("stage '" + stage + "' failed: " + std::string(e.what()));
  };

  // Stage 1: coalition utilities.
  UtilityBuild build;
  try {
    UtilityBuildOptions options;
    options.policy.fill_value = config.fill_value;
    options.max_modalities = config.coalition_cap;
    options.workers = config.workers;
    build = build_utility_table(dataset, *evaluator, options);
  } catch (const std::exception& e) {
    return fail_stage("utility-table", e);
  }
  report.utilities = build.table.values;
  report.accuracy_full = build.table.z_f;
  report.majority_class = build.majority.label;
  report.v_empty = build.majority.share;
  if (build.table.z_f <= 0.0) {
    const Error z_error("full-coalition accuracy Z_f is 0; normalized scores are undefined");
    return fail_stage("utility-table", z_error);
  }

  // Stage 2: Shapley contribution and cooperation scores.
  try {
    for (const Modality& m : dataset.schema.modalities()) {
      ShapleyScore score;
      score.phi = contribution_phi(build.table, dataset.schema, m.id);
      score.points = 100.0 * score.phi / build.table.z_f;
      report.shapley_marginal[m.id] = score;
    }
    std::vector<std::string> keys = config.cooperation_sets.empty()
                                        ? default_cooperation_keys(dataset.schema)
                                        : config.cooperation_sets;
    for (const std::string& raw_key : keys) {
      const CoalitionMask mask = parse_coalition_key(raw_key, dataset.schema);
      if (mask.size() < 2) {
        throw ContractError("cooperation set '" + raw_key + "' needs at least 2 modalities");
      }
      const std::string key = coalition_key(mask, dataset.schema);
      if (report.cooperation.count(key) > 0) {
        continue;
      }
      CooperationScore score;
      score.raw_points = cooperation_score(build.table, dataset.schema, mask.present(), false);
      score.raw_fraction = score.raw_points / 100.0;
      score.normalized_points =
          cooperation_score(build.table, dataset.schema, mask.present(), true);
      report.cooperation[key] = score;
    }
  } catch (const std::exception& e) {
    return fail_stage("shapley-scores", e);
  }

  // Stage 3: perceptual suite. Cell-level failures are recorded in place;
  // only infrastructure errors abort the stage.
  try {
    const std::vector<PerceptualCellOutcome> cells =
        perceptual_suite(dataset, *evaluator, config.repeats, config.seed, build.table.z_f);
    long self_donations = 0;
    for (const PerceptualCellOutcome& cell : cells) {
      PerceptualCell entry;
      if (cell.failed) {
        entry.failed = true;
        entry.error = cell.error;
      } else {
        entry.mean = cell.result.mean;
        entry.stddev = cell.result.stddev;
        entry.repeats = cell.result.repeats;
        entry.self_donation_warnings = cell.result.self_donation_warnings;
        self_donations += cell.result.self_donation_warnings;
      }
      report.perceptual[cell.modality][permutation_mode_name(cell.mode)] = entry;
    }
    if (self_donations > 0) {
      report.warnings.push_back("in-class permutation fell back to self-donation " +
                                std::to_string(self_donations) + " time(s)");
    }
  } catch (const std::exception& e) {
    return fail_stage("perceptual", e);
  }

  if (external != nullptr && external->purity_violations() > 0) {
    report.metadata["purity_violations"] = std::to_string(external->purity_violations());
    report.warnings.push_back("external evaluator answered identical requests differently (" +
                              std::to_string(external->purity_violations()) + " violation(s))");
  }

  check_report_consistency(report);
  write_outputs(config, report, dataset.schema);
  return outcome;
}

}  // namespace mmscore
