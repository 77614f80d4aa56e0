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

#include "mmscore/perceptual.hpp"

#include <cmath>

namespace mmscore {

PerceptualResult perceptual_score(const Dataset& dataset, const Evaluator& evaluator,
                                  const PermutationPlan& plan, double z_f) {
  if (z_f <= 0.0) {
    throw ContractError("perceptual_score: Z_f must be positive");
  }
  if (plan.targets.empty() || plan.targets.size() >= dataset.schema.size()) {
    throw ContractError(
        "perceptual_score: target must be a proper non-empty subset of the schema");
  }
  if (plan.mode == PermutationMode::kOutClass && dataset.classes_present().size() < 2) {
    throw ContractError("perceptual_score: out-class mode needs at least 2 classes present");
  }
  if (plan.repeats < 1) {
    throw ContractError("perceptual_score: repeats must be >= 1");
  }

  const std::vector<int> labels = dataset.labels();
  const CoalitionMask full = CoalitionMask::full(dataset.schema);

  PerceptualResult result;
  result.targets = plan.targets;
  result.mode = plan.mode;
  result.repeats = plan.repeats;

  std::vector<double> scores;
  scores.reserve(static_cast<std::size_t>(plan.repeats));
  for (int r = 0; r < plan.repeats; ++r) {
    PermutationOutcome permuted = permute_modalities(dataset, plan, r);
    result.self_donation_warnings += permuted.self_donations;
    std::vector<int> predictions;
    try {
      predictions = evaluator.predict(permuted.dataset, full);
    } catch (const Error&) {
      throw;
    } catch (const std::exception& e) {
      throw EvalError(std::string("evaluator failed on permuted dataset: ") + e.what());
    }
    const double v_r = accuracy(predictions, labels);
    scores.push_back(100.0 * (z_f - v_r) / z_f);
  }

  double mean = 0.0;
  for (double s : scores) {
    mean += s;
  }
  mean /= static_cast<double>(scores.size());
  double variance = 0.0;
  for (double s : scores) {
    variance += (s - mean) * (s - mean);
  }
  variance /= static_cast<double>(scores.size());  // population std: the repeats ARE the population
  result.mean = mean;
  result.stddev = std::sqrt(variance);
  return result;
}

std::vector<PerceptualCellOutcome> perceptual_suite(const Dataset& dataset,
                                                    const Evaluator& evaluator, int repeats,
                                                    std::uint64_t seed, double z_f) {
  std::vector<PerceptualCellOutcome> cells;
  const PermutationMode modes[] = {PermutationMode::kUniform, PermutationMode::kInClass,
                                   PermutationMode::kOutClass};
  for (const Modality& m : dataset.schema.modalities()) {
    for (PermutationMode mode : modes) {
      PerceptualCellOutcome cell;
      cell.modality = m.id;
      cell.mode = mode;
      PermutationPlan plan;
      plan.targets = {m.id};
      plan.mode = mode;
      plan.repeats = repeats;
      plan.seed = seed;
      try {
        cell.result = perceptual_score(dataset, evaluator, plan, z_f);
      } catch (const std::exception& e) {
        cell.failed = true;
        cell.error = e.what();
      }
      cells.push_back(std::move(cell));
    }
  }
  return cells;
}

}  // namespace mmscore
