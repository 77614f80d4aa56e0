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

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mmscore/report.hpp"

namespace mmscore {

/// One scoring run, fully specified. The emitted report embeds the seed, the
/// config hash, the tool version, and the dataset id, which together pin the
/// run down to the byte.
struct RunConfig {
  std::string dataset_path;
  /// Toy models are fitted on this file when set, on dataset_path otherwise.
  std::string train_path;
  /// Exactly one of toy_model ("majority", "centroid", "additive",
  /// "interaction") or evaluator_command (external process command line).
  std::string toy_model;
  std::string evaluator_command;
  std::uint64_t seed = 17;
  int repeats = 10;
  std::size_t coalition_cap = 16;
  /// Coalition keys to compute cooperation for; empty means every modality
  /// pair plus the full set.
  std::vector<std::string> cooperation_sets;
  std::string out_json;
  std::string out_csv;
  double fill_value = 0.0;
  double eval_timeout_seconds = 300.0;
  int workers = 1;
};

/// Canonical serialization of the config; its hash ties a report to the
/// exact run parameters.
std::string config_canonical_json(const RunConfig& config);

struct ScoringOutcome {
  ScoreReport report;
  ModalitySchema schema;
};

/// Full pipeline: utility table over all coalitions, per-modality Shapley
/// scores, cooperation scores, perceptual suite, then report emission.
/// Output files (when configured) are also written on stage failure, marked
/// partial, before the error propagates.
ScoringOutcome run_scoring(const RunConfig& config);

}  // namespace mmscore
