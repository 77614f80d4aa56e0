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
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "mmscore/core.hpp"

namespace mmscore {

struct ShapleyScore {
  double phi = 0.0;     // raw Shapley value (accuracy units)
  double points = 0.0;  // 100 * phi / Z_f
};

struct CooperationScore {
  double raw_fraction = 0.0;       // unnormalized, accuracy units
  double raw_points = 0.0;         // 100 * raw_fraction
  double normalized_points = 0.0;  // 100 * raw_fraction / Z_f
};

struct PerceptualCell {
  double mean = 0.0;
  double stddev = 0.0;
  int repeats = 0;
  long self_donation_warnings = 0;
  bool failed = false;
  std::string error;
};

/// Everything one scoring run produces. Map keys are modality ids or
/// canonical coalition keys; emission orders follow the schema, so two runs
/// with the same config serialize byte-identically.
struct ScoreReport {
  std::string tool_version;
  std::uint64_t seed = 0;
  std::string config_hash;
  std::string dataset_id;
  std::string evaluator;
  double accuracy_full = 0.0;  // Z_f
  int majority_class = 0;
  double v_empty = 0.0;
  std::map<std::string, double> utilities;
  std::map<std::string, ShapleyScore> shapley_marginal;
  std::map<std::string, CooperationScore> cooperation;
  /// modality -> mode name ("uniform" / "in" / "out") -> cell
  std::map<std::string, std::map<std::string, PerceptualCell>> perceptual;
  bool partial = false;
  std::vector<std::string> warnings;
  std::map<std::string, std::string> metadata;
};

nlohmann::ordered_json report_to_json(const ScoreReport& report, const ModalitySchema& schema);

/// Flat CSV with columns model,metric,modality_or_coalition,mean,std.
/// Values carry full round-trip precision and match the JSON numbers
/// exactly.
std::string report_to_csv(const ScoreReport& report, const ModalitySchema& schema);

/// Human-readable one-row table (2 decimal places) in the usual layout:
/// accuracy, per-modality contribution, cooperation, perceptual columns.
std::string report_to_table(const ScoreReport& report, const ModalitySchema& schema);

/// Cross-checks internal identities (e.g. the Shapley scores must account
/// for exactly accuracy_full - v_empty). Throws ValidationError on breakage.
void check_report_consistency(const ScoreReport& report);

}  // namespace mmscore
