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

#include <set>
#include <string>
#include <vector>

#include "mmscore/core.hpp"
#include "mmscore/masking.hpp"
#include "mmscore/utility.hpp"

namespace mmscore {

/// Normalized accuracy drop under repeated permutation of a modality set,
/// reported as mean ± population std over the repeats, in percentage points.
struct PerceptualResult {
  std::set<std::string> targets;
  PermutationMode mode = PermutationMode::kUniform;
  double mean = 0.0;
  double stddev = 0.0;
  int repeats = 0;
  long self_donation_warnings = 0;
};

/// For each repeat r: permute the plan's target modalities (mode per plan),
/// run the evaluator on the permuted dataset with the FULL coalition (no
/// baseline filling – permutation replaces inputs, it does not remove them),
/// and score 100 · (Z_f − V_r) / Z_f. Requires Z_f > 0 and a target set that
/// is a proper non-empty subset of the schema.
PerceptualResult perceptual_score(const Dataset& dataset, const Evaluator& evaluator,
                                  const PermutationPlan& plan, double z_f);

/// One suite cell; failures are contained per cell so one degenerate
/// combination (e.g. out-class on a single-class dataset) does not abort the
/// rest of the grid.
struct PerceptualCellOutcome {
  std::string modality;
  PermutationMode mode = PermutationMode::kUniform;
  PerceptualResult result;
  bool failed = false;
  std::string error;
};

/// Runs uniform, in-class, and out-class permutation for every single
/// modality of the schema. Deterministic given the plan seed.
std::vector<PerceptualCellOutcome> perceptual_suite(const Dataset& dataset,
                                                    const Evaluator& evaluator, int repeats,
                                                    std::uint64_t seed, double z_f);

}  // namespace mmscore
