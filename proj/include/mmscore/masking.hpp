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
#include <set>
#include <string>

#include "mmscore/core.hpp"

namespace mmscore {

/// How absent modalities are represented at the input level. The empty
/// coalition is never fed to a model: callers must route it to the majority
/// classifier instead (an all-baseline input would just probe training
/// artifacts of the model).
struct BaselinePolicy {
  double fill_value = 0.0;
};

enum class PermutationMode {
  kUniform,   // donor uniform over all other samples
  kInClass,   // donor uniform over other samples with the same label
  kOutClass,  // donor uniform over samples with a different label
};

const char* permutation_mode_name(PermutationMode mode);
PermutationMode permutation_mode_from_name(const std::string& name);

struct PermutationPlan {
  std::set<std::string> targets;
  PermutationMode mode = PermutationMode::kUniform;
  int repeats = 10;
  std::uint64_t seed = 0;
};

/// Replaces every feature component of modalities NOT in `mask` with the
/// policy fill value. Modalities in the mask, labels, schema, and sample
/// order are untouched. The mask must be a non-empty subset of the schema.
Dataset apply_mask(const Dataset& dataset, const CoalitionMask& mask,
                   const BaselinePolicy& policy = {});

struct PermutationOutcome {
  Dataset dataset;
  /// In-class draws that had no same-label donor and fell back to the sample
  /// itself. Self-donation carries no signal, so it is surfaced rather than
  /// hidden.
  long self_donations = 0;
};

/// Replaces each target modality's feature block, per sample, with the block
/// of a donor sample drawn according to the plan mode. Donors are drawn
/// independently per receiving sample (with replacement across receivers)
/// from the unmodified input. Each (seed, repeat_index, modality) tuple gets
/// its own random stream, so repeats are reproducible in isolation and in
/// parallel. repeat_index must be in [0, plan.repeats).
PermutationOutcome permute_modalities(const Dataset& dataset, const PermutationPlan& plan,
                                      int repeat_index);

}  // namespace mmscore
