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

#include "mmscore/masking.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "mmscore/rng.hpp"

namespace mmscore {

const char* permutation_mode_name(PermutationMode mode) {
  switch (mode) {
    case PermutationMode::kUniform:
      return "uniform";
    case PermutationMode::kInClass:
      return "in";
    case PermutationMode::kOutClass:
      return "out";
  }
  return "?";
}

PermutationMode permutation_mode_from_name(const std::string& name) {
  if (name == "uniform") return PermutationMode::kUniform;
  if (name == "in") return PermutationMode::kInClass;
  if (name == "out") return PermutationMode::kOutClass;
  throw ContractError("unknown permutation mode '" + name + "'");
}

Dataset apply_mask(const Dataset& dataset, const CoalitionMask& mask,
                   const BaselinePolicy& policy) {
  if (mask.empty()) {
    throw ContractError(
        "apply_mask: empty coalition must be routed to the majority classifier, "
        "not masked");
  }
  if (!std::isfinite(policy.fill_value)) {
    throw ContractError("apply_mask: fill_value must be finite");
  }
  for (const std::string& id : mask.present()) {
    if (!dataset.schema.has(id)) {
      throw ValidationError("apply_mask: modality '" + id + "' not in schema");
    }
  }
  Dataset out = dataset;
  for (const Modality& m : dataset.schema.modalities()) {
    if (mask.contains(m.id)) {
      continue;
    }
    for (Sample& s : out.samples) {
      std::fill(s.features[m.id].begin(), s.features[m.id].end(), policy.fill_value);
    }
  }
  return out;
}

namespace {

// Donor index for one receiving sample. `pool` must be non-empty; `self` is
// excluded by rejection when the pool contains other candidates.
std::size_t draw_donor(Rng& rng, const std::vector<std::size_t>& pool, std::size_t self,
                       bool* fell_back_to_self) {
  *fell_back_to_self = false;
  if (pool.size() == 1 && pool[0] == self) {
    *fell_back_to_self = true;
    return self;
  }
  std::size_t donor;
  do {
    donor = pool[rng.bounded(pool.size())];
  } while (donor == self);
  return donor;
}

}  // namespace

PermutationOutcome permute_modalities(const Dataset& dataset, const PermutationPlan& plan,
                                      int repeat_index) {
  if (plan.targets.empty()) {
    throw ContractError("permute_modalities: target modality set must be non-empty");
  }
  if (plan.repeats < 1) {
    throw ContractError("permute_modalities: repeats must be >= 1");
  }
  if (repeat_index < 0 || repeat_index >= plan.repeats) {
    throw ContractError("permute_modalities: repeat_index " + std::to_string(repeat_index) +
                        " outside [0, " + std::to_string(plan.repeats) + ")");
  }
  for (const std::string& id : plan.targets) {
    if (!dataset.schema.has(id)) {
      throw ValidationError("permute_modalities: modality '" + id + "' not in schema");
    }
  }
  const std::size_t n = dataset.samples.size();
  if (n < 2 && plan.mode == PermutationMode::kUniform) {
    throw ContractError("permute_modalities: uniform mode needs at least 2 samples");
  }
  if (plan.mode == PermutationMode::kOutClass && dataset.classes_present().size() < 2) {
    throw ContractError(
        "permute_modalities: out-class mode has no valid donors on a single-class dataset");
  }

  std::vector<std::size_t> all(n);
  for (std::size_t i = 0; i < n; ++i) {
    all[i] = i;
  }
  std::unordered_map<int, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < n; ++i) {
    by_class[dataset.samples[i].label].push_back(i);
  }
  std::unordered_map<int, std::vector<std::size_t>> other_classes;
  if (plan.mode == PermutationMode::kOutClass) {
    for (const auto& [label, members] : by_class) {
      (void)members;
      std::vector<std::size_t> pool;
      for (std::size_t i = 0; i < n; ++i) {
        if (dataset.samples[i].label != label) {
          pool.push_back(i);
        }
      }
      other_classes.emplace(label, std::move(pool));
    }
  }

  PermutationOutcome outcome;
  outcome.dataset = dataset;
  // Target modalities in schema order, one stream each; donors always come
  // from the unmodified input.
  for (const Modality& m : dataset.schema.modalities()) {
    if (plan.targets.count(m.id) == 0) {
      continue;
    }
    Rng rng(stream_seed(plan.seed, static_cast<std::uint64_t>(repeat_index), m.id));
    for (std::size_t i = 0; i < n; ++i) {
      const int label = dataset.samples[i].label;
      bool self_fallback = false;
      std::size_t donor = i;
      switch (plan.mode) {
        case PermutationMode::kUniform:
          donor = draw_donor(rng, all, i, &self_fallback);
          break;
        case PermutationMode::kInClass:
          donor = draw_donor(rng, by_class.at(label), i, &self_fallback);
          break;
        case PermutationMode::kOutClass: {
          const std::vector<std::size_t>& pool = other_classes.at(label);
          donor = pool[rng.bounded(pool.size())];
          break;
        }
      }
      if (self_fallback) {
        ++outcome.self_donations;
      }
      outcome.dataset.samples[i].features[m.id] = dataset.samples[donor].features.at(m.id);
    }
  }
  return outcome;
}

}  // namespace mmscore
