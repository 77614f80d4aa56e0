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

#include <map>
#include <string>
#include <vector>

#include "mmscore/core.hpp"
#include "mmscore/masking.hpp"

namespace mmscore {

/// Black-box classifier. Implementations must be pure with respect to
/// (dataset content, coalition): identical inputs yield identical
/// predictions. Labels carried by the input dataset must not be read.
/// predict() may be called from several threads unless serial() is true.
class Evaluator {
 public:
  virtual ~Evaluator() = default;

  /// Per-sample class predictions in dataset order. `coalition` names the
  /// modalities that are present in `inputs` (absent ones arrive
  /// baseline-filled); permutation-based callers pass the full coalition.
  virtual std::vector<int> predict(const Dataset& inputs, const CoalitionMask& coalition) const = 0;

  /// True when the evaluator allows only one in-flight request.
  virtual bool serial() const { return false; }

  virtual std::string name() const = 0;
};

/// Fraction of positions where prediction equals label. Inputs must be
/// non-empty and of equal length.
double accuracy(const std::vector<int>& predictions, const std::vector<int>& labels);

struct MajorityVote {
  int label = 0;
  double share = 0.0;
};

/// Most frequent class and its empirical share. Ties break to the lowest
/// class index so results are stable across runs and platforms.
MajorityVote majority_classifier(const std::vector<int>& labels);

/// Utility of every coalition of the schema, keyed by canonical coalition
/// key. Utility is evaluator accuracy under the coalition's input mask; the
/// empty coalition's utility is the majority-class share.
struct UtilityTable {
  std::map<std::string, double> values;
  std::size_t n = 0;
  double z_f = 0.0;  // utility of the full coalition
  bool complete = false;

  double at(const std::string& key) const;
};

struct UtilityBuildOptions {
  BaselinePolicy policy;
  /// Enumeration guard: 2^n coalitions are evaluated, so n is capped.
  std::size_t max_modalities = 16;
  /// Parallel coalition evaluations (ignored for serial evaluators).
  int workers = 1;
};

struct UtilityBuild {
  UtilityTable table;
  PredictionTable predictions;
  MajorityVote majority;
};

/// Evaluates every non-empty coalition (exactly 2^n - 1 evaluator calls) and
/// fills the empty coalition from the majority classifier without touching
/// the evaluator. Deterministic: same dataset, evaluator, and policy yield a
/// bit-identical table regardless of worker count.
UtilityBuild build_utility_table(const Dataset& dataset, const Evaluator& evaluator,
                                 const UtilityBuildOptions& options = {});

}  // namespace mmscore
