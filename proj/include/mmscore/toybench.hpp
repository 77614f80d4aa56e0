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
#include <memory>
#include <string>
#include <vector>

#include "mmscore/core.hpp"
#include "mmscore/utility.hpp"

namespace mmscore {

/// Synthetic two-modality regimes that reproduce, at desk scale, the three
/// qualitative situations multi-modal benchmarks differ in:
///   - kDominantRedundant: modality "t" is class-separable, modality "v" is
///     label-independent noise. One modality suffices.
///   - kCorrelatedComplementary: modality "t" is class-separable, modality
///     "a" is a fixed linear transform of it plus noise. Both informative,
///     highly correlated.
///   - kIndispensableXor: the binary label is the XOR of two latent bits,
///     one encoded per modality ("a", "b"). Either modality alone carries no
///     label information; only their combination does.
enum class Regime {
  kDominantRedundant,
  kCorrelatedComplementary,
  kIndispensableXor,
};

const char* regime_name(Regime regime);
Regime regime_from_name(const std::string& name);

struct RegimeSpec {
  Regime regime = Regime::kDominantRedundant;
  int n_samples = 2000;
  int n_classes = 2;
  /// Feature dimensions of the two modalities; empty selects the regime
  /// default.
  std::vector<int> dims;
  /// Class probabilities; empty selects the uniform balance. Class counts
  /// are realized exactly (largest-remainder rounding), not sampled.
  std::vector<double> class_balance;
  /// Std of the additive Gaussian perturbation on signal-carrying blocks.
  double noise = 0.25;
  std::uint64_t seed = 0;
  /// XOR regime only: probability mass by which the second modality's latent
  /// bit leans toward the label, leaking unimodal signal into an otherwise
  /// symmetric task. 0 keeps both modalities individually uninformative.
  double xor_bias = 0.0;
  /// Dataset id; empty derives one from the parameters.
  std::string dataset_id;
};

/// Deterministic: the same spec yields a byte-identical dataset file.
Dataset generate(const RegimeSpec& spec);

enum class ToyModelKind {
  kMajority,         // constant prediction of the training majority class
  kNearestCentroid,  // per-class centroid over concatenated features
  kAdditiveLinear,   // one linear scorer per modality, scores summed
  kInteraction,      // linear scorer plus cross-modality feature products
};

const char* toy_model_name(ToyModelKind kind);
ToyModelKind toy_model_from_name(const std::string& name);

/// In-process deterministic classifier fitted at construction. Training uses
/// closed forms (majority, centroids) or fixed-epoch full-batch gradient
/// descent from zero init, so no randomness is involved anywhere.
class ToyEvaluator final : public Evaluator {
 public:
  ToyEvaluator(ToyModelKind kind, const Dataset& train);
  ~ToyEvaluator() override;

  std::vector<int> predict(const Dataset& inputs, const CoalitionMask& coalition) const override;
  std::string name() const override;

  ToyModelKind kind() const { return kind_; }

 private:
  struct Impl;
  ToyModelKind kind_;
  ModalitySchema schema_;
  std::unique_ptr<Impl> impl_;
};

/// Convenience wrapper: fit on `train`, predict on `eval` (which may be a
/// masked or permuted view sharing the schema).
std::vector<int> fit_predict(ToyModelKind kind, const Dataset& train, const Dataset& eval);

}  // namespace mmscore
