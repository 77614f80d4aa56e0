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

#include <algorithm>
#include <atomic>
#include <numeric>
#include <string>
#include <vector>

#include "mmscore/core.hpp"
#include "mmscore/rng.hpp"
#include "mmscore/utility.hpp"

namespace mmscore::testing {

inline ModalitySchema make_schema(const std::vector<std::pair<std::string, int>>& mods,
                                  int num_classes = 2) {
  std::vector<Modality> out;
  for (const auto& [id, dim] : mods) {
    out.push_back(Modality{id, dim});
  }
  return ModalitySchema(std::move(out), num_classes);
}

/// Dataset whose feature values identify the originating sample: component c
/// of modality m in sample i is  1000*i + 10*m + c. Lets permutation tests
/// recover donor identities from feature blocks alone.
inline Dataset make_traceable_dataset(const ModalitySchema& schema,
                                      const std::vector<int>& labels) {
  Dataset dataset;
  dataset.schema = schema;
  dataset.id = "traceable";
  for (std::size_t i = 0; i < labels.size(); ++i) {
    Sample s;
    s.label = labels[i];
    int m = 0;
    for (const Modality& mod : schema.modalities()) {
      std::vector<double> block(static_cast<std::size_t>(mod.dim));
      for (int c = 0; c < mod.dim; ++c) {
        block[static_cast<std::size_t>(c)] = 1000.0 * static_cast<double>(i) + 10.0 * m + c;
      }
      s.features[mod.id] = std::move(block);
      ++m;
    }
    dataset.samples.push_back(std::move(s));
  }
  return dataset;
}

/// Donor index encoded in a traceable feature block, or -1 if the block was
/// not produced by make_traceable_dataset.
inline int traceable_donor(const std::vector<double>& block) {
  if (block.empty()) {
    return -1;
  }
  return static_cast<int>(block[0] / 1000.0 + 0.5);
}

inline UtilityTable make_table(const ModalitySchema& schema, const std::vector<double>& values) {
  UtilityTable table;
  table.n = schema.size();
  for (std::uint64_t bits = 0; bits < values.size(); ++bits) {
    table.values[coalition_key(mask_from_bits(bits, schema), schema)] = values[bits];
  }
  table.z_f = values.back();
  table.complete = true;
  return table;
}

/// Random utilities k/1024: exactly representable, so algebraic identities
/// are limited only by the arithmetic under test.
inline std::vector<double> random_dyadic_values(std::size_t n, Rng& rng,
                                                bool positive_full = false) {
  std::vector<double> values(std::size_t{1} << n);
  for (double& v : values) {
    v = static_cast<double>(rng.bounded(1025)) / 1024.0;
  }
  if (positive_full && values.back() <= 0.0) {
    values.back() = 1.0;
  }
  return values;
}

class ConstantEvaluator final : public Evaluator {
 public:
  explicit ConstantEvaluator(int label) : label_(label) {}
  std::vector<int> predict(const Dataset& inputs, const CoalitionMask&) const override {
    return std::vector<int>(inputs.samples.size(), label_);
  }
  std::string name() const override { return "constant"; }

 private:
  int label_;
};

/// Counts predict() calls; predictions are correct labels (reads them only
/// because tests need a perfectly accurate stand-in).
class CountingEvaluator final : public Evaluator {
 public:
  std::vector<int> predict(const Dataset& inputs, const CoalitionMask&) const override {
    ++calls_;
    return inputs.labels();
  }
  std::string name() const override { return "counting"; }
  int calls() const { return calls_; }

 private:
  mutable std::atomic<int> calls_{0};
};

}  // namespace mmscore::testing
