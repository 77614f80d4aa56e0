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

#include "mmscore/utility.hpp"

#include <atomic>
#include <map>
#include <thread>

namespace mmscore {

double accuracy(const std::vector<int>& predictions, const std::vector<int>& labels) {
  if (predictions.size() != labels.size()) {
    throw ContractError("accuracy: " + std::to_string(predictions.size()) + " predictions vs " +
                        std::to_string(labels.size()) + " labels");
  }
  if (labels.empty()) {
    throw ContractError("accuracy: empty input");
  }
  std::size_t hits = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (predictions[i] == labels[i]) {
      ++hits;
    }
  }
  return static_cast<double>(hits) / static_cast<double>(labels.size());
}

MajorityVote majority_classifier(const std::vector<int>& labels) {
  if (labels.empty()) {
    throw ContractError("majority_classifier: empty input");
  }
  std::map<int, std::size_t> counts;
  for (int label : labels) {
    ++counts[label];
  }
  MajorityVote best{counts.begin()->first, 0.0};
  std::size_t best_count = 0;
  for (const auto& [label, count] : counts) {  // ascending label order -> lowest index wins ties
    if (count > best_count) {
      best_count = count;
      best.label = label;
    }
  }
  best.share = static_cast<double>(best_count) / static_cast<double>(labels.size());
  return best;
}

double UtilityTable::at(const std::string& key) const {
  const auto it = values.find(key);
  if (it == values.end()) {
    throw ContractError("utility table has no entry for coalition '" + key + "'");
  }
  return it->second;
}

UtilityBuild build_utility_table(const Dataset& dataset, const Evaluator& evaluator,
                                 const UtilityBuildOptions& options) {
  const std::size_t n = dataset.schema.size();
  if (n > options.max_modalities || n >= 63) {
    throw ContractError("build_utility_table: " + std::to_string(n) +
                        " modalities exceeds the exhaustive cap of " +
                        std::to_string(options.max_modalities) +
                        " (use Monte Carlo Shapley estimation instead)");
  }
  const std::vector<int> labels = dataset.labels();
  const std::uint64_t num_coalitions = std::uint64_t{1} << n;

  UtilityBuild build;
  build.predictions.dataset_id = dataset.id;
  build.majority = majority_classifier(labels);

  // Empty coalition: majority classifier, evaluator not consulted.
  build.table.values[kEmptyCoalitionKey] = build.majority.share;
  build.predictions.entries[kEmptyCoalitionKey] =
      std::vector<int>(labels.size(), build.majority.label);

  struct Cell {
    std::string key;
    std::vector<int> predictions;
    double utility = 0.0;
  };
  std::vector<Cell> cells(num_coalitions - 1);

  auto evaluate_one = [&](std::uint64_t bits) {
    const CoalitionMask mask = mask_from_bits(bits, dataset.schema);
    Cell& cell = cells[bits - 1];
    cell.key = coalition_key(mask, dataset.schema);
    const Dataset masked = apply_mask(dataset, mask, options.policy);
    std::vector<int> preds;
    try {
      preds = evaluator.predict(masked, mask);
    } catch (const Error&) {
      throw;
    } catch (const std::exception& e) {
      throw EvalError("evaluator failed on coalition '" + cell.key + "': " + e.what());
    }
    if (preds.size() != labels.size()) {
      throw EvalError("evaluator returned " + std::to_string(preds.size()) +
                      " predictions for coalition '" + cell.key + "', expected " +
                      std::to_string(labels.size()));
    }
    for (int p : preds) {
      if (p < 0 || p >= dataset.schema.num_classes()) {
        throw EvalError("evaluator returned out-of-range class " + std::to_string(p) +
                        " for coalition '" + cell.key + "'");
      }
    }
    cell.utility = accuracy(preds, labels);
    cell.predictions = std::move(preds);
  };

  const int workers =
      evaluator.serial() ? 1 : std::max(1, std::min<int>(options.workers, cells.size()));
  if (workers <= 1) {
    for (std::uint64_t bits = 1; bits < num_coalitions; ++bits) {
      evaluate_one(bits);
    }
  } else {
    std::atomic<std::uint64_t> next{1};
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> failures(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (std::uint64_t bits = next.fetch_add(1); bits < num_coalitions;
             bits = next.fetch_add(1)) {
          try {
            evaluate_one(bits);
          } catch (...) {
            failures[static_cast<std::size_t>(w)] = std::current_exception();
            return;
          }
        }
      });
    }
    for (std::thread& t : pool) {
      t.join();
    }
    for (const std::exception_ptr& f : failures) {
      if (f) {
        std::rethrow_exception(f);
      }
    }
  }

  // Deterministic reduction, independent of evaluation order.
  for (Cell& cell : cells) {
    build.table.values[cell.key] = cell.utility;
    build.predictions.entries[cell.key] = std::move(cell.predictions);
  }
  build.table.n = n;
  build.table.z_f =
      build.table.values.at(coalition_key(CoalitionMask::full(dataset.schema), dataset.schema));
  build.table.complete = true;
  return build;
}

}  // namespace mmscore
