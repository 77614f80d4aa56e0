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
#include <iosfwd>

#include "mmscore/shapley.hpp"

namespace mmscore {

struct SelftestOptions {
  int games_per_n = 20;
  std::size_t max_players_axioms = 5;
  std::size_t max_players_oracle = 6;
  std::uint64_t seed = 2026;
  /// Replaces the subset weight used for the axiom suite's Shapley
  /// computation. Only negative tests want this: a corrupted weight breaks
  /// Efficiency and must be caught.
  WeightFn weight_override;
};

/// Runs the built-in verification battery (axioms on random games,
/// formula-vs-permutation-enumeration equivalence, closed-form reductions,
/// the fixed reference table) and prints one status line per check.
/// Returns the number of failed checks.
int run_selftest(std::ostream& out, const SelftestOptions& options = {});

}  // namespace mmscore
