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
#include <random>
#include <string_view>

namespace mmscore {

/// FNV-1a over an arbitrary byte string. Used for derived seeds and config
/// hashes; stable across platforms, unlike std::hash.
std::uint64_t fnv1a(std::string_view bytes);

/// Seed for an independent random stream identified by (seed, index, tag).
/// Streams for distinct tuples are unrelated, so repeats of a randomized
/// procedure can run in any order (or in parallel) without changing results.
std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t index, std::string_view tag);

/// Deterministic random source. Wraps std::mt19937_64 (whose output sequence
/// is pinned by the standard) and draws bounded integers and reals with
/// explicit algorithms instead of std distributions, which are
/// implementation-defined and would break cross-platform reproducibility.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform integer in [0, n). Unbiased via rejection sampling. n must be > 0.
  std::uint64_t bounded(std::uint64_t n);

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform01();

  /// Standard normal via Box-Muller; the second value of each pair is cached.
  double gaussian();

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace mmscore
