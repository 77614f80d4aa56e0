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
#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "mmscore/core.hpp"
#include "mmscore/utility.hpp"

namespace mmscore {

/// Cooperative game: an ordered player list and a utility function defined on
/// every subset. Subsets are addressed as bitmasks in player-list order. The
/// utility may be a dense table or any callable (lazy games are fine for
/// Monte Carlo estimation; exhaustive routines query all 2^n subsets).
class Game {
 public:
  Game(std::vector<std::string> players, std::function<double(std::uint64_t)> v);

  /// Game over a complete utility table; players are the schema's modalities
  /// in canonical order.
  static Game from_table(const UtilityTable& table, const ModalitySchema& schema);

  /// Dense game; values[bits] is the utility of the subset `bits`.
  static Game from_values(std::vector<std::string> players, std::vector<double> values);

  std::size_t num_players() const { return players_.size(); }
  const std::vector<std::string>& players() const { return players_; }
  int index_of(const std::string& id) const;
  std::uint64_t full_mask() const;

  double value(std::uint64_t coalition_bits) const { return v_(coalition_bits); }
  double value_of(const std::set<std::string>& ids) const;

 private:
  std::vector<std::string> players_;
  std::function<double(std::uint64_t)> v_;
};

/// m_i(S; V) = V(S ∪ {i}) − V(S). The player must not already be in S.
double marginal_contribution(const Game& game, int player, std::uint64_t coalition_bits);
double marginal_contribution(const Game& game, const std::string& player,
                             const std::set<std::string>& coalition);

/// Exact reduced fraction of the subset weight |S|! (n−|S|−1)! / n!,
/// which simplifies to 1 / (n · C(n−1, s)).
struct Rational {
  std::uint64_t num = 0;
  std::uint64_t den = 1;

  double to_double() const { return static_cast<double>(num) / static_cast<double>(den); }
};

/// Weight of subsets of size s in an n-player game, 0 <= s <= n-1. Computed
/// in exact integer arithmetic; composing factorials in floating point loses
/// precision long before n reaches the enumeration cap.
Rational shapley_weight_rational(std::size_t subset_size, std::size_t n_players);
double shapley_weight(std::size_t subset_size, std::size_t n_players);

using WeightFn = std::function<double(std::size_t subset_size, std::size_t n_players)>;

inline constexpr std::size_t kExactPlayerCap = 16;
inline constexpr std::size_t kOraclePlayerCap = 8;

/// Shapley value by the subset-weight formula:
///   φ_i = Σ_{S ⊆ N∖{i}} w(|S|, n) · m_i(S; V).
/// Enumerates all 2^(n−1) subsets; players capped at kExactPlayerCap.
/// `weight` overrides the subset weight (verification hooks only).
double shapley_exact(const Game& game, int player);
double shapley_exact(const Game& game, const std::string& player);
double shapley_exact(const Game& game, int player, const WeightFn& weight);

/// Shapley value by full permutation enumeration: the average over all n!
/// player orderings of the player's marginal contribution to its
/// predecessors. Independent route used to cross-check shapley_exact;
/// players capped at kOraclePlayerCap.
double shapley_oracle(const Game& game, int player);
double shapley_oracle(const Game& game, const std::string& player);

struct MonteCarloEstimate {
  double estimate = 0.0;
  double std_error = 0.0;
  int draws = 0;
};

/// Unbiased Shapley estimate from uniformly sampled player orderings.
/// Deterministic given the seed; draws must be >= 2 so the standard error is
/// defined.
MonteCarloEstimate shapley_montecarlo(const Game& game, int player, int draws, std::uint64_t seed);

struct ShapleyResult {
  std::map<std::string, double> phi;
  double v_empty = 0.0;
  double v_full = 0.0;

  double phi_sum() const;
};

/// Exact Shapley value of every player.
ShapleyResult shapley_all(const Game& game);

/// Normalized marginal contribution of one modality, in percentage points:
///   100 · φ_modality(full game) / Z_f.
/// Requires a complete table with Z_f > 0.
double contribution_score(const UtilityTable& table, const ModalitySchema& schema,
                          const std::string& modality);

/// Raw (unnormalized) Shapley value of one modality on the table's game.
double contribution_phi(const UtilityTable& table, const ModalitySchema& schema,
                        const std::string& modality);

/// Game where the non-empty player subset `group` acts as one effective
/// player. The token player carries the canonical joined id and is appended
/// after the remaining players; v'(S) answers with all of `group` present
/// whenever the token is in S.
Game reduce_coalition_game(const Game& game, const std::set<std::string>& group);

/// Game restricted to a player subset; the utility is the original one with
/// all other players permanently absent.
Game restrict_game(const Game& game, const std::vector<std::string>& keep);

/// Cross-player synergy of the modality set `group` (|group| >= 2):
/// the Shapley value of `group` as a single effective player in the reduced
/// game, minus each member's Shapley value in the game restricted to
/// (players ∖ group) ∪ {member}. Reported in percentage points; with
/// `normalize` the value is divided by Z_f first (off by default: the raw
/// definition carries no normalization).
double cooperation_score(const UtilityTable& table, const ModalitySchema& schema,
                         const std::set<std::string>& group, bool normalize = false);

inline constexpr double kAxiomTolerance = 1e-12;

struct AxiomCheck {
  bool ok = true;
  double max_gap = 0.0;
  int cases = 0;
};

/// Outcome of verifying the four Shapley axioms against a computed result.
/// Symmetry and Dummy are checked on structurally detected symmetric pairs /
/// additive players (exact utility equality), Additivity on the doubled
/// game. Failures are reported, never thrown.
struct AxiomReport {
  AxiomCheck efficiency;
  AxiomCheck symmetry;
  AxiomCheck dummy;
  AxiomCheck additivity;

  bool all_ok() const {
    return efficiency.ok && symmetry.ok && dummy.ok && additivity.ok;
  }
};

AxiomReport check_axioms(const Game& game, const ShapleyResult& result);

}  // namespace mmscore
