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

#include "mmscore/shapley.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <memory>
#include <numeric>

#include "mmscore/rng.hpp"

namespace mmscore {

Game::Game(std::vector<std::string> players, std::function<double(std::uint64_t)> v)
    : players_(std::move(players)), v_(std::move(v)) {
  if (players_.empty()) {
    throw ContractError("game: at least one player required");
  }
  if (players_.size() >= 63) {
    throw ContractError("game: player count exceeds bitmask capacity");
  }
  std::set<std::string> seen;
  for (const std::string& p : players_) {
    if (p.empty() || !seen.insert(p).second) {
      throw ContractError("game: player ids must be unique and non-empty");
    }
  }
}

Game Game::from_table(const UtilityTable& table, const ModalitySchema& schema) {
  if (!table.complete) {
    throw ContractError("game: utility table is not complete");
  }
  if (table.n != schema.size()) {
    throw ContractError("game: utility table covers " + std::to_string(table.n) +
                        " modalities, schema has " + std::to_string(schema.size()));
  }
  const std::uint64_t count = std::uint64_t{1} << schema.size();
  auto values = std::make_shared<std::vector<double>>();
  values->reserve(count);
  for (std::uint64_t bits = 0; bits < count; ++bits) {
    values->push_back(table.at(coalition_key(mask_from_bits(bits, schema), schema)));
  }
  return Game(schema.ids(), [values](std::uint64_t bits) { return values->at(bits); });
}

Game Game::from_values(std::vector<std::string> players, std::vector<double> values) {
  const std::uint64_t expected = std::uint64_t{1} << players.size();
  if (values.size() != expected) {
    throw ContractError("game: expected " + std::to_string(expected) + " subset values, got " +
                        std::to_string(values.size()));
  }
  auto shared = std::make_shared<std::vector<double>>(std::move(values));
  return Game(std::move(players), [shared](std::uint64_t bits) { return shared->at(bits); });
}

int Game::index_of(const std::string& id) const {
  for (std::size_t i = 0; i < players_.size(); ++i) {
    if (players_[i] == id) {
      return static_cast<int>(i);
    }
  }
  return -1;
}

std::uint64_t Game::full_mask() const {
  return (std::uint64_t{1} << players_.size()) - 1;
}

double Game::value_of(const std::set<std::string>& ids) const {
  std::uint64_t bits = 0;
  for (const std::string& id : ids) {
    const int idx = index_of(id);
    if (idx < 0) {
      throw ContractError("game: unknown player '" + id + "'");
    }
    bits |= std::uint64_t{1} << idx;
  }
  return value(bits);
}

namespace {

int require_player(const Game& game, const std::string& id) {
  const int idx = game.index_of(id);
  if (idx < 0) {
    throw ContractError("game: unknown player '" + id + "'");
  }
  return idx;
}

void require_player_index(const Game& game, int player) {
  if (player < 0 || static_cast<std::size_t>(player) >= game.num_players()) {
    throw ContractError("game: player index " + std::to_string(player) + " out of range");
  }
}

}  // namespace

double marginal_contribution(const Game& game, int player, std::uint64_t coalition_bits) {
  require_player_index(game, player);
  const std::uint64_t bit = std::uint64_t{1} << player;
  if (coalition_bits & bit) {
    throw ContractError("marginal_contribution: player already in coalition");
  }
  return game.value(coalition_bits | bit) - game.value(coalition_bits);
}

double marginal_contribution(const Game& game, const std::string& player,
                             const std::set<std::string>& coalition) {
  const int idx = require_player(game, player);
  std::uint64_t bits = 0;
  for (const std::string& id : coalition) {
    bits |= std::uint64_t{1} << require_player(game, id);
  }
  return marginal_contribution(game, idx, bits);
}

namespace {

// C(n, k) in 128-bit arithmetic; exact for every n reachable through the
// player caps.
unsigned __int128 binomial(std::size_t n, std::size_t k) {
  if (k > n) {
    return 0;
  }
  k = std::min(k, n - k);
  unsigned __int128 result = 1;
  for (std::size_t i = 1; i <= k; ++i) {
    result = result * (n - k + i) / i;
  }
  return result;
}

}  // namespace

Rational shapley_weight_rational(std::size_t subset_size, std::size_t n_players) {
  if (n_players == 0 || subset_size >= n_players) {
    throw ContractError("shapley_weight: need 0 <= subset_size < n_players");
  }
  // s!(n-s-1)!/n! = 1 / (n * C(n-1, s)), already in lowest terms for the
  // numerator 1.
  const unsigned __int128 den =
      static_cast<unsigned __int128>(n_players) * binomial(n_players - 1, subset_size);
  if (den > UINT64_MAX) {
    throw ContractError("shapley_weight: denominator exceeds 64 bits");
  }
  return Rational{1, static_cast<std::uint64_t>(den)};
}

double shapley_weight(std::size_t subset_size, std::size_t n_players) {
  return shapley_weight_rational(subset_size, n_players).to_double();
}

double shapley_exact(const Game& game, int player, const WeightFn& weight) {
  require_player_index(game, player);
  const std::size_t n = game.num_players();
  if (n > kExactPlayerCap) {
    throw ContractError("shapley_exact: " + std::to_string(n) + " players exceeds cap of " +
                        std::to_string(kExactPlayerCap) +
                        " (use shapley_montecarlo for larger games)");
  }
  std::vector<double> weight_by_size(n);
  for (std::size_t s = 0; s < n; ++s) {
    weight_by_size[s] = weight(s, n);
  }
  const std::uint64_t bit = std::uint64_t{1} << player;
  const std::uint64_t others = game.full_mask() & ~bit;
  double phi = 0.0;
  // Visits every subset of `others`, empty set included.
  std::uint64_t sub = others;
  while (true) {
    const int size = std::popcount(sub);
    phi += weight_by_size[static_cast<std::size_t>(size)] *
           (game.value(sub | bit) - game.value(sub));
    if (sub == 0) {
      break;
    }
    sub = (sub - 1) & others;
  }
  return phi;
}

double shapley_exact(const Game& game, int player) {
  return shapley_exact(game, player,
                       [](std::size_t s, std::size_t n) { return shapley_weight(s, n); });
}

double shapley_exact(const Game& game, const std::string& player) {
  return shapley_exact(game, require_player(game, player));
}

double shapley_oracle(const Game& game, int player) {
  require_player_index(game, player);
  const std::size_t n = game.num_players();
  if (n > kOraclePlayerCap) {
    throw ContractError("shapley_oracle: n! enumeration capped at " +
                        std::to_string(kOraclePlayerCap) + " players");
  }
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  long double sum = 0.0L;
  std::size_t count = 0;
  do {
    std::uint64_t predecessors = 0;
    for (int p : order) {
      if (p == player) {
        break;
      }
      predecessors |= std::uint64_t{1} << p;
    }
    const std::uint64_t bit = std::uint64_t{1} << player;
    sum += game.value(predecessors | bit) - game.value(predecessors);
    ++count;
  } while (std::next_permutation(order.begin(), order.end()));
  return static_cast<double>(sum / static_cast<long double>(count));
}

double shapley_oracle(const Game& game, const std::string& player) {
  return shapley_oracle(game, require_player(game, player));
}

MonteCarloEstimate shapley_montecarlo(const Game& game, int player, int draws,
                                      std::uint64_t seed) {
  require_player_index(game, player);
  if (draws < 2) {
    throw ContractError("shapley_montecarlo: need at least 2 draws");
  }
  const std::size_t n = game.num_players();
  const std::uint64_t bit = std::uint64_t{1} << player;
  std::vector<int> order(n);
  double mean = 0.0;
  double m2 = 0.0;
  for (int d = 0; d < draws; ++d) {
    Rng rng(stream_seed(seed, static_cast<std::uint64_t>(d), "shapley-mc"));
    std::iota(order.begin(), order.end(), 0);
    // Fisher-Yates with the project RNG; std::shuffle is not reproducible
    // across standard libraries.
    for (std::size_t i = n - 1; i > 0; --i) {
      const std::size_t j = rng.bounded(i + 1);
      std::swap(order[i], order[j]);
    }
    std::uint64_t predecessors = 0;
    for (int p : order) {
      if (p == player) {
        break;
      }
      predecessors |= std::uint64_t{1} << p;
    }
    const double contribution = game.value(predecessors | bit) - game.value(predecessors);
    const double delta = contribution - mean;
    mean += delta / static_cast<double>(d + 1);
    m2 += delta * (contribution - mean);
  }
  const double variance = m2 / static_cast<double>(draws - 1);
  return MonteCarloEstimate{mean, std::sqrt(std::max(variance, 0.0) / draws), draws};
}

double ShapleyResult::phi_sum() const {
  double sum = 0.0;
  for (const auto& [id, value] : phi) {
    (void)id;
    sum += value;
  }
  return sum;
}

ShapleyResult shapley_all(const Game& game) {
  ShapleyResult result;
  result.v_empty = game.value(0);
  result.v_full = game.value(game.full_mask());
  for (std::size_t i = 0; i < game.num_players(); ++i) {
    result.phi[game.players()[i]] = shapley_exact(game, static_cast<int>(i));
  }
  return result;
}

double contribution_phi(const UtilityTable& table, const ModalitySchema& schema,
                        const std::string& modality) {
  if (schema.index_of(modality) < 0) {
    throw ContractError("contribution_score: unknown modality '" + modality + "'");
  }
  const Game game = Game::from_table(table, schema);
  return shapley_exact(game, modality);
}

double contribution_score(const UtilityTable& table, const ModalitySchema& schema,
                      const std::string& modality) {
  if (table.z_f <= 0.0) {
    throw ContractError("contribution_score: full-coalition utility Z_f must be positive");
  }
  return 100.0 * contribution_phi(table, schema, modality) / table.z_f;
}

Game reduce_coalition_game(const Game& game, const std::set<std::string>& group) {
  if (group.empty()) {
    throw ContractError("reduce_coalition_game: group must be non-empty");
  }
  std::uint64_t group_bits = 0;
  for (const std::string& id : group) {
    group_bits |= std::uint64_t{1} << require_player(game, id);
  }

  std::vector<std::string> players;
  std::vector<int> remaining_index;  // reduced position -> original index
  std::string token;
  for (std::size_t i = 0; i < game.num_players(); ++i) {
    const std::string& id = game.players()[i];
    if (group.count(id) > 0) {
      if (!token.empty()) {
        token += '+';
      }
      token += id;
    } else {
      remaining_index.push_back(static_cast<int>(i));
      players.push_back(id);
    }
  }
  players.push_back(token);
  const std::uint64_t token_bit = std::uint64_t{1} << remaining_index.size();

  auto lift = [remaining_index, group_bits, token_bit](std::uint64_t reduced_bits) {
    std::uint64_t bits = 0;
    for (std::size_t i = 0; i < remaining_index.size(); ++i) {
      if (reduced_bits & (std::uint64_t{1} << i)) {
        bits |= std::uint64_t{1} << remaining_index[i];
      }
    }
    if (reduced_bits & token_bit) {
      bits |= group_bits;
    }
    return bits;
  };
  return Game(std::move(players),
              [game, lift](std::uint64_t bits) { return game.value(lift(bits)); });
}

Game restrict_game(const Game& game, const std::vector<std::string>& keep) {
  if (keep.empty()) {
    throw ContractError("restrict_game: player subset must be non-empty");
  }
  std::vector<int> kept_index;
  kept_index.reserve(keep.size());
  for (const std::string& id : keep) {
    kept_index.push_back(require_player(game, id));
  }
  auto lift = [kept_index](std::uint64_t restricted_bits) {
    std::uint64_t bits = 0;
    for (std::size_t i = 0; i < kept_index.size(); ++i) {
      if (restricted_bits & (std::uint64_t{1} << i)) {
        bits |= std::uint64_t{1} << kept_index[i];
      }
    }
    return bits;
  };
  return Game(keep, [game, lift](std::uint64_t bits) { return game.value(lift(bits)); });
}

double cooperation_score(const UtilityTable& table, const ModalitySchema& schema,
                         const std::set<std::string>& group, bool normalize) {
  if (group.size() < 2) {
    throw ContractError("cooperation_score: group must contain at least 2 modalities");
  }
  const Game game = Game::from_table(table, schema);
  for (const std::string& id : group) {
    require_player(game, id);
  }

  const Game reduced = reduce_coalition_game(game, group);
  const std::string token = reduced.players().back();
  double score = shapley_exact(reduced, token);

  // Each member's own Shapley value lives in the game where the other group
  // members are absent; those coalitions are already in the table, so no new
  // evaluations are needed.
  std::vector<std::string> outside;
  for (const std::string& id : game.players()) {
    if (group.count(id) == 0) {
      outside.push_back(id);
    }
  }
  for (const std::string& member : game.players()) {
    if (group.count(member) == 0) {
      continue;
    }
    std::vector<std::string> keep = outside;
    keep.push_back(member);
    score -= shapley_exact(restrict_game(game, keep), member);
  }

  if (normalize) {
    if (table.z_f <= 0.0) {
      throw ContractError("cooperation_score: Z_f must be positive for normalization");
    }
    score /= table.z_f;
  }
  return 100.0 * score;
}

namespace {

void record_gap(AxiomCheck& check, double gap) {
  ++check.cases;
  check.max_gap = std::max(check.max_gap, gap);
  if (gap > kAxiomTolerance) {
    check.ok = false;
  }
}

}  // namespace

AxiomReport check_axioms(const Game& game, const ShapleyResult& result) {
  AxiomReport report;
  const std::size_t n = game.num_players();
  const std::uint64_t full = game.full_mask();

  // Efficiency: Σ φ_i = V(N) − V(∅).
  record_gap(report.efficiency,
             std::fabs(result.phi_sum() - (game.value(full) - game.value(0))));

  // Symmetry: players whose utilities agree on every coalition must earn the
  // same reward. Detection uses exact equality; symmetric constructions
  // produce bit-identical utilities.
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const std::uint64_t bi = std::uint64_t{1} << i;
      const std::uint64_t bj = std::uint64_t{1} << j;
      const std::uint64_t rest = full & ~(bi | bj);
      bool symmetric = true;
      std::uint64_t sub = rest;
      while (true) {
        if (game.value(sub | bi) != game.value(sub | bj)) {
          symmetric = false;
          break;
        }
        if (sub == 0) {
          break;
        }
        sub = (sub - 1) & rest;
      }
      if (symmetric) {
        record_gap(report.symmetry, std::fabs(result.phi.at(game.players()[i]) -
                                              result.phi.at(game.players()[j])));
      }
    }
  }

  // Dummy: a player adding exactly V({i}) to every coalition earns V({i}).
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint64_t bi = std::uint64_t{1} << i;
    const std::uint64_t rest = full & ~bi;
    const double solo = game.value(bi);
    bool dummy = true;
    std::uint64_t sub = rest;
    while (true) {
      if (game.value(sub | bi) != game.value(sub) + solo) {
        dummy = false;
        break;
      }
      if (sub == 0) {
        break;
      }
      sub = (sub - 1) & rest;
    }
    if (dummy) {
      record_gap(report.dummy, std::fabs(result.phi.at(game.players()[i]) - solo));
    }
  }

  // Additivity, on the doubled game: φ_{V+V} must equal 2 φ_V.
  const Game doubled(game.players(),
                     [game](std::uint64_t bits) { return game.value(bits) + game.value(bits); });
  if (n <= kExactPlayerCap) {
    for (std::size_t i = 0; i < n; ++i) {
      const double phi_doubled = shapley_exact(doubled, static_cast<int>(i));
      record_gap(report.additivity,
                 std::fabs(phi_doubled - 2.0 * result.phi.at(game.players()[i])));
    }
  }
  return report;
}

}  // namespace mmscore
