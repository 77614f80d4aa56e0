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

#include "mmscore/selftest.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

#include "mmscore/rng.hpp"

namespace mmscore {

namespace {

std::string format_gap(double gap) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2e", gap);
  return buf;
}

std::vector<std::string> player_ids(std::size_t n) {
  std::vector<std::string> ids;
  for (std::size_t i = 0; i < n; ++i) {
    ids.push_back("m" + std::to_string(i + 1));
  }
  return ids;
}

// Random game with dyadic rational utilities (k/1024): exactly representable,
// so axiom identities are limited only by the Shapley arithmetic itself.
std::vector<double> random_dyadic_values(std::size_t n, Rng& rng) {
  std::vector<double> values(std::size_t{1} << n);
  for (double& v : values) {
    v = static_cast<double>(rng.bounded(1025)) / 1024.0;
  }
  return values;
}

UtilityTable table_from_values(const ModalitySchema& schema, const std::vector<double>& values) {
  UtilityTable table;
  table.n = schema.size();
  for (std::uint64_t bits = 0; bits < values.size(); ++bits) {
    table.values[coalition_key(mask_from_bits(bits, schema), schema)] = values[bits];
  }
  table.z_f = values.back();
  table.complete = true;
  return table;
}

ModalitySchema toy_schema(std::size_t n) {
  std::vector<Modality> mods;
  for (const std::string& id : player_ids(n)) {
    mods.push_back(Modality{id, 1});
  }
  return ModalitySchema(std::move(mods), 2);
}

struct CheckPrinter {
  std::ostream& out;
  int failures = 0;

  void report(const std::string& name, bool ok, const std::string& detail) {
    out << (ok ? "PASS  " : "FAIL  ") << name << "  (" << detail << ")\n";
    if (!ok) {
      ++failures;
    }
  }
};

}  // namespace

int run_selftest(std::ostream& out, const SelftestOptions& options) {
  CheckPrinter printer{out};
  const WeightFn weight = options.weight_override
                              ? options.weight_override
                              : WeightFn([](std::size_t s, std::size_t n) {
                                  return shapley_weight(s, n);
                                });

  // Axiom suite on random games plus constructed symmetric / dummy games.
  {
    bool ok = true;
    double worst = 0.0;
    int games = 0;
    for (std::size_t n = 2; n <= options.max_players_axioms; ++n) {
      for (int g = 0; g < options.games_per_n; ++g) {
        Rng rng(stream_seed(options.seed, n * 1000 + static_cast<std::uint64_t>(g), "axiom"));
        const Game game = Game::from_values(player_ids(n), random_dyadic_values(n, rng));
        ShapleyResult result;
        result.v_empty = game.value(0);
        result.v_full = game.value(game.full_mask());
        for (std::size_t i = 0; i < n; ++i) {
          result.phi[game.players()[i]] = shapley_exact(game, static_cast<int>(i), weight);
        }
        const AxiomReport report = check_axioms(game, result);
        worst = std::max({worst, report.efficiency.max_gap, report.additivity.max_gap});
        ok = ok && report.efficiency.ok && report.additivity.ok;
        ++games;
      }
      // Symmetric pair: utilities depend only on how many of {first, second}
      // are present, never on which.
      {
        Rng rng(stream_seed(options.seed, n, "axiom-symmetric"));
        std::vector<double> base = random_dyadic_values(n, rng);
        std::vector<double> values(std::size_t{1} << n);
        for (std::uint64_t bits = 0; bits < values.size(); ++bits) {
          const std::uint64_t rest = bits & ~std::uint64_t{3};
          const int pair_count = static_cast<int>((bits & 1) + ((bits >> 1) & 1));
          // Canonical representative: the pair filled from the lowest bit up.
          const std::uint64_t canon = rest | (pair_count >= 1 ? 1u : 0u) |
                                      (pair_count == 2 ? 2u : 0u);
          values[bits] = base[canon];
        }
        const Game game = Game::from_values(player_ids(n), values);
        ShapleyResult result;
        result.v_empty = game.value(0);
        result.v_full = game.value(game.full_mask());
        for (std::size_t i = 0; i < n; ++i) {
          result.phi[game.players()[i]] = shapley_exact(game, static_cast<int>(i), weight);
        }
        const AxiomReport report = check_axioms(game, result);
        ok = ok && report.symmetry.ok && report.symmetry.cases > 0;
        worst = std::max(worst, report.symmetry.max_gap);
      }
      // Dummy player: the last player adds a fixed amount to every coalition
      // of a zero-grounded game.
      {
        Rng rng(stream_seed(options.seed, n, "axiom-dummy"));
        std::vector<double> base = random_dyadic_values(n - 1, rng);
        base[0] = 0.0;  // dummy detection needs V(∅) = 0
        const double solo = static_cast<double>(rng.bounded(1025)) / 1024.0;
        std::vector<double> values(std::size_t{1} << n);
        const std::uint64_t dummy_bit = std::uint64_t{1} << (n - 1);
        for (std::uint64_t bits = 0; bits < values.size(); ++bits) {
          values[bits] = base[bits & ~dummy_bit] + ((bits & dummy_bit) != 0 ? solo : 0.0);
        }
        const Game game = Game::from_values(player_ids(n), values);
        ShapleyResult result;
        result.v_empty = game.value(0);
        result.v_full = game.value(game.full_mask());
        for (std::size_t i = 0; i < n; ++i) {
          result.phi[game.players()[i]] = shapley_exact(game, static_cast<int>(i), weight);
        }
        const AxiomReport report = check_axioms(game, result);
        ok = ok && report.dummy.ok && report.dummy.cases > 0;
        worst = std::max(worst, report.dummy.max_gap);
      }
    }
    printer.report("axioms", ok,
                   std::to_string(games) + " random games, max gap " + format_gap(worst));
  }

  // The subset-weight formula must agree with full permutation enumeration.
  {
    bool ok = true;
    double worst = 0.0;
    int comparisons = 0;
    for (std::size_t n = 2; n <= options.max_players_oracle; ++n) {
      for (int g = 0; g < options.games_per_n; ++g) {
        Rng rng(stream_seed(options.seed, n * 1000 + static_cast<std::uint64_t>(g), "oracle"));
        const Game game = Game::from_values(player_ids(n), random_dyadic_values(n, rng));
        for (std::size_t i = 0; i < n; ++i) {
          const double gap = std::fabs(shapley_exact(game, static_cast<int>(i), weight) -
                                       shapley_oracle(game, static_cast<int>(i)));
          worst = std::max(worst, gap);
          ok = ok && gap <= kAxiomTolerance;
          ++comparisons;
        }
      }
    }
    printer.report("oracle-equivalence", ok,
                   std::to_string(comparisons) + " comparisons, max gap " + format_gap(worst));
  }

  // Two-modality closed forms.
  {
    bool ok = true;
    double worst = 0.0;
    const ModalitySchema schema = toy_schema(2);
    for (int g = 0; g < options.games_per_n; ++g) {
      Rng rng(stream_seed(options.seed, static_cast<std::uint64_t>(g), "closed2"));
      std::vector<double> v = random_dyadic_values(2, rng);
      if (v[3] <= 0.0) {
        v[3] = 1.0;
      }
      const UtilityTable table = table_from_values(schema, v);
      const double closed_s = 100.0 / (2.0 * table.z_f) * (v[3] - v[2] + v[1] - v[0]);
      const double closed_c = 100.0 * (v[3] - v[1] - v[2] + v[0]);
      double gap = std::fabs(contribution_score(table, schema, "m1") - closed_s);
      gap = std::max(gap,
                     std::fabs(cooperation_score(table, schema, {"m1", "m2"}, false) - closed_c));
      worst = std::max(worst, gap);
      ok = ok && gap <= kAxiomTolerance;
    }
    printer.report("closed-form-two-modal", ok, "max gap " + format_gap(worst));
  }

  // Three-modality closed form with subset weights 2/6, 1/6, 1/6, 2/6.
  {
    bool ok = true;
    double worst = 0.0;
    const ModalitySchema schema = toy_schema(3);
    for (int g = 0; g < options.games_per_n; ++g) {
      Rng rng(stream_seed(options.seed, static_cast<std::uint64_t>(g), "closed3"));
      std::vector<double> v = random_dyadic_values(3, rng);
      if (v[7] <= 0.0) {
        v[7] = 1.0;
      }
      const UtilityTable table = table_from_values(schema, v);
      // Bits: m1=1, m2=2, m3=4.
      const double closed = 100.0 / table.z_f *
                            (2.0 / 6.0 * (v[7] - v[6]) + 1.0 / 6.0 * (v[3] - v[2]) +
                             1.0 / 6.0 * (v[5] - v[4]) + 2.0 / 6.0 * (v[1] - v[0]));
      const double gap = std::fabs(contribution_score(table, schema, "m1") - closed);
      worst = std::max(worst, gap);
      ok = ok && gap <= kAxiomTolerance;
    }
    printer.report("closed-form-three-modal", ok, "max gap " + format_gap(worst));
  }

  // Fixed reference table.
  {
    const ModalitySchema schema = toy_schema(2);
    const UtilityTable table = table_from_values(schema, {0.25, 0.5, 0.6, 0.9});
    const Game game = Game::from_table(table, schema);
    const double phi1 = shapley_exact(game, 0, weight);
    const double phi2 = shapley_exact(game, 1, weight);
    const double coop = cooperation_score(table, schema, {"m1", "m2"}, false);
    const bool ok = std::fabs(phi1 - 0.275) <= kAxiomTolerance &&
                    std::fabs(phi2 - 0.375) <= kAxiomTolerance &&
                    std::fabs(coop - 5.0) <= 1e-10;
    printer.report("reference-table", ok,
                   "phi=(" + std::to_string(phi1) + ", " + std::to_string(phi2) + "), C=" +
                       std::to_string(coop));
  }

  out << (printer.failures == 0 ? "selftest: all checks passed\n"
                                : "selftest: " + std::to_string(printer.failures) +
                                      " check(s) FAILED\n");
  return printer.failures;
}

}  // namespace mmscore
