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

#include "mmscore/report.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include <nlohmann/json.hpp>

namespace mmscore {

using nlohmann::ordered_json;

namespace {

std::string full_precision(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string two_decimals(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

const char* kModeNames[] = {"uniform", "in", "out"};

}  // namespace

ordered_json report_to_json(const ScoreReport& report, const ModalitySchema& schema) {
  ordered_json doc;
  doc["tool"] = {{"name", "mmscore"}, {"version", report.tool_version}};
  doc["seed"] = report.seed;
  doc["config_hash"] = report.config_hash;
  doc["dataset_id"] = report.dataset_id;
  doc["evaluator"] = report.evaluator;
  doc["partial"] = report.partial;
  doc["accuracy_full"] = report.accuracy_full;
  doc["majority_class"] = report.majority_class;
  doc["v_empty"] = report.v_empty;

  ordered_json utilities = ordered_json::object();
  for (const auto& [key, value] : report.utilities) {
    utilities[key] = value;
  }
  doc["utilities"] = std::move(utilities);

  ordered_json shapley = ordered_json::object();
  for (const Modality& m : schema.modalities()) {
    const auto it = report.shapley_marginal.find(m.id);
    if (it == report.shapley_marginal.end()) {
      continue;
    }
    shapley[m.id] = {{"phi", it->second.phi}, {"points", it->second.points}};
  }
  doc["shapley_marginal"] = std::move(shapley);

  ordered_json cooperation = ordered_json::object();
  for (const auto& [key, score] : report.cooperation) {
    cooperation[key] = {{"raw_fraction", score.raw_fraction},
                        {"raw_points", score.raw_points},
                        {"normalized_points", score.normalized_points}};
  }
  doc["cooperation"] = std::move(cooperation);

  ordered_json perceptual = ordered_json::object();
  for (const Modality& m : schema.modalities()) {
    const auto it = report.perceptual.find(m.id);
    if (it == report.perceptual.end()) {
      continue;
    }
    ordered_json by_mode = ordered_json::object();
    for (const char* mode : kModeNames) {
      const auto cell_it = it->second.find(mode);
      if (cell_it == it->second.end()) {
        continue;
      }
      const PerceptualCell& cell = cell_it->second;
      ordered_json entry;
      if (cell.failed) {
        entry["failed"] = true;
        entry["error"] = cell.error;
      } else {
        entry["mean"] = cell.mean;
        entry["std"] = cell.stddev;
        entry["repeats"] = cell.repeats;
        entry["self_donation_warnings"] = cell.self_donation_warnings;
      }
      by_mode[mode] = std::move(entry);
    }
    perceptual[m.id] = std::move(by_mode);
  }
  doc["perceptual"] = std::move(perceptual);

  doc["warnings"] = report.warnings;
  ordered_json metadata = ordered_json::object();
  for (const auto& [key, value] : report.metadata) {
    metadata[key] = value;
  }
  doc["metadata"] = std::move(metadata);
  return doc;
}

std::string report_to_csv(const ScoreReport& report, const ModalitySchema& schema) {
  std::ostringstream out;
  const std::string& model = report.evaluator;
  out << "model,metric,modality_or_coalition,mean,std\n";
  auto row = [&](const std::string& metric, const std::string& target, double mean, double std) {
    out << model << ',' << metric << ',' << target << ',' << full_precision(mean) << ','
        << full_precision(std) << '\n';
  };
  row("accuracy", coalition_key(CoalitionMask::full(schema), schema), report.accuracy_full, 0.0);
  row("v_empty", kEmptyCoalitionKey, report.v_empty, 0.0);
  for (const auto& [key, value] : report.utilities) {
    row("utility", key, value, 0.0);
  }
  for (const Modality& m : schema.modalities()) {
    const auto it = report.shapley_marginal.find(m.id);
    if (it != report.shapley_marginal.end()) {
      row("shapley_phi", m.id, it->second.phi, 0.0);
      row("shapley_points", m.id, it->second.points, 0.0);
    }
  }
  for (const auto& [key, score] : report.cooperation) {
    row("cooperation_raw_points", key, score.raw_points, 0.0);
    row("cooperation_normalized_points", key, score.normalized_points, 0.0);
  }
  for (const Modality& m : schema.modalities()) {
    const auto it = report.perceptual.find(m.id);
    if (it == report.perceptual.end()) {
      continue;
    }
    for (const char* mode : kModeNames) {
      const auto cell_it = it->second.find(mode);
      if (cell_it == it->second.end() || cell_it->second.failed) {
        continue;
      }
      row(std::string("perceptual_") + mode, m.id, cell_it->second.mean, cell_it->second.stddev);
    }
  }
  return out.str();
}

std::string report_to_table(const ScoreReport& report, const ModalitySchema& schema) {
  std::ostringstream out;
  out << "dataset: " << report.dataset_id << "   evaluator: " << report.evaluator
      << "   seed: " << report.seed << '\n';
  if (report.partial) {
    out << "NOTE: partial results (a stage failed; see warnings)\n";
  }

  std::vector<std::pair<std::string, std::string>> columns;  // header, value
  columns.emplace_back("Acc.", two_decimals(100.0 * report.accuracy_full));
  for (const Modality& m : schema.modalities()) {
    const auto it = report.shapley_marginal.find(m.id);
    if (it != report.shapley_marginal.end()) {
      columns.emplace_back("S_" + m.id, two_decimals(it->second.points));
    }
  }
  for (const auto& [key, score] : report.cooperation) {
    columns.emplace_back("C_" + key, two_decimals(score.raw_points));
  }
  for (const Modality& m : schema.modalities()) {
    const auto it = report.perceptual.find(m.id);
    if (it == report.perceptual.end()) {
      continue;
    }
    const std::pair<const char*, std::string> headed[] = {
        {"uniform", "P_" + m.id}, {"in", "Pin_" + m.id}, {"out", "Pout_" + m.id}};
    for (const auto& [mode, header] : headed) {
      const auto cell_it = it->second.find(mode);
      if (cell_it == it->second.end()) {
        continue;
      }
      if (cell_it->second.failed) {
        columns.emplace_back(header, "n/a");
      } else {
        columns.emplace_back(header, std::string(two_decimals(cell_it->second.mean)) + "±" +
                                         two_decimals(cell_it->second.stddev));
      }
    }
  }

  for (int line = 0; line < 2; ++line) {
    for (std::size_t i = 0; i < columns.size(); ++i) {
      const std::string& header = columns[i].first;
      const std::string& value = columns[i].second;
      const std::size_t width = std::max(header.size(), value.size()) + 2;
      const std::string& text = line == 0 ? header : value;
      out << text << std::string(width - text.size(), ' ');
    }
    out << '\n';
  }
  return out.str();
}

void check_report_consistency(const ScoreReport& report) {
  if (!report.shapley_marginal.empty()) {
    if (report.accuracy_full <= 0.0) {
      throw ValidationError("report: normalized scores present but Z_f is not positive");
    }
    double points_sum = 0.0;
    for (const auto& [id, score] : report.shapley_marginal) {
      (void)id;
      points_sum += score.points;
    }
    const double lhs = points_sum * report.accuracy_full / 100.0;
    const double rhs = report.accuracy_full - report.v_empty;
    if (std::fabs(lhs - rhs) > 1e-9) {
      throw ValidationError("report: Shapley scores do not account for accuracy_full - v_empty (gap " +
                            std::to_string(lhs - rhs) + ")");
    }
  }
  for (const auto& [modality, by_mode] : report.perceptual) {
    for (const auto& [mode, cell] : by_mode) {
      if (cell.failed) {
        continue;
      }
      if (cell.repeats < 1 || cell.stddev < 0.0) {
        throw ValidationError("report: malformed perceptual cell " + modality + "/" + mode);
      }
      if (cell.repeats == 1 && cell.stddev != 0.0) {
        throw ValidationError("report: single-repeat perceptual cell must have zero std");
      }
    }
  }
}

}  // namespace mmscore
