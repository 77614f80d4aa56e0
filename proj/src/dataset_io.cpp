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

#include "mmscore/dataset_io.hpp"

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace mmscore {

using nlohmann::json;
using nlohmann::ordered_json;

nlohmann::json schema_to_json(const ModalitySchema& schema) {
  json mods = json::array();
  for (const Modality& m : schema.modalities()) {
    mods.push_back({{"id", m.id}, {"dim", m.dim}});
  }
  return json{{"schema", std::move(mods)}, {"num_classes", schema.num_classes()}};
}

ModalitySchema schema_from_json(const json& doc) {
  if (!doc.contains("schema") || !doc["schema"].is_array()) {
    throw ValidationError("header: missing 'schema' array");
  }
  if (!doc.contains("num_classes") || !doc["num_classes"].is_number_integer()) {
    throw ValidationError("header: missing integer 'num_classes'");
  }
  std::vector<Modality> mods;
  for (const json& entry : doc["schema"]) {
    if (!entry.contains("id") || !entry.contains("dim")) {
      throw ValidationError("header: each schema entry needs 'id' and 'dim'");
    }
    mods.push_back(Modality{entry["id"].get<std::string>(), entry["dim"].get<int>()});
  }
  return ModalitySchema(std::move(mods), doc["num_classes"].get<int>());
}

nlohmann::json features_to_json(const Sample& sample) {
  json features = json::object();
  for (const auto& [id, values] : sample.features) {
    features[id] = values;
  }
  return features;
}

namespace {

Sample sample_from_json(const json& record, std::size_t sample_index) {
  const std::string where = "sample " + std::to_string(sample_index);
  if (!record.is_object()) {
    throw ValidationError(where + ": record is not an object");
  }
  if (!record.contains("label") || !record["label"].is_number_integer()) {
    throw ValidationError(where + ": missing integer 'label'");
  }
  if (!record.contains("features") || !record["features"].is_object()) {
    throw ValidationError(where + ": missing 'features' object");
  }
  Sample s;
  s.label = record["label"].get<int>();
  for (const auto& [id, values] : record["features"].items()) {
    if (!values.is_array()) {
      throw ValidationError(where + ": features of '" + id + "' must be an array");
    }
    std::vector<double> vec;
    vec.reserve(values.size());
    for (const json& v : values) {
      if (!v.is_number()) {
        throw ValidationError(where + ": non-numeric feature component in '" + id + "'");
      }
      vec.push_back(v.get<double>());
    }
    s.features.emplace(id, std::move(vec));
  }
  return s;
}

}  // namespace

Dataset load_dataset(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) {
    throw ValidationError("dataset file: empty (missing header line)");
  }
  json header;
  try {
    header = json::parse(line);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("dataset file: header is not valid JSON: ") + e.what());
  }
  Dataset dataset;
  dataset.schema = schema_from_json(header);
  if (header.contains("dataset_id")) {
    dataset.id = header["dataset_id"].get<std::string>();
  }
  std::size_t index = 0;
  while (std::getline(in, line)) {
    if (line.empty()) {
      continue;
    }
    json record;
    try {
      record = json::parse(line);
    } catch (const json::exception& e) {
      throw ValidationError("sample " + std::to_string(index) + ": invalid JSON: " + e.what());
    }
    dataset.samples.push_back(sample_from_json(record, index));
    ++index;
  }
  return validate_dataset(std::move(dataset));
}

Dataset load_dataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error("cannot open dataset file '" + path + "'");
  }
  try {
    return load_dataset(in);
  } catch (const ValidationError& e) {
    throw ValidationError(path + ": " + e.what());
  }
}

void save_dataset(const Dataset& dataset, std::ostream& out) {
  ordered_json header;
  ordered_json mods = ordered_json::array();
  for (const Modality& m : dataset.schema.modalities()) {
    ordered_json entry;
    entry["id"] = m.id;
    entry["dim"] = m.dim;
    mods.push_back(std::move(entry));
  }
  header["schema"] = std::move(mods);
  header["num_classes"] = dataset.schema.num_classes();
  header["dataset_id"] = dataset.id;
  out << header.dump() << '\n';

  for (const Sample& s : dataset.samples) {
    ordered_json record;
    record["label"] = s.label;
    ordered_json features = ordered_json::object();
    // Emit feature blocks in schema order so files are byte-stable.
    for (const Modality& m : dataset.schema.modalities()) {
      features[m.id] = s.features.at(m.id);
    }
    record["features"] = std::move(features);
    out << record.dump() << '\n';
  }
}

void save_dataset(const Dataset& dataset, const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw Error("cannot open '" + path + "' for writing");
  }
  save_dataset(dataset, out);
}

}  // namespace mmscore
