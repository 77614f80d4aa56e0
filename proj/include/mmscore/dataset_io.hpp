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

#include <iosfwd>
#include <string>

#include <nlohmann/json_fwd.hpp>

#include "mmscore/core.hpp"

namespace mmscore {

// Dataset files are UTF-8 JSON lines. The first line is a header object
//   {"schema": [{"id": ..., "dim": ...}, ...], "num_classes": K, "dataset_id": ...}
// and every following line is a record
//   {"label": int, "features": {"<id>": [doubles], ...}}
// Feature values are written with full round-trip precision, so
// save -> load is lossless.

Dataset load_dataset(std::istream& in);
Dataset load_dataset(const std::string& path);

void save_dataset(const Dataset& dataset, std::ostream& out);
void save_dataset(const Dataset& dataset, const std::string& path);

// JSON shapes shared with the evaluator wire protocol.
nlohmann::json schema_to_json(const ModalitySchema& schema);
ModalitySchema schema_from_json(const nlohmann::json& doc);
nlohmann::json features_to_json(const Sample& sample);

}  // namespace mmscore
