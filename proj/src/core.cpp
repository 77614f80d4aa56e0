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

#include "mmscore/core.hpp"

#include <cmath>
#include <sstream>
#include <unordered_set>

namespace mmscore {

ModalitySchema::ModalitySchema(std::vector<Modality> modalities, int num_classes)
    : modalities_(std::move(modalities)), num_classes_(num_classes) {
  if (modalities_.empty()) {
    throw ValidationError("schema: at least one modality required");
  }
  if (num_classes_ < 2) {
    throw ValidationError("schema: num_classes must be >= 2, got " + std::to_string(num_classes_));
  }
  std::unordered_set<std::string> seen;
  for (const Modality& m : modalities_) {
    if (m.id.empty()) {
      throw ValidationError("schema: modality id must be non-empty");
    }
    if (m.id.find('+') != std::string::npos || m.id == kEmptyCoalitionKey) {
      throw ValidationError("schema: modality id '" + m.id + "' clashes with coalition key syntax");
    }
    if (!seen.insert(m.id).second) {
      throw ValidationError("schema: duplicate modality id '" + m.id + "'");
    }
    if (m.dim <= 0) {
      throw ValidationError("schema: modality '" + m.id + "' has non-positive dim " +
                            std::to_string(m.dim));
    }
  }
}

int ModalitySchema::index_of(const std::string& id) const {
  for (std::size_t i = 0; i < modalities_.size(); ++i) {
    if (modalities_[i].id == id) {
      return static_cast<int>(i);
    }
  }
  return -1;
}

int ModalitySchema::dim_of(const std::string& id) const {
  const int idx = index_of(id);
  if (idx < 0) {
    throw ValidationError("schema: unknown modality id '" + id + "'");
  }
  return modalities_[static_cast<std::size_t>(idx)].dim;
}

std::vector<std::string> ModalitySchema::ids() const {
  std::vector<std::string> out;
  out.reserve(modalities_.size());
  for (const Modality& m : modalities_) {
    out.push_back(m.id);
  }
  return out;
}

std::vector<int> Dataset::labels() const {
  std::vector<int> out;
  out.reserve(samples.size());
  for (const Sample& s : samples) {
    out.push_back(s.label);
  }
  return out;
}

std::set<int> Dataset::classes_present() const {
  std::set<int> out;
  for (const Sample& s : samples) {
    out.insert(s.label);
  }
  return out;
}

CoalitionMask CoalitionMask::full(const ModalitySchema& schema) {
  std::set<std::string> all;
  for (const Modality& m : schema.modalities()) {
    all.insert(m.id);
  }
  return CoalitionMask(std::move(all));
}

std::string coalition_key(const CoalitionMask& mask, const ModalitySchema& schema) {
  for (const std::string& id : mask.present()) {
    if (!schema.has(id)) {
      throw ValidationError("coalition: modality id '" + id + "' not in schema");
    }
  }
  if (mask.empty()) {
    return kEmptyCoalitionKey;
  }
  std::string out;
  for (const Modality& m : schema.modalities()) {
    if (mask.contains(m.id)) {
      if (!out.empty()) {
        out += '+';
      }
      out += m.id;
    }
  }
  return out;
}

CoalitionMask parse_coalition_key(const std::string& key, const ModalitySchema& schema) {
  if (key == kEmptyCoalitionKey) {
    return CoalitionMask{};
  }
  if (key.empty()) {
    throw ValidationError("coalition key must not be empty (use '∅' for the empty coalition)");
  }
  std::set<std::string> present;
  std::stringstream ss(key);
  std::string token;
  while (std::getline(ss, token, '+')) {
    if (!schema.has(token)) {
      throw ValidationError("coalition key '" + key + "': unknown modality id '" + token + "'");
    }
    if (!present.insert(token).second) {
      throw ValidationError("coalition key '" + key + "': duplicate modality id '" + token + "'");
    }
  }
  return CoalitionMask(std::move(present));
}

CoalitionMask mask_from_bits(std::uint64_t bits, const ModalitySchema& schema) {
  if (schema.size() < 64 && bits >> schema.size() != 0) {
    throw ContractError("mask_from_bits: bits outside schema range");
  }
  std::set<std::string> present;
  for (std::size_t i = 0; i < schema.size(); ++i) {
    if (bits & (std::uint64_t{1} << i)) {
      present.insert(schema.modalities()[i].id);
    }
  }
  return CoalitionMask(std::move(present));
}

std::uint64_t bits_from_mask(const CoalitionMask& mask, const ModalitySchema& schema) {
  std::uint64_t bits = 0;
  for (const std::string& id : mask.present()) {
    const int idx = schema.index_of(id);
    if (idx < 0) {
      throw ValidationError("coalition: modality id '" + id + "' not in schema");
    }
    bits |= std::uint64_t{1} << idx;
  }
  return bits;
}

Dataset validate_dataset(Dataset raw) {
  if (raw.schema.size() == 0) {
    throw ValidationError("dataset: schema has no modalities");
  }
  if (raw.samples.empty()) {
    throw ValidationError("dataset: must contain at least one sample");
  }
  const int num_classes = raw.schema.num_classes();
  for (std::size_t i = 0; i < raw.samples.size(); ++i) {
    const Sample& s = raw.samples[i];
    if (s.label < 0 || s.label >= num_classes) {
      throw ValidationError("sample " + std::to_string(i) + ": label " + std::to_string(s.label) +
                            " out of range [0, " + std::to_string(num_classes) + ")");
    }
    for (const Modality& m : raw.schema.modalities()) {
      const auto it = s.features.find(m.id);
      if (it == s.features.end()) {
        throw ValidationError("sample " + std::to_string(i) + ": missing modality '" + m.id + "'");
      }
      if (static_cast<int>(it->second.size()) != m.dim) {
        throw ValidationError("sample " + std::to_string(i) + ": modality '" + m.id + "' has " +
                              std::to_string(it->second.size()) + " components, expected " +
                              std::to_string(m.dim));
      }
      for (double v : it->second) {
        if (!std::isfinite(v)) {
          throw ValidationError("sample " + std::to_string(i) + ": modality '" + m.id +
                                "' contains a non-finite value");
        }
      }
    }
    if (s.features.size() != raw.schema.size()) {
      for (const auto& [id, values] : s.features) {
        (void)values;
        if (!raw.schema.has(id)) {
          throw ValidationError("sample " + std::to_string(i) + ": unexpected modality '" + id +
                                "' not in schema");
        }
      }
    }
  }
  return raw;
}

}  // namespace mmscore
