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
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace mmscore {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A document or in-memory object violates a data invariant.
struct ValidationError : Error {
  using Error::Error;
};

/// A caller broke an API precondition.
struct ContractError : Error {
  using Error::Error;
};

/// An external evaluator misbehaved on the wire.
struct ProtocolError : Error {
  using Error::Error;
};

/// An evaluator failed while producing predictions.
struct EvalError : Error {
  using Error::Error;
};

/// Canonical key of the empty coalition.
inline constexpr char kEmptyCoalitionKey[] = "\xE2\x88\x85";  // U+2205

struct Modality {
  std::string id;
  int dim = 0;

  bool operator==(const Modality&) const = default;
};

/// Ordered list of modalities plus the label arity. The order is canonical:
/// coalition keys, bitmask layouts, and report columns all follow it.
class ModalitySchema {
 public:
  ModalitySchema() = default;
  ModalitySchema(std::vector<Modality> modalities, int num_classes);

  const std::vector<Modality>& modalities() const { return modalities_; }
  int num_classes() const { return num_classes_; }
  std::size_t size() const { return modalities_.size(); }

  bool has(const std::string& id) const { return index_of(id) >= 0; }
  /// Position in canonical order, or -1 when the id is unknown.
  int index_of(const std::string& id) const;
  int dim_of(const std::string& id) const;
  std::vector<std::string> ids() const;

  bool operator==(const ModalitySchema&) const = default;

 private:
  std::vector<Modality> modalities_;
  int num_classes_ = 0;
};

struct Sample {
  std::map<std::string, std::vector<double>> features;
  int label = 0;

  bool operator==(const Sample&) const = default;
};

struct Dataset {
  ModalitySchema schema;
  std::vector<Sample> samples;
  std::string id;

  std::size_t size() const { return samples.size(); }
  std::vector<int> labels() const;
  std::set<int> classes_present() const;

  bool operator==(const Dataset&) const = default;
};

/// Subset of a schema's modalities treated as present.
class CoalitionMask {
 public:
  CoalitionMask() = default;
  explicit CoalitionMask(std::set<std::string> present) : present_(std::move(present)) {}

  static CoalitionMask full(const ModalitySchema& schema);

  const std::set<std::string>& present() const { return present_; }
  bool empty() const { return present_.empty(); }
  std::size_t size() const { return present_.size(); }
  bool contains(const std::string& id) const { return present_.count(id) > 0; }

  bool operator==(const CoalitionMask&) const = default;

 private:
  std::set<std::string> present_;
};

/// Canonical coalition key: present ids joined by "+" in schema order; the
/// empty coalition maps to "∅". Injective over subsets of the schema.
std::string coalition_key(const CoalitionMask& mask, const ModalitySchema& schema);

/// Inverse of coalition_key. Throws ValidationError on unknown ids or
/// malformed keys.
CoalitionMask parse_coalition_key(const std::string& key, const ModalitySchema& schema);

/// Mask from a bitmask laid out in schema order (bit i = modality i present).
CoalitionMask mask_from_bits(std::uint64_t bits, const ModalitySchema& schema);
std::uint64_t bits_from_mask(const CoalitionMask& mask, const ModalitySchema& schema);

/// Per-coalition cached predictions, one entry per evaluated coalition.
struct PredictionTable {
  std::map<std::string, std::vector<int>> entries;
  std::string dataset_id;
};

/// Checks every dataset invariant (feature coverage, dimensions, finiteness,
/// label range) and returns the dataset unchanged when it conforms. Errors
/// name the offending sample index and modality. Idempotent.
Dataset validate_dataset(Dataset raw);

}  // namespace mmscore
