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

#include <doctest.h>

#include <cmath>
#include <set>
#include <sstream>

#include "mmscore/core.hpp"
#include "mmscore/dataset_io.hpp"
#include "mmscore/rng.hpp"
#include "test_helpers.hpp"

using namespace mmscore;
using namespace mmscore::testing;

TEST_CASE("coalition keys follow schema order") {
  const ModalitySchema schema = make_schema({{"V", 2}, {"T", 3}});
  CHECK(coalition_key(CoalitionMask{}, schema) == kEmptyCoalitionKey);
  CHECK(coalition_key(CoalitionMask({"T"}), schema) == "T");
  // Insertion order never matters; the schema decides.
  CHECK(coalition_key(CoalitionMask({"T", "V"}), schema) == "V+T");
  CHECK(coalition_key(CoalitionMask::full(schema), schema) == "V+T");
  CHECK_THROWS_AS(coalition_key(CoalitionMask({"X"}), schema), ValidationError);
}

TEST_CASE("coalition keys are a bijection with parse as inverse") {
  Rng rng(42);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 2 + rng.bounded(5);
    std::vector<std::pair<std::string, int>> mods;
    for (std::size_t i = 0; i < n; ++i) {
      mods.emplace_back("mod" + std::to_string(i), 1 + static_cast<int>(rng.bounded(4)));
    }
    const ModalitySchema schema = make_schema(mods);
    std::set<std::string> seen;
    for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << n); ++bits) {
      const CoalitionMask mask = mask_from_bits(bits, schema);
      const std::string key = coalition_key(mask, schema);
      CHECK(seen.insert(key).second);  // injective
      CHECK(parse_coalition_key(key, schema) == mask);
      CHECK(bits_from_mask(mask, schema) == bits);
    }
  }
}

TEST_CASE("parse_coalition_key rejects garbage") {
  const ModalitySchema schema = make_schema({{"a", 1}, {"b", 1}});
  CHECK_THROWS_AS(parse_coalition_key("", schema), ValidationError);
  CHECK_THROWS_AS(parse_coalition_key("a+c", schema), ValidationError);
  CHECK_THROWS_AS(parse_coalition_key("a+a", schema), ValidationError);
}

TEST_CASE("schema invariants") {
  CHECK_THROWS_AS(make_schema({{"a", 1}, {"a", 2}}), ValidationError);
  CHECK_THROWS_AS(make_schema({{"", 1}}), ValidationError);
  CHECK_THROWS_AS(make_schema({{"a", 0}}), ValidationError);
  CHECK_THROWS_AS(make_schema({{"a", 1}}, 1), ValidationError);
  CHECK_THROWS_AS(make_schema({{"a+b", 1}, {"c", 1}}), ValidationError);
  const ModalitySchema schema = make_schema({{"a", 1}, {"b", 2}}, 3);
  CHECK(schema.index_of("b") == 1);
  CHECK(schema.index_of("zzz") == -1);
  CHECK(schema.dim_of("b") == 2);
}

namespace {

Dataset small_dataset() {
  return make_traceable_dataset(make_schema({{"V", 2}, {"T", 1}}), {0, 1, 0, 1});
}

}  // namespace

TEST_CASE("validate_dataset accepts conforming data and is idempotent") {
  const Dataset dataset = small_dataset();
  const Dataset validated = validate_dataset(dataset);
  CHECK(validated.samples.size() == 4);
  CHECK(validate_dataset(validated) == validated);
}

TEST_CASE("validate_dataset names the offending sample") {
  SUBCASE("missing modality") {
    Dataset dataset = small_dataset();
    dataset.samples[2].features.erase("T");
    CHECK_THROWS_WITH_AS(validate_dataset(dataset), "sample 2: missing modality 'T'",
                         ValidationError);
  }
  SUBCASE("label at num_classes is out of range") {
    Dataset dataset = small_dataset();
    dataset.samples[1].label = 2;
    CHECK_THROWS_WITH_AS(validate_dataset(dataset), "sample 1: label 2 out of range [0, 2)",
                         ValidationError);
  }
  SUBCASE("dimension mismatch") {
    Dataset dataset = small_dataset();
    dataset.samples[3].features["V"].push_back(0.0);
    CHECK_THROWS_AS(validate_dataset(dataset), ValidationError);
  }
  SUBCASE("non-finite feature") {
    Dataset dataset = small_dataset();
    dataset.samples[0].features["V"][0] = std::nan("");
    CHECK_THROWS_AS(validate_dataset(dataset), ValidationError);
  }
  SUBCASE("unknown extra modality") {
    Dataset dataset = small_dataset();
    dataset.samples[0].features["X"] = {1.0};
    CHECK_THROWS_AS(validate_dataset(dataset), ValidationError);
  }
  SUBCASE("empty dataset") {
    Dataset dataset = small_dataset();
    dataset.samples.clear();
    CHECK_THROWS_AS(validate_dataset(dataset), ValidationError);
  }
}

TEST_CASE("dataset files round-trip losslessly") {
  Dataset dataset = small_dataset();
  dataset.id = "round-trip";
  dataset.samples[0].features["V"][0] = 0.1 + 0.2;  // not exactly representable
  dataset.samples[1].features["V"][1] = -1.0e-17;

  std::stringstream stream;
  save_dataset(dataset, stream);
  const Dataset reloaded = load_dataset(stream);
  CHECK(reloaded == dataset);

  // Saving the reload must be byte-identical too.
  std::stringstream again;
  save_dataset(reloaded, again);
  std::stringstream first;
  save_dataset(dataset, first);
  CHECK(again.str() == first.str());
}

TEST_CASE("load_dataset errors") {
  SUBCASE("empty stream") {
    std::stringstream empty;
    CHECK_THROWS_AS(load_dataset(empty), ValidationError);
  }
  SUBCASE("record with bad JSON names the sample") {
    std::stringstream stream;
    stream << R"({"schema":[{"id":"a","dim":1}],"num_classes":2,"dataset_id":"x"})" << "\n";
    stream << R"({"label":0,"features":{"a":[0.5]}})" << "\n";
    stream << "not json\n";
    CHECK_THROWS_WITH_AS(load_dataset(stream), doctest::Contains("sample 1: invalid JSON"),
                         ValidationError);
  }
  SUBCASE("single-modality datasets load fine") {
    std::stringstream stream;
    stream << R"({"schema":[{"id":"a","dim":1}],"num_classes":2,"dataset_id":"solo"})" << "\n";
    stream << R"({"label":1,"features":{"a":[0.25]}})" << "\n";
    const Dataset solo = load_dataset(stream);
    CHECK(solo.schema.size() == 1);
  }
}

TEST_CASE("stream seeds separate by tag and index") {
  CHECK(stream_seed(7, 0, "a") != stream_seed(7, 1, "a"));
  CHECK(stream_seed(7, 0, "a") != stream_seed(7, 0, "b"));
  CHECK(stream_seed(7, 0, "a") == stream_seed(7, 0, "a"));
  CHECK(stream_seed(7, 0, "a") != stream_seed(8, 0, "a"));
}
