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
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "mmscore/core.hpp"
#include "mmscore/utility.hpp"

namespace mmscore {

// Wire protocol, version 1. Line-delimited JSON over the child's
// stdin/stdout:
//
//   engine -> child   {"type":"hello","version":1,"schema":[{"id","dim"}...],
//                      "num_classes":K}
//   child  -> engine  {"type":"ready"}
//   engine -> child   {"type":"predict","request_id":R,
//                      "coalition":["t","v",...],
//                      "samples":[{"features":{"t":[...],...}}, ...]}
//   child  -> engine  {"type":"predictions","request_id":R,"labels":[int...]}
//
// Labels are never sent to the child. Feature floats are serialized with
// full round-trip precision, so in-process and over-the-wire evaluation of
// the same model produce identical predictions.

inline constexpr int kProtocolVersion = 1;

struct ExternalEvaluatorOptions {
  /// Seconds to wait for each response before killing the child.
  double timeout_seconds = 300.0;
};

/// Evaluator backed by a child process speaking the wire protocol. The child
/// is spawned and handshaken at construction and owns one request at a time
/// (serial). Repeated identical requests are cross-checked: a child that
/// answers them differently is impure, which is recorded as a warning
/// instead of trusted silently.
class ExternalEvaluator final : public Evaluator {
 public:
  ExternalEvaluator(std::vector<std::string> command, const ModalitySchema& schema,
                    const ExternalEvaluatorOptions& options = {});
  ~ExternalEvaluator() override;

  ExternalEvaluator(const ExternalEvaluator&) = delete;
  ExternalEvaluator& operator=(const ExternalEvaluator&) = delete;

  std::vector<int> predict(const Dataset& inputs, const CoalitionMask& coalition) const override;
  bool serial() const override { return true; }
  std::string name() const override;

  long purity_violations() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Splits a command line into argv entries, honoring single and double
/// quotes.
std::vector<std::string> split_command_line(const std::string& command_line);

/// Serves the wire protocol on (in, out) using `predict` for each request:
/// the reference implementation behind the `protocol-echo` subcommand, also
/// usable for writing other evaluators. Returns when stdin closes.
void serve_protocol(std::istream& in, std::ostream& out, const ModalitySchema& schema,
                    const std::function<std::vector<int>(const Dataset&)>& predict);

}  // namespace mmscore
