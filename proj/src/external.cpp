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

#include "mmscore/external.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cstring>
#include <iostream>
#include <map>
#include <mutex>
#include <sstream>

#include <nlohmann/json.hpp>

#include "mmscore/dataset_io.hpp"
#include "mmscore/rng.hpp"

extern char** environ;

namespace mmscore {

using nlohmann::json;
using nlohmann::ordered_json;

std::vector<std::string> split_command_line(const std::string& command_line) {
  std::vector<std::string> args;
  std::string current;
  bool in_single = false;
  bool in_double = false;
  bool has_token = false;
  for (char c : command_line) {
    if (in_single) {
      if (c == '\'') {
        in_single = false;
      } else {
        current += c;
      }
    } else if (in_double) {
      if (c == '"') {
        in_double = false;
      } else {
        current += c;
      }
    } else if (c == '\'') {
      in_single = true;
      has_token = true;
    } else if (c == '"') {
      in_double = true;
      has_token = true;
    } else if (c == ' ' || c == '\t') {
      if (has_token || !current.empty()) {
        args.push_back(current);
        current.clear();
        has_token = false;
      }
    } else {
      current += c;
      has_token = true;
    }
  }
  if (in_single || in_double) {
    throw ContractError("evaluator command line has an unterminated quote");
  }
  if (has_token || !current.empty()) {
    args.push_back(current);
  }
  return args;
}

namespace {

void ignore_sigpipe_once() {
  static std::once_flag flag;
  std::call_once(flag, [] { ::signal(SIGPIPE, SIG_IGN); });
}

/// One child process with piped stdin/stdout and deadline-based line reads.
class ChildProcess {
 public:
  explicit ChildProcess(const std::vector<std::string>& command) {
    if (command.empty()) {
      throw ContractError("external evaluator: empty command line");
    }
    ignore_sigpipe_once();
    int to_child[2];
    int from_child[2];
    if (::pipe(to_child) != 0 || ::pipe(from_child) != 0) {
      throw Error("external evaluator: pipe() failed");
    }

    posix_spawn_file_actions_t actions;
    ::posix_spawn_file_actions_init(&actions);
    ::posix_spawn_file_actions_adddup2(&actions, to_child[0], STDIN_FILENO);
    ::posix_spawn_file_actions_adddup2(&actions, from_child[1], STDOUT_FILENO);
    ::posix_spawn_file_actions_addclose(&actions, to_child[0]);
    ::posix_spawn_file_actions_addclose(&actions, to_child[1]);
    ::posix_spawn_file_actions_addclose(&actions, from_child[0]);
    ::posix_spawn_file_actions_addclose(&actions, from_child[1]);

    std::vector<char*> argv;
    argv.reserve(command.size() + 1);
    for (const std::string& arg : command) {
      argv.push_back(const_cast<char*>(arg.c_str()));
    }
    argv.push_back(nullptr);

    const int rc = ::posix_spawnp(&pid_, argv[0], &actions, nullptr, argv.data(), environ);
    ::posix_spawn_file_actions_destroy(&actions);
    ::close(to_child[0]);
    ::close(from_child[1]);
    if (rc != 0) {
      ::close(to_child[1]);
      ::close(from_child[0]);
      pid_ = -1;
      throw Error("external evaluator: cannot spawn '" + command[0] + "': " + std::strerror(rc));
    }
    write_fd_ = to_child[1];
    read_fd_ = from_child[0];
  }

  ~ChildProcess() {
    if (write_fd_ >= 0) {
      ::close(write_fd_);
    }
    if (read_fd_ >= 0) {
      ::close(read_fd_);
    }
    if (pid_ > 0) {
      // Give the child a moment to exit after stdin closed, then insist.
      int status = 0;
      for (int i = 0; i < 50; ++i) {
        const pid_t r = ::waitpid(pid_, &status, WNOHANG);
        if (r == pid_ || r < 0) {
          return;
        }
        ::usleep(10'000);
      }
      ::kill(pid_, SIGKILL);
      ::waitpid(pid_, &status, 0);
    }
  }

  void write_line(const std::string& line) {
    std::string payload = line;
    payload += '\n';
    std::size_t off = 0;
    while (off < payload.size()) {
      const ssize_t n = ::write(write_fd_, payload.data() + off, payload.size() - off);
      if (n < 0) {
        if (errno == EINTR) {
          continue;
        }
        throw ProtocolError(std::string("external evaluator: write failed: ") +
                            std::strerror(errno));
      }
      off += static_cast<std::size_t>(n);
    }
  }

  /// Next full line, waiting at most `timeout_seconds`. Throws ProtocolError
  /// on timeout or child exit.
  std::string read_line(double timeout_seconds) {
    const auto deadline =
        std::chrono::steady_clock::now() + std::chrono::duration<double>(timeout_seconds);
    while (true) {
      const auto newline = buffer_.find('\n');
      if (newline != std::string::npos) {
        std::string line = buffer_.substr(0, newline);
        buffer_.erase(0, newline + 1);
        return line;
      }
      const auto remaining = deadline - std::chrono::steady_clock::now();
      const auto remaining_ms =
          std::chrono::duration_cast<std::chrono::milliseconds>(remaining).count();
      if (remaining_ms <= 0) {
        ::kill(pid_, SIGKILL);
        throw ProtocolError("external evaluator: no response within " +
                            std::to_string(timeout_seconds) + " s");
      }
      struct pollfd pfd{read_fd_, POLLIN, 0};
      const int pr = ::poll(&pfd, 1, static_cast<int>(std::min<long long>(remaining_ms, 1000)));
      if (pr < 0 && errno != EINTR) {
        throw ProtocolError(std::string("external evaluator: poll failed: ") +
                            std::strerror(errno));
      }
      if (pr <= 0) {
        continue;
      }
      char chunk[4096];
      const ssize_t n = ::read(read_fd_, chunk, sizeof(chunk));
      if (n < 0) {
        if (errno == EINTR) {
          continue;
        }
        throw ProtocolError(std::string("external evaluator: read failed: ") +
                            std::strerror(errno));
      }
      if (n == 0) {
        throw ProtocolError("external evaluator: process closed its output stream");
      }
      buffer_.append(chunk, static_cast<std::size_t>(n));
    }
  }

 private:
  pid_t pid_ = -1;
  int write_fd_ = -1;
  int read_fd_ = -1;
  std::string buffer_;
};

}  // namespace

struct ExternalEvaluator::Impl {
  std::vector<std::string> command;
  ModalitySchema schema;
  ExternalEvaluatorOptions options;
  mutable std::mutex mutex;
  mutable std::unique_ptr<ChildProcess> child;
  mutable std::uint64_t next_request_id = 1;
  /// request content hash -> previous answer, for purity cross-checks.
  mutable std::map<std::uint64_t, std::vector<int>> seen;
  mutable long purity_violations = 0;

  void handshake() const {
    ordered_json hello;
    hello["type"] = "hello";
    hello["version"] = kProtocolVersion;
    const json schema_doc = schema_to_json(schema);
    hello["schema"] = schema_doc["schema"];
    hello["num_classes"] = schema.num_classes();
    child->write_line(hello.dump());
    const std::string line = child->read_line(options.timeout_seconds);
    json reply;
    try {
      reply = json::parse(line);
    } catch (const json::exception& e) {
      throw ProtocolError(std::string("external evaluator: handshake reply is not JSON: ") +
                          e.what());
    }
    if (!reply.contains("type") || reply["type"] != "ready") {
      throw ProtocolError("external evaluator: expected {\"type\":\"ready\"}, got: " + line);
    }
  }
};

ExternalEvaluator::ExternalEvaluator(std::vector<std::string> command,
                                     const ModalitySchema& schema,
                                     const ExternalEvaluatorOptions& options)
    : impl_(std::make_unique<Impl>()) {
  impl_->command = std::move(command);
  impl_->schema = schema;
  impl_->options = options;
  impl_->child = std::make_unique<ChildProcess>(impl_->command);
  impl_->handshake();
}

ExternalEvaluator::~ExternalEvaluator() = default;

std::string ExternalEvaluator::name() const {
  std::string joined;
  for (const std::string& arg : impl_->command) {
    if (!joined.empty()) {
      joined += ' ';
    }
    joined += arg;
  }
  return "external:" + joined;
}

long ExternalEvaluator::purity_violations() const {
  std::lock_guard<std::mutex> lock(impl_->mutex);
  return impl_->purity_violations;
}

std::vector<int> ExternalEvaluator::predict(const Dataset& inputs,
                                            const CoalitionMask& coalition) const {
  std::lock_guard<std::mutex> lock(impl_->mutex);
  const std::uint64_t request_id = impl_->next_request_id++;

  ordered_json request;
  request["type"] = "predict";
  request["request_id"] = request_id;
  json coalition_ids = json::array();
  for (const Modality& m : impl_->schema.modalities()) {
    if (coalition.contains(m.id)) {
      coalition_ids.push_back(m.id);
    }
  }
  request["coalition"] = std::move(coalition_ids);
  json samples = json::array();
  for (const Sample& s : inputs.samples) {
    samples.push_back({{"features", features_to_json(s)}});
  }
  request["samples"] = std::move(samples);
  const std::string payload = request.dump();

  // Content hash ignores the request id, so identical payloads can be
  // compared across calls.
  ordered_json keyed = request;
  keyed.erase("request_id");
  const std::uint64_t content_hash = fnv1a(keyed.dump());

  impl_->child->write_line(payload);
  const std::string line = impl_->child->read_line(impl_->options.timeout_seconds);
  json reply;
  try {
    reply = json::parse(line);
  } catch (const json::exception& e) {
    throw ProtocolError(std::string("external evaluator: response is not JSON: ") + e.what());
  }
  if (!reply.contains("type") || reply["type"] != "predictions") {
    throw ProtocolError("external evaluator: expected a 'predictions' message");
  }
  if (!reply.contains("request_id") || !reply["request_id"].is_number_integer() ||
      reply["request_id"].get<std::uint64_t>() != request_id) {
    throw ProtocolError("external evaluator: response request_id does not match");
  }
  if (!reply.contains("labels") || !reply["labels"].is_array()) {
    throw ProtocolError("external evaluator: response lacks a 'labels' array");
  }
  std::vector<int> predictions;
  predictions.reserve(reply["labels"].size());
  for (const json& v : reply["labels"]) {
    if (!v.is_number_integer()) {
      throw ProtocolError("external evaluator: non-integer prediction in response");
    }
    predictions.push_back(v.get<int>());
  }
  if (predictions.size() != inputs.samples.size()) {
    throw ProtocolError("external evaluator: got " + std::to_string(predictions.size()) +
                        " predictions for " + std::to_string(inputs.samples.size()) + " samples");
  }
  for (int p : predictions) {
    if (p < 0 || p >= impl_->schema.num_classes()) {
      throw ProtocolError("external evaluator: prediction " + std::to_string(p) +
                          " outside [0, " + std::to_string(impl_->schema.num_classes()) + ")");
    }
  }

  const auto [it, inserted] = impl_->seen.emplace(content_hash, predictions);
  if (!inserted && it->second != predictions) {
    ++impl_->purity_violations;
  }
  return predictions;
}

void serve_protocol(std::istream& in, std::ostream& out, const ModalitySchema& schema,
                    const std::function<std::vector<int>(const Dataset&)>& predict) {
  std::string line;
  bool ready = false;
  while (std::getline(in, line)) {
    if (line.empty()) {
      continue;
    }
    json message;
    try {
      message = json::parse(line);
    } catch (const json::exception& e) {
      throw ProtocolError(std::string("protocol: received invalid JSON: ") + e.what());
    }
    const std::string type = message.value("type", "");
    if (type == "hello") {
      if (message.value("version", -1) != kProtocolVersion) {
        throw ProtocolError("protocol: unsupported version");
      }
      const ModalitySchema offered = schema_from_json(message);
      if (!(offered == schema)) {
        throw ProtocolError("protocol: offered schema differs from the model's schema");
      }
      out << ordered_json{{"type", "ready"}}.dump() << '\n' << std::flush;
      ready = true;
    } else if (type == "predict") {
      if (!ready) {
        throw ProtocolError("protocol: 'predict' before 'hello'");
      }
      if (!message.contains("request_id") || !message.contains("samples") ||
          !message["samples"].is_array()) {
        throw ProtocolError("protocol: malformed 'predict' request");
      }
      Dataset batch;
      batch.schema = schema;
      for (const json& record : message["samples"]) {
        Sample s;
        s.label = 0;  // labels are never on the wire; models must not need them
        if (!record.contains("features") || !record["features"].is_object()) {
          throw ProtocolError("protocol: sample lacks a 'features' object");
        }
        for (const auto& [id, values] : record["features"].items()) {
          s.features[id] = values.get<std::vector<double>>();
        }
        batch.samples.push_back(std::move(s));
      }
      batch = validate_dataset(std::move(batch));
      const std::vector<int> predictions = predict(batch);
      ordered_json reply;
      reply["type"] = "predictions";
      reply["request_id"] = message["request_id"];
      reply["labels"] = predictions;
      out << reply.dump() << '\n' << std::flush;
    } else {
      throw ProtocolError("protocol: unknown message type '" + type + "'");
    }
  }
}

}  // namespace mmscore
