// Copyright 2026 The DiffABM Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef DIFFABM_BEHAVIOR_PROVIDER_H_
#define DIFFABM_BEHAVIOR_PROVIDER_H_

#include <chrono>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "diffabm/core/rng.h"

namespace diffabm::behavior {

// What a provider is told about the archetype being queried.
struct ArchetypeContext {
  int archetype_id = 0;
  std::string archetype_name;
  std::map<std::string, double> features;
  std::size_t member_count = 0;
  std::string action;
  std::vector<std::string> options;
};

// Fixed environment schema shared with every provider.
struct EnvSummary {
  int64_t step = 0;
  double cases = 0.0;
  std::map<std::string, double> flags;  // intervention flags, e.g. stimulus
};

// Decision function queried once per (archetype, action, sample). Must be a
// pure function of its inputs and the stream it is handed.
class BehaviorProvider {
 public:
  virtual ~BehaviorProvider() = default;
  // Index into context.options. Throws kProvider on failure.
  virtual int Sample(const ArchetypeContext& context, const EnvSummary& env,
                     CounterRng& rng) = 0;
};

// Forwards to another provider and counts invocations.
class CountingProvider : public BehaviorProvider {
 public:
  explicit CountingProvider(BehaviorProvider& inner) : inner_(inner) {}
  int Sample(const ArchetypeContext& context, const EnvSummary& env,
             CounterRng& rng) override {
    ++queries_;
    return inner_.Sample(context, env, rng);
  }
  uint64_t queries() const { return queries_; }
  void Reset() { queries_ = 0; }

 private:
  BehaviorProvider& inner_;
  uint64_t queries_ = 0;
};

struct LogisticStubConfig {
  double bias = 0.0;
  std::map<std::string, double> feature_weights;
  double case_weight = 0.0;      // multiplies log1p(cases)
  std::map<std::string, double> flag_weights;
  double noise_scale = 0.0;      // std of Gaussian noise added to the score
};

// Binary decisions only: the second option is chosen with probability
// sigmoid(score), where score = bias + w.features + case_weight *
// log1p(cases) + flag terms + noise_scale * N(0, 1).
class LogisticStubProvider : public BehaviorProvider {
 public:
  explicit LogisticStubProvider(LogisticStubConfig config)
      : config_(std::move(config)) {}
  int Sample(const ArchetypeContext& context, const EnvSummary& env,
             CounterRng& rng) override;
  double Score(const ArchetypeContext& context, const EnvSummary& env) const;

 private:
  LogisticStubConfig config_;
};

// Always returns the same option.
class ConstantProvider : public BehaviorProvider {
 public:
  explicit ConstantProvider(int option) : option_(option) {}
  int Sample(const ArchetypeContext&, const EnvSummary&, CounterRng&) override {
    return option_;
  }

 private:
  int option_;
};

// One request/response exchange of the line protocol. Returns nullopt on
// timeout or broken connection.
class LineTransport {
 public:
  virtual ~LineTransport() = default;
  virtual std::optional<std::string> Exchange(
      const std::string& request, std::chrono::milliseconds timeout) = 0;
};

// Calls a function in-process; used by tests and for fault injection.
class InProcessTransport : public LineTransport {
 public:
  using Handler = std::function<std::optional<std::string>(const std::string&)>;
  explicit InProcessTransport(Handler handler) : handler_(std::move(handler)) {}
  std::optional<std::string> Exchange(const std::string& request,
                                      std::chrono::milliseconds) override {
    return handler_(request);
  }

 private:
  Handler handler_;
};

// Talks to a child process over its stdin/stdout, one line each way.
class SubprocessTransport : public LineTransport {
 public:
  explicit SubprocessTransport(std::vector<std::string> argv);
  ~SubprocessTransport() override;
  SubprocessTransport(const SubprocessTransport&) = delete;
  SubprocessTransport& operator=(const SubprocessTransport&) = delete;

  std::optional<std::string> Exchange(
      const std::string& request, std::chrono::milliseconds timeout) override;

 private:
  void Start();
  void Stop();

  std::vector<std::string> argv_;
  int pid_ = -1;
  int to_child_ = -1;
  int from_child_ = -1;
  std::string buffer_;
};

struct ExternalProviderOptions {
  std::chrono::milliseconds timeout{2000};
  int max_attempts = 3;
};

// Adapter for an out-of-process decision function speaking the line
// protocol (one JSON object per line, see docs/behavior_protocol.md).
class ExternalProvider : public BehaviorProvider {
 public:
  ExternalProvider(LineTransport& transport, ExternalProviderOptions options)
      : transport_(transport), options_(options) {}
  int Sample(const ArchetypeContext& context, const EnvSummary& env,
             CounterRng& rng) override;

  uint64_t failed_attempts() const { return failed_attempts_; }

  static std::string EncodeRequest(const ArchetypeContext& context,
                                   const EnvSummary& env, uint64_t seed);
  // Option index, or nullopt for a malformed or error response.
  static std::optional<int> DecodeResponse(const std::string& line,
                                           std::size_t num_options);

 private:
  LineTransport& transport_;
  ExternalProviderOptions options_;
  uint64_t failed_attempts_ = 0;
};

// Serves the line protocol with `provider` until `in` ends. Used by the
// behavior server tool.
void ServeLineProtocol(BehaviorProvider& provider, std::istream& in,
                       std::ostream& out);

}  // namespace diffabm::behavior

#endif  // DIFFABM_BEHAVIOR_PROVIDER_H_
