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

#include "diffabm/behavior/provider.h"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cmath>
#include <iostream>

#include "diffabm/autodiff/scalar.h"
#include "diffabm/core/errors.h"
#include "json.hpp"

namespace diffabm::behavior {
namespace {

using json = nlohmann::json;

constexpr uint32_t kExternalTag = StreamTag("behavior.external");

}  // namespace

double LogisticStubProvider::Score(const ArchetypeContext& context,
                                   const EnvSummary& env) const {
  double score = config_.bias;
  for (const auto& [name, weight] : config_.feature_weights) {
    auto it = context.features.find(name);
    if (it != context.features.end()) score += weight * it->second;
  }
  score += config_.case_weight * std::log1p(std::max(0.0, env.cases));
  for (const auto& [name, weight] : config_.flag_weights) {
    auto it = env.flags.find(name);
    if (it != env.flags.end()) score += weight * it->second;
  }
  return score;
}

int LogisticStubProvider::Sample(const ArchetypeContext& context,
                                 const EnvSummary& env, CounterRng& rng) {
  if (context.options.size() != 2) {
    Fail(ErrorKind::kConfig, "logistic stub handles two-option actions only; '" +
                                 context.action + "' has " +
                                 std::to_string(context.options.size()));
  }
  double score = Score(context, env);
  if (config_.noise_scale > 0.0) score += config_.noise_scale * rng.Normal();
  return rng.Uniform() < ad::StableSigmoid(score) ? 1 : 0;
}

std::string ExternalProvider::EncodeRequest(const ArchetypeContext& context,
                                            const EnvSummary& env,
                                            uint64_t seed) {
  json request = {
      {"type", "sample"},
      {"archetype", {{"id", context.archetype_id},
                     {"name", context.archetype_name},
                     {"features", context.features},
                     {"members", context.member_count}}},
      {"action", context.action},
      {"options", context.options},
      {"env", {{"step", env.step}, {"cases", env.cases}, {"flags", env.flags}}},
      {"seed", std::to_string(seed)},
  };
  return request.dump();
}

std::optional<int> ExternalProvider::DecodeResponse(const std::string& line,
                                                    std::size_t num_options) {
  const json response = json::parse(line, nullptr, false);
  if (response.is_discarded() || !response.is_object()) return std::nullopt;
  auto it = response.find("option");
  if (it == response.end() || !it->is_number_integer()) return std::nullopt;
  const int option = it->get<int>();
  if (option < 0 || static_cast<std::size_t>(option) >= num_options) {
    return std::nullopt;
  }
  return option;
}

int ExternalProvider::Sample(const ArchetypeContext& context,
                             const EnvSummary& env, CounterRng& rng) {
  const std::string request = EncodeRequest(context, env, rng.NextU64());
  for (int attempt = 0; attempt < options_.max_attempts; ++attempt) {
    const auto line = transport_.Exchange(request, options_.timeout);
    if (line) {
      if (auto option = DecodeResponse(*line, context.options.size())) {
        return *option;
      }
    }
    ++failed_attempts_;
  }
  Fail(ErrorKind::kProvider,
       "behavior provider failed " + std::to_string(options_.max_attempts) +
           " times for archetype '" + context.archetype_name + "', action '" +
           context.action + "'");
}

void ServeLineProtocol(BehaviorProvider& provider, std::istream& in,
                       std::ostream& out) {
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    json response;
    const json request = json::parse(line, nullptr, false);
    try {
      if (request.is_discarded()) {
        Fail(ErrorKind::kProvider, "request is not valid JSON");
      }
      ArchetypeContext context;
      const json& a = request.at("archetype");
      context.archetype_id = a.at("id").get<int>();
      context.archetype_name = a.at("name").get<std::string>();
      context.features = a.at("features").get<std::map<std::string, double>>();
      context.member_count = a.at("members").get<std::size_t>();
      context.action = request.at("action").get<std::string>();
      context.options = request.at("options").get<std::vector<std::string>>();
      EnvSummary env;
      const json& e = request.at("env");
      env.step = e.at("step").get<int64_t>();
      env.cases = e.at("cases").get<double>();
      env.flags = e.at("flags").get<std::map<std::string, double>>();
      const uint64_t seed =
          std::stoull(request.at("seed").get<std::string>());
      CounterRng rng(seed, StreamKey{0, 0, kExternalTag});
      response = {{"option", provider.Sample(context, env, rng)}};
    } catch (const std::exception& err) {
      response = {{"error", err.what()}};
    }
    out << response.dump() << '\n' << std::flush;
  }
}

SubprocessTransport::SubprocessTransport(std::vector<std::string> argv)
    : argv_(std::move(argv)) {
  if (argv_.empty()) Fail(ErrorKind::kConfig, "provider command is empty");
}

SubprocessTransport::~SubprocessTransport() { Stop(); }

void SubprocessTransport::Start() {
  signal(SIGPIPE, SIG_IGN);
  int in_pipe[2], out_pipe[2];
  if (pipe(in_pipe) != 0 || pipe(out_pipe) != 0) {
    Fail(ErrorKind::kIo, "cannot create provider pipes");
  }
  const pid_t pid = fork();
  if (pid < 0) Fail(ErrorKind::kIo, "cannot fork provider process");
  if (pid == 0) {
    dup2(in_pipe[0], STDIN_FILENO);
    dup2(out_pipe[1], STDOUT_FILENO);
    close(in_pipe[0]);
    close(in_pipe[1]);
    close(out_pipe[0]);
    close(out_pipe[1]);
    std::vector<char*> args;
    for (auto& s : argv_) args.push_back(s.data());
    args.push_back(nullptr);
    execvp(args[0], args.data());
    _exit(127);
  }
  close(in_pipe[0]);
  close(out_pipe[1]);
  pid_ = pid;
  to_child_ = in_pipe[1];
  from_child_ = out_pipe[0];
  buffer_.clear();
}

void SubprocessTransport::Stop() {
  if (pid_ < 0) return;
  close(to_child_);
  close(from_child_);
  kill(pid_, SIGKILL);
  waitpid(pid_, nullptr, 0);
  pid_ = -1;
}

std::optional<std::string> SubprocessTransport::Exchange(
    const std::string& request, std::chrono::milliseconds timeout) {
  if (pid_ < 0) Start();
  const std::string line = request + "\n";
  std::size_t written = 0;
  while (written < line.size()) {
    const ssize_t n =
        write(to_child_, line.data() + written, line.size() - written);
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) {
      Stop();
      return std::nullopt;
    }
    written += static_cast<std::size_t>(n);
  }
  const auto deadline = std::chrono::steady_clock::now() + timeout;
  while (true) {
    const auto newline = buffer_.find('\n');
    if (newline != std::string::npos) {
      std::string response = buffer_.substr(0, newline);
      buffer_.erase(0, newline + 1);
      return response;
    }
    const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
        deadline - std::chrono::steady_clock::now());
    if (left.count() <= 0) {
      Stop();
      return std::nullopt;
    }
    pollfd pfd{from_child_, POLLIN, 0};
    const int ready = poll(&pfd, 1, static_cast<int>(left.count()));
    if (ready < 0 && errno == EINTR) continue;
    if (ready <= 0) {
      Stop();
      return std::nullopt;
    }
    char chunk[4096];
    const ssize_t n = read(from_child_, chunk, sizeof(chunk));
    if (n <= 0) {
      Stop();
      return std::nullopt;
    }
    buffer_.append(chunk, static_cast<std::size_t>(n));
  }
}

}  // namespace diffabm::behavior
