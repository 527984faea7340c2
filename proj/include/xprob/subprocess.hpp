// Copyright 2026 The Authors.
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

// External classifiers spoken to over newline-delimited JSON on a child
// process's stdin/stdout.
//
//   child -> engine (once, at startup):  {"classes": <int>}\n
//   engine -> child:  {"id": <uint64>, "texts": ["...", ...]}\n
//   child -> engine:  {"id": <same>, "probs": [[p0, p1, ...], ...]}\n
//
// Rows of "probs" align with "texts". Rows whose sum is off by more than
// 1e-6 but at most 1e-3 are renormalized with a warning; larger drift is an
// error. One child serves a whole session and requests are serialized.

#ifndef XPROB_SUBPROCESS_HPP_
#define XPROB_SUBPROCESS_HPP_

#include <poll.h>
#include <signal.h>
#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <cstring>
#include <functional>
#include <iostream>
#include <mutex>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "xprob/blackbox.hpp"
#include "xprob/text.hpp"

namespace xprob {

class ClassifierUnavailable : public ClassifierError {
 public:
  ClassifierUnavailable(const std::string& what, std::uint64_t batch_id)
      : ClassifierError(what), batch_id_(batch_id) {}
  std::uint64_t batch_id() const { return batch_id_; }

 private:
  std::uint64_t batch_id_;
};

class ExternalClassifier final : public Classifier {
 public:
  struct Options {
    double timeout_seconds = 30.0;
    // Called once per renormalized row; defaults to a line on stderr.
    std::function<void(const std::string&)> on_warning;

    // Honors XPROB_TIMEOUT_SECS when set to a positive number.
    static Options FromEnvironment() {
      Options opts;
      if (const char* env = std::getenv("XPROB_TIMEOUT_SECS")) {
        char* end = nullptr;
        const double v = std::strtod(env, &end);
        if (end != env && v > 0.0) opts.timeout_seconds = v;
      }
      return opts;
    }
  };

  static constexpr double kSilentTolerance = 1e-6;
  static constexpr double kRenormalizeTolerance = 1e-3;

  ExternalClassifier(std::string command, Options options)
      : command_(std::move(command)), options_(std::move(options)) {
    Spawn();
    const std::string line = ReadLine(0);
    nlohmann::json hello;
    try {
      hello = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      Terminate();
      throw ClassifierUnavailable("bad handshake from '" + command_ +
                                      "': " + e.what(),
                                  0);
    }
    if (!hello.contains("classes") || !hello["classes"].is_number_integer() ||
        hello["classes"].get<int>() < 2) {
      Terminate();
      throw ClassifierUnavailable(
          "handshake must be {\"classes\": <int >= 2>}, got " + line, 0);
    }
    classes_ = hello["classes"].get<int>();
  }

  explicit ExternalClassifier(std::string command)
      : ExternalClassifier(std::move(command), Options::FromEnvironment()) {}

  ExternalClassifier(const ExternalClassifier&) = delete;
  ExternalClassifier& operator=(const ExternalClassifier&) = delete;

  ~ExternalClassifier() override { Terminate(); }

  int class_count() const override { return classes_; }
  std::string descriptor() const override { return "cmd:" + command_; }

  std::vector<Prediction> classify_batch(
      std::span<const TokenSeq> texts) override {
    if (texts.empty()) return {};
    std::lock_guard<std::mutex> lock(mu_);
    const std::uint64_t id = ++next_id_;
    if (pid_ <= 0) {
      throw ClassifierUnavailable("external classifier is not running", id);
    }

    nlohmann::json request;
    request["id"] = id;
    auto& arr = request["texts"] = nlohmann::json::array();
    for (const auto& t : texts) arr.push_back(join(t));
    WriteAll(request.dump() + "\n", id);

    const std::string line = ReadLine(id);
    nlohmann::json response;
    try {
      response = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw ClassifierUnavailable(
          "malformed response to batch " + std::to_string(id) + ": " + e.what(),
          id);
    }
    if (!response.contains("id") || !response["id"].is_number_unsigned() ||
        response["id"].get<std::uint64_t>() != id) {
      ++id_mismatches_;
      throw ClassifierUnavailable(
          "response id mismatch for batch " + std::to_string(id), id);
    }
    const auto& probs = response.value("probs", nlohmann::json());
    if (!probs.is_array() || probs.size() != texts.size()) {
      throw ClassifierUnavailable("batch " + std::to_string(id) +
                                      ": probs must have one row per text",
                                  id);
    }
    std::vector<Prediction> out;
    out.reserve(texts.size());
    for (std::size_t r = 0; r < probs.size(); ++r) {
      out.push_back(ParseRow(probs[r], id, r));
    }
    return out;
  }

  std::size_t renormalization_warnings() const {
    std::lock_guard<std::mutex> lock(mu_);
    return warnings_;
  }
  std::size_t id_mismatches() const {
    std::lock_guard<std::mutex> lock(mu_);
    return id_mismatches_;
  }

 private:
  Prediction ParseRow(const nlohmann::json& row, std::uint64_t id,
                      std::size_t r) {
    const std::string where =
        "batch " + std::to_string(id) + " row " + std::to_string(r);
    if (!row.is_array() || static_cast<int>(row.size()) != classes_) {
      throw ClassifierUnavailable(where + ": expected " +
                                      std::to_string(classes_) + " classes",
                                  id);
    }
    Prediction p;
    double sum = 0.0;
    for (const auto& v : row) {
      if (!v.is_number()) {
        throw ClassifierUnavailable(where + ": non-numeric probability", id);
      }
      const double x = v.get<double>();
      if (!std::isfinite(x) || x < 0.0 || x > 1.0) {
        throw ClassifierUnavailable(where + ": probability out of [0, 1]", id);
      }
      p.probs.push_back(x);
      sum += x;
    }
    const double drift = std::fabs(sum - 1.0);
    if (drift > kRenormalizeTolerance) {
      throw ClassifierUnavailable(
          where + ": probabilities sum to " + std::to_string(sum), id);
    }
    if (drift > kSilentTolerance) {
      for (double& x : p.probs) x /= sum;
      ++warnings_;
      const std::string msg =
          where + ": renormalized probabilities summing to " +
          std::to_string(sum);
      if (options_.on_warning) {
        options_.on_warning(msg);
      } else {
        std::cerr << "warning: " << msg << '\n';
      }
    }
    return p;
  }

  void Spawn() {
    // A dead child must surface as an error, not kill the engine.
    ::signal(SIGPIPE, SIG_IGN);
    int to_child[2], from_child[2];
    if (::pipe(to_child) != 0) {
      throw ClassifierUnavailable("pipe() failed: " +
                                      std::string(std::strerror(errno)),
                                  0);
    }
    if (::pipe(from_child) != 0) {
      ::close(to_child[0]);
      ::close(to_child[1]);
      throw ClassifierUnavailable("pipe() failed: " +
                                      std::string(std::strerror(errno)),
                                  0);
    }
    const pid_t pid = ::fork();
    if (pid < 0) {
      throw ClassifierUnavailable("fork() failed", 0);
    }
    if (pid == 0) {
      // Own process group, so teardown reaches commands the shell forks.
      ::setpgid(0, 0);
      ::dup2(to_child[0], STDIN_FILENO);
      ::dup2(from_child[1], STDOUT_FILENO);
      ::close(to_child[0]);
      ::close(to_child[1]);
      ::close(from_child[0]);
      ::close(from_child[1]);
      ::execl("/bin/sh", "sh", "-c", command_.c_str(),
              static_cast<char*>(nullptr));
      ::_exit(127);
    }
    ::setpgid(pid, pid);
    ::close(to_child[0]);
    ::close(from_child[1]);
    pid_ = pid;
    write_fd_ = to_child[1];
    read_fd_ = from_child[0];
  }

  void Terminate() {
    if (write_fd_ >= 0) {
      ::close(write_fd_);
      write_fd_ = -1;
    }
    if (read_fd_ >= 0) {
      ::close(read_fd_);
      read_fd_ = -1;
    }
    if (pid_ > 0) {
      int status = 0;
      // Give the child a moment to exit on EOF before killing it.
      for (int i = 0; i < 50; ++i) {
        if (::waitpid(pid_, &status, WNOHANG) == pid_) {
          pid_ = -1;
          return;
        }
        ::usleep(2000);
      }
      ::kill(-pid_, SIGKILL);
      ::waitpid(pid_, &status, 0);
      pid_ = -1;
    }
  }

  void WriteAll(const std::string& data, std::uint64_t id) {
    std::size_t off = 0;
    while (off < data.size()) {
      const ssize_t n = ::write(write_fd_, data.data() + off, data.size() - off);
      if (n < 0) {
        if (errno == EINTR) continue;
        Terminate();
        throw ClassifierUnavailable("external classifier closed its input "
                                    "while sending batch " +
                                        std::to_string(id),
                                    id);
      }
      off += static_cast<std::size_t>(n);
    }
  }

  std::string ReadLine(std::uint64_t id) {
    using Clock = std::chrono::steady_clock;
    const auto deadline =
        Clock::now() + std::chrono::duration_cast<Clock::duration>(
                           std::chrono::duration<double>(options_.timeout_seconds));
    for (;;) {
      const auto nl = buffer_.find('\n');
      if (nl != std::string::npos) {
        std::string line = buffer_.substr(0, nl);
        buffer_.erase(0, nl + 1);
        return line;
      }
      const auto remaining = std::chrono::duration_cast<std::chrono::milliseconds>(
          deadline - Clock::now());
      if (remaining.count() <= 0) {
        Terminate();
        throw ClassifierUnavailable(
            "timed out waiting for batch " + std::to_string(id), id);
      }
      pollfd pfd{read_fd_, POLLIN, 0};
      const int rc = ::poll(&pfd, 1, static_cast<int>(remaining.count()));
      if (rc < 0) {
        if (errno == EINTR) continue;
        Terminate();
        throw ClassifierUnavailable("poll() failed on batch " +
                                        std::to_string(id),
                                    id);
      }
      if (rc == 0) continue;
      char chunk[65536];
      const ssize_t n = ::read(read_fd_, chunk, sizeof(chunk));
      if (n < 0 && errno == EINTR) continue;
      if (n <= 0) {
        Terminate();
        throw ClassifierUnavailable(
            "external classifier exited during batch " + std::to_string(id),
            id);
      }
      buffer_.append(chunk, static_cast<std::size_t>(n));
    }
  }

  std::string command_;
  Options options_;
  int classes_ = 0;
  pid_t pid_ = -1;
  int write_fd_ = -1;
  int read_fd_ = -1;
  std::string buffer_;
  std::uint64_t next_id_ = 0;
  mutable std::mutex mu_;
  std::size_t warnings_ = 0;
  std::size_t id_mismatches_ = 0;
};

}  // namespace xprob

#endif  // XPROB_SUBPROCESS_HPP_
