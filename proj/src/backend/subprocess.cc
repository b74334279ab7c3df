// Copyright 2026 The CohGym Authors.
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

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <thread>

#include "cohgym/backend/backend.h"
#include "cohgym/backend/protocol.h"
#include "cohgym/error.h"

extern char** environ;

namespace cohgym {

namespace {

void CloseFd(int& fd) {
  if (fd >= 0) {
    ::close(fd);
    fd = -1;
  }
}

std::string DescribeStatus(int status) {
  if (WIFEXITED(status)) {
    return "exited with status " + std::to_string(WEXITSTATUS(status));
  }
  if (WIFSIGNALED(status)) {
    return "killed by signal " + std::to_string(WTERMSIG(status));
  }
  return "stopped";
}

}  // namespace

SubprocessBackend::SubprocessBackend(std::string command,
                                     std::chrono::milliseconds timeout)
    : command_(std::move(command)), timeout_(timeout) {
  // A dead child must surface as EPIPE on write, not kill the engine.
  ::signal(SIGPIPE, SIG_IGN);

  int in_pipe[2];
  int out_pipe[2];
  if (::pipe2(in_pipe, O_CLOEXEC) != 0) {
    throw IoError(std::string("pipe: ") + std::strerror(errno));
  }
  if (::pipe2(out_pipe, O_CLOEXEC) != 0) {
    ::close(in_pipe[0]);
    ::close(in_pipe[1]);
    throw IoError(std::string("pipe: ") + std::strerror(errno));
  }

  posix_spawn_file_actions_t actions;
  posix_spawn_file_actions_init(&actions);
  posix_spawn_file_actions_adddup2(&actions, in_pipe[0], STDIN_FILENO);
  posix_spawn_file_actions_adddup2(&actions, out_pipe[1], STDOUT_FILENO);

  // Own process group, so teardown also reaches anything the shell starts.
  posix_spawnattr_t attr;
  posix_spawnattr_init(&attr);
  posix_spawnattr_setflags(&attr, POSIX_SPAWN_SETPGROUP);
  posix_spawnattr_setpgroup(&attr, 0);

  const char* argv[] = {"/bin/sh", "-c", command_.c_str(), nullptr};
  pid_t pid = -1;
  const int rc = ::posix_spawn(&pid, "/bin/sh", &actions, &attr,
                               const_cast<char* const*>(argv), environ);
  posix_spawnattr_destroy(&attr);
  posix_spawn_file_actions_destroy(&actions);
  ::close(in_pipe[0]);
  ::close(out_pipe[1]);
  if (rc != 0) {
    ::close(in_pipe[1]);
    ::close(out_pipe[0]);
    throw IoError("cannot launch backend '" + command_ +
                  "': " + std::strerror(rc));
  }
  pid_ = pid;
  to_child_ = in_pipe[1];
  from_child_ = out_pipe[0];
}

SubprocessBackend::~SubprocessBackend() {
  CloseFd(to_child_);
  CloseFd(from_child_);
  if (pid_ <= 0) return;
  int status = 0;
  // Closing stdin asks the backend to exit; give it a moment, then insist.
  for (int i = 0; i < 50; ++i) {
    if (::waitpid(pid_, &status, WNOHANG) == pid_) break;
    std::this_thread::sleep_for(std::chrono::milliseconds(10));
  }
  ::kill(-pid_, SIGKILL);
  ::waitpid(pid_, &status, 0);
}

void SubprocessBackend::ThrowCrashed(const std::string& what) {
  CloseFd(to_child_);
  CloseFd(from_child_);
  std::string exit_info = "still running";
  int status = 0;
  for (int i = 0; i < 100 && pid_ > 0; ++i) {
    if (::waitpid(pid_, &status, WNOHANG) == pid_) {
      exit_info = DescribeStatus(status);
      ::kill(-pid_, SIGKILL);  // stragglers started by the shell
      pid_ = -1;
      break;
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(5));
  }
  throw BackendCrashed("backend '" + command_ + "' " + what + " (" +
                       exit_info + ")");
}

void SubprocessBackend::WriteLine(const std::string& line) {
  if (to_child_ < 0) ThrowCrashed("is no longer running");
  std::string data = line + '\n';
  std::size_t written = 0;
  while (written < data.size()) {
    const ssize_t n =
        ::write(to_child_, data.data() + written, data.size() - written);
    if (n < 0) {
      if (errno == EINTR) continue;
      ThrowCrashed("closed its input");
    }
    written += static_cast<std::size_t>(n);
  }
}

std::string SubprocessBackend::ReadLine() {
  const auto deadline = std::chrono::steady_clock::now() + timeout_;
  for (;;) {
    if (auto nl = buffer_.find('\n'); nl != std::string::npos) {
      std::string line = buffer_.substr(0, nl);
      buffer_.erase(0, nl + 1);
      ++line_;
      return line;
    }
    if (from_child_ < 0) ThrowCrashed("is no longer running");
    const auto remaining = std::chrono::duration_cast<std::chrono::milliseconds>(
        deadline - std::chrono::steady_clock::now());
    if (remaining.count() <= 0) {
      throw Timeout("backend '" + command_ + "' did not answer within " +
                    std::to_string(timeout_.count()) + " ms");
    }
    pollfd pfd{from_child_, POLLIN, 0};
    const int rc = ::poll(&pfd, 1, static_cast<int>(remaining.count()));
    if (rc < 0) {
      if (errno == EINTR) continue;
      throw IoError(std::string("poll: ") + std::strerror(errno));
    }
    if (rc == 0) continue;
    char chunk[65536];
    const ssize_t n = ::read(from_child_, chunk, sizeof(chunk));
    if (n < 0) {
      if (errno == EINTR) continue;
      ThrowCrashed(std::string("read failed: ") + std::strerror(errno));
    }
    if (n == 0) ThrowCrashed("closed its output");
    buffer_.append(chunk, static_cast<std::size_t>(n));
  }
}

BackendInfo SubprocessBackend::DoHandshake() {
  WriteLine(protocol::EncodeInfoRequest());
  return protocol::DecodeInfoResponse(ReadLine(), line_);
}

ScoredSequence SubprocessBackend::DoScore(const ScoreRequest& request) {
  WriteLine(protocol::EncodeScoreRequest(request));
  return protocol::DecodeScoresResponse(ReadLine(), request.id, line_);
}

}  // namespace cohgym
