// Client side of the newline-delimited JSON model protocol:
//   -> {"op":"hello"}                  <- {"op":"hello","m":M}
//   -> {"op":"predict","x":[[...],..]} <- {"op":"predict","y":[...]}
//   -> {"op":"shutdown"}               <- process exits 0

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <mutex>
#include <thread>

#include "anomattr/errors.hpp"
#include "anomattr/model.hpp"
#include "json.hpp"

namespace anomattr {

namespace {

using json = nlohmann::json;
using Clock = std::chrono::steady_clock;

constexpr std::size_t kMaxBatch = 4096;

class ChildProcess {
 public:
  explicit ChildProcess(const std::string& cmd) {
    // A dead child must surface as EPIPE, not kill the caller.
    ::signal(SIGPIPE, SIG_IGN);
    int to_child[2];
    int from_child[2];
    if (::pipe(to_child) != 0) throw ModelError("pipe: " + std::string(std::strerror(errno)));
    if (::pipe(from_child) != 0) {
      ::close(to_child[0]);
      ::close(to_child[1]);
      throw ModelError("pipe: " + std::string(std::strerror(errno)));
    }
    pid_ = ::fork();
    if (pid_ < 0) {
      for (int fd : {to_child[0], to_child[1], from_child[0], from_child[1]}) ::close(fd);
      throw ModelError("fork: " + std::string(std::strerror(errno)));
    }
    if (pid_ == 0) {
      // Own process group, so a kill also reaches whatever the shell spawned.
      ::setpgid(0, 0);
      ::dup2(to_child[0], STDIN_FILENO);
      ::dup2(from_child[1], STDOUT_FILENO);
      for (int fd : {to_child[0], to_child[1], from_child[0], from_child[1]}) ::close(fd);
      ::execl("/bin/sh", "sh", "-c", cmd.c_str(), static_cast<char*>(nullptr));
      ::_exit(127);
    }
    ::setpgid(pid_, pid_);
    ::close(to_child[0]);
    ::close(from_child[1]);
    in_fd_ = to_child[1];
    out_fd_ = from_child[0];
    ::fcntl(in_fd_, F_SETFD, FD_CLOEXEC);
    ::fcntl(out_fd_, F_SETFD, FD_CLOEXEC);
  }

  ChildProcess(const ChildProcess&) = delete;
  ChildProcess& operator=(const ChildProcess&) = delete;

  ~ChildProcess() { terminate(std::chrono::milliseconds(2000)); }

  void write_line(const std::string& line) {
    std::string buf = line + "\n";
    const char* p = buf.data();
    std::size_t left = buf.size();
    while (left > 0) {
      const ssize_t n = ::write(in_fd_, p, left);
      if (n < 0) {
        if (errno == EINTR) continue;
        throw ModelError("model process is not accepting input: " + std::string(std::strerror(errno)));
      }
      p += n;
      left -= static_cast<std::size_t>(n);
    }
  }

  std::string read_line(std::chrono::milliseconds timeout) {
    const auto deadline = Clock::now() + timeout;
    while (true) {
      if (auto pos = buffer_.find('\n'); pos != std::string::npos) {
        std::string line = buffer_.substr(0, pos);
        buffer_.erase(0, pos + 1);
        return line;
      }
      const auto left =
          std::chrono::duration_cast<std::chrono::milliseconds>(deadline - Clock::now()).count();
      if (left <= 0) throw ModelError("timed out waiting for the model process");
      pollfd pfd{out_fd_, POLLIN, 0};
      const int rc = ::poll(&pfd, 1, static_cast<int>(left));
      if (rc < 0) {
        if (errno == EINTR) continue;
        throw ModelError("poll: " + std::string(std::strerror(errno)));
      }
      if (rc == 0) continue;
      char chunk[65536];
      const ssize_t n = ::read(out_fd_, chunk, sizeof chunk);
      if (n < 0) {
        if (errno == EINTR) continue;
        throw ModelError("read: " + std::string(std::strerror(errno)));
      }
      if (n == 0) throw ModelError("model process closed its output (exited?)");
      buffer_.append(chunk, static_cast<std::size_t>(n));
    }
  }

  // Closes stdin, waits up to `grace`, then kills. Returns the exit status
  // (or -1 when it had to be killed).
  int terminate(std::chrono::milliseconds grace) {
    if (pid_ <= 0) return exit_status_;
    if (in_fd_ >= 0) ::close(in_fd_);
    in_fd_ = -1;
    const auto deadline = Clock::now() + grace;
    int status = 0;
    while (true) {
      const pid_t r = ::waitpid(pid_, &status, WNOHANG);
      if (r == pid_) {
        exit_status_ = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
        ::kill(-pid_, SIGKILL);
        break;
      }
      if (r < 0 || Clock::now() >= deadline) {
        ::kill(-pid_, SIGKILL);
        ::waitpid(pid_, &status, 0);
        exit_status_ = -1;
        break;
      }
      std::this_thread::sleep_for(std::chrono::milliseconds(5));
    }
    if (out_fd_ >= 0) ::close(out_fd_);
    out_fd_ = -1;
    pid_ = -1;
    return exit_status_;
  }

 private:
  pid_t pid_ = -1;
  int in_fd_ = -1;
  int out_fd_ = -1;
  int exit_status_ = -1;
  std::string buffer_;
};

json parse_reply(const std::string& line, std::string_view op) {
  json reply;
  try {
    reply = json::parse(line);
  } catch (const json::parse_error&) {
    throw ModelError("malformed reply from model process: '" + line.substr(0, 200) + "'");
  }
  if (!reply.is_object()) throw ModelError("model reply is not a JSON object");
  if (reply.contains("error")) throw ModelError("model process reported: " + reply["error"].dump());
  if (!reply.contains("op") || reply["op"] != op) {
    throw ModelError("model reply has wrong op (expected '" + std::string(op) + "')");
  }
  return reply;
}

class ExternalModel final : public Model {
 public:
  ExternalModel(const std::string& cmd, std::chrono::milliseconds timeout)
      : cmd_(cmd), timeout_(timeout), child_(cmd) {
    child_.write_line(json{{"op", "hello"}}.dump());
    const json reply = parse_reply(child_.read_line(timeout_), "hello");
    if (!reply.contains("m") || !reply["m"].is_number_integer() || reply["m"].get<long long>() < 1) {
      throw ModelError("hello reply lacks a positive integer 'm'");
    }
    m_ = reply["m"].get<std::size_t>();
  }

  ~ExternalModel() override {
    try {
      std::lock_guard lock(mu_);
      child_.write_line(json{{"op", "shutdown"}}.dump());
    } catch (...) {
    }
  }

  std::size_t dim() const override { return m_; }
  std::string describe() const override { return "external: " + cmd_; }

  Vector predict(std::span<const Vector> xs) override {
    std::lock_guard lock(mu_);
    Vector ys;
    ys.reserve(xs.size());
    for (std::size_t start = 0; start < xs.size(); start += kMaxBatch) {
      const std::size_t n = std::min(kMaxBatch, xs.size() - start);
      json req{{"op", "predict"}, {"x", json::array()}};
      for (std::size_t i = 0; i < n; ++i) req["x"].push_back(xs[start + i]);
      try {
        child_.write_line(req.dump());
        const json reply = parse_reply(child_.read_line(timeout_), "predict");
        if (!reply.contains("y") || !reply["y"].is_array()) {
          throw ModelError("predict reply lacks array 'y'");
        }
        const auto& y = reply["y"];
        if (y.size() != n) {
          throw ModelError("predict reply has " + std::to_string(y.size()) + " values for " +
                           std::to_string(n) + " inputs");
        }
        for (const auto& v : y) {
          if (!v.is_number()) throw ModelError("predict reply contains a non-number");
          ys.push_back(v.get<double>());
        }
      } catch (const QueryError&) {
        throw;
      } catch (const ModelError& e) {
        throw QueryError(start, e.what());
      }
    }
    return ys;
  }

 private:
  std::string cmd_;
  std::chrono::milliseconds timeout_;
  ChildProcess child_;
  std::size_t m_ = 0;
  std::mutex mu_;
};

}  // namespace

ModelHandle connect_external(const std::string& cmd, std::chrono::milliseconds timeout,
                             std::optional<std::size_t> expected_dim, bool caching) {
  if (cmd.empty()) throw UsageError("external model command is empty");
  auto model = std::make_shared<ExternalModel>(cmd, timeout);
  if (expected_dim && *expected_dim != model->dim()) {
    throw ModelError("model process reports m=" + std::to_string(model->dim()) + " but data has " +
                     std::to_string(*expected_dim) + " features");
  }
  return ModelHandle(std::move(model), caching);
}

}  // namespace anomattr
