#include "jitminer/process.hpp"

#include "jitminer/error.hpp"

#include <array>
#include <cerrno>
#include <csignal>
#include <mutex>
#include <cstring>
#include <set>

#include <fcntl.h>
#include <poll.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

extern char **environ;

namespace jitminer {

namespace {

class Pipe {
public:
  Pipe() {
    if (::pipe2(fds_.data(), O_CLOEXEC) != 0) {
      throw Error(ErrorCode::IoError, std::string("pipe failed: ") + std::strerror(errno));
    }
  }
  Pipe(const Pipe &) = delete;
  Pipe &operator=(const Pipe &) = delete;
  ~Pipe() {
    close_read();
    close_write();
  }

  [[nodiscard]] int read_end() const { return fds_[0]; }
  [[nodiscard]] int write_end() const { return fds_[1]; }
  void close_read() { close_fd(fds_[0]); }
  void close_write() { close_fd(fds_[1]); }

private:
  static void close_fd(int &fd) {
    if (fd >= 0) {
      ::close(fd);
      fd = -1;
    }
  }
  std::array<int, 2> fds_{-1, -1};
};

std::vector<std::string> build_environment(const ProcessOptions &options) {
  std::set<std::string> drop(options.env_unset.begin(), options.env_unset.end());
  for (const auto &[key, value] : options.env_set) {
    drop.insert(key);
  }
  std::vector<std::string> env;
  for (char **entry = environ; entry != nullptr && *entry != nullptr; ++entry) {
    std::string_view kv(*entry);
    auto eq = kv.find('=');
    std::string key(kv.substr(0, eq));
    if (!drop.contains(key)) {
      env.emplace_back(kv);
    }
  }
  for (const auto &[key, value] : options.env_set) {
    env.push_back(key + "=" + value);
  }
  return env;
}

std::vector<char *> as_cstrings(std::vector<std::string> &strings) {
  std::vector<char *> out;
  out.reserve(strings.size() + 1);
  for (auto &s : strings) {
    out.push_back(s.data());
  }
  out.push_back(nullptr);
  return out;
}

} // namespace

ProcessResult run_process(const std::vector<std::string> &argv, const ProcessOptions &options) {
  if (argv.empty()) {
    throw Error(ErrorCode::IoError, "empty command line");
  }
  // A child that exits before reading all of stdin must not kill us.
  static std::once_flag sigpipe_once;
  std::call_once(sigpipe_once, [] { std::signal(SIGPIPE, SIG_IGN); });

  Pipe in;
  Pipe out;
  Pipe err;

  posix_spawn_file_actions_t actions;
  posix_spawn_file_actions_init(&actions);
  posix_spawn_file_actions_adddup2(&actions, in.read_end(), STDIN_FILENO);
  posix_spawn_file_actions_adddup2(&actions, out.write_end(), STDOUT_FILENO);
  posix_spawn_file_actions_adddup2(&actions, err.write_end(), STDERR_FILENO);

  if (!options.cwd.empty()) {
    posix_spawn_file_actions_addchdir_np(&actions, options.cwd.c_str());
  }

  auto args = argv;
  auto arg_ptrs = as_cstrings(args);
  auto env = build_environment(options);
  auto env_ptrs = as_cstrings(env);

  pid_t pid = 0;
  int rc = ::posix_spawnp(&pid, arg_ptrs[0], &actions, nullptr, arg_ptrs.data(), env_ptrs.data());
  posix_spawn_file_actions_destroy(&actions);
  if (rc != 0) {
    throw Error(ErrorCode::IoError, "cannot start " + argv[0] + ": " + std::strerror(rc));
  }

  in.close_read();
  out.close_write();
  err.close_write();

  ProcessResult result;
  std::size_t written = 0;
  if (options.input.empty()) {
    in.close_write();
  } else {
    ::fcntl(in.write_end(), F_SETFL, ::fcntl(in.write_end(), F_GETFL) | O_NONBLOCK);
  }

  std::array<char, 65536> buffer{};
  bool out_open = true;
  bool err_open = true;
  while (out_open || err_open || in.write_end() >= 0) {
    std::array<pollfd, 3> fds{};
    nfds_t count = 0;
    int out_idx = -1;
    int err_idx = -1;
    int in_idx = -1;
    if (out_open) {
      out_idx = static_cast<int>(count);
      fds[count++] = pollfd{out.read_end(), POLLIN, 0};
    }
    if (err_open) {
      err_idx = static_cast<int>(count);
      fds[count++] = pollfd{err.read_end(), POLLIN, 0};
    }
    if (in.write_end() >= 0) {
      in_idx = static_cast<int>(count);
      fds[count++] = pollfd{in.write_end(), POLLOUT, 0};
    }
    if (::poll(fds.data(), count, -1) < 0) {
      if (errno == EINTR) {
        continue;
      }
      break;
    }
    auto drain = [&](int idx, int fd, std::string &sink, bool &open) {
      if (idx < 0 || fds[idx].revents == 0) {
        return;
      }
      ssize_t n = ::read(fd, buffer.data(), buffer.size());
      if (n > 0) {
        sink.append(buffer.data(), static_cast<std::size_t>(n));
      } else if (n == 0 || (errno != EINTR && errno != EAGAIN)) {
        open = false;
      }
    };
    drain(out_idx, out.read_end(), result.out, out_open);
    drain(err_idx, err.read_end(), result.err, err_open);
    if (in_idx >= 0 && fds[in_idx].revents != 0) {
      if ((fds[in_idx].revents & (POLLERR | POLLHUP)) != 0) {
        in.close_write();
      } else {
        ssize_t n = ::write(in.write_end(), options.input.data() + written,
                            options.input.size() - written);
        if (n > 0) {
          written += static_cast<std::size_t>(n);
        } else if (n < 0 && errno != EINTR && errno != EAGAIN) {
          in.close_write();
        }
        if (written >= options.input.size()) {
          in.close_write();
        }
      }
    }
  }

  int status = 0;
  while (::waitpid(pid, &status, 0) < 0) {
    if (errno != EINTR) {
      throw Error(ErrorCode::IoError, "waitpid failed for " + argv[0]);
    }
  }
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : 128 + WTERMSIG(status);
  return result;
}

} // namespace jitminer
