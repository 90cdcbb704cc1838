#include "psqi/tasks.hpp"

#include "psqi/errors.hpp"

#include <cctype>
#include <cerrno>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <string>

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

extern char** environ;

namespace psqi {

namespace {

using clock_type = std::chrono::steady_clock;

struct Pipe {
    int read_fd = -1;
    int write_fd = -1;

    Pipe() {
        int fds[2];
        if (pipe(fds) != 0) {
            throw std::runtime_error("external_classifier: pipe() failed");
        }
        read_fd = fds[0];
        write_fd = fds[1];
    }
    ~Pipe() {
        close_read();
        close_write();
    }
    void close_read() {
        if (read_fd >= 0) { ::close(read_fd); read_fd = -1; }
    }
    void close_write() {
        if (write_fd >= 0) { ::close(write_fd); write_fd = -1; }
    }
};

void set_nonblocking(int fd) {
    const int flags = fcntl(fd, F_GETFL, 0);
    fcntl(fd, F_SETFL, flags | O_NONBLOCK);
}

std::string serialize_window(const Signal& x) {
    std::string payload = "fs=";
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", x.fs_hz);
    payload += buf;
    payload += '\n';
    for (double v : x.samples) {
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        payload += buf;
        payload += '\n';
    }
    return payload;
}

std::string trimmed(const std::string& s) {
    std::size_t lo = 0, hi = s.size();
    while (lo < hi && std::isspace(static_cast<unsigned char>(s[lo]))) ++lo;
    while (hi > lo && std::isspace(static_cast<unsigned char>(s[hi - 1]))) --hi;
    return s.substr(lo, hi - lo);
}

double effective_timeout_s(const ExternalCommandSpec& spec) {
    if (const char* env = std::getenv("PSQI_TIMEOUT_S")) {
        char* end = nullptr;
        const double v = std::strtod(env, &end);
        if (end != env && v > 0.0) return v;
    }
    return spec.timeout_s;
}

[[noreturn]] void fail(const ExternalCommandSpec& spec, const std::string& reason,
                       const std::string& out, const std::string& err) {
    std::string msg = "external classifier failed (" + reason + "): command=\"" + spec.command + "\"";
    if (!out.empty()) msg += " stdout=\"" + trimmed(out) + "\"";
    if (!err.empty()) msg += " stderr=\"" + trimmed(err) + "\"";
    throw ClassifierFailure(msg);
}

} // namespace

BinaryLabel external_classifier(const ExternalCommandSpec& spec, const Signal& x) {
    if (spec.command.empty()) {
        throw std::invalid_argument("external_classifier: empty command");
    }

    Pipe to_child, from_child, err_child;

    posix_spawn_file_actions_t actions;
    posix_spawn_file_actions_init(&actions);
    posix_spawn_file_actions_adddup2(&actions, to_child.read_fd, STDIN_FILENO);
    posix_spawn_file_actions_adddup2(&actions, from_child.write_fd, STDOUT_FILENO);
    posix_spawn_file_actions_adddup2(&actions, err_child.write_fd, STDERR_FILENO);
    posix_spawn_file_actions_addclose(&actions, to_child.write_fd);
    posix_spawn_file_actions_addclose(&actions, from_child.read_fd);
    posix_spawn_file_actions_addclose(&actions, err_child.read_fd);

    const char* argv[] = {"/bin/sh", "-c", spec.command.c_str(), nullptr};
    pid_t pid = -1;
    const int rc = posix_spawn(&pid, "/bin/sh", &actions, nullptr,
                               const_cast<char* const*>(argv), environ);
    posix_spawn_file_actions_destroy(&actions);
    if (rc != 0) {
        throw ClassifierFailure(std::string("external classifier spawn failed: ") + std::strerror(rc));
    }

    to_child.close_read();
    from_child.close_write();
    err_child.close_write();

    // The child must not see SIGPIPE-fed failures from our side.
    signal(SIGPIPE, SIG_IGN);

    const std::string payload = serialize_window(x);
    std::size_t written = 0;
    set_nonblocking(to_child.write_fd);
    set_nonblocking(from_child.read_fd);
    set_nonblocking(err_child.read_fd);

    const auto deadline = clock_type::now() +
                          std::chrono::duration_cast<clock_type::duration>(
                              std::chrono::duration<double>(effective_timeout_s(spec)));

    std::string out, err;
    bool timed_out = false;
    bool write_done = false;

    while (true) {
        const auto now = clock_type::now();
        if (now >= deadline) {
            timed_out = true;
            break;
        }
        pollfd fds[3];
        int nfds = 0;
        int write_slot = -1, out_slot = -1, err_slot = -1;
        if (!write_done && to_child.write_fd >= 0) {
            write_slot = nfds;
            fds[nfds++] = {to_child.write_fd, POLLOUT, 0};
        }
        if (from_child.read_fd >= 0) {
            out_slot = nfds;
            fds[nfds++] = {from_child.read_fd, POLLIN, 0};
        }
        if (err_child.read_fd >= 0) {
            err_slot = nfds;
            fds[nfds++] = {err_child.read_fd, POLLIN, 0};
        }
        if (nfds == 0) break;

        const auto remaining = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - now);
        const int pr = poll(fds, static_cast<nfds_t>(nfds), static_cast<int>(remaining.count()) + 1);
        if (pr < 0) {
            if (errno == EINTR) continue;
            break;
        }
        if (pr == 0) continue;

        if (write_slot >= 0 && (fds[write_slot].revents & (POLLOUT | POLLERR | POLLHUP))) {
            const ssize_t n = write(to_child.write_fd, payload.data() + written,
                                    payload.size() - written);
            if (n > 0) {
                written += static_cast<std::size_t>(n);
                if (written == payload.size()) {
                    write_done = true;
                    to_child.close_write();
                }
            } else if (n < 0 && errno != EAGAIN && errno != EWOULDBLOCK) {
                // Child closed stdin early; it may already have its answer.
                write_done = true;
                to_child.close_write();
            }
        }
        char buf[4096];
        if (out_slot >= 0 && (fds[out_slot].revents & (POLLIN | POLLHUP))) {
            const ssize_t n = read(from_child.read_fd, buf, sizeof(buf));
            if (n > 0) out.append(buf, static_cast<std::size_t>(n));
            else if (n == 0 || (n < 0 && errno != EAGAIN)) from_child.close_read();
        }
        if (err_slot >= 0 && (fds[err_slot].revents & (POLLIN | POLLHUP))) {
            const ssize_t n = read(err_child.read_fd, buf, sizeof(buf));
            if (n > 0) err.append(buf, static_cast<std::size_t>(n));
            else if (n == 0 || (n < 0 && errno != EAGAIN)) err_child.close_read();
        }
        if (from_child.read_fd < 0 && err_child.read_fd < 0) break;
    }

    int status = 0;
    if (timed_out) {
        kill(pid, SIGKILL);
        waitpid(pid, &status, 0);
        fail(spec, "timeout", out, err);
    }
    waitpid(pid, &status, 0);

    if (!WIFEXITED(status) || WEXITSTATUS(status) != 0) {
        fail(spec, "nonzero exit status " + std::to_string(WIFEXITED(status) ? WEXITSTATUS(status) : -1),
             out, err);
    }
    const std::string answer = trimmed(out);
    if (answer == "0") return BinaryLabel{0};
    if (answer == "1") return BinaryLabel{1};
    fail(spec, "malformed output", out, err);
}

} // namespace psqi
