#pragma once

#include <algorithm>
#include <cerrno>
#include <cstring>
#include <string>
#include <vector>

#include <sys/select.h>
#include <sys/wait.h>
#include <unistd.h>

#include "msr/error.hpp"

namespace msr {

struct ProcessResult {
    int exit_code = -1;
    std::string out; // raw bytes, binary-safe
    std::string err;
};

// Runs argv[0] with the given arguments and captures stdout/stderr.
// extra_env entries are "KEY=VALUE" strings appended to the environment.
inline ProcessResult run_process(const std::vector<std::string>& argv,
                                 const std::vector<std::string>& extra_env = {},
                                 const std::string& stdin_data = {}) {
    if (argv.empty())
        throw CliInvocationFailure("empty argv");

    int out_pipe[2], err_pipe[2], in_pipe[2];
    if (pipe(out_pipe) != 0 || pipe(err_pipe) != 0 || pipe(in_pipe) != 0)
        throw IoFailure(std::string("pipe: ") + std::strerror(errno));

    pid_t pid = fork();
    if (pid < 0)
        throw IoFailure(std::string("fork: ") + std::strerror(errno));

    if (pid == 0) {
        dup2(in_pipe[0], STDIN_FILENO);
        dup2(out_pipe[1], STDOUT_FILENO);
        dup2(err_pipe[1], STDERR_FILENO);
        for (int fd : {in_pipe[0], in_pipe[1], out_pipe[0], out_pipe[1], err_pipe[0], err_pipe[1]})
            close(fd);

        std::vector<char*> args;
        args.reserve(argv.size() + 1);
        for (const auto& a : argv)
            args.push_back(const_cast<char*>(a.c_str()));
        args.push_back(nullptr);

        for (const auto& kv : extra_env)
            putenv(const_cast<char*>(kv.c_str()));

        execvp(args[0], args.data());
        // exec failed
        const char* msg = "exec failed\n";
        (void)!write(STDERR_FILENO, msg, std::strlen(msg));
        _exit(127);
    }

    close(in_pipe[0]);
    close(out_pipe[1]);
    close(err_pipe[1]);

    if (!stdin_data.empty()) {
        size_t off = 0;
        while (off < stdin_data.size()) {
            ssize_t n = write(in_pipe[1], stdin_data.data() + off, stdin_data.size() - off);
            if (n <= 0)
                break;
            off += static_cast<size_t>(n);
        }
    }
    close(in_pipe[1]);

    ProcessResult res;
    // select loop so a child filling stderr while we read stdout cannot deadlock
    {
        bool out_open = true, err_open = true;
        while (out_open || err_open) {
            fd_set set;
            FD_ZERO(&set);
            int maxfd = -1;
            if (out_open) { FD_SET(out_pipe[0], &set); maxfd = std::max(maxfd, out_pipe[0]); }
            if (err_open) { FD_SET(err_pipe[0], &set); maxfd = std::max(maxfd, err_pipe[0]); }
            if (select(maxfd + 1, &set, nullptr, nullptr, nullptr) < 0) {
                if (errno == EINTR)
                    continue;
                break;
            }
            char buf[65536];
            if (out_open && FD_ISSET(out_pipe[0], &set)) {
                ssize_t n = read(out_pipe[0], buf, sizeof buf);
                if (n > 0) res.out.append(buf, static_cast<size_t>(n));
                else out_open = false;
            }
            if (err_open && FD_ISSET(err_pipe[0], &set)) {
                ssize_t n = read(err_pipe[0], buf, sizeof buf);
                if (n > 0) res.err.append(buf, static_cast<size_t>(n));
                else err_open = false;
            }
        }
    }
    close(out_pipe[0]);
    close(err_pipe[0]);

    int status = 0;
    waitpid(pid, &status, 0);
    if (WIFEXITED(status))
        res.exit_code = WEXITSTATUS(status);
    else if (WIFSIGNALED(status))
        res.exit_code = 128 + WTERMSIG(status);
    return res;
}

} // namespace msr
