#include "sketchgait/hook.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <atomic>
#include <cerrno>
#include <chrono>
#include <cstring>
#include <filesystem>

#include "sketchgait/error.hpp"
#include "sketchgait/png_io.hpp"

namespace sketchgait {

namespace fs = std::filesystem;

CommandResult run_command(const std::string& command, double timeout_seconds) {
    int pipefd[2];
    if (pipe(pipefd) != 0)
        throw ExternalToolError("pipe() failed: " + std::string(std::strerror(errno)));

    const pid_t pid = fork();
    if (pid < 0) {
        close(pipefd[0]);
        close(pipefd[1]);
        throw ExternalToolError("fork() failed: " + std::string(std::strerror(errno)));
    }
    if (pid == 0) {
        // Child: own process group so a timeout kill reaps grandchildren too.
        setpgid(0, 0);
        dup2(pipefd[1], STDOUT_FILENO);
        dup2(pipefd[1], STDERR_FILENO);
        close(pipefd[0]);
        close(pipefd[1]);
        execl("/bin/sh", "sh", "-c", command.c_str(), (char*)nullptr);
        _exit(127);
    }

    close(pipefd[1]);
    CommandResult result;

    const auto deadline =
        std::chrono::steady_clock::now() + std::chrono::duration<double>(timeout_seconds);
    char buf[4096];
    bool open = true;
    while (open) {
        const auto now = std::chrono::steady_clock::now();
        const long remaining_ms =
            std::chrono::duration_cast<std::chrono::milliseconds>(deadline - now).count();
        if (remaining_ms <= 0) {
            result.timed_out = true;
            kill(-pid, SIGKILL);
            break;
        }
        pollfd pfd{pipefd[0], POLLIN, 0};
        const int pr = poll(&pfd, 1, int(std::min(remaining_ms, 200L)));
        if (pr > 0) {
            const ssize_t n = read(pipefd[0], buf, sizeof(buf));
            if (n > 0)
                result.output.append(buf, size_t(n));
            else
                open = false;  // EOF: child closed its end
        }
    }
    // Drain whatever is left after EOF or kill.
    for (;;) {
        const ssize_t n = read(pipefd[0], buf, sizeof(buf));
        if (n <= 0) break;
        result.output.append(buf, size_t(n));
    }
    close(pipefd[0]);

    int status = 0;
    waitpid(pid, &status, 0);
    if (result.timed_out)
        result.exit_code = -1;
    else if (WIFEXITED(status))
        result.exit_code = WEXITSTATUS(status);
    else
        result.exit_code = 128 + (WIFSIGNALED(status) ? WTERMSIG(status) : 0);
    return result;
}

namespace {

std::string substitute(std::string templ, const std::string& key, const std::string& value) {
    for (size_t pos = templ.find(key); pos != std::string::npos; pos = templ.find(key, pos))
        templ.replace(pos, key.size(), value), pos += value.size();
    return templ;
}

std::atomic<unsigned> g_hook_counter{0};

}  // namespace

SketchMap run_external_detector(const Frame& foreground, const ExternalHookConfig& hook) {
    if (hook.command.empty())
        throw ParameterError("external detector: empty command template");

    const unsigned serial = g_hook_counter.fetch_add(1);
    const fs::path dir = fs::temp_directory_path();
    const fs::path in_path =
        dir / ("sketchgait_hook_" + std::to_string(getpid()) + "_" + std::to_string(serial) + "_in.png");
    const fs::path out_path =
        dir / ("sketchgait_hook_" + std::to_string(getpid()) + "_" + std::to_string(serial) + "_out.png");

    write_png_gray(in_path, luminance(foreground));

    std::string cmd = substitute(hook.command, "{in}", in_path.string());
    cmd = substitute(cmd, "{out}", out_path.string());

    struct Cleanup {
        fs::path a, b;
        ~Cleanup() {
            std::error_code ec;
            fs::remove(a, ec);
            fs::remove(b, ec);
        }
    } cleanup{in_path, out_path};

    const CommandResult res = run_command(cmd, hook.timeout_seconds);
    if (res.timed_out)
        throw ExternalToolError("external detector timed out after " +
                                    std::to_string(hook.timeout_seconds) + " s: " + cmd,
                                res.output);
    if (res.exit_code != 0)
        throw ExternalToolError(
            "external detector exited with status " + std::to_string(res.exit_code) + ": " + cmd,
            res.output);
    if (!fs::exists(out_path))
        throw ExternalToolError("external detector produced no output file: " + cmd, res.output);

    GrayImage img;
    try {
        img = read_png_gray(out_path);
    } catch (const DataError& e) {
        throw ExternalToolError(std::string("external detector output unreadable: ") + e.what(),
                                res.output);
    }
    if (img.width != foreground.width || img.height != foreground.height)
        throw ExternalToolError(
            "external detector output is " + std::to_string(img.width) + "x" +
                std::to_string(img.height) + ", expected " + std::to_string(foreground.width) +
                "x" + std::to_string(foreground.height),
            res.output);

    SketchMap out(img.width, img.height);
    out.data = std::move(img.data);  // already rescaled to [0,1]
    return out;
}

}  // namespace sketchgait
