#pragma once

#include <string>

#include "sketchgait/raster.hpp"

namespace sketchgait {

// Command template for an out-of-process edge detector. `{in}` and `{out}`
// are replaced with temp PNG paths before the command runs through /bin/sh.
struct ExternalHookConfig {
    std::string command;
    double timeout_seconds = 60.0;
};

struct CommandResult {
    int exit_code = -1;
    bool timed_out = false;
    std::string output;  // merged stdout + stderr
};

// Runs a shell command, capturing combined output, killing it on timeout.
CommandResult run_command(const std::string& command, double timeout_seconds);

// File-exchange protocol: the masked foreground is written as an 8-bit
// grayscale PNG (its luminance), the hook command is invoked with {in}/{out}
// substituted, and the single-channel PNG it writes is read back rescaled to
// [0,1]. Nonzero exit, timeout, missing or wrong-sized output, and
// non-grayscale output all raise ExternalToolError with captured diagnostics.
SketchMap run_external_detector(const Frame& foreground, const ExternalHookConfig& hook);

}  // namespace sketchgait
