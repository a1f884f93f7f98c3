#pragma once

#include <stdexcept>
#include <string>

namespace sketchgait {

// Bad arguments or violated preconditions. CLI maps this to exit code 1.
class ParameterError : public std::runtime_error {
public:
    explicit ParameterError(const std::string& msg) : std::runtime_error(msg) {}
};

// Invalid or corrupt input data (manifests, containers, rasters). Exit code 2.
class DataError : public std::runtime_error {
public:
    explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

// A configured external command failed. Carries captured diagnostics. Exit code 3.
class ExternalToolError : public std::runtime_error {
public:
    ExternalToolError(const std::string& msg, std::string diagnostics = {})
        : std::runtime_error(diagnostics.empty() ? msg : msg + "\n--- captured output ---\n" + diagnostics),
          diagnostics_(std::move(diagnostics)) {}

    const std::string& diagnostics() const { return diagnostics_; }

private:
    std::string diagnostics_;
};

}  // namespace sketchgait
