#ifndef QUENCHLAB_ERRORS_HPP
#define QUENCHLAB_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace quenchlab {

// Bad configuration file or invalid run parameters. CLI exit code 2.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Non-finite values produced by an integrator or optimizer; the message names
// the step or iteration where the run blew up. CLI exit code 3.
struct DivergenceError : std::runtime_error {
    explicit DivergenceError(const std::string& msg) : std::runtime_error(msg) {}
};

// File-level problems: missing files, bad magic numbers, truncated payloads,
// rows that violate a CSV schema. CLI exit code 4.
struct IoError : std::runtime_error {
    explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace quenchlab

#endif
